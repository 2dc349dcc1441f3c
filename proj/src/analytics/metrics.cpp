// SPDX-License-Identifier: Apache-2.0
#include <pixie/analytics/metrics.hpp>

#include <algorithm>
#include <deque>

namespace pixie::analytics {

namespace {

void require_times(const SessionLog& log)
{
    if (!(log.exit_t_s >= log.entry_t_s))
        throw MalformedLog("exit precedes entry in " + log.session_id());
}

} // namespace

double dwell_time(const SessionLog& log)
{
    require_times(log);
    return log.exit_t_s - log.entry_t_s;
}

bool has_agent(const SessionLog& log)
{
    if (!log.agent_intervals.empty())
        return true;
    const auto it = log.header.find("agent_id");
    return it != log.header.end() && it->is_string() && log.condition() != "C";
}

std::optional<double> free_exploration_time(const SessionLog& log)
{
    require_times(log);
    if (!has_agent(log))
        return std::nullopt;

    const auto& ivs = log.agent_intervals;
    for (std::size_t i = 1; i < ivs.size(); ++i)
        if (ivs[i].t0_s < ivs[i - 1].t1_s - 1e-9)
            throw MalformedLog("overlapping agent intervals in " + log.session_id());

    std::vector<double> requests;
    for (const auto& n : log.nav_requests)
        requests.push_back(n.t_s);
    std::sort(requests.begin(), requests.end());

    double total = 0.0;
    for (std::size_t i = 0; i < ivs.size(); ++i) {
        if (ivs[i].state != "PerformingAction")
            continue;
        const double arrived = ivs[i].t1_s;
        if (arrived >= log.exit_t_s)
            continue; // still moving when the visitor left
        const auto next = std::lower_bound(requests.begin(), requests.end(), arrived);
        const double end = std::min(next != requests.end() ? *next : log.exit_t_s, log.exit_t_s);
        double start = arrived;
        // Speech that directly follows the arrival still belongs to the guided stop.
        if (i + 1 < ivs.size() && ivs[i + 1].state == "Playback" && ivs[i + 1].t0_s < end)
            start = std::max(start, ivs[i + 1].t1_s);
        total += std::max(0.0, end - start);
    }
    return total;
}

std::vector<double> response_delays(const SessionLog& log)
{
    std::vector<double> out;
    if (!has_agent(log))
        return out;
    const std::string user = log.user_id();
    std::deque<double> asked;
    std::size_t c = 0;
    for (const auto& iv : log.agent_intervals) {
        if (iv.state != "Playback")
            continue;
        while (c < log.chat.size() && log.chat[c].t_s <= iv.t0_s) {
            if (log.chat[c].from == user)
                asked.push_back(log.chat[c].t_s);
            ++c;
        }
        if (asked.empty())
            continue;
        out.push_back(iv.t0_s - asked.front());
        asked.pop_front();
    }
    return out;
}

} // namespace pixie::analytics
