// SPDX-License-Identifier: Apache-2.0
#include <pixie/agent/agent_log.hpp>

#include <cmath>
#include <deque>

namespace pixie::agent {

Json input_to_json(const AgentInput& in)
{
    Json j{{"type", std::string(input_name(in))}};
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, input::UserEntered> || std::is_same_v<T, input::UserExited>) {
                j["user_id"] = x.user_id;
            } else if constexpr (std::is_same_v<T, input::UserMessageStart>) {
                j["from"] = x.from;
            } else if constexpr (std::is_same_v<T, input::UserMessageComplete>) {
                j["from"] = x.from;
                j["text"] = x.text;
            } else if constexpr (std::is_same_v<T, input::DecisionReady>) {
                j["turn"] = x.turn;
                j["reply"] = x.reply;
                if (const auto* nav = std::get_if<action::Navigate>(&x.action))
                    j["navigate"] = nav->nav_point_id;
                else if (const auto* emote = std::get_if<action::Emote>(&x.action))
                    j["emote"] = emote->name;
            } else if constexpr (std::is_same_v<T, input::ActionFinished>) {
                j["turn"] = x.turn;
                j["reached"] = x.reached;
            } else {
                j["turn"] = x.turn;
            }
        },
        in);
    return j;
}

Json effect_to_json(const Effect& e)
{
    Json j{{"type", std::string(effect_name(e))}};
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, effect::SetStatusText>) {
                j["text"] = x.text ? Json(*x.text) : Json(nullptr);
            } else if constexpr (std::is_same_v<T, effect::SendChat>) {
                j["text"] = x.text;
            } else if constexpr (std::is_same_v<T, effect::InvokeBackend>) {
                j["turn"] = x.turn;
                j["from"] = x.from;
                j["text"] = x.text;
            } else if constexpr (std::is_same_v<T, effect::SetDestination>) {
                j["nav_point_id"] = x.nav_point_id;
            } else {
                j["emote"] = x.name;
            }
        },
        e);
    return j;
}

void AgentLog::start(double t_s, State initial)
{
    records_.push_back({{"t_s", t_s}, {"state", std::string(to_string(initial))}});
    open_ = StateInterval{t_s, t_s, initial};
}

void AgentLog::input(double t_s, State after, const AgentInput& in)
{
    records_.push_back({{"t_s", t_s}, {"state", std::string(to_string(after))}, {"input", input_to_json(in)}});
}

void AgentLog::effect(double t_s, State current, const Effect& e)
{
    records_.push_back({{"t_s", t_s}, {"state", std::string(to_string(current))}, {"effect", effect_to_json(e)}});
}

void AgentLog::transition(double t_s, State next)
{
    if (open_) {
        if (open_->state == next)
            return;
        open_->t1 = t_s;
        intervals_.push_back(*open_);
    }
    open_ = StateInterval{t_s, t_s, next};
}

void AgentLog::finish(double t_s)
{
    if (!open_)
        return;
    open_->t1 = t_s;
    intervals_.push_back(*open_);
    open_.reset();
}

void AgentLog::write_jsonl(std::ostream& out) const
{
    for (const auto& r : records_)
        out << r.dump() << '\n';
    for (const auto& iv : intervals_)
        out << Json{{"t0", iv.t0}, {"t1", iv.t1}, {"state", std::string(to_string(iv.state))}}.dump() << '\n';
}

std::vector<double> response_latencies(const std::vector<Json>& records)
{
    std::vector<double> out;
    std::deque<double> open_turns;
    std::string prev_state = "Suspend";
    for (const auto& r : records) {
        if (!r.contains("state"))
            continue;
        const auto state = r.at("state").get<std::string>();
        const double t = r.at("t_s").get<double>();
        if (state == "Suspend")
            open_turns.clear();
        if (r.contains("input") && r["input"].at("type") == "UserMessageComplete" && state != "Suspend")
            open_turns.push_back(t);
        if (state == "Playback" && prev_state != "Playback" && !open_turns.empty()) {
            out.push_back(t - open_turns.front());
            open_turns.pop_front();
        }
        prev_state = state;
    }
    return out;
}

ResponseStats measure_response_time(const std::vector<Json>& records)
{
    const auto xs = response_latencies(records);
    if (xs.empty())
        throw NoSamples();
    ResponseStats s;
    s.n = xs.size();
    for (double x : xs)
        s.mean_s += x;
    s.mean_s /= static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs)
            ss += (x - s.mean_s) * (x - s.mean_s);
        s.std_s = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

} // namespace pixie::agent
