// SPDX-License-Identifier: Apache-2.0
// Test-only recomputation of session metrics straight from JSONL text.
// Shares no code with src/analytics or src/log.
#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace pixie::testing {

struct RawLog {
    nlohmann::json header;
    std::vector<nlohmann::json> traj, chat, nav, intervals;
    double entry = 0.0;
    double exit = 0.0;
};

inline RawLog parse_raw(const std::string& text)
{
    RawLog r;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto j = nlohmann::json::parse(line);
        const std::string kind = j["kind"];
        if (kind == "header")
            r.header = j;
        else if (kind == "traj")
            r.traj.push_back(j);
        else if (kind == "chat")
            r.chat.push_back(j);
        else if (kind == "nav")
            r.nav.push_back(j);
        else if (kind == "interval")
            r.intervals.push_back(j);
        else if (kind == "footer") {
            r.entry = j["entry_t_s"];
            r.exit = j["exit_t_s"];
        }
    }
    return r;
}

/// Entropy in nats through base-2 logarithms: ln 2 * sum p log2(1/p).
inline double oracle_entropy_of(const std::vector<double>& w)
{
    long double total = 0;
    for (double x : w)
        total += x;
    long double bits = 0;
    for (double x : w)
        if (x > 0) {
            const long double p = x / total;
            bits += p * std::log2(1.0L / p);
        }
    return static_cast<double>(bits * std::log(2.0L));
}

/// Free exploration by sweeping elementary time slices: a slice counts when
/// it lies after some arrival (and the speech that immediately follows it)
/// and before the first request at or after that arrival.
inline std::optional<double> oracle_free_exploration(const RawLog& r)
{
    if (r.header["condition"] == "C")
        return std::nullopt;
    struct Window {
        double from, to;
    };
    std::vector<double> requests;
    for (const auto& n : r.nav)
        requests.push_back(n["t_s"]);
    std::vector<Window> windows;
    for (std::size_t i = 0; i < r.intervals.size(); ++i) {
        if (r.intervals[i]["state"] != "PerformingAction")
            continue;
        const double arrive = r.intervals[i]["t1_s"];
        if (arrive >= r.exit)
            continue;
        double to = r.exit;
        for (double q : requests)
            if (q >= arrive && q < to)
                to = q;
        double from = arrive;
        if (i + 1 < r.intervals.size() && r.intervals[i + 1]["state"] == "Playback" &&
            double(r.intervals[i + 1]["t0_s"]) < to)
            from = std::max(from, double(r.intervals[i + 1]["t1_s"]));
        windows.push_back({from, to});
    }
    std::set<double> cuts{r.entry, r.exit};
    for (const auto& w : windows) {
        cuts.insert(w.from);
        cuts.insert(w.to);
    }
    const std::vector<double> edges(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double a = edges[k], b = edges[k + 1];
        for (const auto& w : windows)
            if (w.from <= a && b <= w.to) {
                total += b - a;
                break;
            }
    }
    return total;
}

/// User dwell per cell with speech samples removed, then entropy.
inline double oracle_entropy(const RawLog& r, double cell)
{
    const std::string user = r.header["user_id"];
    const double period = r.header["sample_period_s"];
    const double w = r.header["world_extent"]["width_m"];
    const double h = r.header["world_extent"]["height_m"];
    const int cols = static_cast<int>(std::ceil(w / cell - 1e-9));
    const int rows = static_cast<int>(std::ceil(h / cell - 1e-9));
    std::map<std::pair<int, int>, double> dwell;
    for (const auto& s : r.traj) {
        if (s["avatar_id"] != user)
            continue;
        const double t = s["t_s"];
        bool speaking = false;
        for (const auto& iv : r.intervals)
            if (iv["state"] == "Playback" && double(iv["t0_s"]) <= t && t < double(iv["t1_s"]))
                speaking = true;
        if (speaking)
            continue;
        int c = static_cast<int>(double(s["x"]) / cell);
        int rr = static_cast<int>(double(s["y"]) / cell);
        c = std::min(std::max(c, 0), cols - 1);
        rr = std::min(std::max(rr, 0), rows - 1);
        dwell[{rr, c}] += period;
    }
    std::vector<double> weights;
    for (const auto& [k, v] : dwell)
        weights.push_back(v);
    return oracle_entropy_of(weights);
}

} // namespace pixie::testing
