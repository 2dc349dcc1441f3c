// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/agent/state_machine.hpp>

#include <json.hpp>

#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace pixie::agent {

using Json = nlohmann::ordered_json;

struct StateInterval {
    double t0 = 0.0;
    double t1 = 0.0;
    State state = State::Suspend;
};

/// JSONL-able record of the agent loop: one record per consumed input and
/// per emitted effect, plus closed state intervals.
class AgentLog {
public:
    void start(double t_s, State initial);
    void input(double t_s, State after, const AgentInput& in);
    void effect(double t_s, State current, const Effect& e);
    void transition(double t_s, State next);
    /// Closes the open interval.
    void finish(double t_s);

    const std::vector<Json>& records() const noexcept { return records_; }
    const std::vector<StateInterval>& intervals() const noexcept { return intervals_; }
    void write_jsonl(std::ostream& out) const;

private:
    std::vector<Json> records_;
    std::vector<StateInterval> intervals_;
    std::optional<StateInterval> open_;
};

Json input_to_json(const AgentInput& in);
Json effect_to_json(const Effect& e);

class NoSamples : public std::runtime_error {
public:
    NoSamples() : std::runtime_error("no user-turn to playback pairs in log") {}
};

struct ResponseStats {
    double mean_s = 0.0;
    double std_s = 0.0; // sample standard deviation; 0 when n == 1
    std::size_t n = 0;
};

/// Latency from each UserMessageComplete to the Playback entry that answers
/// it, paired first-in first-out. Throws NoSamples.
ResponseStats measure_response_time(const std::vector<Json>& records);
std::vector<double> response_latencies(const std::vector<Json>& records);

} // namespace pixie::agent
