// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/agent/runner.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pixie::harness {

using Json = nlohmann::ordered_json;

enum class Condition { OnDemand, FixedRoute, Control };

/// Short label used in file names and reports ("A", "B", "C").
std::string_view to_string(Condition c);
std::string_view long_name(Condition c);
/// Accepts "A" / "A_OnDemand" style names (case-insensitive letter).
Condition condition_from_string(std::string_view s);

enum class Experience { Novice, Veteran };

std::string_view to_string(Experience e);
Experience experience_from_string(std::string_view s);

/// Simulated visitor. Time spent in the world is governed by a patience
/// budget that grows when the visitor sees something it cares about.
struct BotPersona {
    std::string tag = "visitor";
    std::uint64_t seed = 0;
    /// Chance per decision step of asking for a guided visit (A) or saying
    /// an acknowledgment (B).
    double ask_rate = 0.7;
    /// Nav point ids the visitor cares about; drawn at random when empty.
    std::vector<std::string> interest_points;
    std::size_t interest_count = 4;
    /// Lognormal dwell at a stop, given as the dwell's own mean and spread.
    double dwell_mean_s = 20.0;
    double dwell_std_s = 12.0;
    double wander_step_m = 5.0;
    Experience experience = Experience::Novice;
    /// Exit policy: leave once this much time has passed without topping up.
    double budget_s = 240.0;
    double guided_interest_s = 150.0;
    double guided_other_s = 40.0;
    double discovery_s = 60.0;
    /// Give up on an unanswered request after this long.
    double request_patience_s = 120.0;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

Json persona_to_json(const BotPersona& p);
/// Missing keys keep their defaults.
BotPersona persona_from_json(const Json& j);

struct SessionConfig {
    std::filesystem::path world;
    Condition condition = Condition::OnDemand;
    BotPersona persona;
    double duration_cap_s = 1800.0;
    double tick_dt_s = 0.1;
    /// Simulated seconds per wall second; <= 0 runs as fast as possible.
    double time_scale = 0.0;
    std::uint64_t seed = 0;
    double sample_period_s = 0.5;
    /// Think time the agent reports when its backend has none of its own.
    double agent_latency_s = 1.2;
    std::string user_id = "visitor";
    std::string agent_id = "pixie";

    void validate() const;
    /// "<world stem>_<condition>_s<seed>".
    std::string session_id() const;
};

Json config_to_json(const SessionConfig& c);
SessionConfig config_from_json(const Json& j);

class WorldLoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AgentSpawnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pixie::harness
