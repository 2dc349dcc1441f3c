// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/agent/backend.hpp>
#include <pixie/harness/config.hpp>
#include <pixie/log/session_log.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pixie::harness {

struct FixtureTurn {
    /// Pause after the agent is back in Waiting before speaking.
    double after_s = 2.0;
    std::string say;
    /// Nav point the utterance asks for, when it is a navigation request.
    std::optional<std::string> request;
    /// Scripted agent answer (script backend only).
    std::optional<agent::Decision> agent;
};

/// Timed user utterances plus the event-kind sequence they should produce.
/// Kinds: request, chat (user); reply, filler (agent); navigate, arrived.
struct DialogFixture {
    std::string name;
    std::filesystem::path world;
    std::string backend = "script"; // "script" | "rule"
    double agent_latency_s = 1.2;
    std::vector<FixtureTurn> turns;
    std::vector<std::string> expected;
};

/// World paths resolve against the fixture's directory, then `data_dir`
/// and `data_dir/worlds`.
DialogFixture fixture_from_json(const Json& j, const std::filesystem::path& base_dir = {},
    const std::optional<std::filesystem::path>& data_dir = std::nullopt);
DialogFixture load_fixture(const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& data_dir = std::nullopt);

class FixtureMismatch : public std::runtime_error {
public:
    FixtureMismatch(std::size_t index, std::string expected, std::string actual);

    std::size_t index() const noexcept { return index_; }
    const std::string& expected() const noexcept { return expected_; }
    const std::string& actual() const noexcept { return actual_; }

private:
    std::size_t index_;
    std::string expected_;
    std::string actual_;
};

/// Interaction shape of a log, in time order.
std::vector<std::string> event_kinds(const log::SessionLog& log, std::string_view filler_text = "Thinking...");

struct ReplayOptions {
    double tick_dt_s = 0.1;
    double time_scale = 0.0;
};

struct ReplayResult {
    log::SessionLog log;
    std::vector<std::string> kinds;
};

/// Runs the fixture against an on-demand agent. Throws FixtureMismatch at
/// the first event kind that differs from `expected`.
ReplayResult replay_transcript(const DialogFixture& fixture, const ReplayOptions& options = {});

} // namespace pixie::harness
