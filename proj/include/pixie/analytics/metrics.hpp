// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/log/session_log.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pixie::analytics {

using log::MalformedLog;
using log::SessionLog;

/// Seconds from entry to exit.
double dwell_time(const SessionLog& log);

/// Time the visitor spent on their own after a guided stop: from the
/// agent's arrival (or the end of the speech right after it) to the next
/// navigation request or the exit. Not defined for sessions without an
/// agent (condition C); returns nullopt there.
std::optional<double> free_exploration_time(const SessionLog& log);

/// Delay from each user utterance to the start of the agent's spoken answer,
/// paired first-in first-out. Empty without an agent.
std::vector<double> response_delays(const SessionLog& log);

/// True when the session ran with an agent.
bool has_agent(const SessionLog& log);

} // namespace pixie::analytics
