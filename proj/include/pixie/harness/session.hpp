// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/agent/runner.hpp>
#include <pixie/harness/bot.hpp>
#include <pixie/harness/config.hpp>
#include <pixie/log/session_log.hpp>
#include <pixie/protocol/room_host.hpp>

namespace pixie::harness {

/// Loads a world file, mapping any failure to WorldLoadError.
world::WorldSpec load_session_world(const std::filesystem::path& path);

/// Where the agent waits for visitors: one metre east of spawn when walkable.
world::Position agent_post(const world::WorldSpec& world);

/// Lock-step loop: tick the room, pump the agent, pump the visitor, sample
/// positions. Ends when the visitor has left; the cap forces a leave.
/// `agent` is null for sessions without an agent.
log::SessionLog drive_session(protocol::RoomHost& host, agent::AgentRunner* agent, Visitor& visitor,
    const SessionConfig& cfg, log::Json header);

/// Runs one bot session. Throws WorldLoadError, AgentSpawnError, or
/// std::invalid_argument for a bad config.
log::SessionLog run_session(const SessionConfig& cfg);

} // namespace pixie::harness
