// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/world/geometry.hpp>
#include <pixie/world/world_spec.hpp>

#include <json.hpp>

#include <cstddef>
#include <deque>
#include <string>
#include <vector>

namespace pixie::agent {

using Json = nlohmann::ordered_json;

struct UserView {
    std::string id;
    std::string kind;
    world::Position position;
};

struct ChatTurn {
    double t_s = 0.0;
    std::string from;
    std::string text;
};

/// What a decision backend sees about the room at decision time.
struct ObservationContext {
    Json room = Json::object();
    double clock_s = 0.0;
    double elapsed_s = 0.0;
    world::Position agent;
    std::vector<UserView> users;
    std::vector<world::NavPoint> nav_points;
    std::vector<ChatTurn> history;

    const world::NavPoint* find_nav_point(const std::string& id) const;

    /// Keys in the order room, clock_s, elapsed_s, agent, users, nav_points, history.
    Json to_json() const;
};

/// Bounded conversation window, oldest first.
class ChatHistory {
public:
    explicit ChatHistory(std::size_t window = 20) : window_(window) {}

    void add(ChatTurn turn);
    std::vector<ChatTurn> turns() const { return {turns_.begin(), turns_.end()}; }
    std::size_t window() const noexcept { return window_; }

private:
    std::size_t window_;
    std::deque<ChatTurn> turns_;
};

/// Builds the context from a GetEnvironment payload. The agent's own avatar
/// is taken out of the user list and reported as `agent`.
ObservationContext observation_from_snapshot(const Json& snapshot, const std::string& agent_id,
    const ChatHistory& history, double session_start_s);

} // namespace pixie::agent
