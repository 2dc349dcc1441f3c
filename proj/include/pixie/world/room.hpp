// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/world/pathfinding.hpp>
#include <pixie/world/world_spec.hpp>

#include <json.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pixie::world {

enum class AvatarKind { User, Agent };

std::string_view to_string(AvatarKind kind);
AvatarKind avatar_kind_from_string(std::string_view s);

struct Avatar {
    std::string id;
    AvatarKind kind = AvatarKind::User;
    Position position;
    double heading = 0.0; // radians, 0 = +x
    double speed_mps = 2.0;
    std::optional<Path> path;
    std::optional<std::string> display_status;
};

enum class EventKind {
    UserEntered,
    UserExited,
    ChatPosted,
    DestinationReached,
    PathBlocked,
    EmotePlayed,
    Tick,
};

std::string_view to_string(EventKind kind);

struct WorldEvent {
    double t_s = 0.0;
    EventKind kind = EventKind::Tick;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();
};

struct PathStatus {
    bool feasible = false;
    double remaining_m = 0.0;
};

/// Either a world position or the id of a navigation point.
using Destination = std::variant<Position, std::string>;

struct RoomOptions {
    double tick_dt_s = 0.1;
    double default_speed_mps = 2.0;
    std::uint64_t seed = 0;
};

/// Live state of one world instance. Not thread-safe: a single owner mutates
/// it, applying commands between ticks.
class RoomInstance {
public:
    explicit RoomInstance(WorldSpec world, RoomOptions options = {});

    const WorldSpec& world() const noexcept { return world_; }
    double clock_s() const noexcept { return static_cast<double>(ticks_) * options_.tick_dt_s; }
    std::uint64_t tick_count() const noexcept { return ticks_; }
    double tick_dt_s() const noexcept { return options_.tick_dt_s; }
    std::uint64_t seed() const noexcept { return options_.seed; }

    const std::map<std::string, Avatar>& avatars() const noexcept { return avatars_; }
    const Avatar& avatar(std::string_view id) const;
    bool has_avatar(std::string_view id) const { return avatars_.find(std::string(id)) != avatars_.end(); }

    /// Adds the avatar; a non-finite speed or non-positive speed falls back to
    /// the room default. Throws DuplicateAvatarId, OutOfBounds, NotWalkable.
    void join(Avatar avatar);
    void leave(std::string_view avatar_id);
    void post_chat(std::string_view avatar_id, std::string_view text);
    void play_emote(std::string_view avatar_id, std::string_view emote);
    void set_status_text(std::string_view avatar_id, std::optional<std::string> text);
    void set_heading(std::string_view avatar_id, double radians);

    /// Teleports the avatar. Any active path is dropped with PathBlocked.
    void set_position(std::string_view avatar_id, Position p);

    /// Plans a path. On success the avatar's path is replaced; otherwise it
    /// is left untouched, feasible = false and PathBlocked is emitted.
    PathStatus set_destination(std::string_view avatar_id, const Destination& target);

    /// Remaining distance of the active path, if any.
    std::optional<PathStatus> path_status(std::string_view avatar_id) const;

    /// Advances one tick and returns every event emitted since the previous
    /// call: queued command events first, then arrivals, then the Tick.
    std::vector<WorldEvent> advance_tick();

    /// Events queued by commands since the last advance_tick.
    const std::deque<WorldEvent>& pending_events() const noexcept { return pending_events_; }

private:
    Avatar& mutable_avatar(std::string_view id);
    void emit(EventKind kind, nlohmann::ordered_json payload);

    WorldSpec world_;
    RoomOptions options_;
    std::uint64_t ticks_ = 0;
    std::map<std::string, Avatar> avatars_;
    std::deque<WorldEvent> pending_events_;
};

/// Deterministic text form of an event (used for logs and equality checks).
std::string serialize_event(const WorldEvent& event);

} // namespace pixie::world
