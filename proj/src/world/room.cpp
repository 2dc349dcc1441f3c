// SPDX-License-Identifier: Apache-2.0
#include <pixie/world/errors.hpp>
#include <pixie/world/room.hpp>

#include <cmath>

namespace pixie::world {

using nlohmann::ordered_json;

std::string_view to_string(AvatarKind kind)
{
    return kind == AvatarKind::Agent ? "agent" : "user";
}

AvatarKind avatar_kind_from_string(std::string_view s)
{
    return s == "agent" ? AvatarKind::Agent : AvatarKind::User;
}

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::UserEntered: return "UserEntered";
    case EventKind::UserExited: return "UserExited";
    case EventKind::ChatPosted: return "ChatPosted";
    case EventKind::DestinationReached: return "DestinationReached";
    case EventKind::PathBlocked: return "PathBlocked";
    case EventKind::EmotePlayed: return "EmotePlayed";
    case EventKind::Tick: return "Tick";
    }
    return "Unknown";
}

RoomInstance::RoomInstance(WorldSpec world, RoomOptions options)
    : world_(std::move(world)), options_(options)
{
    if (!(options_.tick_dt_s > 0))
        options_.tick_dt_s = 0.1;
    if (!(options_.default_speed_mps > 0))
        options_.default_speed_mps = 2.0;
}

const Avatar& RoomInstance::avatar(std::string_view id) const
{
    auto it = avatars_.find(std::string(id));
    if (it == avatars_.end())
        throw WorldError(WorldErrc::UnknownAvatar, "unknown avatar '" + std::string(id) + "'");
    return it->second;
}

Avatar& RoomInstance::mutable_avatar(std::string_view id)
{
    return const_cast<Avatar&>(std::as_const(*this).avatar(id));
}

void RoomInstance::emit(EventKind kind, ordered_json payload)
{
    pending_events_.push_back(WorldEvent{clock_s(), kind, std::move(payload)});
}

void RoomInstance::join(Avatar avatar)
{
    if (avatar.id.empty())
        throw WorldError(WorldErrc::UnknownAvatar, "avatar id must be non-empty");
    if (has_avatar(avatar.id))
        throw WorldError(WorldErrc::DuplicateAvatarId, "avatar '" + avatar.id + "' already in room");
    if (!world_.is_walkable(pos_to_cell(world_, avatar.position)))
        throw WorldError(WorldErrc::NotWalkable, "join position is on an unwalkable cell");
    if (!(avatar.speed_mps > 0) || !std::isfinite(avatar.speed_mps))
        avatar.speed_mps = options_.default_speed_mps;
    avatar.path.reset();
    emit(EventKind::UserEntered,
        {{"id", avatar.id}, {"kind", to_string(avatar.kind)}, {"x", avatar.position.x}, {"y", avatar.position.y}});
    const std::string id = avatar.id;
    avatars_.emplace(id, std::move(avatar));
}

void RoomInstance::leave(std::string_view avatar_id)
{
    const Avatar& a = avatar(avatar_id);
    emit(EventKind::UserExited, {{"id", a.id}, {"kind", to_string(a.kind)}});
    avatars_.erase(std::string(avatar_id));
}

void RoomInstance::post_chat(std::string_view avatar_id, std::string_view text)
{
    const Avatar& a = avatar(avatar_id);
    emit(EventKind::ChatPosted, {{"from", a.id}, {"text", std::string(text)}});
}

void RoomInstance::play_emote(std::string_view avatar_id, std::string_view emote)
{
    const Avatar& a = avatar(avatar_id);
    emit(EventKind::EmotePlayed, {{"from", a.id}, {"emote", std::string(emote)}});
}

void RoomInstance::set_status_text(std::string_view avatar_id, std::optional<std::string> text)
{
    mutable_avatar(avatar_id).display_status = std::move(text);
}

void RoomInstance::set_heading(std::string_view avatar_id, double radians)
{
    mutable_avatar(avatar_id).heading = std::isfinite(radians) ? radians : 0.0;
}

void RoomInstance::set_position(std::string_view avatar_id, Position p)
{
    Avatar& a = mutable_avatar(avatar_id);
    if (!world_.is_walkable(pos_to_cell(world_, p)))
        throw WorldError(WorldErrc::NotWalkable, "target position is on an unwalkable cell");
    a.position = p;
    if (a.path) {
        a.path.reset();
        emit(EventKind::PathBlocked, {{"avatar_id", a.id}, {"reason", "repositioned"}});
    }
}

PathStatus RoomInstance::set_destination(std::string_view avatar_id, const Destination& target)
{
    Avatar& a = mutable_avatar(avatar_id);
    Position goal;
    if (const auto* id = std::get_if<std::string>(&target)) {
        const NavPoint* np = world_.find_nav_point(*id);
        if (!np)
            throw WorldError(WorldErrc::UnknownNavPoint, "unknown nav point '" + *id + "'");
        goal = np->position;
    } else {
        goal = std::get<Position>(target);
    }

    try {
        Path path = find_path(world_, a.position, goal);
        PathStatus status{true, path.remaining_m()};
        a.path = std::move(path);
        return status;
    } catch (const WorldError& e) {
        if (e.code() != WorldErrc::NoPath)
            throw;
        emit(EventKind::PathBlocked, {{"avatar_id", a.id}, {"reason", "unreachable"}});
        return PathStatus{false, 0.0};
    }
}

std::optional<PathStatus> RoomInstance::path_status(std::string_view avatar_id) const
{
    const Avatar& a = avatar(avatar_id);
    if (!a.path)
        return std::nullopt;
    return PathStatus{true, a.path->remaining_m()};
}

std::vector<WorldEvent> RoomInstance::advance_tick()
{
    std::vector<WorldEvent> out(std::make_move_iterator(pending_events_.begin()),
        std::make_move_iterator(pending_events_.end()));
    pending_events_.clear();

    ++ticks_;
    const double now = clock_s();
    const double dt = options_.tick_dt_s;

    ordered_json tick_avatars = ordered_json::array();
    for (auto& [id, a] : avatars_) {
        if (a.path) {
            Path& path = *a.path;
            const Position before = a.position;
            path.progress_m = std::min(path.progress_m + a.speed_mps * dt, path.total_length_m);
            // Accumulated float steps can land a hair short of the end.
            if (path.total_length_m - path.progress_m < 1e-9)
                path.progress_m = path.total_length_m;
            a.position = path.position_at(path.progress_m);
            if (a.position.x != before.x || a.position.y != before.y)
                a.heading = std::atan2(a.position.y - before.y, a.position.x - before.x);
            if (path.finished()) {
                a.path.reset();
                out.push_back(WorldEvent{now, EventKind::DestinationReached,
                    {{"avatar_id", id}, {"x", a.position.x}, {"y", a.position.y}}});
            }
        }
        ordered_json entry{{"id", id}, {"kind", to_string(a.kind)}, {"x", a.position.x}, {"y", a.position.y},
            {"heading", a.heading}};
        if (a.display_status)
            entry["status"] = *a.display_status;
        tick_avatars.push_back(std::move(entry));
    }
    out.push_back(WorldEvent{now, EventKind::Tick, {{"avatars", std::move(tick_avatars)}}});
    return out;
}

std::string serialize_event(const WorldEvent& event)
{
    ordered_json j{{"t_s", event.t_s}, {"kind", to_string(event.kind)}, {"payload", event.payload}};
    return j.dump();
}

} // namespace pixie::world
