// SPDX-License-Identifier: Apache-2.0
#include <pixie/protocol/commands.hpp>
#include <pixie/world/errors.hpp>

#include <algorithm>
#include <cmath>

namespace pixie::protocol {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad_request(const std::string& message)
{
    throw ProtocolError("bad_request", message);
}

std::string str_field(const Json& p, const char* key)
{
    auto it = p.find(key);
    if (it == p.end() || !it->is_string())
        bad_request(std::string("payload field '") + key + "' must be a string");
    return it->get<std::string>();
}

double num_field(const Json& p, const char* key)
{
    auto it = p.find(key);
    if (it == p.end() || !it->is_number())
        bad_request(std::string("payload field '") + key + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v))
        bad_request(std::string("payload field '") + key + "' must be finite");
    return v;
}

Json position_json(world::Position p)
{
    return Json{{"x", p.x}, {"y", p.y}};
}

} // namespace

std::string_view command_type(const Command& command)
{
    return std::visit(overloaded{
                          [](const cmd::GetEnvironment&) { return std::string_view("GetEnvironment"); },
                          [](const cmd::SetDestination&) { return std::string_view("SetDestination"); },
                          [](const cmd::GetPathStatus&) { return std::string_view("GetPathStatus"); },
                          [](const cmd::SetPosition&) { return std::string_view("SetPosition"); },
                          [](const cmd::SetHeading&) { return std::string_view("SetHeading"); },
                          [](const cmd::SendChat&) { return std::string_view("SendChat"); },
                          [](const cmd::PlayEmote&) { return std::string_view("PlayEmote"); },
                          [](const cmd::SetStatusText&) { return std::string_view("SetStatusText"); },
                          [](const cmd::Join&) { return std::string_view("Join"); },
                          [](const cmd::Leave&) { return std::string_view("Leave"); },
                          [](const cmd::Subscribe&) { return std::string_view("Subscribe"); },
                      },
        command);
}

Json command_payload(const Command& command)
{
    return std::visit(overloaded{
                          [](const cmd::GetEnvironment& c) {
                              return c.include_navmesh ? Json{{"include_navmesh", true}} : Json::object();
                          },
                          [](const cmd::SetDestination& c) {
                              Json target = std::holds_alternative<std::string>(c.target)
                                  ? Json{{"nav_point", std::get<std::string>(c.target)}}
                                  : position_json(std::get<world::Position>(c.target));
                              return Json{{"avatar_id", c.avatar_id}, {"target", std::move(target)}};
                          },
                          [](const cmd::GetPathStatus& c) { return Json{{"avatar_id", c.avatar_id}}; },
                          [](const cmd::SetPosition& c) {
                              return Json{{"avatar_id", c.avatar_id}, {"x", c.position.x}, {"y", c.position.y}};
                          },
                          [](const cmd::SetHeading& c) { return Json{{"avatar_id", c.avatar_id}, {"rad", c.radians}}; },
                          [](const cmd::SendChat& c) { return Json{{"from", c.from}, {"text", c.text}}; },
                          [](const cmd::PlayEmote& c) { return Json{{"from", c.from}, {"emote", c.emote}}; },
                          [](const cmd::SetStatusText& c) {
                              return Json{{"avatar_id", c.avatar_id}, {"text", c.text ? Json(*c.text) : Json(nullptr)}};
                          },
                          [](const cmd::Join& c) {
                              Json avatar{{"id", c.id}, {"kind", world::to_string(c.kind)}};
                              if (c.position) {
                                  avatar["x"] = c.position->x;
                                  avatar["y"] = c.position->y;
                              }
                              if (c.speed_mps)
                                  avatar["speed_mps"] = *c.speed_mps;
                              return Json{{"avatar", std::move(avatar)}};
                          },
                          [](const cmd::Leave& c) { return Json{{"avatar_id", c.avatar_id}}; },
                          [](const cmd::Subscribe& c) { return Json{{"topics", c.topics}}; },
                      },
        command);
}

Command parse_command(std::string_view type, const Json& p)
{
    if (!p.is_object())
        bad_request("payload must be an object");
    if (type == "GetEnvironment") {
        cmd::GetEnvironment c;
        if (auto it = p.find("include_navmesh"); it != p.end()) {
            if (!it->is_boolean())
                bad_request("payload field 'include_navmesh' must be a boolean");
            c.include_navmesh = it->get<bool>();
        }
        return c;
    }
    if (type == "SetDestination") {
        cmd::SetDestination c;
        c.avatar_id = str_field(p, "avatar_id");
        auto it = p.find("target");
        if (it == p.end() || !it->is_object())
            bad_request("payload field 'target' must be an object");
        if (it->contains("nav_point"))
            c.target = str_field(*it, "nav_point");
        else
            c.target = world::Position{num_field(*it, "x"), num_field(*it, "y")};
        return c;
    }
    if (type == "GetPathStatus")
        return cmd::GetPathStatus{str_field(p, "avatar_id")};
    if (type == "SetPosition")
        return cmd::SetPosition{str_field(p, "avatar_id"), {num_field(p, "x"), num_field(p, "y")}};
    if (type == "SetHeading")
        return cmd::SetHeading{str_field(p, "avatar_id"), num_field(p, "rad")};
    if (type == "SendChat")
        return cmd::SendChat{str_field(p, "from"), str_field(p, "text")};
    if (type == "PlayEmote")
        return cmd::PlayEmote{str_field(p, "from"), str_field(p, "emote")};
    if (type == "SetStatusText") {
        cmd::SetStatusText c{str_field(p, "avatar_id"), std::nullopt};
        auto it = p.find("text");
        if (it != p.end() && !it->is_null()) {
            if (!it->is_string())
                bad_request("payload field 'text' must be a string or null");
            c.text = it->get<std::string>();
        }
        return c;
    }
    if (type == "Join") {
        auto it = p.find("avatar");
        if (it == p.end() || !it->is_object())
            bad_request("payload field 'avatar' must be an object");
        const Json& a = *it;
        cmd::Join c;
        c.id = str_field(a, "id");
        if (a.contains("kind"))
            c.kind = world::avatar_kind_from_string(str_field(a, "kind"));
        if (a.contains("x") || a.contains("y"))
            c.position = world::Position{num_field(a, "x"), num_field(a, "y")};
        if (a.contains("speed_mps"))
            c.speed_mps = num_field(a, "speed_mps");
        return c;
    }
    if (type == "Leave")
        return cmd::Leave{str_field(p, "avatar_id")};
    if (type == "Subscribe") {
        auto it = p.find("topics");
        if (it == p.end() || !it->is_array())
            bad_request("payload field 'topics' must be an array");
        cmd::Subscribe c;
        for (const auto& t : *it) {
            if (!t.is_string())
                bad_request("topics must be strings");
            c.topics.push_back(t.get<std::string>());
        }
        topic_set(c.topics);
        return c;
    }
    throw ProtocolError("unknown_type", "unknown command type '" + std::string(type) + "'");
}

Json environment_snapshot(const world::RoomInstance& room, bool include_navmesh)
{
    const auto& w = room.world();
    Json meta = Json::object();
    meta["name"] = w.name;
    for (const auto& [k, v] : w.room_metadata)
        meta[k] = v;

    Json points = Json::array();
    for (const auto& p : w.nav_points)
        points.push_back(
            {{"id", p.id}, {"name", p.name}, {"x", p.position.x}, {"y", p.position.y}, {"description", p.description}});

    Json users = Json::array();
    for (const auto& [id, a] : room.avatars())
        users.push_back({{"id", id}, {"kind", world::to_string(a.kind)}, {"x", a.position.x}, {"y", a.position.y}});

    Json snap{{"room", std::move(meta)}, {"clock_s", room.clock_s()}, {"nav_points", std::move(points)},
        {"users", std::move(users)}};
    if (include_navmesh) {
        snap["navmesh"] = {{"width_m", w.width_m}, {"height_m", w.height_m}, {"cell_size_m", w.cell_size_m},
            {"walkable", w.walkable_rows()}, {"spawn", position_json(w.spawn)}};
    }
    return snap;
}

namespace {

Json apply_unchecked(world::RoomInstance& room, const Command& command)
{
    return std::visit(
        overloaded{
            [&](const cmd::GetEnvironment& c) { return environment_snapshot(room, c.include_navmesh); },
            [&](const cmd::SetDestination& c) {
                const auto status = room.set_destination(c.avatar_id, c.target);
                return Json{{"feasible", status.feasible},
                    {"remaining_m", status.feasible ? Json(status.remaining_m) : Json(nullptr)}};
            },
            [&](const cmd::GetPathStatus& c) {
                const auto status = room.path_status(c.avatar_id);
                return Json{{"active", status.has_value()},
                    {"remaining_m", status ? Json(status->remaining_m) : Json(0.0)}};
            },
            [&](const cmd::SetPosition& c) {
                room.set_position(c.avatar_id, c.position);
                return position_json(room.avatar(c.avatar_id).position);
            },
            [&](const cmd::SetHeading& c) {
                room.set_heading(c.avatar_id, c.radians);
                return Json::object();
            },
            [&](const cmd::SendChat& c) {
                room.post_chat(c.from, c.text);
                return Json::object();
            },
            [&](const cmd::PlayEmote& c) {
                room.play_emote(c.from, c.emote);
                return Json::object();
            },
            [&](const cmd::SetStatusText& c) {
                room.set_status_text(c.avatar_id, c.text);
                return Json::object();
            },
            [&](const cmd::Join& c) {
                world::Avatar a;
                a.id = c.id;
                a.kind = c.kind;
                a.position = c.position.value_or(room.world().spawn);
                a.speed_mps = c.speed_mps.value_or(0.0);
                room.join(std::move(a));
                const auto& joined = room.avatar(c.id);
                return Json{{"id", joined.id}, {"x", joined.position.x}, {"y", joined.position.y}};
            },
            [&](const cmd::Leave& c) {
                room.leave(c.avatar_id);
                return Json::object();
            },
            [&](const cmd::Subscribe&) -> Json {
                throw ProtocolError("bad_request", "Subscribe is handled by the connection");
            },
        },
        command);
}

} // namespace

Json apply_command(world::RoomInstance& room, const Command& command)
{
    try {
        return apply_unchecked(room, command);
    } catch (const world::WorldError& e) {
        throw ProtocolError(std::string(world::to_string(e.code())), e.what());
    }
}

std::string_view wire_event_type(world::EventKind kind)
{
    switch (kind) {
    case world::EventKind::UserEntered: return "UserEntered";
    case world::EventKind::UserExited: return "UserExited";
    case world::EventKind::ChatPosted: return "ChatReceived";
    case world::EventKind::DestinationReached: return "DestinationReached";
    case world::EventKind::PathBlocked: return "PathBlocked";
    case world::EventKind::EmotePlayed: return "EmotePlayed";
    case world::EventKind::Tick: return "TickUpdate";
    }
    return "Unknown";
}

Envelope event_envelope(const world::WorldEvent& event, std::uint64_t seq)
{
    return Envelope{kProtocolVersion, "", event.t_s, std::string(wire_event_type(event.kind)), event.payload, seq};
}

std::set<std::string> default_topics()
{
    std::set<std::string> topics;
    for (auto t : event_types())
        if (t != "TickUpdate")
            topics.emplace(t);
    return topics;
}

std::set<std::string> topic_set(const std::vector<std::string>& topics)
{
    std::set<std::string> out;
    const auto& known = event_types();
    for (const auto& t : topics) {
        if (std::find(known.begin(), known.end(), t) == known.end())
            bad_request("unknown topic '" + t + "'");
        out.insert(t);
    }
    return out;
}

} // namespace pixie::protocol
