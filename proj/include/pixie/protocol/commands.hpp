// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/protocol/envelope.hpp>
#include <pixie/world/room.hpp>

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pixie::protocol {

namespace cmd {

struct GetEnvironment {
    bool include_navmesh = false;
};
struct SetDestination {
    std::string avatar_id;
    world::Destination target;
};
struct GetPathStatus {
    std::string avatar_id;
};
struct SetPosition {
    std::string avatar_id;
    world::Position position;
};
struct SetHeading {
    std::string avatar_id;
    double radians = 0.0;
};
struct SendChat {
    std::string from;
    std::string text;
};
struct PlayEmote {
    std::string from;
    std::string emote;
};
struct SetStatusText {
    std::string avatar_id;
    std::optional<std::string> text; // nullopt clears the label
};
struct Join {
    std::string id;
    world::AvatarKind kind = world::AvatarKind::User;
    std::optional<world::Position> position; // defaults to the world spawn
    std::optional<double> speed_mps;
};
struct Leave {
    std::string avatar_id;
};
struct Subscribe {
    std::vector<std::string> topics;
};

} // namespace cmd

using Command = std::variant<cmd::GetEnvironment, cmd::SetDestination, cmd::GetPathStatus, cmd::SetPosition,
    cmd::SetHeading, cmd::SendChat, cmd::PlayEmote, cmd::SetStatusText, cmd::Join, cmd::Leave, cmd::Subscribe>;

/// Error carried back to the requester as an Error frame.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code))
    {
    }

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

std::string_view command_type(const Command& command);
Json command_payload(const Command& command);

/// Throws ProtocolError("unknown_type") or ProtocolError("bad_request").
Command parse_command(std::string_view type, const Json& payload);

/// Applies a room command and returns the response payload. Subscribe is
/// connection state and is rejected here. World errors surface as
/// ProtocolError with the matching code (e.g. "unknown_avatar").
Json apply_command(world::RoomInstance& room, const Command& command);

/// Atomic view of the room for GetEnvironment.
Json environment_snapshot(const world::RoomInstance& room, bool include_navmesh = false);

/// Wire form of a room event: ChatPosted becomes ChatReceived and Tick
/// becomes TickUpdate.
Envelope event_envelope(const world::WorldEvent& event, std::uint64_t seq);
std::string_view wire_event_type(world::EventKind kind);

/// Every event type except the high-rate TickUpdate.
std::set<std::string> default_topics();

/// Validates topic names. Throws ProtocolError("bad_request").
std::set<std::string> topic_set(const std::vector<std::string>& topics);

} // namespace pixie::protocol
