// SPDX-License-Identifier: Apache-2.0
#include <pixie/protocol/envelope.hpp>

#include <algorithm>
#include <cmath>

namespace pixie::protocol {

const std::vector<std::string_view>& command_types()
{
    static const std::vector<std::string_view> types{"GetEnvironment", "SetDestination", "GetPathStatus",
        "SetPosition", "SetHeading", "SendChat", "PlayEmote", "SetStatusText", "Join", "Leave", "Subscribe"};
    return types;
}

const std::vector<std::string_view>& event_types()
{
    static const std::vector<std::string_view> types{"UserEntered", "UserExited", "ChatReceived",
        "DestinationReached", "PathBlocked", "EmotePlayed", "TickUpdate"};
    return types;
}

bool is_registered_type(std::string_view type)
{
    const auto& c = command_types();
    const auto& e = event_types();
    return std::find(c.begin(), c.end(), type) != c.end() || std::find(e.begin(), e.end(), type) != e.end() ||
        type == kHello || type == kWelcome || type == kResponse || type == kError;
}

std::string encode(const Envelope& e)
{
    if (!std::isfinite(e.t_s))
        throw std::invalid_argument("envelope t_s must be finite");
    Json j;
    j["v"] = e.v;
    j["id"] = e.id;
    j["t_s"] = e.t_s;
    j["type"] = e.type;
    j["payload"] = e.payload;
    if (e.seq)
        j["seq"] = *e.seq;
    return j.dump();
}

Envelope decode(std::string_view bytes)
{
    Json j;
    try {
        j = Json::parse(bytes.begin(), bytes.end());
    } catch (const Json::parse_error& err) {
        // nlohmann reports the 1-based position of the offending byte.
        throw DecodeError(err.byte > 0 ? err.byte - 1 : 0, err.what());
    }
    const std::size_t end = bytes.size();
    if (!j.is_object())
        throw DecodeError(0, "frame must be a JSON object");

    auto field = [&](const char* key) -> const Json& {
        auto it = j.find(key);
        if (it == j.end())
            throw DecodeError(end, std::string("missing field '") + key + "'");
        return *it;
    };

    Envelope e;
    const Json& v = field("v");
    if (!v.is_number_integer())
        throw DecodeError(end, "field 'v' must be an integer");
    e.v = v.get<int>();
    const Json& id = field("id");
    if (!id.is_string())
        throw DecodeError(end, "field 'id' must be a string");
    e.id = id.get<std::string>();
    const Json& t = field("t_s");
    if (!t.is_number())
        throw DecodeError(end, "field 't_s' must be a number");
    e.t_s = t.get<double>();
    const Json& type = field("type");
    if (!type.is_string())
        throw DecodeError(end, "field 'type' must be a string");
    e.type = type.get<std::string>();
    const Json& payload = field("payload");
    if (!payload.is_object())
        throw DecodeError(end, "field 'payload' must be an object");
    e.payload = payload;
    if (auto it = j.find("seq"); it != j.end()) {
        if (!it->is_number_unsigned())
            throw DecodeError(end, "field 'seq' must be a non-negative integer");
        e.seq = it->get<std::uint64_t>();
    }
    return e;
}

Envelope make_response(const std::string& request_id, double t_s, Json payload)
{
    return Envelope{kProtocolVersion, request_id, t_s, std::string(kResponse), std::move(payload), std::nullopt};
}

Envelope make_error(const std::string& request_id, double t_s, std::string_view code, std::string_view message)
{
    return Envelope{kProtocolVersion, request_id, t_s, std::string(kError),
        Json{{"code", std::string(code)}, {"message", std::string(message)}}, std::nullopt};
}

} // namespace pixie::protocol
