// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pixie::protocol {

using Json = nlohmann::ordered_json;

inline constexpr int kProtocolVersion = 1;

/// One frame on the driver channel. Requests carry a correlation id,
/// responses echo it, events leave it empty and carry a room-wide `seq`.
struct Envelope {
    int v = kProtocolVersion;
    std::string id;
    double t_s = 0.0;
    std::string type;
    Json payload = Json::object();
    std::optional<std::uint64_t> seq;

    friend bool operator==(const Envelope& a, const Envelope& b)
    {
        return a.v == b.v && a.id == b.id && a.t_s == b.t_s && a.type == b.type && a.payload == b.payload &&
            a.seq == b.seq;
    }
};

class DecodeError : public std::runtime_error {
public:
    DecodeError(std::size_t offset, const std::string& message)
        : std::runtime_error("decode error at byte " + std::to_string(offset) + ": " + message), offset_(offset)
    {
    }

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Serializes with keys in the fixed order v, id, t_s, type, payload, seq.
/// Throws std::invalid_argument for a non-finite t_s.
std::string encode(const Envelope& envelope);

/// Parses one frame. Schema violations report the offset of the frame end.
Envelope decode(std::string_view bytes);

// Frame types outside the command and event sets.
inline constexpr std::string_view kHello = "Hello";
inline constexpr std::string_view kWelcome = "Welcome";
inline constexpr std::string_view kResponse = "Response";
inline constexpr std::string_view kError = "Error";

const std::vector<std::string_view>& command_types();
const std::vector<std::string_view>& event_types();
bool is_registered_type(std::string_view type);

Envelope make_response(const std::string& request_id, double t_s, Json payload);
Envelope make_error(const std::string& request_id, double t_s, std::string_view code, std::string_view message);

} // namespace pixie::protocol
