// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pixie::world {

enum class WorldErrc {
    OutOfBounds,
    NotWalkable,
    NoPath,
    UnknownAvatar,
    UnknownNavPoint,
    DuplicateAvatarId,
};

std::string_view to_string(WorldErrc code);

class WorldError : public std::runtime_error {
public:
    WorldError(WorldErrc code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    WorldErrc code() const noexcept { return code_; }

private:
    WorldErrc code_;
};

/// The world document is not valid JSON or has the wrong shape.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The world document parsed but violates a WorldSpec invariant.
/// field() is a JSON-pointer-like path such as "nav_points[3].x".
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace pixie::world
