// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <functional>

namespace pixie::world {

/// Continuous world-frame position in meters, origin at the min corner.
struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

double distance(Position a, Position b);

/// Grid cell address. Row r covers y in [r*cell, (r+1)*cell).
struct CellIndex {
    int row = 0;
    int col = 0;

    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

} // namespace pixie::world

template <>
struct std::hash<pixie::world::CellIndex> {
    std::size_t operator()(const pixie::world::CellIndex& c) const noexcept
    {
        return std::hash<long long>{}((static_cast<long long>(c.row) << 32) ^ static_cast<unsigned>(c.col));
    }
};
