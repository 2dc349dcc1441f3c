// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/world/geometry.hpp>
#include <pixie/world/world_spec.hpp>

#include <vector>

namespace pixie::world {

/// A walk along 4-adjacent walkable cells. `waypoints` is the polyline the
/// avatar follows: its current position, then the centers of cells[1..].
struct Path {
    std::vector<CellIndex> cells;
    std::vector<Position> waypoints;
    double total_length_m = 0.0;
    double progress_m = 0.0;

    double remaining_m() const noexcept { return total_length_m - progress_m; }
    bool finished() const noexcept { return progress_m >= total_length_m; }

    /// Point at arc length `progress_m` along the waypoints.
    Position position_at(double progress) const;
};

/// Nearest walkable cell to `target` by squared Euclidean cell distance,
/// ties by (row, col). Returns `target` itself when already walkable.
/// Throws WorldError(NoPath) if the grid has no walkable cell.
CellIndex snap_to_walkable(const WorldSpec& world, CellIndex target);

/// Shortest 4-connected cell sequence between two walkable cells using A*
/// with a Manhattan heuristic. Neighbours expand in N, E, S, W order (N is
/// row - 1) and equal f-scores pop first-in first-out.
/// Throws WorldError(NoPath) when `to` is not reachable.
std::vector<CellIndex> find_cell_path(const WorldSpec& world, CellIndex from, CellIndex to);

/// Path from `from` to the walkable cell nearest `to`, with the polyline
/// starting at `from`. Throws WorldError(OutOfBounds | NotWalkable | NoPath).
Path find_path(const WorldSpec& world, Position from, Position to);

} // namespace pixie::world
