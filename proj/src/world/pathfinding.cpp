// SPDX-License-Identifier: Apache-2.0
#include <pixie/world/errors.hpp>
#include <pixie/world/pathfinding.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <queue>
#include <tuple>

namespace pixie::world {

Position Path::position_at(double progress) const
{
    if (waypoints.empty())
        return {};
    double remaining = std::clamp(progress, 0.0, total_length_m);
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double seg = distance(waypoints[i - 1], waypoints[i]);
        if (remaining <= seg) {
            if (seg <= 0.0)
                return waypoints[i];
            const double t = remaining / seg;
            return {waypoints[i - 1].x + t * (waypoints[i].x - waypoints[i - 1].x),
                waypoints[i - 1].y + t * (waypoints[i].y - waypoints[i - 1].y)};
        }
        remaining -= seg;
    }
    return waypoints.back();
}

CellIndex snap_to_walkable(const WorldSpec& world, CellIndex target)
{
    if (world.is_walkable(target))
        return target;
    std::optional<CellIndex> best;
    long long best_d2 = std::numeric_limits<long long>::max();
    // Row-major scan, so strict < keeps the (row, col)-smallest among ties.
    for (int r = 0; r < world.rows; ++r) {
        for (int c = 0; c < world.cols; ++c) {
            if (!world.walkable[world.index_of({r, c})])
                continue;
            const long long dr = r - target.row;
            const long long dc = c - target.col;
            const long long d2 = dr * dr + dc * dc;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = CellIndex{r, c};
            }
        }
    }
    if (!best)
        throw WorldError(WorldErrc::NoPath, "world has no walkable cell");
    return *best;
}

std::vector<CellIndex> find_cell_path(const WorldSpec& world, CellIndex from, CellIndex to)
{
    if (!world.in_grid(from) || !world.in_grid(to))
        throw WorldError(WorldErrc::OutOfBounds, "path endpoint outside grid");
    if (!world.is_walkable(from) || !world.is_walkable(to))
        throw WorldError(WorldErrc::NotWalkable, "path endpoint on an unwalkable cell");

    const std::size_t n = world.walkable.size();
    constexpr int kUnset = std::numeric_limits<int>::max();
    std::vector<int> g(n, kUnset);
    std::vector<std::int64_t> parent(n, -1);
    std::vector<bool> closed(n, false);

    auto heuristic = [&](CellIndex c) { return std::abs(c.row - to.row) + std::abs(c.col - to.col); };

    // (f, insertion order, cell). Min-heap; equal f pops in insertion order.
    using Entry = std::tuple<int, std::uint64_t, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    std::uint64_t order = 0;

    const std::size_t start = world.index_of(from);
    const std::size_t goal = world.index_of(to);
    g[start] = 0;
    open.emplace(heuristic(from), order++, start);

    static constexpr std::array<std::pair<int, int>, 4> kSteps{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};

    while (!open.empty()) {
        const auto [f, seq, idx] = open.top();
        open.pop();
        if (closed[idx])
            continue;
        if (idx == goal)
            break;
        closed[idx] = true;
        const CellIndex cur = world.cell_at(idx);
        for (const auto& [dr, dc] : kSteps) {
            const CellIndex next{cur.row + dr, cur.col + dc};
            if (!world.is_walkable(next))
                continue;
            const std::size_t ni = world.index_of(next);
            if (closed[ni])
                continue;
            const int tentative = g[idx] + 1;
            if (tentative < g[ni]) {
                g[ni] = tentative;
                parent[ni] = static_cast<std::int64_t>(idx);
                open.emplace(tentative + heuristic(next), order++, ni);
            }
        }
    }

    if (g[goal] == kUnset)
        throw WorldError(WorldErrc::NoPath,
            "no path from (" + std::to_string(from.row) + ", " + std::to_string(from.col) + ") to (" +
                std::to_string(to.row) + ", " + std::to_string(to.col) + ")");

    std::vector<CellIndex> cells;
    for (std::int64_t at = static_cast<std::int64_t>(goal); at != -1; at = parent[static_cast<std::size_t>(at)])
        cells.push_back(world.cell_at(static_cast<std::size_t>(at)));
    std::reverse(cells.begin(), cells.end());
    return cells;
}

Path find_path(const WorldSpec& world, Position from, Position to)
{
    const CellIndex start = pos_to_cell(world, from);
    if (!world.is_walkable(start))
        throw WorldError(WorldErrc::NotWalkable, "start position is on an unwalkable cell");
    const CellIndex goal = snap_to_walkable(world, pos_to_cell(world, to));

    Path path;
    path.cells = find_cell_path(world, start, goal);
    path.waypoints.push_back(from);
    for (std::size_t i = 1; i < path.cells.size(); ++i)
        path.waypoints.push_back(cell_to_pos(world, path.cells[i]));
    for (std::size_t i = 1; i < path.waypoints.size(); ++i)
        path.total_length_m += distance(path.waypoints[i - 1], path.waypoints[i]);
    return path;
}

} // namespace pixie::world
