// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/world/geometry.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pixie::world {

struct NavPoint {
    std::string id;
    std::string name;
    Position position;
    std::string description;
};

/// Static description of a world: the walkability grid (navigation mesh)
/// plus named navigation points (navigation data).
class WorldSpec {
public:
    std::string name;
    double width_m = 0.0;
    double height_m = 0.0;
    double cell_size_m = 0.5;
    int rows = 0;
    int cols = 0;
    std::vector<bool> walkable; // row-major, rows * cols
    std::vector<NavPoint> nav_points;
    Position spawn;
    std::vector<std::string> fixed_route;
    std::map<std::string, std::string> room_metadata;

    /// Builds an unvalidated spec from '#'/'.' rows; dimensions come from the strings.
    static WorldSpec from_rows(std::string name, double cell_size_m, const std::vector<std::string>& rows);

    bool in_grid(CellIndex c) const noexcept { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
    bool is_walkable(CellIndex c) const noexcept { return in_grid(c) && walkable[index_of(c)]; }
    bool is_walkable(Position p) const;
    std::size_t index_of(CellIndex c) const noexcept { return static_cast<std::size_t>(c.row) * cols + c.col; }
    CellIndex cell_at(std::size_t index) const noexcept
    {
        return {static_cast<int>(index / cols), static_cast<int>(index % cols)};
    }

    const NavPoint* find_nav_point(std::string_view id) const;

    /// Rows rendered back to '#'/'.' strings.
    std::vector<std::string> walkable_rows() const;

    /// Throws ValidationError on the first violated invariant.
    void validate() const;
};

/// Number of cells needed to cover `extent_m` at `cell_m`, tolerant of
/// floating-point noise (66.0 / 0.5 is 132 cells, not 133).
int cells_for_extent(double extent_m, double cell_m);

/// Parses and validates a world document. Throws ParseError / ValidationError.
WorldSpec load_world(std::string_view document);
WorldSpec load_world_file(const std::filesystem::path& path);

/// Serializes back to the world file format.
std::string dump_world(const WorldSpec& world);

/// Throws WorldError(OutOfBounds) outside [0,width]x[0,height]. Points on the
/// far edge map to the last row/column.
CellIndex pos_to_cell(const WorldSpec& world, Position p);

/// Cell center, clamped to the world extents for partial edge cells.
Position cell_to_pos(const WorldSpec& world, CellIndex c);

} // namespace pixie::world
