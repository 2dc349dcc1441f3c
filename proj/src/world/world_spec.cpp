// SPDX-License-Identifier: Apache-2.0
#include <pixie/world/errors.hpp>
#include <pixie/world/world_spec.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pixie::world {

using nlohmann::json;

std::string_view to_string(WorldErrc code)
{
    switch (code) {
    case WorldErrc::OutOfBounds: return "out_of_bounds";
    case WorldErrc::NotWalkable: return "not_walkable";
    case WorldErrc::NoPath: return "no_path";
    case WorldErrc::UnknownAvatar: return "unknown_avatar";
    case WorldErrc::UnknownNavPoint: return "unknown_nav_point";
    case WorldErrc::DuplicateAvatarId: return "duplicate_avatar";
    }
    return "unknown";
}

double distance(Position a, Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

int cells_for_extent(double extent_m, double cell_m)
{
    return static_cast<int>(std::ceil(extent_m / cell_m - 1e-9));
}

WorldSpec WorldSpec::from_rows(std::string name, double cell_size_m, const std::vector<std::string>& rows)
{
    WorldSpec w;
    w.name = std::move(name);
    w.cell_size_m = cell_size_m;
    w.rows = static_cast<int>(rows.size());
    w.cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    w.width_m = w.cols * cell_size_m;
    w.height_m = w.rows * cell_size_m;
    w.walkable.assign(static_cast<std::size_t>(w.rows) * w.cols, false);
    for (int r = 0; r < w.rows; ++r)
        for (int c = 0; c < w.cols && c < static_cast<int>(rows[r].size()); ++c)
            w.walkable[w.index_of({r, c})] = rows[r][c] == '.';
    return w;
}

bool WorldSpec::is_walkable(Position p) const
{
    if (p.x < 0 || p.y < 0 || p.x > width_m || p.y > height_m)
        return false;
    return is_walkable(pos_to_cell(*this, p));
}

const NavPoint* WorldSpec::find_nav_point(std::string_view id) const
{
    auto it = std::find_if(nav_points.begin(), nav_points.end(), [&](const NavPoint& p) { return p.id == id; });
    return it == nav_points.end() ? nullptr : &*it;
}

std::vector<std::string> WorldSpec::walkable_rows() const
{
    std::vector<std::string> out(rows, std::string(cols, '#'));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (walkable[index_of({r, c})])
                out[r][c] = '.';
    return out;
}

namespace {

bool inside_extents(const WorldSpec& w, Position p)
{
    return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0 && p.y >= 0 && p.x <= w.width_m && p.y <= w.height_m;
}

} // namespace

void WorldSpec::validate() const
{
    if (!(width_m > 0) || !std::isfinite(width_m))
        throw ValidationError("width_m", "must be > 0");
    if (!(height_m > 0) || !std::isfinite(height_m))
        throw ValidationError("height_m", "must be > 0");
    if (!(cell_size_m > 0) || !std::isfinite(cell_size_m))
        throw ValidationError("cell_size_m", "must be > 0");

    const int want_rows = cells_for_extent(height_m, cell_size_m);
    const int want_cols = cells_for_extent(width_m, cell_size_m);
    if (rows != want_rows)
        throw ValidationError("walkable", "expected " + std::to_string(want_rows) + " rows, got " + std::to_string(rows));
    if (cols != want_cols)
        throw ValidationError("walkable", "expected " + std::to_string(want_cols) + " columns, got " + std::to_string(cols));
    if (walkable.size() != static_cast<std::size_t>(rows) * cols)
        throw ValidationError("walkable", "grid size does not match rows x cols");

    if (!inside_extents(*this, spawn))
        throw ValidationError("spawn", "outside world extents");
    if (!is_walkable(spawn))
        throw ValidationError("spawn", "on an unwalkable cell");

    std::set<std::string> ids;
    for (std::size_t i = 0; i < nav_points.size(); ++i) {
        const auto& p = nav_points[i];
        const std::string field = "nav_points[" + std::to_string(i) + "]";
        if (p.id.empty())
            throw ValidationError(field + ".id", "must be non-empty");
        if (!ids.insert(p.id).second)
            throw ValidationError(field + ".id", "duplicate id '" + p.id + "'");
        if (!inside_extents(*this, p.position))
            throw ValidationError(field, "nav point '" + p.id + "' outside world extents");
        if (!is_walkable(p.position))
            throw ValidationError(field, "nav point '" + p.id + "' on an unwalkable cell");
    }

    std::set<std::string> seen;
    for (std::size_t i = 0; i < fixed_route.size(); ++i) {
        const std::string field = "fixed_route[" + std::to_string(i) + "]";
        if (!ids.count(fixed_route[i]))
            throw ValidationError(field, "unknown nav point '" + fixed_route[i] + "'");
        if (!seen.insert(fixed_route[i]).second)
            throw ValidationError(field, "duplicate route entry '" + fixed_route[i] + "'");
    }
}

namespace {

template <typename T>
T required(const json& obj, const std::string& key, const std::string& path)
{
    if (!obj.contains(key))
        throw ParseError("missing field '" + path + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError("field '" + path + key + "': " + e.what());
    }
}

Position read_position(const json& obj, const std::string& path)
{
    return {required<double>(obj, "x", path), required<double>(obj, "y", path)};
}

} // namespace

WorldSpec load_world(std::string_view document)
{
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed world document: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("world document must be a JSON object");

    WorldSpec w;
    w.name = required<std::string>(doc, "name", "");
    w.width_m = required<double>(doc, "width_m", "");
    w.height_m = required<double>(doc, "height_m", "");
    w.cell_size_m = required<double>(doc, "cell_size_m", "");

    const auto rows = required<std::vector<std::string>>(doc, "walkable", "");
    w.rows = static_cast<int>(rows.size());
    w.cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    w.walkable.assign(static_cast<std::size_t>(w.rows) * w.cols, false);
    for (int r = 0; r < w.rows; ++r) {
        const std::string field = "walkable[" + std::to_string(r) + "]";
        if (static_cast<int>(rows[r].size()) != w.cols)
            throw ValidationError(field, "row length differs from row 0");
        for (int c = 0; c < w.cols; ++c) {
            const char ch = rows[r][c];
            if (ch != '.' && ch != '#')
                throw ValidationError(field, std::string("unexpected character '") + ch + "'");
            w.walkable[w.index_of({r, c})] = ch == '.';
        }
    }

    w.spawn = read_position(required<json>(doc, "spawn", ""), "spawn.");

    const auto points = required<json>(doc, "nav_points", "");
    if (!points.is_array())
        throw ParseError("field 'nav_points' must be an array");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string path = "nav_points[" + std::to_string(i) + "].";
        const auto& p = points[i];
        if (!p.is_object())
            throw ParseError("'" + path + "' must be an object");
        NavPoint np;
        np.id = required<std::string>(p, "id", path);
        np.name = required<std::string>(p, "name", path);
        np.position = read_position(p, path);
        np.description = p.value("description", std::string{});
        w.nav_points.push_back(std::move(np));
    }

    if (doc.contains("fixed_route"))
        w.fixed_route = required<std::vector<std::string>>(doc, "fixed_route", "");
    if (doc.contains("room_metadata"))
        w.room_metadata = required<std::map<std::string, std::string>>(doc, "room_metadata", "");

    w.validate();
    return w;
}

WorldSpec load_world_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open world file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_world(ss.str());
}

std::string dump_world(const WorldSpec& w)
{
    nlohmann::ordered_json doc;
    doc["name"] = w.name;
    doc["width_m"] = w.width_m;
    doc["height_m"] = w.height_m;
    doc["cell_size_m"] = w.cell_size_m;
    doc["walkable"] = w.walkable_rows();
    doc["spawn"] = {{"x", w.spawn.x}, {"y", w.spawn.y}};
    auto points = nlohmann::ordered_json::array();
    for (const auto& p : w.nav_points)
        points.push_back({{"id", p.id}, {"name", p.name}, {"x", p.position.x}, {"y", p.position.y}, {"description", p.description}});
    doc["nav_points"] = std::move(points);
    doc["fixed_route"] = w.fixed_route;
    doc["room_metadata"] = w.room_metadata;
    return doc.dump(2);
}

CellIndex pos_to_cell(const WorldSpec& w, Position p)
{
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0 || p.y < 0 || p.x > w.width_m || p.y > w.height_m) {
        std::ostringstream msg;
        msg << "position (" << p.x << ", " << p.y << ") outside " << w.width_m << " x " << w.height_m;
        throw WorldError(WorldErrc::OutOfBounds, msg.str());
    }
    const int col = std::min(static_cast<int>(std::floor(p.x / w.cell_size_m)), w.cols - 1);
    const int row = std::min(static_cast<int>(std::floor(p.y / w.cell_size_m)), w.rows - 1);
    return {row, col};
}

Position cell_to_pos(const WorldSpec& w, CellIndex c)
{
    if (!w.in_grid(c))
        throw WorldError(WorldErrc::OutOfBounds,
            "cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) + ") outside grid");
    const double x = (c.col + 0.5) * w.cell_size_m;
    const double y = (c.row + 0.5) * w.cell_size_m;
    return {std::min(x, w.width_m), std::min(y, w.height_m)};
}

} // namespace pixie::world
