// SPDX-License-Identifier: Apache-2.0
#include "../support/grid_oracle.hpp"

#include <pixie/world/errors.hpp>
#include <pixie/world/pathfinding.hpp>
#include <pixie/world/room.hpp>
#include <pixie/world/world_spec.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pixie::world;

namespace {

const std::string kDataDir = PIXIE_DATA_DIR;

WorldSpec open_grid(int rows, int cols, double cell = 1.0)
{
    return WorldSpec::from_rows("open", cell, std::vector<std::string>(rows, std::string(cols, '.')));
}

WorldSpec corridor()
{
    // One walkable row of 11 cells: 10 moves of 1 m from col 0 to col 10.
    return WorldSpec::from_rows("corridor", 1.0, {"#############", "#...........#", "#############"});
}

std::string minimal_world_json(const std::string& nav_x)
{
    return R"({"name":"tiny","width_m":3,"height_m":2,"cell_size_m":1,
        "walkable":["..#","..."],"spawn":{"x":0.5,"y":0.5},
        "nav_points":[{"id":"a","name":"A","x":0.5,"y":1.5,"description":"first"},
                      {"id":"b","name":"B","x":)" +
        nav_x + R"(,"y":0.5,"description":"second"}],
        "fixed_route":["a"],"room_metadata":{"room_name":"Tiny"}})";
}

} // namespace

TEST_CASE("bundled worlds load with the study extents and nav point counts")
{
    const auto museum = load_world_file(kDataDir + "/worlds/museum.world.json");
    CHECK(museum.nav_points.size() == 7);
    CHECK(museum.width_m == doctest::Approx(36.1));
    CHECK(museum.height_m == doctest::Approx(66.0));
    CHECK(museum.rows == 132);
    CHECK(museum.cols == 73);

    const auto ruina = load_world_file(kDataDir + "/worlds/ruina.world.json");
    CHECK(ruina.nav_points.size() == 5);
    CHECK(ruina.width_m == doctest::Approx(37.0));
    CHECK(ruina.height_m == doctest::Approx(51.7));

    for (const auto* w : {&museum, &ruina}) {
        for (const auto& p : w->nav_points)
            CHECK_NOTHROW(find_path(*w, w->spawn, p.position));
    }
}

TEST_CASE("load_world rejects bad documents")
{
    CHECK_NOTHROW(load_world(minimal_world_json("1.5")));

    SUBCASE("nav point on an unwalkable cell names the point")
    {
        try {
            load_world(minimal_world_json("2.5"));
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(e.field() == "nav_points[1]");
            CHECK(std::string(e.what()).find("'b'") != std::string::npos);
        }
    }
    SUBCASE("malformed JSON")
    {
        CHECK_THROWS_AS(load_world("{\"name\": "), ParseError);
    }
    SUBCASE("missing field")
    {
        CHECK_THROWS_AS(load_world(R"({"name":"x"})"), ParseError);
    }
    SUBCASE("grid dimensions inconsistent with extents")
    {
        auto doc = minimal_world_json("1.5");
        doc.replace(doc.find("\"width_m\":3"), 11, "\"width_m\":5");
        CHECK_THROWS_AS(load_world(doc), ValidationError);
    }
    SUBCASE("fixed route referencing an unknown point")
    {
        auto doc = minimal_world_json("1.5");
        doc.replace(doc.find("[\"a\"]"), 5, "[\"a\",\"zz\"]");
        CHECK_THROWS_AS(load_world(doc), ValidationError);
    }
    SUBCASE("duplicate fixed route entry")
    {
        auto doc = minimal_world_json("1.5");
        doc.replace(doc.find("[\"a\"]"), 5, "[\"a\",\"a\"]");
        CHECK_THROWS_AS(load_world(doc), ValidationError);
    }
}

TEST_CASE("dump_world round-trips through load_world")
{
    const auto museum = load_world_file(kDataDir + "/worlds/museum.world.json");
    const auto again = load_world(dump_world(museum));
    CHECK(again.walkable == museum.walkable);
    CHECK(again.nav_points.size() == museum.nav_points.size());
    CHECK(again.fixed_route == museum.fixed_route);
    CHECK(again.room_metadata == museum.room_metadata);
}

TEST_CASE("pos_to_cell and cell_to_pos")
{
    const auto w = open_grid(5, 6);
    CHECK(pos_to_cell(w, {0.4, 0.4}) == CellIndex{0, 0});
    const Position center = cell_to_pos(w, {2, 3});
    CHECK(center.x == 3.5);
    CHECK(center.y == 2.5);
    CHECK_THROWS_AS(pos_to_cell(w, {w.width_m + 1, 0}), WorldError);
    CHECK(pos_to_cell(w, {w.width_m, w.height_m}) == CellIndex{4, 5});

    const auto museum = load_world_file(kDataDir + "/worlds/museum.world.json");
    for (int r = 0; r < museum.rows; ++r)
        for (int c = 0; c < museum.cols; ++c)
            REQUIRE(pos_to_cell(museum, cell_to_pos(museum, {r, c})) == CellIndex{r, c});
}

TEST_CASE("find_path basics")
{
    const auto w = open_grid(3, 3);
    const auto path = find_path(w, {0.5, 0.5}, {2.5, 2.5});
    CHECK(path.cells.size() == 5);
    CHECK(path.total_length_m == doctest::Approx(4.0));

    const auto walled = WorldSpec::from_rows("walled", 1.0, {"..#..", "..#..", "..#.."});
    CHECK_THROWS_AS(find_path(walled, {0.5, 0.5}, {4.5, 0.5}), WorldError);
    try {
        find_path(walled, {0.5, 0.5}, {4.5, 0.5});
    } catch (const WorldError& e) {
        CHECK(e.code() == WorldErrc::NoPath);
    }

    SUBCASE("unwalkable destination snaps to the nearest walkable cell")
    {
        const auto snapped = find_path(walled, {0.5, 1.5}, {2.5, 1.5});
        // (1,1) and (1,3) are both one cell away; row-major order picks (1,1).
        CHECK(snapped.cells.back() == CellIndex{1, 1});
    }
}

TEST_CASE("snap_to_walkable tie-breaks by row then column")
{
    const auto w = WorldSpec::from_rows("snap", 1.0, {"...", ".#.", "..."});
    CHECK(snap_to_walkable(w, {1, 1}) == CellIndex{0, 1});
    CHECK(snap_to_walkable(w, {0, 0}) == CellIndex{0, 0});
}

TEST_CASE("find_path expands N, E, S, W with FIFO ties")
{
    // On an open grid every monotone staircase is optimal; the fixed order
    // pins which one comes out.
    const auto w = open_grid(3, 3);
    const auto cells = find_cell_path(w, {2, 0}, {0, 2});
    const std::vector<CellIndex> expected{{2, 0}, {1, 0}, {0, 0}, {0, 1}, {0, 2}};
    CHECK(cells == expected);
    CHECK(find_cell_path(w, {2, 0}, {0, 2}) == cells);
}

TEST_CASE("find_path matches a BFS oracle on random 64x64 grids")
{
    std::mt19937_64 rng(20240611);
    int found = 0;
    int no_path = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const auto grid = pixie::testing::random_grid(rng, 64, 64, 0.35);
        const auto w = WorldSpec::from_rows("random", 1.0, grid.cells);
        for (int q = 0; q < 5; ++q) {
            const auto [r0, c0] = pixie::testing::random_open_cell(rng, grid);
            const auto [r1, c1] = pixie::testing::random_open_cell(rng, grid);
            const auto oracle = pixie::testing::bfs_moves(grid, r0, c0, r1, c1);
            bool forward_ok = true;
            bool backward_ok = true;
            try {
                const auto cells = find_cell_path(w, {r0, c0}, {r1, c1});
                REQUIRE(oracle.has_value());
                CHECK(static_cast<int>(cells.size()) - 1 == *oracle);
                for (std::size_t i = 1; i < cells.size(); ++i) {
                    CHECK(w.is_walkable(cells[i]));
                    CHECK(std::abs(cells[i].row - cells[i - 1].row) + std::abs(cells[i].col - cells[i - 1].col) == 1);
                }
                ++found;
            } catch (const WorldError& e) {
                CHECK(e.code() == WorldErrc::NoPath);
                CHECK_FALSE(oracle.has_value());
                forward_ok = false;
                ++no_path;
            }
            try {
                find_cell_path(w, {r1, c1}, {r0, c0});
            } catch (const WorldError&) {
                backward_ok = false;
            }
            CHECK(forward_ok == backward_ok);
        }
    }
    CHECK(found > 0);
    CHECK(no_path > 0);
}

TEST_CASE("set_destination reports feasibility and remaining distance")
{
    RoomInstance room(corridor());
    room.join(Avatar{.id = "u1", .position = {1.5, 1.5}});

    const auto status = room.set_destination("u1", Position{11.5, 1.5});
    CHECK(status.feasible);
    CHECK(status.remaining_m == doctest::Approx(10.0));

    SUBCASE("target equal to the current position")
    {
        RoomInstance r2(corridor());
        r2.join(Avatar{.id = "u1", .position = {3.5, 1.5}});
        const auto s = r2.set_destination("u1", Position{3.5, 1.5});
        CHECK(s.feasible);
        CHECK(s.remaining_m == 0.0);
        const auto events = r2.advance_tick();
        int reached = 0;
        for (const auto& e : events)
            reached += e.kind == EventKind::DestinationReached;
        CHECK(reached == 1);
    }

    SUBCASE("unreachable target leaves the path untouched")
    {
        auto w = WorldSpec::from_rows("split", 1.0, {"..#..", "..#.."});
        w.nav_points.push_back(NavPoint{"far", "Far", {4.5, 0.5}, ""});
        RoomInstance r2(w);
        r2.join(Avatar{.id = "u1", .position = {0.5, 0.5}});
        r2.set_destination("u1", Position{1.5, 1.5});
        const auto before = r2.avatar("u1").path->cells;
        const auto s = r2.set_destination("u1", std::string("far"));
        CHECK_FALSE(s.feasible);
        CHECK(r2.avatar("u1").path->cells == before);
        CHECK_THROWS_AS(r2.set_destination("u1", std::string("nope")), WorldError);
        CHECK_THROWS_AS(r2.set_destination("ghost", std::string("far")), WorldError);
    }
}

TEST_CASE("advance_tick kinematics")
{
    RoomInstance room(corridor(), RoomOptions{.tick_dt_s = 0.1});
    room.join(Avatar{.id = "u1", .position = {1.5, 1.5}, .speed_mps = 2.0});
    room.join(Avatar{.id = "idle", .position = {5.5, 1.5}});
    room.set_destination("u1", Position{11.5, 1.5});

    room.advance_tick();
    CHECK(room.avatar("u1").position.x == doctest::Approx(1.7));
    CHECK(room.avatar("idle").position == Position{5.5, 1.5});

    int reached = 0;
    std::uint64_t reached_tick = 0;
    for (int i = 0; i < 100; ++i) {
        for (const auto& e : room.advance_tick()) {
            if (e.kind == EventKind::DestinationReached) {
                ++reached;
                reached_tick = room.tick_count();
                CHECK(e.t_s == doctest::Approx(5.0));
            }
        }
    }
    CHECK(reached == 1);
    CHECK(reached_tick == 50);
    CHECK(room.avatar("u1").position.x == doctest::Approx(11.5));
    CHECK(room.avatar("idle").position == Position{5.5, 1.5});
}

TEST_CASE("presence and chat events")
{
    RoomInstance room(open_grid(4, 4));
    room.join(Avatar{.id = "u1", .position = {0.5, 0.5}});
    room.post_chat("u1", "hello");
    room.play_emote("u1", "wave");
    CHECK_THROWS_AS(room.join(Avatar{.id = "u1", .position = {0.5, 0.5}}), WorldError);
    CHECK_THROWS_AS(room.leave("ghost"), WorldError);
    room.leave("u1");

    const auto events = room.advance_tick();
    REQUIRE(events.size() == 5);
    CHECK(events[0].kind == EventKind::UserEntered);
    CHECK(events[0].payload["id"] == "u1");
    CHECK(events[1].kind == EventKind::ChatPosted);
    CHECK(events[1].payload["from"] == "u1");
    CHECK(events[1].payload["text"] == "hello");
    CHECK(events[2].kind == EventKind::EmotePlayed);
    CHECK(events[3].kind == EventKind::UserExited);
    CHECK(events[4].kind == EventKind::Tick);
}

namespace {

/// Applies a seeded random command stream and returns the serialized event log.
std::vector<std::string> random_session(const WorldSpec& world, std::uint64_t seed, bool check_walkable)
{
    RoomInstance room(world, RoomOptions{.seed = seed});
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> op(0, 9);
    std::uniform_real_distribution<double> ux(0.0, world.width_m);
    std::uniform_real_distribution<double> uy(0.0, world.height_m);
    std::vector<std::string> log;
    double last_t = 0.0;
    int next_id = 0;
    for (int step = 0; step < 400; ++step) {
        const int k = op(rng);
        std::vector<std::string> ids;
        for (const auto& [id, a] : room.avatars())
            ids.push_back(id);
        try {
            if (k == 0 || ids.empty()) {
                room.join(Avatar{.id = "a" + std::to_string(next_id++), .position = world.spawn});
            } else {
                const std::string& id = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)];
                if (k <= 4)
                    room.set_destination(id, Position{ux(rng), uy(rng)});
                else if (k == 5)
                    room.set_position(id, Position{ux(rng), uy(rng)});
                else if (k == 6)
                    room.post_chat(id, "hi " + std::to_string(step));
                else if (k == 7 && ids.size() > 2)
                    room.leave(id);
            }
        } catch (const WorldError&) {
            // unwalkable teleports and the like are rejected; the room stays valid
        }
        for (const auto& e : room.advance_tick()) {
            CHECK(e.t_s >= last_t);
            last_t = e.t_s;
            log.push_back(serialize_event(e));
        }
        if (check_walkable)
            for (const auto& [id, a] : room.avatars())
                REQUIRE(world.is_walkable(a.position));
    }
    return log;
}

} // namespace

TEST_CASE("rooms are deterministic and keep avatars on walkable cells")
{
    const auto museum = load_world_file(kDataDir + "/worlds/museum.world.json");
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto a = random_session(museum, seed, true);
        const auto b = random_session(museum, seed, false);
        CHECK(a == b);
    }
}
