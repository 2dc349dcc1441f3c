#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Generates the bundled world files under data/worlds/.

Layouts are hand-authored approximations: the extents and navigation point
counts follow the two study worlds, interior obstacles are made up.
"""

import json
import math
import pathlib
from collections import deque

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "worlds"


class Grid:
    def __init__(self, width_m, height_m, cell):
        self.cell = cell
        self.cols = math.ceil(width_m / cell - 1e-9)
        self.rows = math.ceil(height_m / cell - 1e-9)
        self.cells = [[True] * self.cols for _ in range(self.rows)]
        self.block_rect(0, 0, 0, self.cols - 1)
        self.block_rect(self.rows - 1, 0, self.rows - 1, self.cols - 1)
        self.block_rect(0, 0, self.rows - 1, 0)
        self.block_rect(0, self.cols - 1, self.rows - 1, self.cols - 1)

    def block_rect(self, r0, c0, r1, c1):
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                self.cells[r][c] = False

    def open_rect(self, r0, c0, r1, c1):
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                self.cells[r][c] = True

    def center(self, row, col):
        return round((col + 0.5) * self.cell, 6), round((row + 0.5) * self.cell, 6)

    def rows_as_strings(self):
        return ["".join("." if v else "#" for v in row) for row in self.cells]

    def component(self, start):
        seen = {start}
        queue = deque([start])
        while queue:
            r, c = queue.popleft()
            for dr, dc in ((-1, 0), (0, 1), (1, 0), (0, -1)):
                nr, nc = r + dr, c + dc
                if 0 <= nr < self.rows and 0 <= nc < self.cols and self.cells[nr][nc] and (nr, nc) not in seen:
                    seen.add((nr, nc))
                    queue.append((nr, nc))
        return seen


def build(name, width_m, height_m, grid, spawn_rc, points, route, metadata):
    reachable = grid.component(spawn_rc)
    nav_points = []
    for pid, pname, (r, c), desc in points:
        assert grid.cells[r][c], f"{pid} on blocked cell"
        assert (r, c) in reachable, f"{pid} unreachable from spawn"
        x, y = grid.center(r, c)
        nav_points.append({"id": pid, "name": pname, "x": x, "y": y, "description": desc})
    sx, sy = grid.center(*spawn_rc)
    return {
        "name": name,
        "width_m": width_m,
        "height_m": height_m,
        "cell_size_m": grid.cell,
        "walkable": grid.rows_as_strings(),
        "spawn": {"x": sx, "y": sy},
        "nav_points": nav_points,
        "fixed_route": route,
        "room_metadata": metadata,
    }


def museum():
    g = Grid(36.1, 66.0, 0.5)
    # gallery partitions with doorways
    g.block_rect(44, 0, 44, g.cols - 1)
    g.open_rect(44, 10, 44, 15)
    g.open_rect(44, 57, 44, 62)
    g.block_rect(88, 0, 88, g.cols - 1)
    g.open_rect(88, 33, 88, 39)
    # exhibits
    g.block_rect(20, 8, 22, 30)      # mineral cases
    g.block_rect(20, 44, 22, 64)     # pottery cases
    g.block_rect(6, 50, 8, 64)       # shop counter
    g.block_rect(60, 20, 70, 34)     # fossil platform
    g.block_rect(74, 60, 84, 66)     # butterfly wall
    g.block_rect(100, 50, 106, 56)   # globe plinth
    g.block_rect(112, 14, 122, 24)   # capsule
    points = [
        ("fossil", "Dinosaur Fossil", (72, 27),
         "A towering Tyrannosaurus rex skeleton cast from fossils excavated in Montana, mounted mid-stride."),
        ("globe", "Globe", (109, 53),
         "A giant rotating globe showing ocean currents and the paths of historic voyages."),
        ("minerals", "Mineral Gallery", (25, 18),
         "Glass cases of crystals and gemstones, including a fluorescent rock display."),
        ("pottery", "Ancient Pottery", (25, 54),
         "Hand-built clay vessels from early settlements, decorated with cord-marked patterns."),
        ("capsule", "Space Capsule", (117, 27),
         "A full-size replica of a crewed re-entry capsule with its heat shield exposed."),
        ("butterflies", "Butterfly Collection", (79, 57),
         "A wall of pinned butterflies arranged by continent, with a magnifier station."),
        ("shop", "Museum Shop", (10, 57),
         "Souvenirs, books, and postcards from the current exhibitions."),
    ]
    route = ["minerals", "pottery", "fossil", "globe", "capsule"]
    meta = {"room_name": "Museum", "description": "An indoor exhibition gallery on natural history and science."}
    return build("Museum", 36.1, 66.0, g, (6, 36), points, route, meta)


def ruina():
    g = Grid(37.0, 51.7, 0.5)
    g.block_rect(14, 20, 17, 40)     # counter
    for r in (42, 48, 54, 60):       # terrace tables
        for c in (46, 52, 60, 66):
            g.block_rect(r, c, r + 1, c + 1)
    g.block_rect(60, 30, 66, 36)     # fountain basin
    g.block_rect(70, 8, 90, 12)      # garden planters
    g.block_rect(70, 20, 90, 24)
    g.block_rect(100, 40, 100, 72)   # deck railing
    points = [
        ("counter", "Counter", (19, 30),
         "The cafe counter serving floating-island coffee and cloud-shaped pastries."),
        ("terrace", "Terrace Seating", (51, 56),
         "Open-air tables at the edge of the island where visitors chat over drinks."),
        ("fountain", "Fountain", (68, 33),
         "A fountain whose water falls off the island and turns into mist."),
        ("garden", "Sky Garden", (80, 16),
         "Rows of planters with flowering vines that grow upward into the sky."),
        ("deck", "Observation Deck", (97, 56),
         "A railing-lined lookout with a view over the sea of clouds."),
    ]
    route = ["counter", "terrace", "fountain", "garden"]
    meta = {"room_name": "Ruina", "description": "A sky cafe floating above the clouds with terrace seating and counters."}
    return build("Ruina", 37.0, 51.7, g, (5, 36), points, route, meta)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for fname, world in (("museum.world.json", museum()), ("ruina.world.json", ruina())):
        with open(OUT / fname, "w") as fh:
            json.dump(world, fh, indent=2)
            fh.write("\n")
        print(f"wrote {OUT / fname}: {len(world['walkable'])}x{len(world['walkable'][0])}")


if __name__ == "__main__":
    main()
