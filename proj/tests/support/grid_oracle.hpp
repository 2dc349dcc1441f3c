// SPDX-License-Identifier: Apache-2.0
// Test-only reference implementations for grid search. Kept deliberately
// naive and independent of src/world.
#pragma once

#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pixie::testing {

struct OracleGrid {
    int rows = 0;
    int cols = 0;
    std::vector<std::string> cells; // '#' blocked, '.' open

    bool open(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols && cells[r][c] == '.'; }
};

/// Number of moves on a shortest 4-connected walk, or nullopt if unreachable.
inline std::optional<int> bfs_moves(const OracleGrid& g, int r0, int c0, int r1, int c1)
{
    if (!g.open(r0, c0) || !g.open(r1, c1))
        return std::nullopt;
    std::vector<int> dist(static_cast<std::size_t>(g.rows) * g.cols, -1);
    std::deque<std::pair<int, int>> queue;
    dist[static_cast<std::size_t>(r0) * g.cols + c0] = 0;
    queue.emplace_back(r0, c0);
    const int dr[] = {1, -1, 0, 0};
    const int dc[] = {0, 0, 1, -1};
    while (!queue.empty()) {
        auto [r, c] = queue.front();
        queue.pop_front();
        if (r == r1 && c == c1)
            return dist[static_cast<std::size_t>(r) * g.cols + c];
        for (int k = 0; k < 4; ++k) {
            const int nr = r + dr[k];
            const int nc = c + dc[k];
            if (!g.open(nr, nc))
                continue;
            auto& d = dist[static_cast<std::size_t>(nr) * g.cols + nc];
            if (d < 0) {
                d = dist[static_cast<std::size_t>(r) * g.cols + c] + 1;
                queue.emplace_back(nr, nc);
            }
        }
    }
    return std::nullopt;
}

/// Random grid with roughly `blocked_fraction` of cells blocked.
inline OracleGrid random_grid(std::mt19937_64& rng, int rows, int cols, double blocked_fraction)
{
    OracleGrid g{rows, cols, std::vector<std::string>(rows, std::string(cols, '.'))};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& row : g.cells)
        for (auto& ch : row)
            if (u(rng) < blocked_fraction)
                ch = '#';
    return g;
}

inline std::pair<int, int> random_open_cell(std::mt19937_64& rng, const OracleGrid& g)
{
    std::uniform_int_distribution<int> rr(0, g.rows - 1);
    std::uniform_int_distribution<int> cc(0, g.cols - 1);
    for (;;) {
        const int r = rr(rng);
        const int c = cc(rng);
        if (g.open(r, c))
            return {r, c};
    }
}

} // namespace pixie::testing
