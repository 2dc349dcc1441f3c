// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/log/session_log.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace pixie::analytics {

/// Seconds of user dwell per square cell, row-major with row 0 at y = 0.
struct Heatmap {
    std::string world;
    double cell_size_m = 1.0;
    int rows = 0;
    int cols = 0;
    std::vector<double> cells;
    /// Tracked time (exit - entry).
    double total_s = 0.0;
    double excluded_speech_s = 0.0;

    double at(int row, int col) const { return cells[static_cast<std::size_t>(row) * cols + col]; }
    double sum() const;
};

class EmptyHeatmap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Accumulates the user's trajectory samples, one sample period each.
/// Samples inside an agent Playback interval are dropped (and counted in
/// excluded_speech_s) when `exclude_agent_speech` is set. Grid extent comes
/// from the log header's world_extent. Throws MalformedLog.
Heatmap heatmap(const log::SessionLog& log, double cell_size_m = 1.0, bool exclude_agent_speech = true);

/// Sums `factor` x `factor` blocks of cells.
Heatmap coarsen(const Heatmap& h, int factor);

enum class LogBase { E, Two };

struct EntropyResult {
    double H = 0.0;
    int n_nonzero_cells = 0;
    double cell_size_m = 1.0;
    LogBase log_base = LogBase::E;
};

/// Shannon entropy of the dwell distribution over non-zero cells.
/// Throws EmptyHeatmap when no dwell was recorded.
EntropyResult spatial_entropy(const Heatmap& h, LogBase base = LogBase::E);

/// Same, over a bare list of non-negative weights.
EntropyResult entropy_of(const std::vector<double>& weights, LogBase base = LogBase::E);

/// Binary PPM with `scale` pixels per cell. Colour runs linearly from blue
/// (shortest dwell) to red (longest) over log(1 + seconds); empty cells are
/// drawn near-black.
void write_ppm(const Heatmap& h, const std::filesystem::path& path, int scale = 4);

} // namespace pixie::analytics
