// SPDX-License-Identifier: Apache-2.0
#include <pixie/analytics/heatmap.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace pixie::analytics {

double Heatmap::sum() const
{
    return std::accumulate(cells.begin(), cells.end(), 0.0);
}

namespace {

int cells_for(double extent_m, double cell_m)
{
    // 66.0 / 1.0 must give 66 cells, not 67.
    return std::max(1, static_cast<int>(std::ceil(extent_m / cell_m - 1e-9)));
}

} // namespace

Heatmap heatmap(const log::SessionLog& log, double cell_size_m, bool exclude_agent_speech)
{
    if (!(cell_size_m > 0))
        throw std::invalid_argument("cell size must be positive");
    const auto ext = log.header.find("world_extent");
    if (ext == log.header.end() || !ext->is_object())
        throw log::MalformedLog("header lacks world_extent in " + log.session_id());
    const double width = ext->value("width_m", 0.0);
    const double height = ext->value("height_m", 0.0);
    if (!(width > 0) || !(height > 0))
        throw log::MalformedLog("bad world_extent in " + log.session_id());
    const double period = log.sample_period_s();
    if (!(period > 0))
        throw log::MalformedLog("bad sample period in " + log.session_id());

    Heatmap h;
    h.world = log.world();
    h.cell_size_m = cell_size_m;
    h.cols = cells_for(width, cell_size_m);
    h.rows = cells_for(height, cell_size_m);
    h.cells.assign(static_cast<std::size_t>(h.rows) * h.cols, 0.0);
    h.total_s = log.exit_t_s - log.entry_t_s;

    std::vector<const log::AgentInterval*> speech;
    for (const auto& iv : log.agent_intervals)
        if (iv.state == "Playback")
            speech.push_back(&iv);

    const std::string user = log.user_id();
    std::size_t k = 0; // samples are time-ordered; walk the speech list alongside
    for (const auto& s : log.trajectory) {
        if (s.avatar_id != user)
            continue;
        if (exclude_agent_speech) {
            while (k < speech.size() && speech[k]->t1_s <= s.t_s)
                ++k;
            if (k < speech.size() && speech[k]->t0_s <= s.t_s) {
                h.excluded_speech_s += period;
                continue;
            }
        }
        const int col = std::clamp(static_cast<int>(std::floor(s.x / cell_size_m)), 0, h.cols - 1);
        const int row = std::clamp(static_cast<int>(std::floor(s.y / cell_size_m)), 0, h.rows - 1);
        h.cells[static_cast<std::size_t>(row) * h.cols + col] += period;
    }
    return h;
}

Heatmap coarsen(const Heatmap& h, int factor)
{
    if (factor < 1)
        throw std::invalid_argument("coarsening factor must be >= 1");
    Heatmap out = h;
    out.cell_size_m = h.cell_size_m * factor;
    out.rows = (h.rows + factor - 1) / factor;
    out.cols = (h.cols + factor - 1) / factor;
    out.cells.assign(static_cast<std::size_t>(out.rows) * out.cols, 0.0);
    for (int r = 0; r < h.rows; ++r)
        for (int c = 0; c < h.cols; ++c)
            out.cells[static_cast<std::size_t>(r / factor) * out.cols + c / factor] += h.at(r, c);
    return out;
}

EntropyResult entropy_of(const std::vector<double>& weights, LogBase base)
{
    double total = 0.0;
    EntropyResult r;
    r.log_base = base;
    for (double w : weights) {
        if (w < 0 || !std::isfinite(w))
            throw std::invalid_argument("dwell weights must be finite and non-negative");
        if (w > 0) {
            total += w;
            ++r.n_nonzero_cells;
        }
    }
    if (!(total > 0))
        throw EmptyHeatmap("no dwell recorded");
    double h = 0.0;
    for (double w : weights)
        if (w > 0) {
            const double p = w / total;
            h -= p * std::log(p);
        }
    h = std::max(0.0, h);
    if (base == LogBase::Two)
        h /= std::log(2.0);
    r.H = h;
    return r;
}

EntropyResult spatial_entropy(const Heatmap& h, LogBase base)
{
    EntropyResult r = entropy_of(h.cells, base);
    r.cell_size_m = h.cell_size_m;
    return r;
}

void write_ppm(const Heatmap& h, const std::filesystem::path& path, int scale)
{
    scale = std::max(1, scale);
    const double top = std::log1p(*std::max_element(h.cells.begin(), h.cells.end()));
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "P6\n" << h.cols * scale << ' ' << h.rows * scale << "\n255\n";
    std::vector<unsigned char> line(static_cast<std::size_t>(h.cols) * scale * 3);
    for (int r = 0; r < h.rows; ++r) {
        for (int c = 0; c < h.cols; ++c) {
            const double v = h.at(r, c);
            unsigned char rgb[3] = {24, 24, 24};
            if (v > 0) {
                const double t = top > 0 ? std::log1p(v) / top : 1.0;
                rgb[0] = static_cast<unsigned char>(std::lround(255.0 * t));
                rgb[1] = 0;
                rgb[2] = static_cast<unsigned char>(std::lround(255.0 * (1.0 - t)));
            }
            for (int k = 0; k < scale; ++k)
                std::copy(rgb, rgb + 3, line.begin() + (static_cast<std::size_t>(c) * scale + k) * 3);
        }
        for (int k = 0; k < scale; ++k)
            out.write(reinterpret_cast<const char*>(line.data()), static_cast<std::streamsize>(line.size()));
    }
}

} // namespace pixie::analytics
