// SPDX-License-Identifier: Apache-2.0
#include <pixie/analytics/report.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace pixie::analytics {

namespace fs = std::filesystem;

namespace {

constexpr const char* kAllWorlds = "all";

std::string fmt(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fmt(const std::optional<double>& v, int digits = 6)
{
    return v ? fmt(*v, digits) : "NA";
}

std::string lower(std::string s)
{
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Entropy orderings reported for the human study, per world.
std::optional<std::string> entropy_reference(const std::string& world)
{
    const std::string w = lower(world);
    if (w == "museum")
        return "C (6.49) > B (5.82) > A (5.75)";
    if (w == "ruina")
        return "C (5.57) > B (5.30) > A (4.90)";
    return std::nullopt;
}

} // namespace

Aggregate aggregate(const std::vector<double>& values)
{
    Aggregate a;
    a.n = values.size();
    if (a.n == 0)
        return a;
    a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(a.n);
    if (a.n > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - a.mean) * (v - a.mean);
        a.std = std::sqrt(ss / static_cast<double>(a.n - 1));
    }
    return a;
}

const GroupSummary* MetricReport::group(const std::string& world, const std::string& condition) const
{
    for (const auto& g : groups)
        if (g.world == world && g.condition == condition)
            return &g;
    return nullptr;
}

SessionMetrics compute_metrics(const SessionLog& log, double cell_size_m, std::string file)
{
    SessionMetrics m;
    m.file = std::move(file);
    m.session_id = log.session_id();
    m.world = log.world();
    m.condition = log.condition();
    m.dwell_s = dwell_time(log);
    m.free_exploration_s = free_exploration_time(log);
    try {
        m.entropy = spatial_entropy(heatmap(log, cell_size_m, true)).H;
    } catch (const EmptyHeatmap&) {
        m.entropy.reset();
    }
    m.n_nav_requests = log.nav_requests.size();
    const auto delays = response_delays(log);
    if (!delays.empty())
        m.mean_response_s = aggregate(delays).mean;
    return m;
}

MetricReport build_report(std::vector<SessionMetrics> rows, std::vector<FileError> errors, double cell_size_m)
{
    MetricReport r;
    r.cell_size_m = cell_size_m;
    r.rows = std::move(rows);
    r.errors = std::move(errors);

    std::map<std::pair<std::string, std::string>, std::vector<const SessionMetrics*>> by_group;
    for (const auto& row : r.rows) {
        by_group[{row.world, row.condition}].push_back(&row);
        by_group[{kAllWorlds, row.condition}].push_back(&row);
    }
    std::vector<std::string> worlds;
    for (const auto& [key, members] : by_group) {
        GroupSummary g;
        g.world = key.first;
        g.condition = key.second;
        g.n_sessions = members.size();
        std::vector<double> dwell, fe, ent, nav, resp;
        for (const auto* m : members) {
            dwell.push_back(m->dwell_s);
            if (m->free_exploration_s)
                fe.push_back(*m->free_exploration_s);
            if (m->entropy)
                ent.push_back(*m->entropy);
            nav.push_back(static_cast<double>(m->n_nav_requests));
            if (m->mean_response_s)
                resp.push_back(*m->mean_response_s);
        }
        g.dwell = aggregate(dwell);
        g.free_exploration = aggregate(fe);
        g.entropy = aggregate(ent);
        g.nav_requests = aggregate(nav);
        g.response = aggregate(resp);
        r.groups.push_back(std::move(g));
        if (worlds.empty() || worlds.back() != key.first)
            worlds.push_back(key.first);
    }
    // Per-world blocks first, pooled last.
    std::stable_partition(r.groups.begin(), r.groups.end(), [](const auto& g) { return g.world != kAllWorlds; });
    std::stable_partition(worlds.begin(), worlds.end(), [](const auto& w) { return w != kAllWorlds; });

    auto ratio = [&](const std::string& world, const std::string& metric, const char* num, const char* den) {
        RatioLine line{world, metric, num, den, std::nullopt};
        const auto* a = r.group(world, num);
        const auto* b = r.group(world, den);
        if (a && b) {
            const Aggregate& x = metric == "dwell" ? a->dwell : a->free_exploration;
            const Aggregate& y = metric == "dwell" ? b->dwell : b->free_exploration;
            if (x.n > 0 && y.n > 0 && y.mean > 0)
                line.ratio = x.mean / y.mean;
        }
        r.ratios.push_back(std::move(line));
    };
    for (const auto& w : worlds)
        for (const char* metric : {"dwell", "free_exploration"}) {
            ratio(w, metric, "A", "B");
            ratio(w, metric, "A", "C");
        }
    return r;
}

std::string format_csv(const MetricReport& report)
{
    std::ostringstream out;
    out << "session_id,world,condition,dwell_s,free_exploration_s,entropy_nats,n_nav_requests,mean_response_s,file\n";
    for (const auto& m : report.rows)
        out << m.session_id << ',' << m.world << ',' << m.condition << ',' << fmt(m.dwell_s) << ','
            << fmt(m.free_exploration_s) << ',' << fmt(m.entropy) << ',' << m.n_nav_requests << ','
            << fmt(m.mean_response_s) << ',' << m.file << '\n';
    return out.str();
}

std::string format_summary(const MetricReport& report)
{
    std::ostringstream out;
    out << "Navigation Pixie session metrics\n";
    out << "Sessions come from simulated visitors. They check the pipeline and show directions only.\n";
    out << "Human-study reference values are quoted for comparison and are not expected to be reproduced.\n";
    out << "Logs parsed: " << report.rows.size() << ", errors: " << report.errors.size()
        << ", heatmap cell: " << fmt(report.cell_size_m, 2) << " m, entropy in nats\n";

    auto mean_sd = [](const Aggregate& a) {
        if (a.n == 0)
            return std::string("NA");
        return fmt(a.mean, 2) + " +- " + fmt(a.std, 2);
    };
    auto find_ratio = [&](const std::string& w, const std::string& metric, const std::string& den) {
        for (const auto& r : report.ratios)
            if (r.world == w && r.metric == metric && r.denominator == den)
                return r.ratio;
        return std::optional<double>{};
    };
    auto times = [](const std::optional<double>& v) { return v ? fmt(*v, 2) + "x" : std::string("n/a"); };

    std::string world;
    for (const auto& g : report.groups) {
        if (g.world != world) {
            world = g.world;
            out << "\n== " << (world == kAllWorlds ? std::string("All worlds") : world) << " ==\n";
            out << "cond  n   dwell_s            free_exploration_s  entropy        nav_requests   response_s\n";
        }
        char line[256];
        std::snprintf(line, sizeof line, "%-4s  %-3zu %-18s %-19s %-14s %-14s %s\n", g.condition.c_str(),
            g.n_sessions, mean_sd(g.dwell).c_str(), mean_sd(g.free_exploration).c_str(),
            mean_sd(g.entropy).c_str(), mean_sd(g.nav_requests).c_str(), mean_sd(g.response).c_str());
        out << line;

        const bool last_of_world = &g == &report.groups.back() || (&g + 1)->world != world;
        if (!last_of_world)
            continue;
        out << "Dwell time ratio A/B: " << times(find_ratio(world, "dwell", "B"))
            << ", A/C: " << times(find_ratio(world, "dwell", "C"))
            << "  [human-study reference: A dwelt 1.5-1.7 times longer than B and C]\n";
        out << "Free exploration ratio A/B: " << times(find_ratio(world, "free_exploration", "B"))
            << ", A/C: " << times(find_ratio(world, "free_exploration", "C"))
            << " (not defined without an agent)"
            << "  [human-study reference: A explored freely 3-5 times longer than B and C]\n";

        std::vector<std::pair<double, std::string>> order;
        for (const auto& h : report.groups)
            if (h.world == world && h.entropy.n > 0)
                order.emplace_back(h.entropy.mean, h.condition);
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        out << "Entropy ordering:";
        for (std::size_t i = 0; i < order.size(); ++i)
            out << (i ? " > " : " ") << order[i].second << " (" << fmt(order[i].first, 2) << ")";
        if (const auto ref = entropy_reference(world))
            out << "  [human-study reference: " << *ref << "]";
        out << '\n';
    }

    if (!report.errors.empty()) {
        out << "\n== Errors ==\n";
        for (const auto& e : report.errors)
            out << e.file << ": " << e.message << '\n';
    }
    return out.str();
}

std::vector<fs::path> list_logs(const fs::path& dir)
{
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
        [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

MetricReport summarize(const fs::path& logs, const fs::path& out, const SummarizeOptions& options)
{
    if (!fs::is_directory(logs))
        throw std::runtime_error("log directory not found: " + logs.string());
    const auto files = list_logs(logs);
    fs::create_directories(out);

    struct Slot {
        std::optional<SessionMetrics> row;
        std::optional<FileError> error;
    };
    std::vector<Slot> slots(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            const std::string name = files[i].filename().string();
            try {
                const auto log = log::read_file(files[i]);
                slots[i].row = compute_metrics(log, options.cell_size_m, name);
                if (options.heatmaps) {
                    const auto h = heatmap(log, options.cell_size_m, true);
                    write_ppm(h, out / ("heatmap_" + log.session_id() + ".ppm"));
                }
            } catch (const std::exception& e) {
                slots[i].row.reset();
                slots[i].error = FileError{name, e.what()};
            }
        }
    };
    unsigned n = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(1, files.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    std::vector<SessionMetrics> rows;
    std::vector<FileError> errors;
    for (auto& s : slots) {
        if (s.row)
            rows.push_back(std::move(*s.row));
        if (s.error)
            errors.push_back(std::move(*s.error));
    }
    if (rows.empty())
        throw std::runtime_error("no readable session logs in " + logs.string());

    MetricReport report = build_report(std::move(rows), std::move(errors), options.cell_size_m);
    std::ofstream(out / "metrics.csv", std::ios::binary) << format_csv(report);
    std::ofstream(out / "summary.txt", std::ios::binary) << format_summary(report);
    return report;
}

} // namespace pixie::analytics
