// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/analytics/heatmap.hpp>
#include <pixie/analytics/metrics.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pixie::analytics {

struct SessionMetrics {
    std::string file;
    std::string session_id;
    std::string world;
    std::string condition;
    double dwell_s = 0.0;
    std::optional<double> free_exploration_s;
    std::optional<double> entropy;
    std::size_t n_nav_requests = 0;
    std::optional<double> mean_response_s;
};

/// Mean and sample standard deviation of the values present.
struct Aggregate {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

Aggregate aggregate(const std::vector<double>& values);

struct GroupSummary {
    std::string world;
    std::string condition;
    std::size_t n_sessions = 0;
    Aggregate dwell;
    Aggregate free_exploration;
    Aggregate entropy;
    Aggregate nav_requests;
    Aggregate response;
};

struct RatioLine {
    std::string world;
    std::string metric;
    std::string numerator;
    std::string denominator;
    std::optional<double> ratio;
};

struct FileError {
    std::string file;
    std::string message;
};

struct MetricReport {
    double cell_size_m = 1.0;
    std::vector<SessionMetrics> rows;
    std::vector<GroupSummary> groups; // world, then condition
    std::vector<RatioLine> ratios;
    std::vector<FileError> errors;

    const GroupSummary* group(const std::string& world, const std::string& condition) const;
};

SessionMetrics compute_metrics(const SessionLog& log, double cell_size_m = 1.0, std::string file = {});

/// Groups rows by (world, condition) and derives the A/B and A/C ratios of
/// group means for dwell and free exploration.
MetricReport build_report(std::vector<SessionMetrics> rows, std::vector<FileError> errors = {}, double cell_size_m = 1.0);

/// metrics.csv body. Header:
/// session_id,world,condition,dwell_s,free_exploration_s,entropy_nats,n_nav_requests,mean_response_s,file
/// Missing values are written as NA.
std::string format_csv(const MetricReport& report);
std::string format_summary(const MetricReport& report);

/// *.jsonl files directly inside `dir`, sorted by file name.
std::vector<std::filesystem::path> list_logs(const std::filesystem::path& dir);

struct SummarizeOptions {
    double cell_size_m = 1.0;
    bool heatmaps = true;
    unsigned threads = 0;
};

/// Reads every log in `logs`, writes metrics.csv, summary.txt and one
/// heatmap_<session>.ppm per session into `out`. Unreadable files are
/// reported in the errors section. Throws when no log could be read.
MetricReport summarize(const std::filesystem::path& logs, const std::filesystem::path& out,
    const SummarizeOptions& options = {});

} // namespace pixie::analytics
