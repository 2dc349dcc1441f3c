// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pixie::log {

using Json = nlohmann::ordered_json;

struct TrajectorySample {
    double t_s = 0.0;
    std::string avatar_id;
    double x = 0.0;
    double y = 0.0;
};

struct ChatLine {
    double t_s = 0.0;
    std::string from;
    std::string text;
};

struct AgentInterval {
    double t0_s = 0.0;
    double t1_s = 0.0;
    std::string state;
};

struct NavRequest {
    double t_s = 0.0;
    std::string target;
};

/// Everything recorded about one user session. Header keys used by the
/// metrics: session_id, world, condition, user_id, sample_period_s,
/// world_extent {width_m, height_m}.
struct SessionLog {
    Json header = Json::object();
    std::vector<TrajectorySample> trajectory;
    std::vector<ChatLine> chat;
    std::vector<AgentInterval> agent_intervals;
    std::vector<NavRequest> nav_requests;
    double entry_t_s = 0.0;
    double exit_t_s = 0.0;
    std::string exit_reason;

    std::string session_id() const;
    std::string condition() const;
    std::string world() const;
    std::string user_id() const;
    double sample_period_s() const;
};

class MalformedLog : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rounds to 1e-6 so logs stay short and byte-stable.
double round6(double v);

/// JSONL: header, traj*, chat*, nav*, interval*, footer.
void write_jsonl(const SessionLog& log, std::ostream& out);
std::string to_jsonl(const SessionLog& log);
void write_file(const SessionLog& log, const std::filesystem::path& path);

/// Throws MalformedLog naming the offending line.
SessionLog read_jsonl(std::istream& in);
SessionLog read_file(const std::filesystem::path& path);

} // namespace pixie::log
