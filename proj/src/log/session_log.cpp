// SPDX-License-Identifier: Apache-2.0
#include <pixie/log/session_log.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace pixie::log {

std::string SessionLog::session_id() const
{
    return header.value("session_id", std::string());
}

std::string SessionLog::condition() const
{
    return header.value("condition", std::string());
}

std::string SessionLog::world() const
{
    return header.value("world", std::string());
}

std::string SessionLog::user_id() const
{
    return header.value("user_id", std::string());
}

double SessionLog::sample_period_s() const
{
    return header.value("sample_period_s", 0.5);
}

double round6(double v)
{
    const double r = std::round(v * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r; // no negative zero
}

void write_jsonl(const SessionLog& log, std::ostream& out)
{
    Json header = log.header;
    header.erase("kind");
    Json first{{"kind", "header"}};
    for (auto it = header.begin(); it != header.end(); ++it)
        first[it.key()] = it.value();
    out << first.dump() << '\n';
    for (const auto& s : log.trajectory)
        out << Json{{"kind", "traj"}, {"t_s", round6(s.t_s)}, {"avatar_id", s.avatar_id}, {"x", round6(s.x)},
                       {"y", round6(s.y)}}
                   .dump()
            << '\n';
    for (const auto& c : log.chat)
        out << Json{{"kind", "chat"}, {"t_s", round6(c.t_s)}, {"from", c.from}, {"text", c.text}}.dump() << '\n';
    for (const auto& n : log.nav_requests)
        out << Json{{"kind", "nav"}, {"t_s", round6(n.t_s)}, {"target", n.target}}.dump() << '\n';
    for (const auto& iv : log.agent_intervals)
        out << Json{{"kind", "interval"}, {"t0_s", round6(iv.t0_s)}, {"t1_s", round6(iv.t1_s)}, {"state", iv.state}}
                   .dump()
            << '\n';
    out << Json{{"kind", "footer"}, {"entry_t_s", round6(log.entry_t_s)}, {"exit_t_s", round6(log.exit_t_s)},
                   {"exit_reason", log.exit_reason}}
               .dump()
        << '\n';
}

std::string to_jsonl(const SessionLog& log)
{
    std::ostringstream out;
    write_jsonl(log, out);
    return out.str();
}

void write_file(const SessionLog& log, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    write_jsonl(log, out);
}

SessionLog read_jsonl(std::istream& in)
{
    SessionLog log;
    bool have_header = false;
    bool have_footer = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            const Json j = Json::parse(line);
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "header") {
                log.header = j;
                log.header.erase("kind");
                have_header = true;
            } else if (kind == "traj") {
                log.trajectory.push_back({j.at("t_s").get<double>(), j.at("avatar_id").get<std::string>(),
                    j.at("x").get<double>(), j.at("y").get<double>()});
            } else if (kind == "chat") {
                log.chat.push_back(
                    {j.at("t_s").get<double>(), j.at("from").get<std::string>(), j.at("text").get<std::string>()});
            } else if (kind == "nav") {
                log.nav_requests.push_back({j.at("t_s").get<double>(), j.at("target").get<std::string>()});
            } else if (kind == "interval") {
                log.agent_intervals.push_back(
                    {j.at("t0_s").get<double>(), j.at("t1_s").get<double>(), j.at("state").get<std::string>()});
            } else if (kind == "footer") {
                log.entry_t_s = j.at("entry_t_s").get<double>();
                log.exit_t_s = j.at("exit_t_s").get<double>();
                log.exit_reason = j.value("exit_reason", std::string());
                have_footer = true;
            } else {
                throw MalformedLog("unknown record kind '" + kind + "'");
            }
        } catch (const Json::exception& e) {
            throw MalformedLog("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const MalformedLog& e) {
            throw MalformedLog("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header)
        throw MalformedLog("missing header record");
    if (!have_footer)
        throw MalformedLog("missing footer record (entry/exit)");
    if (log.exit_t_s < log.entry_t_s)
        throw MalformedLog("exit before entry");
    return log;
}

SessionLog read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw MalformedLog("cannot open " + path.string());
    return read_jsonl(in);
}

} // namespace pixie::log
