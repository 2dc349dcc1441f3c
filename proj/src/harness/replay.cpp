// SPDX-License-Identifier: Apache-2.0
#include <pixie/harness/replay.hpp>

#include <pixie/harness/session.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

namespace pixie::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kTurnPatienceS = 120.0;

/// Plays fixture turns one at a time, each once the agent is free again,
/// and follows the agent when it moves.
class ScriptedVisitor final : public Visitor {
public:
    ScriptedVisitor(protocol::DriverPort& port, const DialogFixture& fixture, world::Position entry,
        std::string user_id, std::string agent_id)
        : Visitor(port, std::move(user_id), std::move(agent_id), entry), fixture_(fixture)
    {
    }

protected:
    void after_start(double now_s) override
    {
        // Join and Leave land in the same tick: a zero-length visit.
        if (fixture_.turns.empty())
            leave(now_s, "done");
    }

    void act(double now_s) override
    {
        if (open_) {
            if (turn_done()) {
                end_turn();
                open_ = false;
                free_since_ = now_s;
                if (agent_position_ && std::hypot(agent_position_->x - self_position_.x,
                                           agent_position_->y - self_position_.y) > 2.0)
                    walk_to(*agent_position_);
            } else if (now_s - turn_started_s_ > kTurnPatienceS) {
                leave(now_s, "stalled");
            }
            return;
        }
        if (next_ >= fixture_.turns.size()) {
            leave(now_s, "done");
            return;
        }
        if (!agent_waiting_)
            return;
        if (!free_since_)
            free_since_ = now_s;
        const FixtureTurn& turn = fixture_.turns[next_];
        if (now_s < *free_since_ + turn.after_s)
            return;
        if (turn.request) {
            request(turn.say, *turn.request, now_s);
        } else {
            say(turn.say, now_s);
            begin_turn(now_s);
        }
        open_ = true;
        ++next_;
    }

private:
    const DialogFixture& fixture_;
    std::size_t next_ = 0;
    bool open_ = false;
    std::optional<double> free_since_;
};

fs::path resolve(const fs::path& p, const fs::path& base_dir, const std::optional<fs::path>& data_dir)
{
    if (p.is_absolute() || fs::exists(base_dir / p) || !data_dir)
        return p.is_absolute() ? p : base_dir / p;
    if (fs::exists(*data_dir / p))
        return *data_dir / p;
    return *data_dir / "worlds" / p;
}

} // namespace

FixtureMismatch::FixtureMismatch(std::size_t index, std::string expected, std::string actual)
    : std::runtime_error("fixture mismatch at event " + std::to_string(index) + ": expected '" + expected +
          "', got '" + actual + "'"),
      index_(index), expected_(std::move(expected)), actual_(std::move(actual))
{
}

DialogFixture fixture_from_json(const Json& j, const fs::path& base_dir, const std::optional<fs::path>& data_dir)
{
    DialogFixture f;
    f.name = j.value("name", std::string("fixture"));
    f.world = resolve(j.at("world").get<std::string>(), base_dir, data_dir);
    f.backend = j.value("backend", f.backend);
    if (f.backend != "script" && f.backend != "rule")
        throw std::invalid_argument("fixture backend must be 'script' or 'rule'");
    f.agent_latency_s = j.value("agent_latency_s", f.agent_latency_s);
    for (const auto& t : j.value("turns", Json::array())) {
        FixtureTurn turn;
        turn.after_s = t.value("after_s", turn.after_s);
        turn.say = t.at("say").get<std::string>();
        if (t.contains("request") && !t.at("request").is_null())
            turn.request = t.at("request").get<std::string>();
        if (t.contains("agent"))
            turn.agent = agent::decision_from_json(t.at("agent"));
        else if (f.backend == "script")
            throw std::invalid_argument("script fixture turn without an 'agent' answer: " + turn.say);
        f.turns.push_back(std::move(turn));
    }
    f.expected = j.value("expected", std::vector<std::string>{});
    return f;
}

DialogFixture load_fixture(const fs::path& path, const std::optional<fs::path>& data_dir)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open fixture " + path.string());
    Json j = Json::parse(in);
    if (!j.contains("name"))
        j["name"] = path.filename().string();
    return fixture_from_json(j, path.parent_path(), data_dir);
}

std::vector<std::string> event_kinds(const log::SessionLog& log, std::string_view filler_text)
{
    std::vector<std::tuple<double, int, std::string>> events;
    const std::string user = log.user_id();
    std::size_t next_request = 0;
    for (const auto& c : log.chat) {
        if (c.from == user) {
            bool is_request = false;
            if (next_request < log.nav_requests.size() &&
                std::abs(log.nav_requests[next_request].t_s - c.t_s) < 1e-6) {
                is_request = true;
                ++next_request;
            }
            events.emplace_back(c.t_s, 0, is_request ? "request" : "chat");
        } else {
            events.emplace_back(c.t_s, 1, c.text == filler_text ? "filler" : "reply");
        }
    }
    const auto& ivs = log.agent_intervals;
    for (std::size_t i = 0; i < ivs.size(); ++i) {
        if (ivs[i].state != "PerformingAction")
            continue;
        events.emplace_back(ivs[i].t0_s, 2, "navigate");
        if (i + 1 < ivs.size())
            events.emplace_back(ivs[i].t1_s, 3, "arrived");
    }
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::vector<std::string> kinds;
    for (auto& e : events)
        kinds.push_back(std::move(std::get<2>(e)));
    return kinds;
}

ReplayResult replay_transcript(const DialogFixture& fixture, const ReplayOptions& options)
{
    SessionConfig cfg;
    cfg.world = fixture.world;
    cfg.condition = Condition::OnDemand;
    cfg.tick_dt_s = options.tick_dt_s;
    cfg.time_scale = options.time_scale;
    cfg.agent_latency_s = fixture.agent_latency_s;
    cfg.validate();

    world::RoomOptions room_options;
    room_options.tick_dt_s = cfg.tick_dt_s;
    protocol::RoomHost host{world::RoomInstance(load_session_world(cfg.world), room_options)};
    const world::WorldSpec& spec = host.room().world();

    auto visitor_topics = protocol::default_topics();
    visitor_topics.insert("TickUpdate");
    protocol::LocalDriverPort visitor_port(host, visitor_topics);
    protocol::LocalDriverPort agent_port(host);

    std::unique_ptr<agent::DecisionBackend> backend;
    if (fixture.backend == "script") {
        std::vector<agent::Decision> script;
        for (const auto& t : fixture.turns)
            script.push_back(*t.agent);
        backend = std::make_unique<agent::ScriptBackend>(std::move(script), std::make_unique<agent::RuleBackend>());
    } else {
        backend = std::make_unique<agent::RuleBackend>();
    }

    agent::AgentConfig acfg;
    acfg.agent_id = cfg.agent_id;
    acfg.post = agent_post(spec);
    acfg.simulated_latency_s = cfg.agent_latency_s;
    agent::AgentRunner runner(agent_port, *backend, acfg);

    ScriptedVisitor visitor(visitor_port, fixture, spec.spawn, cfg.user_id, cfg.agent_id);

    Json fixture_echo{{"name", fixture.name}, {"backend", fixture.backend}, {"turns", fixture.turns.size()}};
    log::Json header{{"format", 1}, {"session_id", "replay_" + fixture.name}, {"world", spec.name},
        {"condition", to_string(cfg.condition)}, {"condition_name", long_name(cfg.condition)},
        {"persona_tag", "scripted"}, {"seed", 0}, {"user_id", cfg.user_id}, {"agent_id", cfg.agent_id},
        {"sample_period_s", cfg.sample_period_s}, {"tick_dt_s", cfg.tick_dt_s},
        {"world_extent", {{"width_m", spec.width_m}, {"height_m", spec.height_m}}}, {"fixture", fixture_echo}};

    ReplayResult result;
    result.log = drive_session(host, &runner, visitor, cfg, std::move(header));
    result.kinds = event_kinds(result.log, acfg.filler_text);

    const auto& exp = fixture.expected;
    const std::size_t n = std::max(exp.size(), result.kinds.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::string want = i < exp.size() ? exp[i] : "<end>";
        const std::string got = i < result.kinds.size() ? result.kinds[i] : "<end>";
        if (want != got)
            throw FixtureMismatch(i, want, got);
    }
    return result;
}

} // namespace pixie::harness
