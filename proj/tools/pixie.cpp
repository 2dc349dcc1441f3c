// SPDX-License-Identifier: Apache-2.0
// Command-line front end: single sessions, batches, replays, analysis and
// the live driver server.
#include <pixie/agent/external_backend.hpp>
#include <pixie/agent/runner.hpp>
#include <pixie/analytics/report.hpp>
#include <pixie/harness/batch.hpp>
#include <pixie/harness/replay.hpp>
#include <pixie/harness/session.hpp>
#include <pixie/protocol/client.hpp>
#include <pixie/protocol/server.hpp>
#include <pixie/world/world_spec.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace fs = std::filesystem;
using namespace pixie;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

fs::path data_dir()
{
    if (const char* env = std::getenv("PIXIE_DATA"))
        return env;
    return PIXIE_DATA_DIR;
}

/// Tries the path as given, then under the data directory and one of its
/// subdirectories.
fs::path resolve(const fs::path& p, const char* sub)
{
    if (p.empty() || fs::exists(p) || p.is_absolute())
        return p;
    for (const fs::path& c : {data_dir() / p, data_dir() / sub / p})
        if (fs::exists(c))
            return c;
    return p;
}

harness::Json read_json_file(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("cannot open " + p.string());
    return harness::Json::parse(in);
}

std::unique_ptr<agent::DecisionBackend> make_backend(const std::string& kind, const world::WorldSpec& world,
    const std::string& external_cfg)
{
    if (kind == "rule")
        return std::make_unique<agent::RuleBackend>();
    if (kind == "route")
        return std::make_unique<agent::FixedRouteBackend>(world.fixed_route);
    if (kind == "external") {
        if (external_cfg.empty())
            throw std::invalid_argument("--backend external needs --backend-config");
        return std::make_unique<agent::ExternalBackend>(
            agent::external_config_from_json(read_json_file(external_cfg)));
    }
    throw std::invalid_argument("unknown backend: " + kind);
}

/// Remote agent loop. Time is wall time scaled to the room's pace.
int run_remote_agent(const std::string& address, const world::WorldSpec& world, const std::string& backend_kind,
    const std::string& backend_cfg, double time_scale, double latency_s)
{
    auto client = protocol::DriverClient::connect(address);
    protocol::ClientDriverPort port(*client);
    auto backend = make_backend(backend_kind, world, backend_cfg);
    agent::AgentConfig cfg;
    cfg.post = harness::agent_post(world);
    cfg.simulated_latency_s = latency_s;
    cfg.threaded_backend = backend_kind == "external";
    agent::AgentRunner runner(port, *backend, cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const double scale = time_scale > 0 ? time_scale : 1.0;
    auto now = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() * scale;
    };
    client->set_disconnect_handler([] {});
    runner.start(now());
    while (!g_stop && client->connected() && !runner.lost()) {
        runner.pump(now());
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    runner.finish(now());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"pixie: navigation agent testbed"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run one simulated visitor session");
    std::string run_world, run_condition = "A", run_out = "logs", run_persona;
    std::uint64_t run_seed = 0;
    double run_cap = 1800.0, run_tick = 0.1, run_scale = 0.0;
    run->add_option("--world", run_world, "World file")->required();
    run->add_option("--condition", run_condition, "A, B or C");
    run->add_option("--seed", run_seed, "Session seed");
    run->add_option("--out", run_out, "Output directory");
    run->add_option("--cap", run_cap, "Duration cap in seconds");
    run->add_option("--tick", run_tick, "Tick length in seconds");
    run->add_option("--time-scale", run_scale, "Simulated seconds per wall second; 0 runs flat out");
    run->add_option("--persona", run_persona, "Persona JSON file");

    // batch
    auto* batch = app.add_subcommand("batch", "Run a worlds x conditions x seeds matrix");
    std::string batch_matrix, batch_out;
    unsigned batch_threads = 0;
    batch->add_option("--matrix", batch_matrix, "Matrix JSON file")->required();
    batch->add_option("--out", batch_out, "Output directory (overrides the matrix)");
    batch->add_option("--threads", batch_threads, "Worker threads; 0 uses every core");

    // replay
    auto* replay = app.add_subcommand("replay", "Replay a scripted dialog and check its event kinds");
    std::string replay_fixture, replay_out;
    double replay_scale = 0.0;
    replay->add_option("--fixture", replay_fixture, "Dialog fixture file")->required();
    replay->add_option("--out", replay_out, "Write the session log here");
    replay->add_option("--time-scale", replay_scale, "Simulated seconds per wall second; 0 runs flat out");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Compute metrics, heatmaps and a summary from logs");
    std::string an_logs, an_out = "report";
    double an_cell = 1.0;
    bool an_no_heatmaps = false;
    analyze->add_option("--logs", an_logs, "Directory of session logs")->required();
    analyze->add_option("--cell-size", an_cell, "Heatmap cell size in metres");
    analyze->add_option("--out", an_out, "Report directory");
    analyze->add_flag("--no-heatmaps", an_no_heatmaps, "Skip heatmap images");

    // serve
    auto* serve = app.add_subcommand("serve", "Host a live room over the driver protocol");
    std::string sv_world = "museum.world.json", sv_addr = protocol::default_address(), sv_ui, sv_agent = "none",
                sv_agent_cfg;
    double sv_scale = 1.0, sv_for = 0.0;
    serve->add_option("--world", sv_world, "World file");
    serve->add_option("--addr", sv_addr, "host:port to bind (default $PIXIE_ADDR or 127.0.0.1:7411)");
    auto* ui_opt = serve->add_option("--ui", sv_ui, "Serve static files from this directory");
    ui_opt->expected(0, 1);
    serve->add_option("--time-scale", sv_scale, "Simulated seconds per wall second");
    serve->add_option("--agent", sv_agent, "In-process agent backend: none, rule, route or external");
    serve->add_option("--backend-config", sv_agent_cfg, "External backend JSON");
    serve->add_option("--for", sv_for, "Stop after this many wall seconds; 0 runs until interrupted");

    // agent
    auto* agent_cmd = app.add_subcommand("agent", "Connect an agent to a running server");
    std::string ag_addr = protocol::default_address(), ag_world = "museum.world.json", ag_backend = "rule",
                ag_cfg;
    double ag_scale = 1.0, ag_latency = 0.0;
    agent_cmd->add_option("--addr", ag_addr, "Server address");
    agent_cmd->add_option("--world", ag_world, "World file (for the route and the post)");
    agent_cmd->add_option("--backend", ag_backend, "rule, route or external");
    agent_cmd->add_option("--backend-config", ag_cfg, "External backend JSON");
    agent_cmd->add_option("--time-scale", ag_scale, "Room pace, to keep timers in step");
    agent_cmd->add_option("--latency", ag_latency, "Simulated think time in seconds");

    CLI11_PARSE(app, argc, argv);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    try {
        if (*run) {
            harness::SessionConfig cfg;
            cfg.world = resolve(run_world, "worlds");
            cfg.condition = harness::condition_from_string(run_condition);
            cfg.seed = run_seed;
            cfg.duration_cap_s = run_cap;
            cfg.tick_dt_s = run_tick;
            cfg.time_scale = run_scale;
            if (!run_persona.empty())
                cfg.persona = harness::persona_from_json(read_json_file(run_persona));
            const auto log = harness::run_session(cfg);
            fs::create_directories(run_out);
            const fs::path file = fs::path(run_out) / (cfg.session_id() + ".jsonl");
            log::write_file(log, file);
            std::cout << file.string() << " dwell=" << (log.exit_t_s - log.entry_t_s)
                      << "s exit=" << log.exit_reason << " sha256=" << harness::sha256_file(file) << '\n';
            return 0;
        }
        if (*batch) {
            auto matrix = harness::load_matrix(resolve(batch_matrix, "."), data_dir());
            if (!batch_out.empty())
                matrix.out_dir = batch_out;
            if (batch_threads)
                matrix.threads = batch_threads;
            const auto t0 = std::chrono::steady_clock::now();
            const auto result = harness::run_batch(matrix);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            for (const auto& r : result.runs)
                std::cout << (r.ok ? "ok     " : "FAILED ") << r.session_id << ' '
                          << (r.ok ? r.sha256 : r.error) << '\n';
            std::cout << result.runs.size() << " sessions, " << result.failed() << " failed, " << secs
                      << " s; manifest " << result.manifest.string() << '\n';
            return result.failed() ? 1 : 0;
        }
        if (*replay) {
            const auto fixture = harness::load_fixture(resolve(replay_fixture, "fixtures"), data_dir());
            harness::ReplayOptions opt;
            opt.time_scale = replay_scale;
            try {
                const auto result = harness::replay_transcript(fixture, opt);
                for (std::size_t i = 0; i < result.kinds.size(); ++i)
                    std::cout << (i ? " -> " : "") << result.kinds[i];
                std::cout << '\n';
                if (!replay_out.empty()) {
                    fs::create_directories(replay_out);
                    log::write_file(result.log, fs::path(replay_out) / (result.log.session_id() + ".jsonl"));
                }
                std::cout << "replay " << fixture.name << ": ok\n";
                return 0;
            } catch (const harness::FixtureMismatch& e) {
                std::cerr << "replay " << fixture.name << ": " << e.what() << '\n';
                return 1;
            }
        }
        if (*analyze) {
            analytics::SummarizeOptions opt;
            opt.cell_size_m = an_cell;
            opt.heatmaps = !an_no_heatmaps;
            const auto report = analytics::summarize(an_logs, an_out, opt);
            std::cout << analytics::format_summary(report);
            std::cout << "\nwrote " << (fs::path(an_out) / "metrics.csv").string() << " and summary.txt\n";
            return 0;
        }
        if (*serve) {
            const auto world = harness::load_session_world(resolve(sv_world, "worlds"));
            protocol::ServerOptions opt;
            std::tie(opt.bind_host, opt.port) = protocol::parse_address(sv_addr);
            opt.time_scale = sv_scale;
            if (ui_opt->count() > 0)
                opt.ui_dir = sv_ui.empty() ? fs::path("web-ui/dist") : fs::path(sv_ui);
            protocol::DriverServer server(world::RoomInstance(world), opt);
            std::cout << "serving " << world.name << " on " << server.address() << std::endl;

            std::thread agent_thread;
            if (sv_agent != "none")
                agent_thread = std::thread([&] {
                    try {
                        run_remote_agent(server.address(), world, sv_agent, sv_agent_cfg, sv_scale, 0.0);
                    } catch (const std::exception& e) {
                        std::cerr << "agent: " << e.what() << '\n';
                    }
                });
            const auto t0 = std::chrono::steady_clock::now();
            while (!g_stop) {
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
                if (sv_for > 0 &&
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= sv_for)
                    g_stop = true;
            }
            server.stop();
            if (agent_thread.joinable())
                agent_thread.join();
            return 0;
        }
        if (*agent_cmd) {
            const auto world = harness::load_session_world(resolve(ag_world, "worlds"));
            return run_remote_agent(ag_addr, world, ag_backend, ag_cfg, ag_scale, ag_latency);
        }
    } catch (const std::exception& e) {
        std::cerr << "pixie: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
