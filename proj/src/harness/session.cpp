// SPDX-License-Identifier: Apache-2.0
#include <pixie/harness/session.hpp>

#include <pixie/protocol/driver_port.hpp>

#include <chrono>
#include <memory>
#include <thread>

namespace pixie::harness {

world::WorldSpec load_session_world(const std::filesystem::path& path)
{
    try {
        return world::load_world_file(path);
    } catch (const std::exception& e) {
        throw WorldLoadError(path.filename().string() + ": " + e.what());
    }
}

world::Position agent_post(const world::WorldSpec& world)
{
    const world::Position east{world.spawn.x + 1.0, world.spawn.y};
    if (east.x <= world.width_m && world.is_walkable(east))
        return east;
    return world.spawn;
}

log::SessionLog drive_session(protocol::RoomHost& host, agent::AgentRunner* agent, Visitor& visitor,
    const SessionConfig& cfg, log::Json header)
{
    log::SessionLog out;
    out.header = std::move(header);

    const auto chat_sub = host.add_subscriber(
        [&out](const protocol::Envelope& e) {
            out.chat.push_back({e.t_s, e.payload.value("from", std::string()), e.payload.value("text", std::string())});
        },
        {"ChatReceived"});

    const auto& room = host.room();
    const auto wall0 = std::chrono::steady_clock::now();
    const double dt = room.tick_dt_s();
    const double start_s = room.clock_s();
    if (agent)
        agent->start(start_s);
    visitor.start(start_s);

    double next_sample = start_s + cfg.sample_period_s;
    bool checked_spawn = false;
    // Guard against a visitor that never manages to leave.
    const double hard_stop = start_s + cfg.duration_cap_s + 100.0 * dt + 60.0;

    while (!visitor.gone()) {
        host.tick();
        const double now = room.clock_s();
        if (!checked_spawn) {
            checked_spawn = true;
            if (agent && !room.has_avatar(agent->config().agent_id))
                throw AgentSpawnError("agent '" + agent->config().agent_id + "' could not join the room");
            if (visitor.join_failed())
                throw AgentSpawnError("visitor '" + visitor.user_id() + "' could not join the room");
        }
        if (agent)
            agent->pump(now);

        const auto entry = visitor.entry_t_s();
        if (entry && !visitor.leaving() && now >= *entry + cfg.duration_cap_s - 1e-9)
            visitor.leave(now, "cap");
        visitor.pump(now);

        if (now >= next_sample - 1e-9) {
            for (const auto& [id, a] : room.avatars())
                out.trajectory.push_back({now, id, a.position.x, a.position.y});
            next_sample += cfg.sample_period_s;
        }

        if (cfg.time_scale > 0) {
            const auto due = wall0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                         std::chrono::duration<double>((now - start_s) / cfg.time_scale));
            std::this_thread::sleep_until(due);
        }
        if (now > hard_stop)
            throw std::runtime_error("session did not end: visitor never left");
    }
    host.remove_subscriber(chat_sub);

    out.entry_t_s = visitor.entry_t_s().value_or(start_s);
    out.exit_t_s = *visitor.exit_t_s();
    out.exit_reason = visitor.exit_reason();
    out.nav_requests = visitor.nav_requests();

    if (agent) {
        agent->finish(room.clock_s());
        // The agent notices the exit a tick after it happens; clip to the visit.
        for (const auto& iv : agent->log().intervals()) {
            const double t0 = std::max(iv.t0, out.entry_t_s);
            const double t1 = std::min(iv.t1, out.exit_t_s);
            if (t1 > t0)
                out.agent_intervals.push_back({t0, t1, std::string(agent::to_string(iv.state))});
        }
    }
    // Samples taken at the exit tick or later belong to nobody's visit.
    std::erase_if(out.trajectory, [&](const log::TrajectorySample& s) { return s.t_s > out.exit_t_s; });
    std::erase_if(out.chat, [&](const log::ChatLine& c) { return c.t_s > out.exit_t_s; });
    return out;
}

log::SessionLog run_session(const SessionConfig& cfg)
{
    cfg.validate();
    world::WorldSpec world = load_session_world(cfg.world);

    world::RoomOptions room_options;
    room_options.tick_dt_s = cfg.tick_dt_s;
    room_options.seed = cfg.seed;
    protocol::RoomHost host{world::RoomInstance(world, room_options)};
    const world::WorldSpec& spec = host.room().world();

    auto visitor_topics = protocol::default_topics();
    visitor_topics.insert("TickUpdate");
    protocol::LocalDriverPort visitor_port(host, visitor_topics);
    protocol::LocalDriverPort agent_port(host);

    std::unique_ptr<agent::DecisionBackend> backend;
    if (cfg.condition == Condition::OnDemand)
        backend = std::make_unique<agent::RuleBackend>();
    else if (cfg.condition == Condition::FixedRoute)
        backend = std::make_unique<agent::FixedRouteBackend>(spec.fixed_route);

    std::unique_ptr<agent::AgentRunner> runner;
    if (backend) {
        agent::AgentConfig acfg;
        acfg.agent_id = cfg.agent_id;
        acfg.post = agent_post(spec);
        acfg.simulated_latency_s = cfg.agent_latency_s;
        runner = std::make_unique<agent::AgentRunner>(agent_port, *backend, acfg);
    }

    Bot bot(visitor_port, spec, cfg.condition, cfg.persona, cfg.seed, cfg.user_id, cfg.agent_id);

    log::Json header{{"format", 1}, {"session_id", cfg.session_id()}, {"world", spec.name},
        {"condition", to_string(cfg.condition)}, {"condition_name", long_name(cfg.condition)},
        {"persona_tag", cfg.persona.tag}, {"seed", cfg.seed}, {"user_id", cfg.user_id},
        {"agent_id", runner ? log::Json(cfg.agent_id) : log::Json(nullptr)},
        {"sample_period_s", cfg.sample_period_s}, {"tick_dt_s", cfg.tick_dt_s},
        {"world_extent", {{"width_m", spec.width_m}, {"height_m", spec.height_m}}},
        {"interests", bot.interests()}, {"config", config_to_json(cfg)}};

    return drive_session(host, runner.get(), bot, cfg, std::move(header));
}

} // namespace pixie::harness
