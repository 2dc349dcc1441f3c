// SPDX-License-Identifier: Apache-2.0
#include <pixie/agent/runner.hpp>

#include <algorithm>
#include <chrono>

namespace pixie::agent {

namespace {
constexpr double kEps = 1e-9;
}

AgentConfig agent_config_from_json(const Json& j)
{
    AgentConfig cfg;
    cfg.agent_id = j.value("agent_id", cfg.agent_id);
    cfg.timing.chars_per_s = j.value("chars_per_s", cfg.timing.chars_per_s);
    cfg.timing.min_playback_s = j.value("min_playback_s", cfg.timing.min_playback_s);
    cfg.filler_after_s = j.value("filler_after_s", cfg.filler_after_s);
    cfg.think_timeout_s = j.value("think_timeout_s", cfg.think_timeout_s);
    cfg.simulated_latency_s = j.value("latency_s", cfg.simulated_latency_s);
    cfg.history_window = j.value("history_window", cfg.history_window);
    return cfg;
}

AgentRunner::AgentRunner(protocol::DriverPort& port, DecisionBackend& backend, AgentConfig cfg)
    : port_(port), backend_(backend), cfg_(std::move(cfg)), history_(cfg_.history_window)
{
    port_.set_event_handler([this](const protocol::Envelope& e) {
        post([this, e](double now) { handle_event(e, now); });
    });
}

AgentRunner::~AgentRunner()
{
    port_.set_event_handler(nullptr);
    abandon_pending();
    for (auto& f : abandoned_)
        f.wait();
}

void AgentRunner::abandon_pending()
{
    if (pending_ && pending_->future)
        abandoned_.push_back(std::move(*pending_->future));
    pending_.reset();
}

void AgentRunner::post(Task task)
{
    std::lock_guard lock(inbox_mu_);
    inbox_.push_back(std::move(task));
}

void AgentRunner::send(std::string type, Json payload, protocol::ResponseHandler on_done)
{
    ++commands_sent_;
    port_.send(std::move(type), std::move(payload), std::move(on_done));
}

void AgentRunner::start(double now_s)
{
    started_ = true;
    session_start_s_ = now_s;
    log_.start(now_s, state_.state);
    if (cfg_.join) {
        Json avatar{{"id", cfg_.agent_id}, {"kind", "agent"}};
        if (cfg_.post) {
            avatar["x"] = cfg_.post->x;
            avatar["y"] = cfg_.post->y;
        }
        send("Join", Json{{"avatar", avatar}});
    }
    send("GetEnvironment", Json::object(), [this](const protocol::DriverResponse& r) {
        if (!r.ok)
            return;
        post([this, snap = r.payload](double now) {
            snapshot_ = snap;
            for (const auto& u : snap.value("users", Json::array()))
                if (u.value("kind", std::string()) == "user" && u.value("id", std::string()) != cfg_.agent_id) {
                    const auto id = u["id"].get<std::string>();
                    if (present_.insert(id).second)
                        feed(input::UserEntered{id}, now);
                }
        });
    });
}

void AgentRunner::handle_event(const protocol::Envelope& e, double now)
{
    const auto& p = e.payload;
    if (e.type == "UserEntered") {
        const auto id = p.value("id", std::string());
        if (p.value("kind", std::string()) == "user" && id != cfg_.agent_id && present_.insert(id).second)
            feed(input::UserEntered{id}, now);
    } else if (e.type == "UserExited") {
        const auto id = p.value("id", std::string());
        if (present_.erase(id))
            feed(input::UserExited{id}, now);
    } else if (e.type == "ChatReceived") {
        const auto from = p.value("from", std::string());
        const auto text = p.value("text", std::string());
        history_.add({e.t_s, from, text});
        if (from != cfg_.agent_id && present_.count(from)) {
            feed(input::UserMessageStart{from}, now);
            feed(input::UserMessageComplete{from, text}, now);
        }
    } else if (e.type == "DestinationReached" || e.type == "PathBlocked") {
        if (p.value("avatar_id", std::string()) == cfg_.agent_id)
            feed(input::ActionFinished{action_turn_, e.type == "DestinationReached"}, now);
    }
}

void AgentRunner::feed(const AgentInput& in, double now_s)
{
    if (lost_ || finished_)
        return;
    const State before = state_.state;
    auto t = step(state_, in, now_s, cfg_.timing);
    state_ = std::move(t.next);
    log_.input(now_s, state_.state, in);
    if (state_.state != before)
        log_.transition(now_s, state_.state);
    if (pending_ && (state_.state != State::Thinking || pending_->turn != state_.turn))
        abandon_pending();
    for (const auto& e : t.effects)
        execute(e, now_s);
}

void AgentRunner::execute(const Effect& e, double now_s)
{
    log_.effect(now_s, state_.state, e);
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, effect::SetStatusText>) {
                send("SetStatusText",
                    Json{{"avatar_id", cfg_.agent_id}, {"text", x.text ? Json(*x.text) : Json(nullptr)}});
            } else if constexpr (std::is_same_v<T, effect::SendChat>) {
                send("SendChat", Json{{"from", cfg_.agent_id}, {"text", x.text}});
            } else if constexpr (std::is_same_v<T, effect::PlayEmote>) {
                send("PlayEmote", Json{{"from", cfg_.agent_id}, {"emote", x.name}});
            } else if constexpr (std::is_same_v<T, effect::SetDestination>) {
                const auto turn = state_.turn;
                action_turn_ = turn;
                send("SetDestination",
                    Json{{"avatar_id", cfg_.agent_id}, {"target", {{"nav_point", x.nav_point_id}}}},
                    [this, turn](const protocol::DriverResponse& r) {
                        if (r.ok && r.payload.value("feasible", false))
                            return;
                        post([this, turn](double now) { feed(input::ActionFinished{turn, false}, now); });
                    });
            } else if constexpr (std::is_same_v<T, effect::InvokeBackend>) {
                const auto turn = x.turn;
                send("GetEnvironment", Json::object(), [this, turn, text = x.text](const protocol::DriverResponse& r) {
                    post([this, turn, text, r](double now) {
                        if (r.ok)
                            snapshot_ = r.payload;
                        decide(turn, text, now);
                    });
                });
            }
        },
        e);
    if (on_effect)
        on_effect(now_s, e);
}

Decision AgentRunner::sanitize(Decision d, const ObservationContext& ctx) const
{
    if (const auto* nav = std::get_if<action::Navigate>(&d.action); nav && !ctx.find_nav_point(nav->nav_point_id))
        d.action = action::None{};
    return d;
}

void AgentRunner::decide(std::uint64_t turn, const std::string& text, double now_s)
{
    if (state_.state != State::Thinking || state_.turn != turn)
        return;
    auto ctx = observation_from_snapshot(snapshot_, cfg_.agent_id, history_, session_start_s_);
    PendingDecision pd;
    pd.turn = turn;
    pd.ready_at_s = now_s; // invocation time until the worker answers
    if (cfg_.threaded_backend) {
        pd.future = std::async(std::launch::async, [this, ctx, text] {
            try {
                std::lock_guard lock(backend_mu_);
                return sanitize(backend_.respond(text, ctx), ctx);
            } catch (const std::exception&) {
                return Decision{cfg_.timing.timeout_reply, action::None{}, std::nullopt};
            }
        });
    } else {
        Decision d;
        try {
            std::lock_guard lock(backend_mu_);
            d = sanitize(backend_.respond(text, ctx), ctx);
        } catch (const std::exception&) {
            d = Decision{cfg_.timing.timeout_reply, action::None{}, std::nullopt};
        }
        pd.ready_at_s = now_s + d.latency_s.value_or(cfg_.simulated_latency_s);
        pd.ready = std::move(d);
    }
    pending_ = std::move(pd);
}

void AgentRunner::fire_timers(double now_s)
{
    if (pending_ && state_.state == State::Thinking && pending_->turn == state_.turn) {
        if (pending_->future &&
            pending_->future->wait_for(std::chrono::seconds(0)) == std::future_status::ready) {
            pending_->ready = pending_->future->get();
            pending_->future.reset();
            pending_->ready_at_s = std::max(
                now_s, pending_->ready_at_s + pending_->ready->latency_s.value_or(cfg_.simulated_latency_s));
        }
        if (pending_->ready && now_s + kEps >= pending_->ready_at_s) {
            Decision d = std::move(*pending_->ready);
            const auto turn = pending_->turn;
            pending_.reset();
            feed(input::DecisionReady{turn, std::move(d.reply), std::move(d.action)}, now_s);
        }
    }
    if (state_.state == State::Thinking && now_s + kEps >= state_.entered_s + cfg_.think_timeout_s)
        feed(input::ThinkTimeout{state_.turn}, now_s);
    if (state_.state == State::Thinking && filler_turn_ != state_.turn &&
        now_s + kEps >= state_.entered_s + cfg_.filler_after_s) {
        filler_turn_ = state_.turn;
        ++fillers_sent_;
        execute(effect::SendChat{cfg_.filler_text}, now_s);
    }
    if (state_.state == State::Playback && now_s + kEps >= state_.playback_finish_s)
        feed(input::PlaybackFinished{state_.turn}, now_s);
}

void AgentRunner::pump(double now_s)
{
    if (!started_ || lost_ || finished_)
        return;
    std::erase_if(abandoned_,
        [](auto& f) { return f.wait_for(std::chrono::seconds(0)) == std::future_status::ready; });
    // Tasks may post follow-up tasks; drain until quiet.
    for (;;) {
        std::vector<Task> batch;
        {
            std::lock_guard lock(inbox_mu_);
            batch.swap(inbox_);
        }
        if (batch.empty())
            break;
        for (auto& task : batch)
            task(now_s);
    }
    fire_timers(now_s);
}

void AgentRunner::driver_lost(double now_s)
{
    if (lost_)
        return;
    lost_ = true;
    log_.finish(now_s);
}

void AgentRunner::finish(double now_s)
{
    if (finished_ || lost_)
        return;
    finished_ = true;
    log_.finish(now_s);
}

} // namespace pixie::agent
