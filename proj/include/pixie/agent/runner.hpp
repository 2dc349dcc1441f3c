// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/agent/agent_log.hpp>
#include <pixie/agent/backend.hpp>
#include <pixie/agent/observation.hpp>
#include <pixie/agent/state_machine.hpp>
#include <pixie/protocol/driver_port.hpp>

#include <functional>
#include <future>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pixie::agent {

struct AgentConfig {
    std::string agent_id = "pixie";
    /// Join position; the world spawn when unset.
    std::optional<world::Position> post;
    bool join = true;
    TimingConfig timing;
    double filler_after_s = 1.0;
    std::string filler_text = "Thinking...";
    double think_timeout_s = 30.0;
    /// Think time applied when a decision carries no latency of its own.
    double simulated_latency_s = 0.0;
    /// Run the backend on a worker thread and poll for the result.
    bool threaded_backend = false;
    std::size_t history_window = 20;
};

/// Loads the agent keys of a config object (chars_per_s, min_playback_s,
/// filler_after_s, think_timeout_s, latency_s, agent_id).
AgentConfig agent_config_from_json(const Json& j);

/// Event loop binding a DriverPort to the state machine. Driver callbacks may
/// arrive on any thread; all state changes happen inside pump().
class AgentRunner {
public:
    AgentRunner(protocol::DriverPort& port, DecisionBackend& backend, AgentConfig cfg = {});
    ~AgentRunner();

    AgentRunner(const AgentRunner&) = delete;
    AgentRunner& operator=(const AgentRunner&) = delete;

    /// Joins the room and requests the presence snapshot.
    void start(double now_s);
    /// Consumes queued driver traffic and fires due timers.
    void pump(double now_s);
    /// Driver gone for good: flush the log and go quiet.
    void driver_lost(double now_s);
    void finish(double now_s);

    const AgentState& state() const noexcept { return state_; }
    const AgentLog& log() const noexcept { return log_; }
    const AgentConfig& config() const noexcept { return cfg_; }
    bool lost() const noexcept { return lost_; }
    std::size_t fillers_sent() const noexcept { return fillers_sent_; }
    std::size_t commands_sent() const noexcept { return commands_sent_; }

    /// Observer for every effect executed, after logging.
    std::function<void(double, const Effect&)> on_effect;

private:
    using Task = std::function<void(double)>;

    struct PendingDecision {
        std::uint64_t turn = 0;
        std::optional<std::future<Decision>> future;
        std::optional<Decision> ready;
        double ready_at_s = 0.0;
    };

    void post(Task task);
    void handle_event(const protocol::Envelope& e, double now_s);
    void abandon_pending();
    void feed(const AgentInput& in, double now_s);
    void execute(const Effect& e, double now_s);
    void send(std::string type, Json payload, protocol::ResponseHandler on_done = nullptr);
    void decide(std::uint64_t turn, const std::string& text, double now_s);
    Decision sanitize(Decision d, const ObservationContext& ctx) const;
    void fire_timers(double now_s);

    protocol::DriverPort& port_;
    DecisionBackend& backend_;
    AgentConfig cfg_;

    std::mutex inbox_mu_;
    std::vector<Task> inbox_;

    AgentState state_;
    AgentLog log_;
    ChatHistory history_;
    Json snapshot_ = Json::object();
    std::set<std::string> present_;
    std::optional<PendingDecision> pending_;
    std::vector<std::future<Decision>> abandoned_;
    std::mutex backend_mu_;
    std::uint64_t filler_turn_ = 0;
    std::uint64_t action_turn_ = 0;
    double session_start_s_ = 0.0;
    std::size_t fillers_sent_ = 0;
    std::size_t commands_sent_ = 0;
    bool started_ = false;
    bool lost_ = false;
    bool finished_ = false;
};

} // namespace pixie::agent
