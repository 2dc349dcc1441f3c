// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/harness/config.hpp>
#include <pixie/log/session_log.hpp>
#include <pixie/protocol/driver_port.hpp>
#include <pixie/world/world_spec.hpp>

#include <boost/random/mersenne_twister.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pixie::harness {

/// A user avatar driven through a DriverPort in lock-step with the room.
/// Callbacks arrive from inside RoomHost::tick(); act() runs after each tick.
class Visitor {
public:
    Visitor(protocol::DriverPort& port, std::string user_id, std::string agent_id, world::Position entry);
    virtual ~Visitor() = default;

    Visitor(const Visitor&) = delete;
    Visitor& operator=(const Visitor&) = delete;

    void start(double now_s);
    void pump(double now_s);
    /// Asks to leave; exit time is the time the room applies it.
    void leave(double now_s, std::string reason);

    bool joined() const noexcept { return entry_t_.has_value(); }
    bool leaving() const noexcept { return leaving_; }
    bool gone() const noexcept { return exit_t_.has_value(); }
    bool join_failed() const noexcept { return join_failed_; }
    std::optional<double> entry_t_s() const noexcept { return entry_t_; }
    std::optional<double> exit_t_s() const noexcept { return exit_t_; }
    const std::string& exit_reason() const noexcept { return exit_reason_; }
    const std::vector<log::NavRequest>& nav_requests() const noexcept { return nav_requests_; }
    const std::string& user_id() const noexcept { return user_id_; }

protected:
    virtual void act(double now_s) = 0;
    virtual void after_start(double) {}

    void say(const std::string& text, double now_s);
    void request(const std::string& text, const std::string& target, double now_s);
    void walk_to(world::Position p);

    /// Starts watching for the agent to go busy and come back to Waiting.
    void begin_turn(double now_s);
    bool turn_done() const noexcept { return turn_open_ && turn_busy_seen_ && agent_waiting_; }
    void end_turn() noexcept { turn_open_ = false; }

    bool take_arrival() noexcept
    {
        const bool a = arrived_;
        arrived_ = false;
        return a;
    }

    world::Position self_position_;
    std::optional<world::Position> agent_position_;
    bool agent_waiting_ = false;
    std::string last_agent_line_;
    double turn_started_s_ = 0.0;
    bool walking_ = false;

private:
    void on_event(const protocol::Envelope& e);

    protocol::DriverPort& port_;
    std::string user_id_;
    std::string agent_id_;
    world::Position entry_;
    std::optional<double> entry_t_;
    std::optional<double> exit_t_;
    std::string exit_reason_;
    std::vector<log::NavRequest> nav_requests_;
    bool leaving_ = false;
    bool join_failed_ = false;
    bool arrived_ = false;
    bool turn_open_ = false;
    bool turn_busy_seen_ = false;
};

/// Persona-driven visitor for conditions A, B and C.
class Bot final : public Visitor {
public:
    Bot(protocol::DriverPort& port, const world::WorldSpec& world, Condition condition, BotPersona persona,
        std::uint64_t seed, std::string user_id, std::string agent_id);

    const std::vector<std::string>& interests() const noexcept { return interests_; }
    const std::set<std::string>& visited() const noexcept { return visited_; }
    /// Time at which the budget runs out, relative to the session clock.
    double deadline_s() const noexcept { return deadline_s_; }

protected:
    void act(double now_s) override;

private:
    enum class Mode { Arriving, Idle, Walking, Dwelling, Awaiting, CatchingUp };

    void decide(double now_s);
    void wander(double now_s);
    void conclude_turn(double now_s);
    void stop_at_point(double now_s, bool guided);
    void dwell(double now_s, double scale);
    const world::NavPoint* nearest_point(world::Position p, double within_m) const;
    double uniform(double lo, double hi);
    bool chance(double p);
    std::size_t pick(std::size_t n);

    const world::WorldSpec& world_;
    Condition condition_;
    BotPersona persona_;
    boost::random::mt19937_64 rng_;
    std::vector<std::string> interests_;
    std::set<std::string> visited_;
    Mode mode_ = Mode::Arriving;
    double until_s_ = 0.0;
    double deadline_s_ = 0.0;
    double follow_check_s_ = 0.0;
    std::optional<world::Position> agent_at_request_;
    bool route_done_ = false;
};

} // namespace pixie::harness
