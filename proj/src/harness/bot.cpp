// SPDX-License-Identifier: Apache-2.0
#include <pixie/harness/bot.hpp>

#include <pixie/agent/backend.hpp>
#include <pixie/protocol/commands.hpp>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/lognormal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pixie::harness {

namespace {

constexpr std::string_view kPleaseSpeak = "(Please speak)";
constexpr double kOrientationS = 3.0;
constexpr double kFollowEveryS = 1.0;
constexpr double kFollowSlackM = 2.0;
constexpr double kMovedM = 1.0;
constexpr double kPointRadiusM = 3.0;
constexpr double kWanderPauseScale = 0.3;
constexpr double kRetryPauseS = 2.0;
// Patience varies by +-30% around each nominal amount.
constexpr double kTopUpLo = 0.7;
constexpr double kTopUpHi = 1.3;

const char* const kRequestTemplates[] = {
    "Can you take me to the {}?",
    "I'd like to see the {}.",
    "Please guide me to the {}.",
    "Where is the {}? Take me there.",
};

const char* const kAcks[] = {"OK", "Okay!", "Yes", "Next", "Go"};

std::string fill(std::string_view tmpl, const std::string& name)
{
    std::string out(tmpl);
    out.replace(out.find("{}"), 2, name);
    return out;
}

double dist(world::Position a, world::Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

} // namespace

Visitor::Visitor(protocol::DriverPort& port, std::string user_id, std::string agent_id, world::Position entry)
    : self_position_(entry), port_(port), user_id_(std::move(user_id)), agent_id_(std::move(agent_id)), entry_(entry)
{
    port_.set_event_handler([this](const protocol::Envelope& e) { on_event(e); });
}

void Visitor::start(double now_s)
{
    protocol::cmd::Join join{user_id_, world::AvatarKind::User, entry_, std::nullopt};
    port_.send("Join", protocol::command_payload(join), [this](const protocol::DriverResponse& r) {
        if (r.ok)
            entry_t_ = r.t_s;
        else
            join_failed_ = true;
    });
    after_start(now_s);
}

void Visitor::pump(double now_s)
{
    if (joined() && !leaving_ && !gone())
        act(now_s);
}

void Visitor::leave(double, std::string reason)
{
    if (leaving_)
        return;
    leaving_ = true;
    exit_reason_ = std::move(reason);
    port_.send("Leave", Json{{"avatar_id", user_id_}}, [this](const protocol::DriverResponse& r) {
        if (r.ok)
            exit_t_ = r.t_s;
    });
}

void Visitor::say(const std::string& text, double)
{
    port_.send("SendChat", protocol::command_payload(protocol::cmd::SendChat{user_id_, text}), nullptr);
}

void Visitor::request(const std::string& text, const std::string& target, double now_s)
{
    nav_requests_.push_back({now_s, target});
    say(text, now_s);
    begin_turn(now_s);
}

void Visitor::walk_to(world::Position p)
{
    walking_ = true;
    arrived_ = false;
    port_.send("SetDestination", protocol::command_payload(protocol::cmd::SetDestination{user_id_, p}),
        [this](const protocol::DriverResponse& r) {
            if (!r.ok || !r.payload.value("feasible", false)) {
                walking_ = false;
                arrived_ = true;
            }
        });
}

void Visitor::begin_turn(double now_s)
{
    turn_open_ = true;
    turn_busy_seen_ = false;
    turn_started_s_ = now_s;
}

void Visitor::on_event(const protocol::Envelope& e)
{
    const Json& p = e.payload;
    if (e.type == "TickUpdate") {
        for (const auto& a : p.at("avatars")) {
            const std::string id = a.at("id").get<std::string>();
            const world::Position pos{a.at("x").get<double>(), a.at("y").get<double>()};
            if (id == user_id_) {
                self_position_ = pos;
            } else if (id == agent_id_) {
                agent_position_ = pos;
                agent_waiting_ = a.value("status", std::string()) == kPleaseSpeak;
                if (turn_open_ && !agent_waiting_)
                    turn_busy_seen_ = true;
            }
        }
    } else if (e.type == "DestinationReached" || e.type == "PathBlocked") {
        if (p.value("avatar_id", std::string()) == user_id_) {
            walking_ = false;
            arrived_ = true;
        }
    } else if (e.type == "ChatReceived") {
        if (p.value("from", std::string()) == agent_id_)
            last_agent_line_ = p.value("text", std::string());
    } else if (e.type == "UserExited") {
        if (p.value("id", std::string()) == agent_id_)
            agent_position_.reset();
    }
}

Bot::Bot(protocol::DriverPort& port, const world::WorldSpec& world, Condition condition, BotPersona persona,
    std::uint64_t seed, std::string user_id, std::string agent_id)
    : Visitor(port, std::move(user_id), std::move(agent_id), world.spawn), world_(world), condition_(condition),
      persona_(std::move(persona))
{
    persona_.validate();
    rng_.seed(seed * 0x9E3779B97F4A7C15ULL ^ persona_.seed);
    if (persona_.experience == Experience::Veteran)
        persona_.wander_step_m *= 1.5;

    if (!persona_.interest_points.empty()) {
        for (const auto& id : persona_.interest_points)
            if (world_.find_nav_point(id))
                interests_.push_back(id);
    } else {
        std::vector<std::string> ids;
        for (const auto& p : world_.nav_points)
            ids.push_back(p.id);
        // Fisher-Yates with Boost distributions so draws match on every platform.
        for (std::size_t i = ids.size(); i > 1; --i)
            std::swap(ids[i - 1], ids[pick(i)]);
        ids.resize(std::min(ids.size(), persona_.interest_count));
        interests_ = std::move(ids);
    }
}

double Bot::uniform(double lo, double hi)
{
    return boost::random::uniform_real_distribution<double>(lo, hi)(rng_);
}

bool Bot::chance(double p)
{
    return boost::random::bernoulli_distribution<double>(p)(rng_);
}

std::size_t Bot::pick(std::size_t n)
{
    return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

const world::NavPoint* Bot::nearest_point(world::Position p, double within_m) const
{
    const world::NavPoint* best = nullptr;
    double best_d = within_m;
    for (const auto& np : world_.nav_points) {
        const double d = dist(np.position, p);
        if (d <= best_d) {
            best = &np;
            best_d = d;
        }
    }
    return best;
}

void Bot::dwell(double now_s, double scale)
{
    // Parameters of the underlying normal from the dwell's mean and spread.
    const double m = persona_.dwell_mean_s;
    const double s = persona_.dwell_std_s;
    const double sigma2 = std::log1p((s * s) / (m * m));
    const double mu = std::log(m) - sigma2 / 2.0;
    double d = boost::random::lognormal_distribution<double>(mu, std::sqrt(sigma2))(rng_);
    if (persona_.experience == Experience::Veteran)
        d *= 0.75;
    mode_ = Mode::Dwelling;
    until_s_ = now_s + d * scale;
}

void Bot::act(double now_s)
{
    if (mode_ == Mode::Arriving) {
        deadline_s_ = now_s + persona_.budget_s * uniform(kTopUpLo, kTopUpHi);
        mode_ = Mode::Dwelling;
        until_s_ = now_s + kOrientationS;
    }
    // Never walk out in the middle of a guided turn.
    if (now_s >= deadline_s_ && mode_ != Mode::Awaiting && mode_ != Mode::CatchingUp) {
        leave(now_s, "budget");
        return;
    }

    switch (mode_) {
    case Mode::Arriving:
    case Mode::Idle: decide(now_s); break;
    case Mode::Dwelling:
        if (now_s >= until_s_)
            decide(now_s);
        break;
    case Mode::Walking:
        if (take_arrival())
            stop_at_point(now_s, false);
        break;
    case Mode::Awaiting:
        if (turn_done()) {
            conclude_turn(now_s);
        } else if (now_s - turn_started_s_ > persona_.request_patience_s) {
            end_turn();
            decide(now_s);
        } else if (agent_position_ && now_s >= follow_check_s_) {
            follow_check_s_ = now_s + kFollowEveryS;
            if (dist(*agent_position_, self_position_) > kFollowSlackM)
                walk_to(*agent_position_);
        }
        break;
    case Mode::CatchingUp:
        if (take_arrival() || !walking_)
            stop_at_point(now_s, true);
        break;
    }
}

void Bot::decide(double now_s)
{
    mode_ = Mode::Idle;
    if (condition_ == Condition::OnDemand) {
        std::vector<const world::NavPoint*> open;
        for (const auto& id : interests_)
            if (!visited_.count(id))
                open.push_back(world_.find_nav_point(id));
        if (!open.empty() && chance(persona_.ask_rate)) {
            const world::NavPoint* target = open[pick(open.size())];
            const auto& tmpl = kRequestTemplates[pick(std::size(kRequestTemplates))];
            agent_at_request_ = agent_position_;
            request(fill(tmpl, target->name), target->id, now_s);
            mode_ = Mode::Awaiting;
            follow_check_s_ = now_s + kFollowEveryS;
            return;
        }
    } else if (condition_ == Condition::FixedRoute) {
        if (!route_done_ && chance(persona_.ask_rate)) {
            agent_at_request_ = agent_position_;
            request(kAcks[pick(std::size(kAcks))], "next", now_s);
            mode_ = Mode::Awaiting;
            follow_check_s_ = now_s + kFollowEveryS;
            return;
        }
    }
    wander(now_s);
}

void Bot::wander(double now_s)
{
    const double angle = uniform(0.0, 2.0 * std::numbers::pi);
    const double r = uniform(0.3, 1.0) * persona_.wander_step_m;
    world::Position target{self_position_.x + r * std::cos(angle), self_position_.y + r * std::sin(angle)};
    target.x = std::clamp(target.x, 0.0, world_.width_m);
    target.y = std::clamp(target.y, 0.0, world_.height_m);
    walk_to(target);
    mode_ = Mode::Walking;
    until_s_ = now_s;
}

void Bot::conclude_turn(double now_s)
{
    end_turn();
    const bool moved = agent_position_ && agent_at_request_ && dist(*agent_position_, *agent_at_request_) > kMovedM;
    if (moved) {
        if (dist(*agent_position_, self_position_) <= 0.5) {
            stop_at_point(now_s, true);
        } else {
            walk_to(*agent_position_);
            mode_ = Mode::CatchingUp;
        }
        return;
    }
    if (condition_ == Condition::FixedRoute && last_agent_line_ == agent::FixedRouteBackend::kExploreReply)
        route_done_ = true;
    mode_ = Mode::Dwelling;
    until_s_ = now_s + kRetryPauseS;
}

void Bot::stop_at_point(double now_s, bool guided)
{
    const world::Position here = guided && agent_position_ ? *agent_position_ : self_position_;
    const world::NavPoint* np = nearest_point(here, kPointRadiusM);
    const bool interesting =
        np && std::find(interests_.begin(), interests_.end(), np->id) != interests_.end() && !visited_.count(np->id);
    if (guided) {
        if (np) {
            deadline_s_ += (interesting ? persona_.guided_interest_s : persona_.guided_other_s) * uniform(kTopUpLo, kTopUpHi);
            visited_.insert(np->id);
        }
        dwell(now_s, 1.0);
        return;
    }
    if (interesting) {
        deadline_s_ += persona_.discovery_s * uniform(kTopUpLo, kTopUpHi);
        visited_.insert(np->id);
        dwell(now_s, 1.0);
        return;
    }
    dwell(now_s, kWanderPauseScale);
}

} // namespace pixie::harness
