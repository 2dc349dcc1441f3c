// SPDX-License-Identifier: Apache-2.0
#include <pixie/agent/observation.hpp>

namespace pixie::agent {

const world::NavPoint* ObservationContext::find_nav_point(const std::string& id) const
{
    for (const auto& p : nav_points)
        if (p.id == id)
            return &p;
    return nullptr;
}

Json ObservationContext::to_json() const
{
    Json j;
    j["room"] = room;
    j["clock_s"] = clock_s;
    j["elapsed_s"] = elapsed_s;
    j["agent"] = {{"x", agent.x}, {"y", agent.y}};
    j["users"] = Json::array();
    for (const auto& u : users)
        j["users"].push_back({{"id", u.id}, {"kind", u.kind}, {"x", u.position.x}, {"y", u.position.y}});
    j["nav_points"] = Json::array();
    for (const auto& p : nav_points)
        j["nav_points"].push_back({{"id", p.id}, {"name", p.name}, {"x", p.position.x}, {"y", p.position.y},
            {"description", p.description}});
    j["history"] = Json::array();
    for (const auto& t : history)
        j["history"].push_back({{"t_s", t.t_s}, {"from", t.from}, {"text", t.text}});
    return j;
}

void ChatHistory::add(ChatTurn turn)
{
    turns_.push_back(std::move(turn));
    while (turns_.size() > window_)
        turns_.pop_front();
}

ObservationContext observation_from_snapshot(const Json& snapshot, const std::string& agent_id,
    const ChatHistory& history, double session_start_s)
{
    ObservationContext ctx;
    ctx.room = snapshot.value("room", Json::object());
    ctx.clock_s = snapshot.value("clock_s", 0.0);
    ctx.elapsed_s = ctx.clock_s - session_start_s;
    for (const auto& u : snapshot.value("users", Json::array())) {
        const world::Position pos{u.at("x").get<double>(), u.at("y").get<double>()};
        const auto id = u.at("id").get<std::string>();
        if (id == agent_id)
            ctx.agent = pos;
        else
            ctx.users.push_back({id, u.value("kind", std::string("user")), pos});
    }
    for (const auto& p : snapshot.value("nav_points", Json::array()))
        ctx.nav_points.push_back({p.at("id").get<std::string>(), p.at("name").get<std::string>(),
            {p.at("x").get<double>(), p.at("y").get<double>()}, p.value("description", std::string())});
    ctx.history = history.turns();
    return ctx;
}

} // namespace pixie::agent
