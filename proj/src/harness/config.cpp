// SPDX-License-Identifier: Apache-2.0
#include <pixie/harness/config.hpp>

#include <cctype>
#include <cmath>

namespace pixie::harness {

std::string_view to_string(Condition c)
{
    switch (c) {
    case Condition::OnDemand: return "A";
    case Condition::FixedRoute: return "B";
    case Condition::Control: return "C";
    }
    return "?";
}

std::string_view long_name(Condition c)
{
    switch (c) {
    case Condition::OnDemand: return "A_OnDemand";
    case Condition::FixedRoute: return "B_FixedRoute";
    case Condition::Control: return "C_Control";
    }
    return "?";
}

Condition condition_from_string(std::string_view s)
{
    for (Condition c : {Condition::OnDemand, Condition::FixedRoute, Condition::Control}) {
        if (s == long_name(c))
            return c;
        if (s.size() == 1 && std::toupper(static_cast<unsigned char>(s[0])) == to_string(c)[0])
            return c;
    }
    throw std::invalid_argument("unknown condition '" + std::string(s) + "'");
}

std::string_view to_string(Experience e)
{
    return e == Experience::Veteran ? "veteran" : "novice";
}

Experience experience_from_string(std::string_view s)
{
    if (s == "novice")
        return Experience::Novice;
    if (s == "veteran")
        return Experience::Veteran;
    throw std::invalid_argument("unknown experience tag '" + std::string(s) + "'");
}

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw std::invalid_argument(what);
}

bool positive(double v)
{
    return std::isfinite(v) && v > 0;
}

bool non_negative(double v)
{
    return std::isfinite(v) && v >= 0;
}

} // namespace

void BotPersona::validate() const
{
    require(ask_rate >= 0.0 && ask_rate <= 1.0, "ask_rate must be in [0,1]");
    require(positive(dwell_mean_s) && positive(dwell_std_s), "dwell parameters must be positive");
    require(positive(wander_step_m), "wander_step_m must be positive");
    require(positive(budget_s), "budget_s must be positive");
    require(non_negative(guided_interest_s) && non_negative(guided_other_s) && non_negative(discovery_s),
        "budget top-ups must be non-negative");
    require(positive(request_patience_s), "request_patience_s must be positive");
}

Json persona_to_json(const BotPersona& p)
{
    return Json{{"tag", p.tag}, {"seed", p.seed}, {"ask_rate", p.ask_rate}, {"interest_points", p.interest_points},
        {"interest_count", p.interest_count}, {"dwell_mean_s", p.dwell_mean_s}, {"dwell_std_s", p.dwell_std_s},
        {"wander_step_m", p.wander_step_m}, {"experience_tag", to_string(p.experience)},
        {"budget_s", p.budget_s}, {"guided_interest_s", p.guided_interest_s},
        {"guided_other_s", p.guided_other_s}, {"discovery_s", p.discovery_s},
        {"request_patience_s", p.request_patience_s}};
}

BotPersona persona_from_json(const Json& j)
{
    BotPersona p;
    p.tag = j.value("tag", p.tag);
    p.seed = j.value("seed", p.seed);
    p.ask_rate = j.value("ask_rate", p.ask_rate);
    p.interest_points = j.value("interest_points", p.interest_points);
    p.interest_count = j.value("interest_count", p.interest_count);
    p.dwell_mean_s = j.value("dwell_mean_s", p.dwell_mean_s);
    p.dwell_std_s = j.value("dwell_std_s", p.dwell_std_s);
    p.wander_step_m = j.value("wander_step_m", p.wander_step_m);
    if (j.contains("experience_tag"))
        p.experience = experience_from_string(j.at("experience_tag").get<std::string>());
    p.budget_s = j.value("budget_s", p.budget_s);
    p.guided_interest_s = j.value("guided_interest_s", p.guided_interest_s);
    p.guided_other_s = j.value("guided_other_s", p.guided_other_s);
    p.discovery_s = j.value("discovery_s", p.discovery_s);
    p.request_patience_s = j.value("request_patience_s", p.request_patience_s);
    p.validate();
    return p;
}

void SessionConfig::validate() const
{
    require(positive(duration_cap_s), "duration_cap_s must be positive");
    require(positive(tick_dt_s), "tick_dt_s must be positive");
    require(positive(sample_period_s), "sample_period_s must be positive");
    require(non_negative(agent_latency_s), "agent latency must be non-negative");
    require(!user_id.empty() && !agent_id.empty() && user_id != agent_id, "user and agent ids must differ");
    persona.validate();
}

std::string SessionConfig::session_id() const
{
    std::string stem = world.filename().string();
    if (const auto dot = stem.find('.'); dot != std::string::npos && dot > 0)
        stem.resize(dot);
    return stem + "_" + std::string(to_string(condition)) + "_s" + std::to_string(seed);
}

Json config_to_json(const SessionConfig& c)
{
    // Only the file name: logs must not depend on where the data lives.
    return Json{{"world", c.world.filename().string()}, {"condition", to_string(c.condition)},
        {"persona", persona_to_json(c.persona)}, {"duration_cap_s", c.duration_cap_s}, {"tick_dt_s", c.tick_dt_s},
        {"time_scale", c.time_scale}, {"seed", c.seed}, {"sample_period_s", c.sample_period_s},
        {"agent_latency_s", c.agent_latency_s}, {"user_id", c.user_id}, {"agent_id", c.agent_id}};
}

SessionConfig config_from_json(const Json& j)
{
    SessionConfig c;
    c.world = j.at("world").get<std::string>();
    c.condition = condition_from_string(j.value("condition", std::string("A")));
    if (j.contains("persona"))
        c.persona = persona_from_json(j.at("persona"));
    c.duration_cap_s = j.value("duration_cap_s", c.duration_cap_s);
    c.tick_dt_s = j.value("tick_dt_s", c.tick_dt_s);
    c.time_scale = j.value("time_scale", c.time_scale);
    c.seed = j.value("seed", c.seed);
    c.sample_period_s = j.value("sample_period_s", c.sample_period_s);
    c.agent_latency_s = j.value("agent_latency_s", c.agent_latency_s);
    c.user_id = j.value("user_id", c.user_id);
    c.agent_id = j.value("agent_id", c.agent_id);
    c.validate();
    return c;
}

} // namespace pixie::harness
