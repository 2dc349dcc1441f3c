// SPDX-License-Identifier: Apache-2.0
#include <pixie/agent/backend.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace pixie::agent {

std::string normalize_utterance(std::string_view text)
{
    std::string out;
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            if (pending_space && !out.empty())
                out += ' ';
            pending_space = false;
            out += static_cast<char>(std::tolower(c));
        } else if (std::isspace(c)) {
            pending_space = true;
        }
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view normalized)
{
    std::vector<std::string> tokens;
    std::istringstream in{std::string(normalized)};
    for (std::string t; in >> t;)
        tokens.push_back(t);
    return tokens;
}

namespace {

bool contains(const std::string& haystack, const std::string& needle)
{
    return haystack.find(needle) != std::string::npos;
}

std::size_t hits(const std::string& utterance, const std::vector<std::string>& tokens)
{
    return static_cast<std::size_t>(
        std::count_if(tokens.begin(), tokens.end(), [&](const auto& t) { return contains(utterance, t); }));
}

bool all_hit(const std::string& utterance, const std::vector<std::string>& tokens)
{
    return !tokens.empty() && hits(utterance, tokens) == tokens.size();
}

constexpr std::array<std::string_view, 7> kInterrogatives = {"what", "where", "who", "how", "why", "which", "tell"};

bool is_question(const std::vector<std::string>& tokens)
{
    return std::any_of(tokens.begin(), tokens.end(), [](const auto& t) {
        return std::find(kInterrogatives.begin(), kInterrogatives.end(), t) != kInterrogatives.end();
    });
}

} // namespace

Intent RuleBackend::understand(const std::string& utterance, const ObservationContext& ctx)
{
    Intent intent;
    intent.utterance = utterance;
    intent.normalized = normalize_utterance(utterance);
    intent.kind = "other";
    const auto tokens = tokenize(intent.normalized);

    std::size_t best_hits = 0;
    const world::NavPoint* best = nullptr;
    for (const auto& p : ctx.nav_points) {
        const auto name_tokens = tokenize(normalize_utterance(p.name));
        const auto desc_tokens = tokenize(normalize_utterance(p.description));
        if (!all_hit(intent.normalized, name_tokens) && !all_hit(intent.normalized, desc_tokens))
            continue;
        const std::size_t h = hits(intent.normalized, name_tokens);
        if (!best || h > best_hits) {
            best = &p;
            best_hits = h;
        }
    }
    if (best) {
        intent.kind = "navigate";
        intent.nav_point_id = best->id;
        return intent;
    }

    if (is_question(tokens)) {
        for (const auto& p : ctx.nav_points) {
            auto name_tokens = tokenize(normalize_utterance(p.name));
            std::erase_if(name_tokens, [](const auto& t) { return t.size() < 3; });
            const std::size_t h = hits(intent.normalized, name_tokens);
            if (h > best_hits) {
                best = &p;
                best_hits = h;
            }
        }
        if (best) {
            intent.kind = "ask";
            intent.nav_point_id = best->id;
        }
    }
    return intent;
}

std::string RuleBackend::clarification(const ObservationContext& ctx)
{
    std::string names;
    for (const auto& p : ctx.nav_points)
        names += (names.empty() ? "" : ", ") + p.name;
    return "I can guide you to: " + names + ". Where would you like to go?";
}

Decision RuleBackend::decide(const Intent& intent, const ObservationContext& ctx)
{
    const world::NavPoint* p = intent.nav_point_id.empty() ? nullptr : ctx.find_nav_point(intent.nav_point_id);
    if (p && intent.kind == "navigate")
        return {"Heading to " + p->name + ". " + p->description, action::Navigate{p->id}, std::nullopt};
    if (p && intent.kind == "ask")
        return {p->description, action::None{}, std::nullopt};
    return {clarification(ctx), action::None{}, std::nullopt};
}

bool FixedRouteBackend::is_acknowledgment(std::string_view normalized)
{
    static constexpr std::array<std::string_view, 5> acks = {"ok", "okay", "yes", "next", "go"};
    return std::find(acks.begin(), acks.end(), normalized) != acks.end();
}

Intent FixedRouteBackend::understand(const std::string& utterance, const ObservationContext&)
{
    Intent intent;
    intent.utterance = utterance;
    intent.normalized = normalize_utterance(utterance);
    intent.kind = is_acknowledgment(intent.normalized) ? "ack" : "other";
    return intent;
}

Decision FixedRouteBackend::decide(const Intent& intent, const ObservationContext& ctx)
{
    if (exhausted())
        return {std::string(kExploreReply), action::None{}, std::nullopt};
    if (intent.kind != "ack")
        return {std::string(kPromptReply), action::None{}, std::nullopt};
    const std::string& id = route_[index_++];
    const world::NavPoint* p = ctx.find_nav_point(id);
    return {p ? p->description : id, action::Navigate{id}, std::nullopt};
}

ScriptBackend::ScriptBackend(std::vector<Decision> script, std::unique_ptr<DecisionBackend> fallback)
    : script_(std::move(script)), fallback_(std::move(fallback))
{
}

Intent ScriptBackend::understand(const std::string& utterance, const ObservationContext& ctx)
{
    if (next_ >= script_.size() && fallback_)
        return fallback_->understand(utterance, ctx);
    Intent intent;
    intent.utterance = utterance;
    intent.normalized = normalize_utterance(utterance);
    intent.kind = "scripted";
    return intent;
}

Decision ScriptBackend::decide(const Intent& intent, const ObservationContext& ctx)
{
    if (next_ < script_.size())
        return script_[next_++];
    if (fallback_)
        return fallback_->decide(intent, ctx);
    return {RuleBackend::clarification(ctx), action::None{}, std::nullopt};
}

Decision decision_from_json(const Json& j)
{
    Decision d;
    d.reply = j.at("reply").get<std::string>();
    const Json act = j.value("action", Json());
    if (act.is_object()) {
        if (act.contains("navigate"))
            d.action = action::Navigate{act.at("navigate").get<std::string>()};
        else if (act.contains("emote"))
            d.action = action::Emote{act.at("emote").get<std::string>()};
        else
            throw std::invalid_argument("decision action must hold 'navigate' or 'emote'");
    } else if (!act.is_null()) {
        throw std::invalid_argument("decision action must be an object or null");
    }
    if (j.contains("latency_s"))
        d.latency_s = j.at("latency_s").get<double>();
    return d;
}

Json decision_to_json(const Decision& d)
{
    Json j{{"reply", d.reply}};
    std::visit(
        [&](const auto& a) {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, action::Navigate>)
                j["action"] = {{"navigate", a.nav_point_id}};
            else if constexpr (std::is_same_v<A, action::Emote>)
                j["action"] = {{"emote", a.name}};
            else
                j["action"] = nullptr;
        },
        d.action);
    if (d.latency_s)
        j["latency_s"] = *d.latency_s;
    return j;
}

} // namespace pixie::agent
