// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/agent/observation.hpp>
#include <pixie/agent/state_machine.hpp>

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pixie::agent {

/// Phase-one output: what the user meant.
struct Intent {
    std::string utterance;
    std::string normalized;
    std::string kind; // "navigate", "ask", "ack", "other"
    std::string nav_point_id;
    Json detail = Json::object();
};

struct Decision {
    std::string reply;
    AgentAction action;
    /// Simulated think time; the runner holds DecisionReady back this long.
    std::optional<double> latency_s;
};

/// Two-phase decision contract. Implementations are total: every utterance
/// gets a reply, possibly a clarification.
class DecisionBackend {
public:
    virtual ~DecisionBackend() = default;

    virtual Intent understand(const std::string& utterance, const ObservationContext& ctx) = 0;
    virtual Decision decide(const Intent& intent, const ObservationContext& ctx) = 0;
    virtual std::string_view name() const noexcept = 0;

    Decision respond(const std::string& utterance, const ObservationContext& ctx)
    {
        return decide(understand(utterance, ctx), ctx);
    }
};

/// Lowercase, punctuation removed, whitespace collapsed.
std::string normalize_utterance(std::string_view text);
std::vector<std::string> tokenize(std::string_view normalized);

/// Keyword matcher over nav point names and descriptions.
class RuleBackend final : public DecisionBackend {
public:
    Intent understand(const std::string& utterance, const ObservationContext& ctx) override;
    Decision decide(const Intent& intent, const ObservationContext& ctx) override;
    std::string_view name() const noexcept override { return "rule"; }

    static std::string clarification(const ObservationContext& ctx);
};

/// Walks a predetermined route, one stop per acknowledgment.
class FixedRouteBackend final : public DecisionBackend {
public:
    explicit FixedRouteBackend(std::vector<std::string> route) : route_(std::move(route)) {}

    Intent understand(const std::string& utterance, const ObservationContext& ctx) override;
    Decision decide(const Intent& intent, const ObservationContext& ctx) override;
    std::string_view name() const noexcept override { return "route"; }

    std::size_t index() const noexcept { return index_; }
    bool exhausted() const noexcept { return index_ >= route_.size(); }

    static bool is_acknowledgment(std::string_view normalized);
    static constexpr std::string_view kExploreReply = "Feel free to explore";
    static constexpr std::string_view kPromptReply = "Please say OK to continue to the next stop.";

private:
    std::vector<std::string> route_;
    std::size_t index_ = 0;
};

/// Replays canned decisions in order, then defers to a fallback.
class ScriptBackend final : public DecisionBackend {
public:
    ScriptBackend(std::vector<Decision> script, std::unique_ptr<DecisionBackend> fallback = nullptr);

    Intent understand(const std::string& utterance, const ObservationContext& ctx) override;
    Decision decide(const Intent& intent, const ObservationContext& ctx) override;
    std::string_view name() const noexcept override { return "script"; }

    std::size_t remaining() const noexcept { return script_.size() - next_; }

private:
    std::vector<Decision> script_;
    std::size_t next_ = 0;
    std::unique_ptr<DecisionBackend> fallback_;
};

/// Parses {"reply", "action": {"navigate": id} | {"emote": name} | null, "latency_s"?}.
Decision decision_from_json(const Json& j);
Json decision_to_json(const Decision& d);

} // namespace pixie::agent
