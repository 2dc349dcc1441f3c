// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/agent/backend.hpp>

#include <memory>
#include <string>

namespace pixie::agent {

struct ExternalConfig {
    /// Chat-completions endpoint, e.g. http://127.0.0.1:8000/v1/chat/completions
    std::string url;
    std::string model = "gpt-4o";
    /// Name of the environment variable holding the bearer token; empty for none.
    std::string api_key_env = "OPENAI_API_KEY";
    std::string dialog_prompt =
        "You are Pixie, a friendly guide avatar in a virtual space. Answer briefly using the observation JSON.";
    std::string decision_prompt =
        "Decide whether the guide should walk somewhere. Call navigate with a nav point id only when the user "
        "asked to be taken there.";
    double timeout_s = 20.0;
};

/// Loads {"url", "model", "api_key_env", "timeout_s"} plus prompts from
/// `prompt_file` ({"dialog", "decision"}) when given.
ExternalConfig external_config_from_json(const Json& j);

/// Dialog call for the reply, function-calling call for the action. Any
/// transport or format failure falls back to the rule matcher.
class ExternalBackend final : public DecisionBackend {
public:
    explicit ExternalBackend(ExternalConfig cfg);
    ~ExternalBackend() override;

    Intent understand(const std::string& utterance, const ObservationContext& ctx) override;
    Decision decide(const Intent& intent, const ObservationContext& ctx) override;
    std::string_view name() const noexcept override { return "external"; }

    int failures() const noexcept { return failures_; }

private:
    Json post(const Json& body);

    ExternalConfig cfg_;
    RuleBackend fallback_;
    int failures_ = 0;
};

} // namespace pixie::agent
