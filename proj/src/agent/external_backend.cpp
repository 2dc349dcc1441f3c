// SPDX-License-Identifier: Apache-2.0
#include <pixie/agent/external_backend.hpp>

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace pixie::agent {

ExternalConfig external_config_from_json(const Json& j)
{
    ExternalConfig cfg;
    cfg.url = j.value("url", cfg.url);
    cfg.model = j.value("model", cfg.model);
    cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
    cfg.timeout_s = j.value("timeout_s", cfg.timeout_s);
    if (j.contains("prompt_file")) {
        const auto path = j.at("prompt_file").get<std::string>();
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open prompt file " + path);
        const Json prompts = Json::parse(in);
        cfg.dialog_prompt = prompts.value("dialog", cfg.dialog_prompt);
        cfg.decision_prompt = prompts.value("decision", cfg.decision_prompt);
    }
    return cfg;
}

ExternalBackend::ExternalBackend(ExternalConfig cfg) : cfg_(std::move(cfg)) {}

ExternalBackend::~ExternalBackend() = default;

Json ExternalBackend::post(const Json& body)
{
    // Split "scheme://host[:port]/path" into the client origin and the path.
    const auto scheme_end = cfg_.url.find("://");
    if (scheme_end == std::string::npos)
        throw std::runtime_error("external url needs a scheme: " + cfg_.url);
    const auto path_start = cfg_.url.find('/', scheme_end + 3);
    const std::string origin = cfg_.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : cfg_.url.substr(path_start);

    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(cfg_.timeout_s);
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    httplib::Headers headers;
    if (!cfg_.api_key_env.empty())
        if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

    const auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
        throw std::runtime_error("external backend unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw std::runtime_error("external backend returned HTTP " + std::to_string(res->status));
    return Json::parse(res->body);
}

Intent ExternalBackend::understand(const std::string& utterance, const ObservationContext& ctx)
{
    Intent intent = fallback_.understand(utterance, ctx);
    try {
        const Json body{{"model", cfg_.model},
            {"messages",
                Json::array({{{"role", "system"}, {"content", cfg_.dialog_prompt + "\n" + ctx.to_json().dump()}},
                    {{"role", "user"}, {"content", utterance}}})}};
        const Json res = post(body);
        intent.detail["reply"] = res.at("choices").at(0).at("message").at("content").get<std::string>();
        intent.kind = "external";
    } catch (const std::exception& e) {
        ++failures_;
        intent.detail["error"] = e.what();
    }
    return intent;
}

Decision ExternalBackend::decide(const Intent& intent, const ObservationContext& ctx)
{
    if (!intent.detail.contains("reply"))
        return fallback_.decide(intent, ctx);

    Decision d{intent.detail["reply"].get<std::string>(), action::None{}, std::nullopt};
    Json ids = Json::array();
    for (const auto& p : ctx.nav_points)
        ids.push_back(p.id);
    const Json tool{{"type", "function"},
        {"function",
            {{"name", "navigate"}, {"description", "Walk the guide avatar to a navigation point."},
                {"parameters",
                    {{"type", "object"},
                        {"properties", {{"nav_point_id", {{"type", "string"}, {"enum", ids}}}}},
                        {"required", Json::array({"nav_point_id"})}}}}}};
    try {
        const Json body{{"model", cfg_.model},
            {"messages",
                Json::array({{{"role", "system"}, {"content", cfg_.decision_prompt + "\n" + ctx.to_json().dump()}},
                    {{"role", "user"}, {"content", intent.utterance}},
                    {{"role", "assistant"}, {"content", d.reply}}})},
            {"tools", Json::array({tool})}};
        const Json res = post(body);
        const Json& msg = res.at("choices").at(0).at("message");
        if (msg.contains("tool_calls") && msg["tool_calls"].is_array()) {
            for (const auto& call : msg["tool_calls"]) {
                const auto& fn = call.at("function");
                if (fn.at("name") != "navigate")
                    continue;
                const Json args = Json::parse(fn.at("arguments").get<std::string>());
                const auto id = args.at("nav_point_id").get<std::string>();
                if (ctx.find_nav_point(id))
                    d.action = action::Navigate{id};
                break;
            }
        }
    } catch (const std::exception&) {
        ++failures_;
    }
    return d;
}

} // namespace pixie::agent
