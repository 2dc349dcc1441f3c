// SPDX-License-Identifier: Apache-2.0
// The checked-in wire schema must describe what the server and agent really
// send, and reject what the decoder rejects.
#include "../support/schema_check.hpp"

#include <pixie/agent/runner.hpp>
#include <pixie/protocol/client.hpp>
#include <pixie/protocol/commands.hpp>
#include <pixie/protocol/driver_port.hpp>
#include <pixie/protocol/server.hpp>
#include <pixie/world/world_spec.hpp>

#include <doctest.h>
#include <httplib.h>

#include <fstream>
#include <map>
#include <set>

using namespace pixie;
using namespace pixie::protocol;
using pixie::testing::SchemaCheck;

namespace {

SchemaCheck load_schema()
{
    std::ifstream in(PIXIE_SCHEMA_FILE);
    REQUIRE(in);
    return SchemaCheck(nlohmann::json::parse(in));
}

world::WorldSpec museum()
{
    return world::load_world_file(std::string(PIXIE_DATA_DIR) + "/worlds/museum.world.json");
}

/// Frame as it travels: encoded, then parsed as plain JSON.
nlohmann::json wire(const Envelope& e) { return nlohmann::json::parse(encode(e)); }

/// Forwards to another port and keeps every outgoing command frame.
class RecordingPort final : public DriverPort {
public:
    explicit RecordingPort(DriverPort& inner) : inner_(inner) {}

    void send(std::string type, Json payload, ResponseHandler on_done) override
    {
        frames.push_back(Envelope{kProtocolVersion, "r" + std::to_string(frames.size()), 0.0, type, payload, {}});
        inner_.send(std::move(type), std::move(payload), std::move(on_done));
    }
    void subscribe(std::vector<std::string> topics) override
    {
        frames.push_back(Envelope{kProtocolVersion, "s", 0.0, "Subscribe", Json{{"topics", topics}}, {}});
        inner_.subscribe(std::move(topics));
    }
    void set_event_handler(EventHandler handler) override { inner_.set_event_handler(std::move(handler)); }

    std::vector<Envelope> frames;

private:
    DriverPort& inner_;
};

} // namespace

TEST_CASE("schema type list matches the registered frame types")
{
    const auto schema = load_schema();
    std::set<std::string> listed;
    for (const auto& t : schema.at("/properties/type/enum"))
        listed.insert(t.get<std::string>());
    std::set<std::string> registered{std::string(kHello), std::string(kWelcome), std::string(kResponse),
        std::string(kError)};
    for (auto t : command_types())
        registered.emplace(t);
    for (auto t : event_types())
        registered.emplace(t);
    CHECK(listed == registered);

    std::set<std::string> topics;
    for (const auto& t : schema.at("/definitions/topic/enum"))
        topics.insert(t.get<std::string>());
    CHECK(topics.size() == event_types().size());
    for (const auto& t : registered)
        if (t != kHello && t != kWelcome && t != kResponse && t != kError)
            CHECK_MESSAGE(schema.at("/definitions/payloads").contains(t), t);
}

TEST_CASE("frames from a guided visit validate against the schema")
{
    const auto schema = load_schema();
    RoomHost host{world::RoomInstance(museum())};
    std::vector<Envelope> frames;

    std::set<std::string> all;
    for (auto t : event_types())
        all.emplace(t);
    host.add_subscriber([&](const Envelope& e) { frames.push_back(e); }, all);

    LocalDriverPort local(host);
    RecordingPort port(local);
    agent::RuleBackend backend;
    agent::AgentConfig cfg;
    cfg.post = world::Position{19.25, 3.25};
    agent::AgentRunner runner(port, backend, cfg);
    runner.start(0.0);

    auto user = [&](const Command& c) {
        const std::string id = "u" + std::to_string(frames.size());
        frames.push_back(Envelope{kProtocolVersion, id, host.room().clock_s(), std::string(command_type(c)),
            command_payload(c), {}});
        host.enqueue(id, c, [&](const Envelope& reply) { frames.push_back(reply); });
    };
    auto run = [&](int ticks) {
        for (int i = 0; i < ticks; ++i) {
            host.tick();
            runner.pump(host.room().clock_s());
        }
    };

    user(cmd::Join{"visitor", world::AvatarKind::User, world::Position{18.25, 3.25}, std::nullopt});
    run(5);
    user(cmd::GetEnvironment{true});
    user(cmd::SendChat{"visitor", "Please take me to the globe"});
    run(600);
    user(cmd::SetDestination{"visitor", std::string("fossil")});
    user(cmd::SetDestination{"visitor", world::Position{-5.0, -5.0}});
    user(cmd::GetPathStatus{"visitor"});
    user(cmd::SetHeading{"visitor", 1.0});
    user(cmd::PlayEmote{"visitor", "wave"});
    user(cmd::SetStatusText{"visitor", std::nullopt});
    user(cmd::SetPosition{"visitor", world::Position{18.25, 5.25}});
    user(cmd::Leave{"nobody"});
    run(20);
    user(cmd::Leave{"visitor"});
    run(5);
    runner.finish(host.room().clock_s());

    for (const auto& f : port.frames)
        frames.push_back(f);

    std::map<std::string, int> seen;
    for (const auto& f : frames) {
        const auto errs = schema.errors(wire(f));
        for (const auto& e : errs)
            FAIL_CHECK(f.type << ": " << e);
        ++seen[f.type];
    }
    for (const char* t : {"Join", "SendChat", "SetDestination", "SetStatusText", "Response", "Error", "UserEntered",
             "UserExited", "ChatReceived", "DestinationReached", "TickUpdate", "EmotePlayed"})
        CHECK_MESSAGE(seen[t] > 0, t);
}

TEST_CASE("live server handshake, errors and HTTP shim validate against the schema")
{
    const auto schema = load_schema();
    ServerOptions o;
    o.port = 0;
    o.time_scale = 0;
    DriverServer server(world::RoomInstance(museum()), o);
    auto client = DriverClient::connect(server.address());

    CHECK(schema.valid(wire(Envelope{kProtocolVersion, "h", 0.0, std::string(kWelcome), client->welcome(), {}})));

    client->send_raw(R"({"v":1,"id":"x","t_s":0,"type":)");
    auto err = client->next_unmatched(std::chrono::seconds(2));
    REQUIRE(err);
    CHECK(schema.errors(wire(*err)).empty());

    client->send_raw(R"({"v":2,"id":"old","t_s":0,"type":"GetEnvironment","payload":{}})");
    err = client->next_unmatched(std::chrono::seconds(2));
    REQUIRE(err);
    CHECK(err->payload["code"] == "version");
    CHECK(schema.errors(wire(*err)).empty());
    CHECK(client->connected());

    client->request("Join", Json{{"avatar", {{"id", "web"}, {"kind", "user"}}}});
    httplib::Client http("127.0.0.1", server.port());
    auto env = http.Get("/env");
    REQUIRE(env);
    CHECK(schema.errors(nlohmann::json::parse(env->body), &schema.at("/definitions/http/GET ~1env/response")).empty());
    const auto body = nlohmann::json{{"from", "web"}, {"text", "hello"}};
    CHECK(schema.errors(body, &schema.at("/definitions/http/POST ~1chat/request")).empty());
    auto chat = http.Post("/chat", body.dump(), "application/json");
    REQUIRE(chat);
    CHECK(chat->status == 200);
    CHECK(schema.errors(nlohmann::json::parse(chat->body), &schema.at("/definitions/http/POST ~1chat/response")).empty());
}

TEST_CASE("schema rejects frames the decoder rejects")
{
    const auto schema = load_schema();
    using nlohmann::json;
    const json good = json::parse(R"({"v":1,"id":"a","t_s":0.5,"type":"SendChat","payload":{"from":"u","text":"hi"}})");
    CHECK(schema.valid(good));
    for (const char* key : {"v", "id", "t_s", "type", "payload"}) {
        json bad = good;
        bad.erase(key);
        CHECK_MESSAGE(!schema.valid(bad), key);
    }
    json v2 = good;
    v2["v"] = 2;
    CHECK_FALSE(schema.valid(v2));
    json unknown = good;
    unknown["type"] = "Teleport";
    CHECK_FALSE(schema.valid(unknown));
    json neg = good;
    neg["seq"] = -1;
    CHECK_FALSE(schema.valid(neg));
    json payload = good;
    payload["payload"] = json::object({{"from", "u"}});
    CHECK_FALSE(schema.valid(payload));
    json extra = good;
    extra["extra"] = 1;
    CHECK_FALSE(schema.valid(extra));
}
