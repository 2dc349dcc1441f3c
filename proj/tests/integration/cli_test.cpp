// SPDX-License-Identifier: Apache-2.0
// Drives the pixie executable end to end.
#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <string>
#include <thread>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status = -1;
    std::string out;
};

Outcome pixie(const std::string& args)
{
    const std::string cmd = std::string(PIXIE_BIN) + " " + args + " 2>&1";
    Outcome o;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
        o.out.append(buf.data(), n);
    const int raw = pclose(p);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return o;
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("pixie_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("run writes one log and repeats byte for byte")
{
    const auto dir = scratch("run");
    const auto a = pixie("run --world museum.world.json --condition A --seed 7 --out " + (dir / "a").string());
    const auto b = pixie("run --world museum.world.json --condition A --seed 7 --out " + (dir / "b").string());
    REQUIRE_MESSAGE(a.status == 0, a.out);
    REQUIRE(b.status == 0);
    const auto la = slurp(dir / "a" / "museum_A_s7.jsonl");
    CHECK(!la.empty());
    CHECK(la == slurp(dir / "b" / "museum_A_s7.jsonl"));
    CHECK(pixie("run --world nowhere.world.json --out " + dir.string()).status == 2);
    CHECK(pixie("run --world museum.world.json --condition Z --out " + dir.string()).status == 2);
}

TEST_CASE("replay prints the kinds and flags a mismatch")
{
    const auto ok = pixie("replay --fixture fig3.dialog.json");
    REQUIRE_MESSAGE(ok.status == 0, ok.out);
    CHECK(ok.out.find("request -> reply -> navigate -> arrived -> chat") != std::string::npos);

    const auto dir = scratch("replay");
    auto fixture = nlohmann::json::parse(slurp(fs::path(PIXIE_DATA_DIR) / "fixtures" / "fig3.dialog.json"));
    fixture["world"] = (fs::path(PIXIE_DATA_DIR) / "worlds" / "museum.world.json").string();
    fixture["expected"] = {"chat", "reply"};
    std::ofstream(dir / "wrong.dialog.json") << fixture.dump(2);
    const auto bad = pixie("replay --fixture " + (dir / "wrong.dialog.json").string());
    CHECK(bad.status == 1);
    CHECK(bad.out.find("expected") != std::string::npos);
}

TEST_CASE("batch then analyze produce a manifest and a report")
{
    const auto dir = scratch("batch");
    nlohmann::json m{{"worlds", {"ruina.world.json"}}, {"conditions", {"A", "C"}}, {"seeds", {1, 2}},
        {"out", (dir / "logs").string()}};
    std::ofstream(dir / "m.json") << m.dump();
    const auto b = pixie("batch --matrix " + (dir / "m.json").string());
    REQUIRE_MESSAGE(b.status == 0, b.out);
    const auto manifest = nlohmann::json::parse(slurp(dir / "logs" / "manifest.json"));
    CHECK(manifest["n_runs"] == 4);
    CHECK(manifest["n_failed"] == 0);

    const auto r = pixie("analyze --logs " + (dir / "logs").string() + " --cell-size 1.0 --out " +
        (dir / "report").string());
    REQUIRE_MESSAGE(r.status == 0, r.out);
    CHECK(fs::exists(dir / "report" / "metrics.csv"));
    CHECK(fs::exists(dir / "report" / "heatmap_ruina_A_s1.ppm"));
    const auto summary = slurp(dir / "report" / "summary.txt");
    CHECK(summary.find("human-study reference") != std::string::npos);

    CHECK(pixie("analyze --logs " + (dir / "empty").string()).status == 2);
}

TEST_CASE("serve --ui hosts the static client next to the driver channel")
{
    const auto ui = scratch("ui");
    std::ofstream(ui / "index.html") << "<html>client</html>";
    std::ofstream(ui / "app.js") << "console.log(1);";

    // Pick a free port by binding and releasing it.
    int port = 0;
    {
        const int fd = socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in sa{};
        sa.sin_family = AF_INET;
        sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        socklen_t len = sizeof sa;
        if (bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) == 0 &&
            getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len) == 0)
            port = ntohs(sa.sin_port);
        close(fd);
    }
    REQUIRE(port > 0);
    const std::string addr = "127.0.0.1:" + std::to_string(port);
    auto server = std::async(std::launch::async, [&] {
        return pixie("serve --world museum.world.json --addr " + addr + " --ui " + ui.string() +
            " --agent rule --time-scale 10 --for 4");
    });

    httplib::Client http("127.0.0.1", port);
    http.set_connection_timeout(1);
    httplib::Result index;
    for (int i = 0; i < 50 && !index; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        index = http.Get("/");
    }
    REQUIRE(index);
    CHECK(index->status == 200);
    CHECK(index->body == "<html>client</html>");
    auto js = http.Get("/app.js");
    REQUIRE(js);
    CHECK(js->get_header_value("Content-Type").find("javascript") != std::string::npos);

    // The in-process agent joins over the wire and shows up in the snapshot.
    bool agent_present = false;
    for (int i = 0; i < 30 && !agent_present; ++i) {
        auto env = http.Get("/env");
        REQUIRE(env);
        const auto snapshot = nlohmann::json::parse(env->body);
        for (const auto& u : snapshot["users"])
            agent_present = agent_present || u["kind"] == "agent";
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    CHECK(agent_present);
    const auto done = server.get();
    CHECK_MESSAGE(done.status == 0, done.out);
}
