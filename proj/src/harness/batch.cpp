// SPDX-License-Identifier: Apache-2.0
#include <pixie/harness/batch.hpp>

#include <pixie/harness/session.hpp>

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace pixie::harness {

namespace fs = std::filesystem;

std::vector<SessionConfig> BatchMatrix::expand() const
{
    std::vector<SessionConfig> out;
    for (const auto& w : worlds)
        for (Condition c : conditions)
            for (std::uint64_t seed : seeds) {
                SessionConfig cfg = base;
                cfg.world = w;
                cfg.condition = c;
                cfg.seed = seed;
                const auto it = persona_by_condition.find(std::string(to_string(c)));
                cfg.persona = it != persona_by_condition.end() ? it->second : persona;
                out.push_back(std::move(cfg));
            }
    return out;
}

namespace {

fs::path resolve_world(const fs::path& p, const fs::path& base_dir, const std::optional<fs::path>& data_dir)
{
    if (p.is_absolute())
        return p;
    if (fs::exists(base_dir / p) || !data_dir)
        return base_dir / p;
    if (fs::exists(*data_dir / p))
        return *data_dir / p;
    return *data_dir / "worlds" / p;
}

} // namespace

BatchMatrix matrix_from_json(const Json& j, const fs::path& base_dir, const std::optional<fs::path>& data_dir)
{
    BatchMatrix m;
    for (const auto& w : j.at("worlds"))
        m.worlds.push_back(resolve_world(w.get<std::string>(), base_dir, data_dir));
    if (j.contains("conditions")) {
        m.conditions.clear();
        for (const auto& c : j.at("conditions"))
            m.conditions.push_back(condition_from_string(c.get<std::string>()));
    }
    if (j.contains("seeds")) {
        m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
        const auto n = j.value("n_seeds", std::uint64_t{5});
        const auto first = j.value("first_seed", std::uint64_t{1});
        for (std::uint64_t i = 0; i < n; ++i)
            m.seeds.push_back(first + i);
    }
    if (j.contains("persona"))
        m.persona = persona_from_json(j.at("persona"));
    if (j.contains("personas"))
        for (const auto& [cond, pj] : j.at("personas").items()) {
            Json merged = persona_to_json(m.persona);
            merged.update(pj);
            m.persona_by_condition[std::string(to_string(condition_from_string(cond)))] = persona_from_json(merged);
        }
    if (j.contains("session")) {
        Json s = j.at("session");
        s["world"] = "unused";
        m.base = config_from_json(s);
    }
    m.out_dir = base_dir / fs::path(j.value("out", std::string("logs")));
    m.threads = j.value("threads", 0u);
    if (m.worlds.empty() || m.conditions.empty() || m.seeds.empty())
        throw std::invalid_argument("matrix needs at least one world, condition and seed");
    return m;
}

BatchMatrix load_matrix(const fs::path& path, const std::optional<fs::path>& data_dir)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open matrix " + path.string());
    return matrix_from_json(Json::parse(in), path.parent_path(), data_dir);
}

std::size_t BatchResult::failed() const
{
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) { return !r.ok; }));
}

std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

BatchResult run_batch(const BatchMatrix& matrix)
{
    const auto cells = matrix.expand();
    fs::create_directories(matrix.out_dir);

    BatchResult result;
    result.runs.resize(cells.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const SessionConfig& cfg = cells[i];
            BatchRun& run = result.runs[i];
            run.session_id = cfg.session_id();
            run.world = cfg.world.filename().string();
            run.condition = std::string(to_string(cfg.condition));
            run.seed = cfg.seed;
            try {
                const std::string text = log::to_jsonl(run_session(cfg));
                run.file = run.session_id + ".jsonl";
                std::ofstream out(matrix.out_dir / run.file, std::ios::binary);
                out << text;
                if (!out)
                    throw std::runtime_error("cannot write " + run.file);
                run.sha256 = sha256_hex(text);
                run.bytes = text.size();
                run.ok = true;
            } catch (const std::exception& e) {
                run.file.clear();
                run.ok = false;
                run.error = e.what();
            }
        }
    };

    unsigned n = matrix.threads ? matrix.threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(1, cells.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    Json runs = Json::array();
    for (const auto& r : result.runs) {
        Json e{{"session_id", r.session_id}, {"world", r.world}, {"condition", r.condition}, {"seed", r.seed},
            {"status", r.ok ? "ok" : "failed"}};
        if (r.ok) {
            e["file"] = r.file;
            e["sha256"] = r.sha256;
            e["bytes"] = r.bytes;
        } else {
            e["error"] = r.error;
        }
        runs.push_back(std::move(e));
    }
    Json manifest{{"format", 1}, {"n_runs", result.runs.size()}, {"n_failed", result.failed()}, {"runs", runs}};
    result.manifest = matrix.out_dir / "manifest.json";
    std::ofstream(result.manifest, std::ios::binary) << manifest.dump(2) << '\n';
    return result;
}

} // namespace pixie::harness
