// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <pixie/harness/config.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pixie::harness {

/// worlds x conditions x seeds. Personas may differ per condition letter.
struct BatchMatrix {
    std::vector<std::filesystem::path> worlds;
    std::vector<Condition> conditions{Condition::OnDemand, Condition::FixedRoute, Condition::Control};
    std::vector<std::uint64_t> seeds;
    BotPersona persona;
    std::map<std::string, BotPersona> persona_by_condition;
    SessionConfig base;
    std::filesystem::path out_dir = "logs";
    unsigned threads = 0; // 0 = hardware concurrency

    std::vector<SessionConfig> expand() const;
};

/// Reads a matrix file. Relative world paths resolve against the file's
/// directory first, then against `data_dir` when given; `out` against the
/// file's directory.
BatchMatrix matrix_from_json(const Json& j, const std::filesystem::path& base_dir = {},
    const std::optional<std::filesystem::path>& data_dir = std::nullopt);
BatchMatrix load_matrix(const std::filesystem::path& path,
    const std::optional<std::filesystem::path>& data_dir = std::nullopt);

struct BatchRun {
    std::string session_id;
    std::string world;
    std::string condition;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string file; // relative to the output directory
    std::string sha256;
    std::size_t bytes = 0;
    std::string error;
};

struct BatchResult {
    std::vector<BatchRun> runs; // matrix order
    std::filesystem::path manifest;
    std::size_t failed() const;
};

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& path);

/// Runs every cell on a worker pool and writes `<out>/<session>.jsonl`
/// plus `<out>/manifest.json`. A failing cell is recorded, not thrown.
BatchResult run_batch(const BatchMatrix& matrix);

} // namespace pixie::harness
