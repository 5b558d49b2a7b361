#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sot/backend.hpp"
#include "sot/corpus.hpp"
#include "sot/metrics.hpp"
#include "sot/strategy.hpp"

namespace sot {

struct DatasetSelection {
    Dataset dataset = Dataset::MGSM;
    std::filesystem::path root;
    std::vector<Language> langs;
};

struct RunConfig {
    std::vector<DatasetSelection> datasets;
    std::vector<StrategySpec> strategies;
    BackendConfig backend;
    int parallelism = 4;
    std::optional<size_t> limit;  // per (dataset, language)
    uint64_t seed = 0;
    std::filesystem::path cache_path;
    std::filesystem::path out_dir;
    std::filesystem::path exemplars_path;     // required when a strategy uses few-shot
    std::filesystem::path translations_path;  // required for Type-2 translation runs
    std::filesystem::path markers_path;       // optional marker-table override

    // Checks invariants and that every referenced file exists.
    void validate() const;
};

struct RunSummary {
    size_t n_records = 0;
    size_t n_failed = 0;
    int backend_calls = 0;
    std::vector<RunRecord> records;
    std::filesystem::path run_dir;

    // More than 10% failed records makes the run unsuccessful.
    bool ok() const { return n_records > 0 && n_failed * 10 <= n_records; }
};

// Evaluates every (item, strategy) pair: assemble prompt, cached completion,
// extraction, scoring; records append crash-safely in canonical order.
// `backend_override` substitutes the configured backend (tests).
RunSummary run(const RunConfig& config, Backend* backend_override = nullptr);

// Completes the missing (item, strategy) pairs of a partial run directory.
// Refuses when the template version or dataset files changed since the run.
RunSummary resume(const std::filesystem::path& run_dir, Backend* backend_override = nullptr);

// Named experiment presets:
//   main        -> Direct, CoT, FewShot(k=3), SoT(full)
//   ablation    -> the 8 step masks in table order
//   composition -> SoT, SoT+CoT, SoT+3-shot
//   translation -> SoT, translate Type 1, translate Type 2
std::vector<StrategySpec> preset(std::string_view name, uint64_t seed = 0);

// Parses a strategy label list ("direct", "cot", "fewshot3", "sot", "sot:101",
// "sot+cot", "sot+3shot", "translate1", "translate2").
StrategySpec parse_strategy(std::string_view text, uint64_t seed);

// records.jsonl round-trip.
std::string record_to_jsonl(const RunRecord& record);
RunRecord record_from_jsonl(const std::string& line);
std::vector<RunRecord> read_records(const std::filesystem::path& file);

// Regenerates report files from an existing run directory.
ReportTables report_from_run_dir(const std::filesystem::path& run_dir);

nlohmann::ordered_json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace sot
