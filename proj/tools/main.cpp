#include <iostream>

#include <CLI11.hpp>

#include "sot/runner.hpp"
#include "sot/util.hpp"

namespace {

using namespace sot;

struct RunOptions {
    std::string config_file;            // full RunConfig JSON, alternative to flags
    std::vector<std::string> datasets;  // "mgsm:path/to/root"
    std::string langs;
    std::vector<std::string> strategies;
    std::string preset_name;
    std::string backend_config;
    std::string mock;
    std::optional<size_t> limit;
    uint64_t seed = 0;
    int parallelism = 4;
    std::string cache = "cache.jsonl";
    std::string out = "runs/run";
    std::string exemplars;
    std::string translations;
    std::string markers;

    CLI::Option* limit_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* parallelism_opt = nullptr;
    CLI::Option* cache_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_run_options(CLI::App* cmd, RunOptions& opts, bool with_strategies) {
    cmd->add_option("--config", opts.config_file,
                    "Run config JSON (as written to meta.json); replaces the selection flags");
    cmd->add_option("--dataset", opts.datasets, "Dataset selection as <name>:<root-dir> (repeatable)");
    cmd->add_option("--langs", opts.langs, "Comma-separated language tags, e.g. en,sw");
    if (with_strategies) {
        cmd->add_option("--strategy", opts.strategies,
                        "Strategies: direct,cot,fewshot[N],sot,sot:BBB,sot+cot,sot+3shot,"
                        "translate1,translate2");
        cmd->add_option("--preset", opts.preset_name, "Preset: main|ablation|composition|translation");
    }
    cmd->add_option("--backend-config", opts.backend_config, "Backend config JSON file");
    cmd->add_option("--mock", opts.mock, "Mock backend rule: echo-gold|echo-wrong");
    opts.limit_opt = cmd->add_option("--limit", opts.limit, "Max items per (dataset, language)");
    opts.seed_opt = cmd->add_option("--seed", opts.seed, "Seed for exemplar sampling");
    opts.parallelism_opt =
        cmd->add_option("--parallelism", opts.parallelism, "Concurrent backend requests");
    opts.cache_opt = cmd->add_option("--cache", opts.cache, "Response cache JSONL path");
    opts.out_opt = cmd->add_option("--out", opts.out, "Run output directory");
    cmd->add_option("--exemplars", opts.exemplars, "Exemplar store JSONL (few-shot strategies)");
    cmd->add_option("--translations", opts.translations,
                    "Pre-computed translations JSONL (translate2)");
    cmd->add_option("--markers", opts.markers, "Marker table TSV override");
}

std::vector<Language> parse_langs(const std::string& csv) {
    std::vector<Language> langs;
    for (const auto& code : split(csv, ',')) {
        if (code.empty()) continue;
        auto lang = language_from_code(trim(code));
        if (!lang) throw CLI::ValidationError("--langs", "unknown language tag '" + code + "'");
        langs.push_back(*lang);
    }
    return langs;
}

RunConfig build_config(const RunOptions& opts, const std::string& forced_preset = "") {
    if (!opts.config_file.empty()) {
        if (!opts.datasets.empty() || !opts.langs.empty() || !opts.strategies.empty() ||
            !opts.preset_name.empty()) {
            throw CLI::ValidationError("--config",
                                       "cannot be combined with --dataset/--langs/--strategy/--preset");
        }
        RunConfig config = config_from_json(nlohmann::json::parse(read_file(opts.config_file)));
        if (!opts.mock.empty()) config.backend.type = "mock-" + opts.mock;
        if (opts.limit_opt && opts.limit_opt->count() > 0) config.limit = opts.limit;
        if (opts.seed_opt && opts.seed_opt->count() > 0) config.seed = opts.seed;
        if (opts.parallelism_opt && opts.parallelism_opt->count() > 0) {
            config.parallelism = opts.parallelism;
        }
        if (opts.cache_opt && opts.cache_opt->count() > 0) config.cache_path = opts.cache;
        if (opts.out_opt && opts.out_opt->count() > 0) config.out_dir = opts.out;
        return config;
    }
    if (opts.datasets.empty() || opts.langs.empty()) {
        throw CLI::ValidationError("--dataset", "provide --dataset and --langs (or --config)");
    }

    RunConfig config;
    auto langs = parse_langs(opts.langs);
    for (const auto& entry : opts.datasets) {
        size_t colon = entry.find(':');
        if (colon == std::string::npos) {
            throw CLI::ValidationError("--dataset", "expected <name>:<root-dir>, got '" + entry + "'");
        }
        DatasetSelection sel;
        auto dataset = dataset_from_name(entry.substr(0, colon));
        if (!dataset) {
            throw CLI::ValidationError("--dataset", "unknown dataset '" + entry.substr(0, colon) + "'");
        }
        sel.dataset = *dataset;
        sel.root = entry.substr(colon + 1);
        sel.langs = langs;
        config.datasets.push_back(std::move(sel));
    }

    std::string preset_name = forced_preset.empty() ? opts.preset_name : forced_preset;
    if (!preset_name.empty()) {
        config.strategies = preset(preset_name, opts.seed);
    }
    for (const auto& entry : opts.strategies) {
        for (const auto& one : split(entry, ',')) {
            if (!one.empty()) config.strategies.push_back(parse_strategy(trim(one), opts.seed));
        }
    }
    if (config.strategies.empty()) {
        throw CLI::ValidationError("--strategy", "select strategies via --strategy or --preset");
    }

    if (!opts.backend_config.empty()) {
        config.backend = BackendConfig::from_json_file(opts.backend_config);
    }
    if (!opts.mock.empty()) {
        if (opts.mock != "echo-gold" && opts.mock != "echo-wrong") {
            throw CLI::ValidationError("--mock", "expected echo-gold or echo-wrong");
        }
        config.backend.type = "mock-" + opts.mock;
        if (config.backend.id == "default") config.backend.id = "mock";
        if (config.backend.model.empty()) config.backend.model = "scripted";
    }
    if (opts.backend_config.empty() && opts.mock.empty()) {
        throw CLI::ValidationError("--backend-config", "provide --backend-config or --mock");
    }

    config.parallelism = opts.parallelism;
    config.limit = opts.limit;
    config.seed = opts.seed;
    config.cache_path = opts.cache;
    config.out_dir = opts.out;
    config.exemplars_path = opts.exemplars;
    config.translations_path = opts.translations;
    config.markers_path = opts.markers;
    return config;
}

int finish_run(const RunSummary& summary) {
    std::cout << "records: " << summary.n_records << " (failed: " << summary.n_failed
              << ", backend calls: " << summary.backend_calls << ")\n";
    if (summary.n_records > 0) {
        std::filesystem::path report = summary.run_dir / "report.md";
        if (std::filesystem::exists(report)) std::cout << "\n" << read_file(report);
    }
    std::cout << "run dir: " << summary.run_dir.string() << "\n";
    if (!summary.ok()) {
        std::cerr << "error: more than 10% of records failed\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structured-of-Thought multilingual prompting benchmark harness"};
    app.require_subcommand(1);

    RunOptions run_opts;
    CLI::App* cmd_run = app.add_subcommand("run", "Evaluate datasets x strategies x backend");
    add_run_options(cmd_run, run_opts, /*with_strategies=*/true);

    RunOptions ablate_opts;
    CLI::App* cmd_ablate =
        app.add_subcommand("ablate", "Run the 8-mask step-scope ablation");
    add_run_options(cmd_ablate, ablate_opts, /*with_strategies=*/false);

    std::string resume_dir;
    CLI::App* cmd_resume = app.add_subcommand("resume", "Complete a partial run directory");
    cmd_resume->add_option("--run-dir", resume_dir, "Run directory with meta.json")->required();

    std::string report_dir;
    std::string report_format = "markdown";
    CLI::App* cmd_report = app.add_subcommand("report", "Regenerate reports from records.jsonl");
    cmd_report->add_option("--run-dir", report_dir)->required();
    cmd_report->add_option("--format", report_format, "markdown|csv|json");

    std::string cache_path;
    CLI::App* cmd_cache = app.add_subcommand("cache", "Cache utilities");
    CLI::App* cmd_cache_stats = cmd_cache->add_subcommand("stats", "Show cache statistics");
    cmd_cache_stats->add_option("--cache", cache_path)->required();

    RunOptions validate_opts;
    CLI::App* cmd_validate =
        app.add_subcommand("validate-data", "Check the parallel-corpus property");
    cmd_validate->add_option("--dataset", validate_opts.datasets, "<name>:<root-dir>")->required();
    cmd_validate->add_option("--langs", validate_opts.langs)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) return finish_run(run(build_config(run_opts)));
        if (*cmd_ablate) return finish_run(run(build_config(ablate_opts, "ablation")));
        if (*cmd_resume) return finish_run(resume(resume_dir));
        if (*cmd_report) {
            ReportTables tables = report_from_run_dir(report_dir);
            ReportFormat format;
            if (report_format == "markdown") format = ReportFormat::Markdown;
            else if (report_format == "csv") format = ReportFormat::Csv;
            else if (report_format == "json") format = ReportFormat::Json;
            else throw std::invalid_argument("unknown format '" + report_format + "'");
            for (const auto& [name, content] : render_report(tables, format)) {
                write_file(std::filesystem::path(report_dir) / name, content);
                std::cout << "wrote " << (std::filesystem::path(report_dir) / name).string() << "\n";
            }
            return 0;
        }
        if (*cmd_cache_stats) {
            ResponseCache cache{std::filesystem::path(cache_path)};
            std::cout << "entries: " << cache.entries() << "\n";
            std::cout << "corrupt lines skipped: " << cache.corrupt_lines() << "\n";
            if (std::filesystem::exists(cache_path)) {
                std::cout << "file bytes: " << std::filesystem::file_size(cache_path) << "\n";
            }
            return 0;
        }
        if (*cmd_validate) {
            auto langs = parse_langs(validate_opts.langs);
            for (const auto& entry : validate_opts.datasets) {
                size_t colon = entry.find(':');
                if (colon == std::string::npos) {
                    throw std::invalid_argument("--dataset expects <name>:<root-dir>");
                }
                auto dataset = dataset_from_name(entry.substr(0, colon));
                if (!dataset) throw std::invalid_argument("unknown dataset");
                auto items = load_dataset(*dataset, entry.substr(colon + 1), langs);
                auto report = validate_parallelism(items);
                std::cout << to_string(*dataset) << ": " << items.size() << " items, ";
                if (report.parallel()) {
                    std::cout << "parallel across " << langs.size() << " language(s)\n";
                } else {
                    std::cout << report.missing.size() << " id(s) not parallel:\n";
                    for (const auto& [id, missing] : report.missing) {
                        std::cout << "  " << id << " missing in";
                        for (Language lang : missing) std::cout << " " << to_string(lang);
                        std::cout << "\n";
                    }
                }
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
