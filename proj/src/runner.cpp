#include "sot/runner.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "sot/util.hpp"

namespace sot {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Task {
    size_t index = 0;
    StrategySpec spec;
    BenchmarkItem item;
    PromptBundle prompt;
};

// Counts physical backend invocations (cache misses).
class CountingBackend : public Backend {
public:
    explicit CountingBackend(Backend& inner) : inner_(inner) {}

    Completion complete(const PromptBundle& prompt) override {
        calls_.fetch_add(1);
        return inner_.complete(prompt);
    }
    const BackendConfig& config() const override { return inner_.config(); }
    int calls() const { return calls_.load(); }

private:
    Backend& inner_;
    std::atomic<int> calls_{0};
};

std::string mock_response_text(const BenchmarkItem& item, const StrategySpec& spec, bool wrong) {
    std::string answer;
    if (item.task == TaskKind::MathNumeric) {
        answer = item.gold_number;
        if (wrong) answer = ExactDecimal::parse(answer)->plus_one().to_string();
    } else {
        int choice = wrong ? 1 - item.gold_choice : item.gold_choice;
        answer = std::to_string(choice);
    }
    if (!spec.is_sot_like()) {
        return "Working through the problem directly.\nFinal Answer: " + answer;
    }
    StepMask mask = spec.kind == StrategyKind::SoT ? spec.mask : StepMask{true, true, true};
    std::string text;
    if (mask.s1) {
        text +=
            "1. Thinking in English:\n"
            "Restate the problem in English.\n"
            "Identify what is being asked.\n";
    }
    if (mask.s2) {
        text +=
            "2. Extract relationships:\n"
            "First quantity in the question: 1\n"
            "Second quantity in the question: 2\n";
    }
    if (mask.s3) {
        text +=
            "3. Language-specific knowledge:\n"
            "Units follow the source-language convention.\n";
    }
    text += "4. Calculation:\nCombining the relationships yields the result.\n";
    text += "Final Answer: " + answer;
    return text;
}

struct Scored {
    bool correct = false;
    std::optional<std::string> extracted;
    std::optional<std::string> method;
};

Scored score_completion(const BenchmarkItem& item, const std::string& text,
                        const MarkerTable& markers) {
    Scored out;
    if (item.task == TaskKind::MathNumeric) {
        auto gold = ExactDecimal::parse(item.gold_number);
        auto extracted = extract_numeric_answer(text, item.lang, !gold->is_integral(), markers);
        if (extracted) {
            out.extracted = extracted->numeric.to_string();
            out.method = std::string(to_string(extracted->method));
            out.correct = numeric_equal(extracted->numeric, *gold);
        }
    } else {
        auto extracted = extract_choice(text, item.copa.choice0, item.copa.choice1, markers);
        if (extracted) {
            out.extracted = std::to_string(extracted->choice);
            out.method = std::string(to_string(extracted->method));
            out.correct = extracted->choice == item.gold_choice;
        }
    }
    return out;
}

std::string lang_csv(const std::vector<Language>& langs) {
    std::string out;
    for (size_t i = 0; i < langs.size(); ++i) {
        if (i) out += ",";
        out += to_string(langs[i]);
    }
    return out;
}

void write_report_files(const std::filesystem::path& run_dir, const ReportTables& tables) {
    for (ReportFormat format : {ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json}) {
        for (const auto& [name, content] : render_report(tables, format)) {
            write_file(run_dir / name, content);
        }
    }
}

ordered_json meta_for(const RunConfig& config) {
    ordered_json meta;
    meta["template_version"] = PromptTemplate::current().version();
    meta["config"] = config_to_json(config);
    ordered_json hashes;
    for (const auto& sel : config.datasets) {
        hashes[std::string(to_string(sel.dataset))] =
            dataset_file_hashes(sel.dataset, sel.root, sel.langs);
    }
    meta["dataset_hashes"] = std::move(hashes);
    meta["decoding"] = {{"temperature", config.backend.temperature},
                        {"max_output_tokens", config.backend.max_output_tokens}};
    ordered_json labels = ordered_json::array();
    for (const auto& spec : config.strategies) labels.push_back(spec.label());
    meta["strategies"] = std::move(labels);
    return meta;
}

RunSummary run_impl(const RunConfig& config, Backend* backend_override,
                    const std::filesystem::path& run_dir,
                    const std::map<std::string, RunRecord>& existing, bool fresh) {
    config.validate();

    const MarkerTable* markers = &MarkerTable::bundled();
    MarkerTable loaded_markers;
    if (!config.markers_path.empty()) {
        loaded_markers = MarkerTable::load_tsv(config.markers_path);
        markers = &loaded_markers;
    }

    bool wants_fewshot = false;
    bool wants_type2 = false;
    for (const auto& spec : config.strategies) {
        wants_fewshot = wants_fewshot || spec.uses_fewshot();
        wants_type2 = wants_type2 || spec.kind == StrategyKind::TranslateType2;
    }
    ExemplarStore exemplars;
    if (wants_fewshot) exemplars = ExemplarStore::load_jsonl(config.exemplars_path);
    TranslationTable translations;
    if (wants_type2) translations = TranslationTable::load_jsonl(config.translations_path);

    // Full per-language pools; evaluation slices obey --limit.
    std::map<std::pair<std::string, std::string>, std::vector<BenchmarkItem>> pools;
    for (const auto& sel : config.datasets) {
        for (Language lang : sel.langs) {
            std::vector<Language> one{lang};
            pools[{std::string(to_string(sel.dataset)), std::string(to_string(lang))}] =
                load_dataset(sel.dataset, sel.root, one);
        }
    }

    std::filesystem::create_directories(run_dir);
    write_file(run_dir / "meta.json", meta_for(config).dump(2) + "\n");

    std::unique_ptr<Backend> owned_backend;
    ScriptedBackend* scripted = nullptr;
    Backend* backend = backend_override;
    if (!backend) {
        if (config.backend.is_mock()) {
            auto mock = std::make_unique<ScriptedBackend>(config.backend);
            scripted = mock.get();
            owned_backend = std::move(mock);
        } else {
            owned_backend = std::make_unique<HttpBackend>(config.backend);
        }
        backend = owned_backend.get();
    }
    CountingBackend counting(*backend);

    // Canonical task order: dataset, strategy, language, item.
    std::vector<Task> tasks;
    const bool mock_wrong = config.backend.type == "mock-echo-wrong";
    for (const auto& sel : config.datasets) {
        for (const auto& spec : config.strategies) {
            for (Language lang : sel.langs) {
                const auto& pool =
                    pools[{std::string(to_string(sel.dataset)), std::string(to_string(lang))}];
                size_t n = pool.size();
                if (config.limit) n = std::min(n, *config.limit);
                for (size_t i = 0; i < n; ++i) {
                    const BenchmarkItem& item = pool[i];
                    Task task;
                    task.spec = spec;
                    task.item = item;

                    ExemplarSet shots;
                    const ExemplarSet* shots_ptr = nullptr;
                    if (spec.uses_fewshot()) {
                        shots = sample_exemplars(pool, spec.k_shots, spec.seed, item.id, exemplars);
                        shots_ptr = &shots;
                    }
                    std::optional<std::string> translation;
                    if (spec.kind == StrategyKind::TranslateType2) {
                        translation = translations.translation_for(item.id, item.lang);
                        if (!translation) {
                            throw std::runtime_error("no translation for item '" + item.id +
                                                     "' lang '" + std::string(to_string(item.lang)) +
                                                     "' in " + config.translations_path.string());
                        }
                    }
                    task.prompt = build_prompt(item, spec, shots_ptr, translation);
                    task.index = tasks.size();
                    if (scripted && !existing.contains(task.prompt.strategy_fingerprint)) {
                        scripted->set_response(task.prompt.strategy_fingerprint,
                                               mock_response_text(item, spec, mock_wrong));
                    }
                    tasks.push_back(std::move(task));
                }
            }
        }
    }

    ResponseCache cache(config.cache_path);

    std::filesystem::path records_path = run_dir / "records.jsonl";
    std::ofstream records_out(records_path,
                              std::ios::binary | (fresh ? std::ios::trunc : std::ios::app));
    if (!records_out) throw std::runtime_error("cannot open " + records_path.string());

    // Workers compute; the main thread writes contiguous results in task
    // order so a crash leaves a clean prefix.
    std::vector<RunRecord> records(tasks.size());
    std::vector<bool> reused(tasks.size(), false);
    std::map<size_t, RunRecord> pending;
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<size_t> next_task{0};

    auto execute = [&](const Task& task) {
        RunRecord rec;
        rec.item_id = task.item.id;
        rec.dataset = task.item.dataset;
        rec.lang = task.item.lang;
        rec.strategy = task.spec.label();
        rec.fingerprint = task.prompt.strategy_fingerprint;
        try {
            Completion completion = cached_complete(cache, counting, task.prompt);
            rec.in_tokens = completion.input_tokens;
            rec.out_tokens = completion.output_tokens;
            if (!completion.from_cache) rec.latency_s = completion.latency_s;
            rec.usage_estimated = completion.usage_estimated;
            Scored scored = score_completion(task.item, completion.text, *markers);
            rec.correct = scored.correct;
            rec.extracted = std::move(scored.extracted);
            rec.method = std::move(scored.method);
            if (task.spec.is_sot_like()) {
                SoTTrace trace = parse_sot_trace(completion.text);
                rec.step2_count = trace.knowledge_entries.size();
                rec.step3_count = trace.lang_specific_entries.size();
            }
        } catch (const std::exception& e) {
            rec.failed = true;
            std::cerr << "warning: task " << task.item.id << "/" << rec.strategy
                      << " failed: " << e.what() << "\n";
        }
        return rec;
    };

    auto worker = [&] {
        while (true) {
            size_t i = next_task.fetch_add(1);
            if (i >= tasks.size()) break;
            const Task& task = tasks[i];
            RunRecord rec;
            auto it = existing.find(task.prompt.strategy_fingerprint);
            if (it != existing.end() && !it->second.failed) {
                rec = it->second;
                {
                    std::lock_guard lock(mu);
                    reused[i] = true;
                    pending.emplace(i, std::move(rec));
                }
            } else {
                rec = execute(task);
                {
                    std::lock_guard lock(mu);
                    pending.emplace(i, std::move(rec));
                }
            }
            cv.notify_all();
        }
    };

    size_t n_threads = std::min<size_t>(static_cast<size_t>(config.parallelism),
                                        std::max<size_t>(tasks.size(), 1));
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);

    for (size_t i = 0; i < tasks.size(); ++i) {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return pending.contains(i); });
        records[i] = std::move(pending.at(i));
        pending.erase(i);
        bool was_reused = reused[i];
        lock.unlock();
        if (!was_reused) {
            records_out << record_to_jsonl(records[i]) << '\n';
            records_out.flush();
        }
    }
    for (auto& t : threads) t.join();
    records_out.close();

    RunSummary summary;
    summary.run_dir = run_dir;
    summary.records = std::move(records);
    summary.n_records = summary.records.size();
    for (const auto& r : summary.records) {
        if (r.failed) ++summary.n_failed;
    }
    summary.backend_calls = counting.calls();

    if (!summary.records.empty()) {
        ReportTables tables = build_report_tables(summary.records);
        write_report_files(run_dir, tables);
    }
    return summary;
}

}  // namespace

void RunConfig::validate() const {
    if (datasets.empty()) throw std::invalid_argument("run config: no datasets selected");
    if (strategies.empty()) throw std::invalid_argument("run config: no strategies selected");
    if (parallelism < 1) throw std::invalid_argument("run config: parallelism must be >= 1");
    if (cache_path.empty()) throw std::invalid_argument("run config: cache path required");
    if (out_dir.empty()) throw std::invalid_argument("run config: out dir required");
    backend.validate();

    bool wants_fewshot = false;
    bool wants_type2 = false;
    for (const auto& spec : strategies) {
        spec.validate();
        wants_fewshot = wants_fewshot || spec.uses_fewshot();
        wants_type2 = wants_type2 || spec.kind == StrategyKind::TranslateType2;
    }
    for (const auto& sel : datasets) {
        for (Language lang : sel.langs) {
            dataset_file(sel.dataset, sel.root, lang);  // throws when missing
        }
    }
    if (wants_fewshot && !std::filesystem::exists(exemplars_path)) {
        throw std::invalid_argument("run config: few-shot strategies need --exemplars (got '" +
                                    exemplars_path.string() + "')");
    }
    if (wants_type2 && !std::filesystem::exists(translations_path)) {
        throw std::invalid_argument(
            "run config: the Type-2 translation strategy needs --translations (got '" +
            translations_path.string() + "')");
    }
    if (!markers_path.empty() && !std::filesystem::exists(markers_path)) {
        throw std::invalid_argument("run config: markers file not found: " + markers_path.string());
    }
}

RunSummary run(const RunConfig& config, Backend* backend_override) {
    return run_impl(config, backend_override, config.out_dir, {}, /*fresh=*/true);
}

RunSummary resume(const std::filesystem::path& run_dir, Backend* backend_override) {
    std::filesystem::path meta_path = run_dir / "meta.json";
    if (!std::filesystem::exists(meta_path)) {
        throw std::runtime_error("resume: " + meta_path.string() + " not found");
    }
    json meta = json::parse(read_file(meta_path));

    std::string stored_version = meta.value("template_version", "");
    if (stored_version != PromptTemplate::current().version()) {
        throw std::runtime_error("resume: run used template version '" + stored_version +
                                 "' but this binary builds '" +
                                 PromptTemplate::current().version() + "'; refusing to mix");
    }
    RunConfig config = config_from_json(meta.at("config"));

    for (const auto& sel : config.datasets) {
        auto current = dataset_file_hashes(sel.dataset, sel.root, sel.langs);
        auto stored = meta.at("dataset_hashes").at(std::string(to_string(sel.dataset)));
        for (const auto& [lang, digest] : current) {
            if (!stored.contains(lang) || stored.at(lang).get<std::string>() != digest) {
                throw std::runtime_error("resume: dataset " + std::string(to_string(sel.dataset)) +
                                         "/" + lang + " changed on disk since the run started");
            }
        }
    }

    std::map<std::string, RunRecord> existing;
    std::filesystem::path records_path = run_dir / "records.jsonl";
    if (std::filesystem::exists(records_path)) {
        for (auto& rec : read_records(records_path)) {
            existing.insert_or_assign(rec.fingerprint, std::move(rec));
        }
    }
    return run_impl(config, backend_override, run_dir, existing, /*fresh=*/false);
}

std::vector<StrategySpec> preset(std::string_view name, uint64_t seed) {
    if (name == "main") {
        return {StrategySpec::direct(), StrategySpec::cot(), StrategySpec::fewshot(3, seed),
                StrategySpec::sot_full()};
    }
    if (name == "ablation") {
        std::vector<StrategySpec> out;
        for (StepMask mask : enumerate_ablation_masks()) out.push_back(StrategySpec::sot(mask));
        return out;
    }
    if (name == "composition") {
        return {StrategySpec::sot_full(), StrategySpec::sot_plus_cot(),
                StrategySpec::sot_plus_fewshot(3, seed)};
    }
    if (name == "translation") {
        return {StrategySpec::sot_full(), StrategySpec::translate_type1(),
                StrategySpec::translate_type2()};
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) +
                                "' (expected main|ablation|composition|translation)");
}

StrategySpec parse_strategy(std::string_view text, uint64_t seed) {
    std::string s{text};
    if (s == "direct") return StrategySpec::direct();
    if (s == "cot") return StrategySpec::cot();
    if (s == "fewshot") return StrategySpec::fewshot(3, seed);
    if (s.starts_with("fewshot")) {
        size_t k = std::stoul(s.substr(7));
        return StrategySpec::fewshot(k, seed);
    }
    if (s == "sot") return StrategySpec::sot_full();
    if (s == "sot+cot") return StrategySpec::sot_plus_cot();
    if (s == "sot+3shot" || s == "sot+fewshot") return StrategySpec::sot_plus_fewshot(3, seed);
    if (s.starts_with("sot:") && s.size() == 7) {
        StepMask mask{s[4] == '1', s[5] == '1', s[6] == '1'};
        return StrategySpec::sot(mask);
    }
    if (s == "translate1") return StrategySpec::translate_type1();
    if (s == "translate2") return StrategySpec::translate_type2();
    throw std::invalid_argument("unknown strategy '" + s + "'");
}

std::string record_to_jsonl(const RunRecord& record) {
    ordered_json j;
    j["item_id"] = record.item_id;
    j["dataset"] = to_string(record.dataset);
    j["lang"] = to_string(record.lang);
    j["strategy"] = record.strategy;
    j["fingerprint"] = record.fingerprint;
    j["failed"] = record.failed;
    j["correct"] = record.correct;
    j["extracted"] = record.extracted ? ordered_json(*record.extracted) : ordered_json(nullptr);
    j["method"] = record.method ? ordered_json(*record.method) : ordered_json(nullptr);
    j["in"] = record.in_tokens;
    j["out"] = record.out_tokens;
    j["latency"] = record.latency_s ? ordered_json(*record.latency_s) : ordered_json(nullptr);
    j["est"] = record.usage_estimated;
    j["m"] = record.step2_count ? ordered_json(*record.step2_count) : ordered_json(nullptr);
    j["ls"] = record.step3_count ? ordered_json(*record.step3_count) : ordered_json(nullptr);
    return j.dump();
}

RunRecord record_from_jsonl(const std::string& line) {
    json j = json::parse(line);
    RunRecord rec;
    rec.item_id = j.at("item_id").get<std::string>();
    auto dataset = dataset_from_name(j.at("dataset").get<std::string>());
    auto lang = language_from_code(j.at("lang").get<std::string>());
    if (!dataset || !lang) throw std::runtime_error("record: bad dataset/lang");
    rec.dataset = *dataset;
    rec.lang = *lang;
    rec.strategy = j.at("strategy").get<std::string>();
    rec.fingerprint = j.at("fingerprint").get<std::string>();
    rec.failed = j.at("failed").get<bool>();
    rec.correct = j.at("correct").get<bool>();
    if (!j.at("extracted").is_null()) rec.extracted = j.at("extracted").get<std::string>();
    if (!j.at("method").is_null()) rec.method = j.at("method").get<std::string>();
    rec.in_tokens = j.at("in").get<long>();
    rec.out_tokens = j.at("out").get<long>();
    if (!j.at("latency").is_null()) rec.latency_s = j.at("latency").get<double>();
    rec.usage_estimated = j.at("est").get<bool>();
    if (!j.at("m").is_null()) rec.step2_count = j.at("m").get<size_t>();
    if (!j.at("ls").is_null()) rec.step3_count = j.at("ls").get<size_t>();
    return rec;
}

std::vector<RunRecord> read_records(const std::filesystem::path& file) {
    std::vector<RunRecord> out;
    std::map<std::string, size_t> by_fingerprint;
    int line_no = 0;
    for (const auto& line : split_lines(read_file(file))) {
        ++line_no;
        if (trim(line).empty()) continue;
        RunRecord rec;
        try {
            rec = record_from_jsonl(line);
        } catch (const std::exception& e) {
            std::cerr << "warning: " << file.string() << ":" << line_no
                      << ": skipping corrupt record: " << e.what() << "\n";
            continue;
        }
        auto it = by_fingerprint.find(rec.fingerprint);
        if (it != by_fingerprint.end()) {
            out[it->second] = std::move(rec);  // later entries win
        } else {
            by_fingerprint[rec.fingerprint] = out.size();
            out.push_back(std::move(rec));
        }
    }
    return out;
}

ReportTables report_from_run_dir(const std::filesystem::path& run_dir) {
    auto records = read_records(run_dir / "records.jsonl");
    if (records.empty()) throw std::runtime_error("no records in " + run_dir.string());
    return build_report_tables(records);
}

ordered_json config_to_json(const RunConfig& config) {
    ordered_json j;
    j["datasets"] = ordered_json::array();
    for (const auto& sel : config.datasets) {
        ordered_json s;
        s["dataset"] = to_string(sel.dataset);
        s["root"] = sel.root.string();
        s["langs"] = lang_csv(sel.langs);
        j["datasets"].push_back(std::move(s));
    }
    j["strategies"] = ordered_json::array();
    for (const auto& spec : config.strategies) {
        ordered_json s;
        s["kind"] = to_string(spec.kind);
        s["mask"] = spec.mask.bits();
        s["compose_cot"] = spec.compose_cot;
        s["compose_fewshot"] = spec.compose_fewshot;
        s["k_shots"] = spec.k_shots;
        s["seed"] = spec.seed;
        j["strategies"].push_back(std::move(s));
    }
    ordered_json b;
    b["id"] = config.backend.id;
    b["type"] = config.backend.type;
    b["endpoint_url"] = config.backend.endpoint_url;
    b["model"] = config.backend.model;
    b["temperature"] = config.backend.temperature;
    b["max_output_tokens"] = config.backend.max_output_tokens;
    b["timeout_s"] = config.backend.timeout_s;
    b["max_retries"] = config.backend.max_retries;
    b["requests_per_minute"] = config.backend.requests_per_minute;
    b["api_key_env"] = config.backend.api_key_env;
    j["backend"] = std::move(b);
    j["parallelism"] = config.parallelism;
    j["limit"] = config.limit ? ordered_json(*config.limit) : ordered_json(nullptr);
    j["seed"] = config.seed;
    j["cache_path"] = config.cache_path.string();
    j["out_dir"] = config.out_dir.string();
    j["exemplars_path"] = config.exemplars_path.string();
    j["translations_path"] = config.translations_path.string();
    j["markers_path"] = config.markers_path.string();
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig config;
    for (const auto& s : j.at("datasets")) {
        DatasetSelection sel;
        auto dataset = dataset_from_name(s.at("dataset").get<std::string>());
        if (!dataset) throw std::runtime_error("config: unknown dataset");
        sel.dataset = *dataset;
        sel.root = s.at("root").get<std::string>();
        for (const auto& code : split(s.at("langs").get<std::string>(), ',')) {
            if (code.empty()) continue;
            auto lang = language_from_code(code);
            if (!lang) throw std::runtime_error("config: unknown language '" + code + "'");
            sel.langs.push_back(*lang);
        }
        config.datasets.push_back(std::move(sel));
    }
    for (const auto& s : j.at("strategies")) {
        StrategySpec spec;
        std::string kind = s.at("kind").get<std::string>();
        std::string mask = s.at("mask").get<std::string>();
        if (kind == "direct") spec.kind = StrategyKind::Direct;
        else if (kind == "cot") spec.kind = StrategyKind::CoT;
        else if (kind == "fewshot") spec.kind = StrategyKind::FewShot;
        else if (kind == "sot") spec.kind = StrategyKind::SoT;
        else if (kind == "translate1") spec.kind = StrategyKind::TranslateType1;
        else if (kind == "translate2") spec.kind = StrategyKind::TranslateType2;
        else throw std::runtime_error("config: unknown strategy kind '" + kind + "'");
        if (mask.size() == 3) spec.mask = {mask[0] == '1', mask[1] == '1', mask[2] == '1'};
        spec.compose_cot = s.at("compose_cot").get<bool>();
        spec.compose_fewshot = s.at("compose_fewshot").get<bool>();
        spec.k_shots = s.at("k_shots").get<size_t>();
        spec.seed = s.at("seed").get<uint64_t>();
        config.strategies.push_back(spec);
    }
    const auto& b = j.at("backend");
    config.backend.id = b.at("id").get<std::string>();
    config.backend.type = b.at("type").get<std::string>();
    config.backend.endpoint_url = b.at("endpoint_url").get<std::string>();
    config.backend.model = b.at("model").get<std::string>();
    config.backend.temperature = b.at("temperature").get<double>();
    config.backend.max_output_tokens = b.at("max_output_tokens").get<int>();
    config.backend.timeout_s = b.at("timeout_s").get<double>();
    config.backend.max_retries = b.at("max_retries").get<int>();
    config.backend.requests_per_minute = b.at("requests_per_minute").get<int>();
    config.backend.api_key_env = b.at("api_key_env").get<std::string>();
    config.parallelism = j.at("parallelism").get<int>();
    if (!j.at("limit").is_null()) config.limit = j.at("limit").get<size_t>();
    config.seed = j.at("seed").get<uint64_t>();
    config.cache_path = j.at("cache_path").get<std::string>();
    config.out_dir = j.at("out_dir").get<std::string>();
    config.exemplars_path = j.at("exemplars_path").get<std::string>();
    config.translations_path = j.at("translations_path").get<std::string>();
    config.markers_path = j.at("markers_path").get<std::string>();
    return config;
}

}  // namespace sot
