#include "sot/corpus.hpp"

#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "sot/util.hpp"

namespace sot {

namespace {

using nlohmann::json;

std::string err_at(const std::filesystem::path& file, int line_no, const std::string& what) {
    return file.string() + ":" + std::to_string(line_no) + ": " + what;
}

std::string json_string_or_number(const json& v, const char* key, const std::filesystem::path& file,
                                  int line_no) {
    if (!v.contains(key)) {
        throw std::runtime_error(err_at(file, line_no, std::string("missing field \"") + key + "\""));
    }
    const json& f = v.at(key);
    if (f.is_string()) return f.get<std::string>();
    if (f.is_number_integer()) return std::to_string(f.get<long long>());
    if (f.is_number()) return json(f).dump();
    throw std::runtime_error(err_at(file, line_no, std::string("field \"") + key +
                                                       "\" is neither string nor number"));
}

// Canonicalizes a gold answer through the exact-decimal parser; GSM8K-style
// thousands commas are tolerated.
std::string canonical_gold(const std::string& raw, const std::filesystem::path& file, int line_no) {
    std::string s = trim(raw);
    auto parsed = ExactDecimal::parse(s);
    if (!parsed) {
        std::string stripped;
        for (char c : s) {
            if (c != ',') stripped.push_back(c);
        }
        parsed = ExactDecimal::parse(stripped);
    }
    if (!parsed) {
        throw std::runtime_error(err_at(file, line_no, "answer '" + raw + "' is not a decimal"));
    }
    return parsed->to_string();
}

CopaRelation parse_relation(const std::string& s, const std::filesystem::path& file, int line_no) {
    if (s == "cause") return CopaRelation::Cause;
    if (s == "effect") return CopaRelation::Effect;
    throw std::runtime_error(err_at(file, line_no, "question field must be cause|effect, got '" + s + "'"));
}

void check_question_nonempty(const std::string& q, const std::filesystem::path& file, int line_no) {
    if (normalize_whitespace(q).empty()) {
        throw std::runtime_error(err_at(file, line_no, "empty question text"));
    }
}

std::vector<BenchmarkItem> load_math_tsv(Dataset dataset, Language lang,
                                         const std::filesystem::path& file) {
    std::vector<BenchmarkItem> items;
    std::set<std::string> seen;
    int line_no = 0;
    for (const auto& line : split_lines(read_file(file))) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != 3) {
            throw std::runtime_error(err_at(file, line_no, "expected id<TAB>question<TAB>answer, got " +
                                                               std::to_string(fields.size()) + " fields"));
        }
        BenchmarkItem item;
        item.dataset = dataset;
        item.id = trim(fields[0]);
        item.lang = lang;
        item.task = TaskKind::MathNumeric;
        item.question = trim(fields[1]);
        item.gold_number = canonical_gold(fields[2], file, line_no);
        if (item.id.empty()) throw std::runtime_error(err_at(file, line_no, "empty id"));
        check_question_nonempty(item.question, file, line_no);
        if (!seen.insert(item.id).second) {
            throw std::runtime_error(err_at(file, line_no, "duplicate id '" + item.id + "'"));
        }
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<BenchmarkItem> load_jsonl(Dataset dataset, Language lang,
                                      const std::filesystem::path& file) {
    std::vector<BenchmarkItem> items;
    std::set<std::string> seen;
    int line_no = 0;
    const bool copa = task_kind_of(dataset) == TaskKind::CopaChoice;
    for (const auto& line : split_lines(read_file(file))) {
        ++line_no;
        if (trim(line).empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(err_at(file, line_no, std::string("bad JSON: ") + e.what()));
        }
        BenchmarkItem item;
        item.dataset = dataset;
        item.lang = lang;
        item.id = json_string_or_number(row, "id", file, line_no);
        if (item.id.empty()) throw std::runtime_error(err_at(file, line_no, "empty id"));
        if (copa) {
            item.task = TaskKind::CopaChoice;
            item.copa.premise = json_string_or_number(row, "premise", file, line_no);
            // upstream XCOPA choices are 1-indexed
            item.copa.choice0 = json_string_or_number(row, "choice1", file, line_no);
            item.copa.choice1 = json_string_or_number(row, "choice2", file, line_no);
            item.copa.relation =
                parse_relation(json_string_or_number(row, "question", file, line_no), file, line_no);
            check_question_nonempty(item.copa.premise, file, line_no);
            if (!row.contains("label") || !row.at("label").is_number_integer()) {
                throw std::runtime_error(err_at(file, line_no, "missing integer label"));
            }
            int label = row.at("label").get<int>();
            if (label != 0 && label != 1) {
                throw std::runtime_error(err_at(file, line_no, "label must be 0 or 1"));
            }
            item.gold_choice = label;
        } else {
            item.task = TaskKind::MathNumeric;
            item.question = trim(json_string_or_number(row, "question", file, line_no));
            item.gold_number =
                canonical_gold(json_string_or_number(row, "answer", file, line_no), file, line_no);
            check_question_nonempty(item.question, file, line_no);
        }
        if (!seen.insert(item.id).second) {
            throw std::runtime_error(err_at(file, line_no, "duplicate id '" + item.id + "'"));
        }
        items.push_back(std::move(item));
    }
    return items;
}

}  // namespace

std::filesystem::path dataset_file(Dataset dataset, const std::filesystem::path& root,
                                   Language lang) {
    std::filesystem::path tsv = root / (std::string(to_string(lang)) + ".tsv");
    std::filesystem::path jsonl = root / (std::string(to_string(lang)) + ".jsonl");
    if (std::filesystem::exists(tsv)) return tsv;
    if (std::filesystem::exists(jsonl)) return jsonl;
    throw std::runtime_error("dataset " + std::string(to_string(dataset)) + ": no file for language '" +
                             std::string(to_string(lang)) + "' under " + root.string() +
                             " (looked for " + tsv.filename().string() + " and " +
                             jsonl.filename().string() + ")");
}

std::vector<BenchmarkItem> load_dataset(Dataset dataset, const std::filesystem::path& root,
                                        std::span<const Language> langs) {
    std::vector<BenchmarkItem> all;
    for (Language lang : langs) {
        std::filesystem::path file = dataset_file(dataset, root, lang);
        std::vector<BenchmarkItem> items;
        if (file.extension() == ".tsv") {
            if (task_kind_of(dataset) == TaskKind::CopaChoice) {
                throw std::runtime_error("xcopa has no TSV form; use JSONL: " + file.string());
            }
            items = load_math_tsv(dataset, lang, file);
        } else {
            items = load_jsonl(dataset, lang, file);
        }
        all.insert(all.end(), std::make_move_iterator(items.begin()),
                   std::make_move_iterator(items.end()));
    }
    return all;
}

std::map<std::string, std::string> dataset_file_hashes(Dataset dataset,
                                                       const std::filesystem::path& root,
                                                       std::span<const Language> langs) {
    std::map<std::string, std::string> out;
    for (Language lang : langs) {
        out[std::string(to_string(lang))] = sha256_file_hex(dataset_file(dataset, root, lang));
    }
    return out;
}

ValidationReport validate_parallelism(std::span<const BenchmarkItem> items) {
    std::set<Language> langs;
    std::map<std::string, std::set<Language>> where;
    for (const auto& item : items) {
        langs.insert(item.lang);
        where[item.id].insert(item.lang);
    }
    ValidationReport report;
    for (const auto& [id, present] : where) {
        std::vector<Language> missing;
        for (Language lang : langs) {
            if (!present.contains(lang)) missing.push_back(lang);
        }
        if (!missing.empty()) report.missing[id] = std::move(missing);
    }
    return report;
}

ExemplarStore ExemplarStore::load_jsonl(const std::filesystem::path& path) {
    ExemplarStore store;
    int line_no = 0;
    for (const auto& line : split_lines(read_file(path))) {
        ++line_no;
        if (trim(line).empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(err_at(path, line_no, std::string("bad JSON: ") + e.what()));
        }
        std::string id = json_string_or_number(row, "id", path, line_no);
        std::string solution = json_string_or_number(row, "solution", path, line_no);
        if (!store.solutions_.emplace(std::move(id), std::move(solution)).second) {
            throw std::runtime_error(err_at(path, line_no, "duplicate exemplar id"));
        }
    }
    return store;
}

std::optional<std::string> ExemplarStore::solution_for(const std::string& id) const {
    auto it = solutions_.find(id);
    if (it == solutions_.end()) return std::nullopt;
    return it->second;
}

ExemplarSet sample_exemplars(std::span<const BenchmarkItem> items, size_t k, uint64_t seed,
                             const std::string& exclude_id, const ExemplarStore& store) {
    ExemplarSet set;
    if (k == 0) return set;

    std::vector<size_t> candidates;
    for (size_t i = 0; i < items.size(); ++i) {
        if (items[i].id == exclude_id) continue;
        if (!store.solution_for(items[i].id)) continue;
        candidates.push_back(i);
    }
    if (candidates.size() < k) {
        throw std::runtime_error("sample_exemplars: need " + std::to_string(k) + " exemplars but only " +
                                 std::to_string(candidates.size()) + " candidates available");
    }

    // Explicit Fisher-Yates over the mt19937_64 stream keeps the draw
    // identical across standard libraries.
    std::mt19937_64 gen(seed);
    for (size_t i = candidates.size() - 1; i > 0; --i) {
        size_t j = static_cast<size_t>(gen() % (i + 1));
        std::swap(candidates[i], candidates[j]);
    }
    for (size_t i = 0; i < k; ++i) {
        const BenchmarkItem& item = items[candidates[i]];
        set.items.push_back({item, *store.solution_for(item.id)});
    }
    return set;
}

}  // namespace sot
