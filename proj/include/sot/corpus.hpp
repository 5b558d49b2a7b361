#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sot/types.hpp"

namespace sot {

// Loads one dataset from a directory holding one file per language,
// "<lang>.tsv" or "<lang>.jsonl" (sniffed by extension). Items come back
// grouped by language in file order. Throws on missing files, malformed
// rows (with line numbers) and duplicate ids.
std::vector<BenchmarkItem> load_dataset(Dataset dataset, const std::filesystem::path& root,
                                        std::span<const Language> langs);

// Resolves the file backing one language of a dataset.
std::filesystem::path dataset_file(Dataset dataset, const std::filesystem::path& root,
                                   Language lang);

// SHA-256 per language file, for run metadata.
std::map<std::string, std::string> dataset_file_hashes(Dataset dataset,
                                                       const std::filesystem::path& root,
                                                       std::span<const Language> langs);

struct ValidationReport {
    // id -> languages the id is missing from
    std::map<std::string, std::vector<Language>> missing;

    bool parallel() const { return missing.empty(); }
};

// Report-only check of the parallel-corpus property over items of one dataset.
ValidationReport validate_parallelism(std::span<const BenchmarkItem> items);

struct Exemplar {
    BenchmarkItem item;
    std::string solution;  // worked solution, ends in a Final Answer line
};

struct ExemplarSet {
    std::vector<Exemplar> items;

    size_t k() const { return items.size(); }
};

// Worked solutions keyed by item id (ids are shared across languages of a
// parallel dataset, so one English solution serves every language).
// File format: JSONL {"id":..., "solution":...}.
class ExemplarStore {
public:
    static ExemplarStore load_jsonl(const std::filesystem::path& path);

    std::optional<std::string> solution_for(const std::string& id) const;
    bool empty() const { return solutions_.empty(); }

private:
    std::map<std::string, std::string> solutions_;
};

// Deterministic seeded sample of k exemplars out of `items`, restricted to
// items the store has solutions for and excluding `exclude_id`. Throws when
// fewer than k candidates exist, stating the available count.
ExemplarSet sample_exemplars(std::span<const BenchmarkItem> items, size_t k, uint64_t seed,
                             const std::string& exclude_id, const ExemplarStore& store);

}  // namespace sot
