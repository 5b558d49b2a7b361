#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sot/parse.hpp"
#include "sot/types.hpp"

namespace sot {

// One (item, strategy, backend) evaluation outcome. Matches the
// records.jsonl row; the completion text itself lives in the cache.
struct RunRecord {
    std::string item_id;
    Dataset dataset = Dataset::MGSM;
    Language lang = Language::en;
    std::string strategy;     // strategy label, groups report rows
    std::string fingerprint;  // per-(item,strategy) prompt fingerprint
    bool failed = false;      // backend hard failure after retries
    bool correct = false;
    std::optional<std::string> extracted;  // canonical numeric string or "0"/"1"
    std::optional<std::string> method;
    long in_tokens = 0;
    long out_tokens = 0;
    std::optional<double> latency_s;  // absent for cached completions
    bool usage_estimated = false;
    std::optional<size_t> step2_count;  // SoT-like records only
    std::optional<size_t> step3_count;
};

struct AccuracyRow {
    std::string strategy;
    std::vector<double> cells;  // aligned with AccuracyTable::languages, 1-decimal values
    double avg = 0.0;           // unweighted mean of cells, half-up to 1 decimal
};

struct AccuracyTable {
    Dataset dataset = Dataset::MGSM;
    std::vector<Language> languages;  // canonical order, filtered to present
    std::vector<AccuracyRow> rows;    // first-seen strategy order
    size_t n_per_cell = 0;
};

// Unweighted mean of a row's cells, rounded half-up to 1 decimal.
double avg_of_cells(std::span<const double> cells);

// 100*correct/total per (strategy, lang) over records of a single dataset.
// Throws on ragged cells, naming the hole.
AccuracyTable accuracy_by_language(std::span<const RunRecord> records);

// One table per dataset present, dataset enum order.
std::vector<AccuracyTable> accuracy_tables(std::span<const RunRecord> records);

struct ResourceStats {
    std::optional<double> avg_decode_s;  // absent when every record was cached
    double avg_in = 0.0;
    double avg_out = 0.0;
    double avg_total = 0.0;
    size_t n_records = 0;
    size_t n_timed = 0;
    size_t n_estimated = 0;  // records whose usage was estimated, never hidden
};

ResourceStats resource_stats(std::span<const RunRecord> records);

struct ResourceRow {
    Dataset dataset;
    std::string strategy;
    ResourceStats stats;
};

std::vector<ResourceRow> resource_table(std::span<const RunRecord> records);

struct KnowledgeRow {
    Dataset dataset;
    double avg_step2 = 0.0;
    double avg_step3 = 0.0;
    size_t n_traces = 0;
};

struct KnowledgeTable {
    std::vector<KnowledgeRow> rows;  // dataset enum order
    double avg_step2 = 0.0;          // mean of per-dataset means, half-up to 2 decimals
    double avg_step3 = 0.0;
};

// Per-dataset means of step-2/step-3 entry counts over records carrying
// trace counts. Throws when no such records exist.
KnowledgeTable knowledge_stats(std::span<const RunRecord> records);

// The overall row: mean of per-dataset means, rounded half-up to 2 decimals.
double knowledge_avg(std::span<const double> per_dataset_means);

struct ReportTables {
    std::vector<AccuracyTable> accuracy;
    std::vector<ResourceRow> resources;
    std::optional<KnowledgeTable> knowledge;
};

ReportTables build_report_tables(std::span<const RunRecord> records);

enum class ReportFormat { Markdown, Csv, Json };

// Deterministic bytes per output file. Markdown columns follow the
// per-dataset language order.
std::map<std::string, std::string> render_report(const ReportTables& tables, ReportFormat format);

// Inverse of the accuracy CSV produced by render_report.
std::vector<AccuracyTable> parse_accuracy_csv(const std::string& csv);

}  // namespace sot
