#include "sot/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sot/util.hpp"

namespace sot {

namespace {

std::string column_header(Language lang) {
    std::string code(to_string(lang));
    code[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(code[0])));
    return code;
}

std::vector<Dataset> datasets_present(std::span<const RunRecord> records) {
    std::vector<Dataset> out;
    for (Dataset d : {Dataset::MGSM, Dataset::MSVAMP, Dataset::XCOPA}) {
        if (std::any_of(records.begin(), records.end(),
                        [d](const RunRecord& r) { return r.dataset == d; })) {
            out.push_back(d);
        }
    }
    return out;
}

}  // namespace

double avg_of_cells(std::span<const double> cells) {
    if (cells.empty()) throw std::invalid_argument("avg_of_cells: empty row");
    double sum = 0.0;
    for (double c : cells) sum += c;
    return round_half_up(sum / static_cast<double>(cells.size()), 1);
}

AccuracyTable accuracy_by_language(std::span<const RunRecord> records) {
    if (records.empty()) throw std::invalid_argument("accuracy_by_language: no records");
    Dataset dataset = records.front().dataset;
    for (const auto& r : records) {
        if (r.dataset != dataset) {
            throw std::invalid_argument("accuracy_by_language: records span multiple datasets");
        }
    }

    std::set<Language> langs_present;
    std::vector<std::string> strategy_order;
    std::map<std::string, std::map<Language, std::pair<size_t, size_t>>> counts;  // total, correct
    for (const auto& r : records) {
        langs_present.insert(r.lang);
        if (!counts.contains(r.strategy)) strategy_order.push_back(r.strategy);
        auto& [total, correct] = counts[r.strategy][r.lang];
        ++total;
        if (r.correct) ++correct;
    }

    AccuracyTable table;
    table.dataset = dataset;
    for (Language lang : dataset_language_order(dataset)) {
        if (langs_present.contains(lang)) table.languages.push_back(lang);
    }

    std::optional<size_t> expected;
    for (const auto& strategy : strategy_order) {
        AccuracyRow row;
        row.strategy = strategy;
        for (Language lang : table.languages) {
            auto it = counts[strategy].find(lang);
            if (it == counts[strategy].end()) {
                throw std::runtime_error("accuracy: no records for strategy '" + strategy +
                                         "' language '" + std::string(to_string(lang)) + "'");
            }
            auto [total, correct] = it->second;
            if (!expected) expected = total;
            if (total != *expected) {
                throw std::runtime_error("accuracy: ragged cell for strategy '" + strategy +
                                         "' language '" + std::string(to_string(lang)) + "': " +
                                         std::to_string(total) + " records, expected " +
                                         std::to_string(*expected));
            }
            row.cells.push_back(
                round_half_up(100.0 * static_cast<double>(correct) / static_cast<double>(total), 1));
        }
        row.avg = avg_of_cells(row.cells);
        table.rows.push_back(std::move(row));
    }
    table.n_per_cell = expected.value_or(0);
    return table;
}

std::vector<AccuracyTable> accuracy_tables(std::span<const RunRecord> records) {
    std::vector<AccuracyTable> out;
    for (Dataset d : datasets_present(records)) {
        std::vector<RunRecord> subset;
        std::copy_if(records.begin(), records.end(), std::back_inserter(subset),
                     [d](const RunRecord& r) { return r.dataset == d; });
        out.push_back(accuracy_by_language(subset));
    }
    return out;
}

ResourceStats resource_stats(std::span<const RunRecord> records) {
    ResourceStats stats;
    double time_sum = 0.0;
    double in_sum = 0.0;
    double out_sum = 0.0;
    for (const auto& r : records) {
        if (r.failed) continue;
        ++stats.n_records;
        in_sum += static_cast<double>(r.in_tokens);
        out_sum += static_cast<double>(r.out_tokens);
        if (r.usage_estimated) ++stats.n_estimated;
        if (r.latency_s) {
            ++stats.n_timed;
            time_sum += *r.latency_s;
        }
    }
    if (stats.n_records == 0) throw std::invalid_argument("resource_stats: no usable records");
    stats.avg_in = in_sum / static_cast<double>(stats.n_records);
    stats.avg_out = out_sum / static_cast<double>(stats.n_records);
    stats.avg_total = stats.avg_in + stats.avg_out;
    if (stats.n_timed > 0) stats.avg_decode_s = time_sum / static_cast<double>(stats.n_timed);
    return stats;
}

std::vector<ResourceRow> resource_table(std::span<const RunRecord> records) {
    std::vector<ResourceRow> out;
    for (Dataset d : datasets_present(records)) {
        std::vector<std::string> strategy_order;
        std::map<std::string, std::vector<RunRecord>> by_strategy;
        for (const auto& r : records) {
            if (r.dataset != d || r.failed) continue;
            if (!by_strategy.contains(r.strategy)) strategy_order.push_back(r.strategy);
            by_strategy[r.strategy].push_back(r);
        }
        for (const auto& strategy : strategy_order) {
            out.push_back({d, strategy, resource_stats(by_strategy[strategy])});
        }
    }
    return out;
}

double knowledge_avg(std::span<const double> per_dataset_means) {
    if (per_dataset_means.empty()) throw std::invalid_argument("knowledge_avg: empty input");
    double sum = 0.0;
    for (double m : per_dataset_means) sum += m;
    return round_half_up(sum / static_cast<double>(per_dataset_means.size()), 2);
}

KnowledgeTable knowledge_stats(std::span<const RunRecord> records) {
    KnowledgeTable table;
    std::vector<double> means2;
    std::vector<double> means3;
    for (Dataset d : datasets_present(records)) {
        double s2 = 0.0;
        double s3 = 0.0;
        size_t n = 0;
        for (const auto& r : records) {
            if (r.dataset != d || !r.step2_count) continue;
            s2 += static_cast<double>(*r.step2_count);
            s3 += static_cast<double>(r.step3_count.value_or(0));
            ++n;
        }
        if (n == 0) continue;
        KnowledgeRow row;
        row.dataset = d;
        row.n_traces = n;
        row.avg_step2 = s2 / static_cast<double>(n);
        row.avg_step3 = s3 / static_cast<double>(n);
        means2.push_back(row.avg_step2);
        means3.push_back(row.avg_step3);
        table.rows.push_back(row);
    }
    if (table.rows.empty()) {
        throw std::invalid_argument("knowledge_stats: no records carry trace counts");
    }
    table.avg_step2 = knowledge_avg(means2);
    table.avg_step3 = knowledge_avg(means3);
    return table;
}

ReportTables build_report_tables(std::span<const RunRecord> records) {
    ReportTables tables;
    tables.accuracy = accuracy_tables(records);
    tables.resources = resource_table(records);
    bool any_traces = std::any_of(records.begin(), records.end(),
                                  [](const RunRecord& r) { return r.step2_count.has_value(); });
    if (any_traces) tables.knowledge = knowledge_stats(records);
    return tables;
}

namespace {

std::string render_markdown(const ReportTables& tables) {
    std::ostringstream md;
    md << "# Run report\n";
    for (const auto& table : tables.accuracy) {
        md << "\n## Accuracy (%) - " << to_string(table.dataset) << " (n=" << table.n_per_cell
           << " per cell)\n\n";
        md << "| Strategy |";
        for (Language lang : table.languages) md << " " << column_header(lang) << " |";
        md << " Avg. |\n";
        md << "|---|";
        for (size_t i = 0; i < table.languages.size(); ++i) md << "---|";
        md << "---|\n";
        for (const auto& row : table.rows) {
            md << "| " << row.strategy << " |";
            for (double cell : row.cells) md << " " << format_fixed(cell, 1) << " |";
            md << " " << format_fixed(row.avg, 1) << " |\n";
        }
    }
    if (!tables.resources.empty()) {
        md << "\n## Resources\n\n";
        md << "| Dataset | Strategy | Decode time (s) | Input tokens | Output tokens | Total tokens "
              "|\n";
        md << "|---|---|---|---|---|---|\n";
        size_t estimated = 0;
        for (const auto& row : tables.resources) {
            md << "| " << to_string(row.dataset) << " | " << row.strategy << " | "
               << (row.stats.avg_decode_s ? format_fixed(*row.stats.avg_decode_s, 3) : "-") << " | "
               << format_fixed(row.stats.avg_in, 1) << " | " << format_fixed(row.stats.avg_out, 1)
               << " | " << format_fixed(row.stats.avg_total, 1) << " |\n";
            estimated += row.stats.n_estimated;
        }
        if (estimated > 0) {
            md << "\nToken usage for " << estimated
               << " record(s) was estimated by whitespace tokenization, not backend-reported.\n";
        }
    }
    if (tables.knowledge) {
        md << "\n## Extracted knowledge per trace\n\n";
        md << "| Dataset | Step 2 | Step 3 |\n|---|---|---|\n";
        for (const auto& row : tables.knowledge->rows) {
            md << "| " << to_string(row.dataset) << " | " << format_fixed(row.avg_step2, 2) << " | "
               << format_fixed(row.avg_step3, 2) << " |\n";
        }
        md << "| Avg. | " << format_fixed(tables.knowledge->avg_step2, 2) << " | "
           << format_fixed(tables.knowledge->avg_step3, 2) << " |\n";
    }
    return md.str();
}

std::string render_accuracy_csv(const ReportTables& tables) {
    std::ostringstream csv;
    csv << "dataset,strategy,lang,accuracy,n\n";
    for (const auto& table : tables.accuracy) {
        for (const auto& row : table.rows) {
            for (size_t i = 0; i < table.languages.size(); ++i) {
                csv << to_string(table.dataset) << "," << row.strategy << ","
                    << to_string(table.languages[i]) << "," << format_fixed(row.cells[i], 1) << ","
                    << table.n_per_cell << "\n";
            }
            csv << to_string(table.dataset) << "," << row.strategy << ",avg,"
                << format_fixed(row.avg, 1) << "," << table.n_per_cell << "\n";
        }
    }
    return csv.str();
}

std::string render_resources_csv(const ReportTables& tables) {
    std::ostringstream csv;
    csv << "dataset,strategy,avg_decode_s,avg_in,avg_out,avg_total,n,n_timed,n_estimated\n";
    for (const auto& row : tables.resources) {
        csv << to_string(row.dataset) << "," << row.strategy << ","
            << (row.stats.avg_decode_s ? format_fixed(*row.stats.avg_decode_s, 3) : "") << ","
            << format_fixed(row.stats.avg_in, 1) << "," << format_fixed(row.stats.avg_out, 1) << ","
            << format_fixed(row.stats.avg_total, 1) << "," << row.stats.n_records << ","
            << row.stats.n_timed << "," << row.stats.n_estimated << "\n";
    }
    return csv.str();
}

std::string render_knowledge_csv(const ReportTables& tables) {
    std::ostringstream csv;
    csv << "dataset,avg_step2,avg_step3,n_traces\n";
    if (tables.knowledge) {
        for (const auto& row : tables.knowledge->rows) {
            csv << to_string(row.dataset) << "," << format_fixed(row.avg_step2, 2) << ","
                << format_fixed(row.avg_step3, 2) << "," << row.n_traces << "\n";
        }
        csv << "avg," << format_fixed(tables.knowledge->avg_step2, 2) << ","
            << format_fixed(tables.knowledge->avg_step3, 2) << ",\n";
    }
    return csv.str();
}

std::string render_json(const ReportTables& tables) {
    nlohmann::ordered_json j;
    j["accuracy"] = nlohmann::ordered_json::array();
    for (const auto& table : tables.accuracy) {
        nlohmann::ordered_json t;
        t["dataset"] = to_string(table.dataset);
        t["n_per_cell"] = table.n_per_cell;
        t["languages"] = nlohmann::ordered_json::array();
        for (Language lang : table.languages) t["languages"].push_back(to_string(lang));
        t["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            nlohmann::ordered_json r;
            r["strategy"] = row.strategy;
            r["cells"] = row.cells;
            r["avg"] = row.avg;
            t["rows"].push_back(std::move(r));
        }
        j["accuracy"].push_back(std::move(t));
    }
    j["resources"] = nlohmann::ordered_json::array();
    for (const auto& row : tables.resources) {
        nlohmann::ordered_json r;
        r["dataset"] = to_string(row.dataset);
        r["strategy"] = row.strategy;
        if (row.stats.avg_decode_s) {
            r["avg_decode_s"] = *row.stats.avg_decode_s;
        } else {
            r["avg_decode_s"] = nullptr;
        }
        r["avg_in"] = row.stats.avg_in;
        r["avg_out"] = row.stats.avg_out;
        r["avg_total"] = row.stats.avg_total;
        j["resources"].push_back(std::move(r));
    }
    if (tables.knowledge) {
        nlohmann::ordered_json k;
        k["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : tables.knowledge->rows) {
            nlohmann::ordered_json r;
            r["dataset"] = to_string(row.dataset);
            r["avg_step2"] = row.avg_step2;
            r["avg_step3"] = row.avg_step3;
            r["n_traces"] = row.n_traces;
            k["rows"].push_back(std::move(r));
        }
        k["avg_step2"] = tables.knowledge->avg_step2;
        k["avg_step3"] = tables.knowledge->avg_step3;
        j["knowledge"] = std::move(k);
    }
    return j.dump(2) + "\n";
}

}  // namespace

std::map<std::string, std::string> render_report(const ReportTables& tables, ReportFormat format) {
    switch (format) {
        case ReportFormat::Markdown:
            return {{"report.md", render_markdown(tables)}};
        case ReportFormat::Csv:
            return {{"report.csv", render_accuracy_csv(tables)},
                    {"resources.csv", render_resources_csv(tables)},
                    {"knowledge.csv", render_knowledge_csv(tables)}};
        case ReportFormat::Json:
            return {{"report.json", render_json(tables)}};
    }
    throw std::invalid_argument("render_report: unknown format");
}

std::vector<AccuracyTable> parse_accuracy_csv(const std::string& csv) {
    std::vector<AccuracyTable> tables;
    auto lines = split_lines(csv);
    if (lines.empty() || lines[0] != "dataset,strategy,lang,accuracy,n") {
        throw std::runtime_error("accuracy csv: unexpected header");
    }
    auto table_for = [&](Dataset d) -> AccuracyTable& {
        for (auto& t : tables) {
            if (t.dataset == d) return t;
        }
        tables.push_back({});
        tables.back().dataset = d;
        return tables.back();
    };
    auto row_for = [&](AccuracyTable& t, const std::string& strategy) -> AccuracyRow& {
        for (auto& r : t.rows) {
            if (r.strategy == strategy) return r;
        }
        t.rows.push_back({});
        t.rows.back().strategy = strategy;
        return t.rows.back();
    };
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split(lines[i], ',');
        if (fields.size() != 5) {
            throw std::runtime_error("accuracy csv line " + std::to_string(i + 1) + ": bad field count");
        }
        auto dataset = dataset_from_name(fields[0]);
        if (!dataset) throw std::runtime_error("accuracy csv: unknown dataset " + fields[0]);
        AccuracyTable& table = table_for(*dataset);
        AccuracyRow& row = row_for(table, fields[1]);
        double value = std::strtod(fields[3].c_str(), nullptr);
        if (fields[2] == "avg") {
            row.avg = value;
        } else {
            auto lang = language_from_code(fields[2]);
            if (!lang) throw std::runtime_error("accuracy csv: unknown language " + fields[2]);
            if (table.rows.size() == 1) table.languages.push_back(*lang);
            row.cells.push_back(value);
        }
        table.n_per_cell = static_cast<size_t>(std::strtoull(fields[4].c_str(), nullptr, 10));
    }
    return tables;
}

}  // namespace sot
