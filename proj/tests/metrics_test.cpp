#include "sot/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace sot;

namespace {

RunRecord make_record(Dataset dataset, Language lang, const std::string& strategy,
                      const std::string& id, bool correct) {
    RunRecord r;
    r.item_id = id;
    r.dataset = dataset;
    r.lang = lang;
    r.strategy = strategy;
    r.fingerprint = strategy + "/" + std::string(to_string(lang)) + "/" + id;
    r.correct = correct;
    r.in_tokens = 100;
    r.out_tokens = 50;
    r.latency_s = 0.5;
    return r;
}

// Fixture set: 10 items x 2 languages x 2 strategies, direct all correct,
// cot correct on even items only.
std::vector<RunRecord> small_fixture() {
    std::vector<RunRecord> records;
    for (const char* strategy : {"direct", "cot"}) {
        for (Language lang : {Language::en, Language::sw}) {
            for (int i = 0; i < 10; ++i) {
                bool correct = std::string(strategy) == "direct" || i % 2 == 0;
                records.push_back(
                    make_record(Dataset::MGSM, lang, strategy, "m" + std::to_string(i), correct));
            }
        }
    }
    return records;
}

}  // namespace

TEST(AvgOfCells, ReproducesEverySotRowAverage) {
    struct Row {
        const char* name;
        std::vector<double> cells;
        double avg;
    };
    // SoT-row per-language cells and their printed Avg column.
    const Row rows[] = {
        {"msvamp-deepseek", {89.8, 24.8, 82.8, 64.6, 71.8, 85.4, 87.2, 85.4, 85.2, 88.2}, 76.5},
        {"msvamp-qwen7b", {93.6, 61.0, 87.6, 76.4, 83.8, 87.4, 89.4, 91.6, 91.8, 91.2}, 85.4},
        {"mgsm-deepseek", {84.4, 10.0, 61.2, 51.2, 61.2, 28.0, 70.0, 76.4, 70.0, 71.6, 68.0}, 59.3},
        {"mgsm-qwen7b", {85.6, 28.0, 71.8, 69.6, 74.0, 36.4, 80.8, 77.0, 72.8, 79.6, 75.2}, 68.3},
        {"xcopa-deepseek", {51.2, 51.0, 66.8, 67.4, 50.6, 50.0, 52.0, 61.4, 58.8, 61.2, 76.8}, 58.8},
        {"xcopa-qwen7b", {65.0, 58.2, 82.6, 83.8, 49.6, 50.8, 60.8, 73.4, 78.6, 83.2, 81.0}, 69.7},
        {"xcopa-gpt35", {82.0, 66.4, 84.0, 88.2, 49.0, 74.4, 58.2, 77.0, 84.2, 81.4, 84.6}, 75.4},
        {"xcopa-qwen32b", {87.0, 74.8, 96.2, 97.2, 53.8, 65.4, 78.4, 91.0, 95.0, 95.8, 96.0}, 84.6},
        {"mgsm-gpt35", {74.4, 62.0, 65.2, 61.2, 56.0, 34.0, 67.6, 67.2, 66.8, 72.8, 63.2}, 62.8},
        {"mgsm-qwen32b", {87.2, 67.2, 86.0, 86.0, 85.4, 87.4, 88.8, 84.4, 86.4, 78.4, 64.8}, 82.0},
        {"msvamp-gpt35", {81.8, 75.4, 80.2, 63.6, 72.8, 79.2, 80.4, 80.0, 83.0, 80.4}, 77.7},
        {"msvamp-qwen32b", {93.8, 87.4, 89.8, 84.8, 87.0, 90.8, 91.8, 91.8, 92.6, 93.2}, 90.3},
        {"mgsm-gpt35+3shot", {74.0, 66.4, 63.6, 63.6, 60.4, 36.0, 70.4, 69.2, 70.4, 74.0, 65.6}, 64.9},
        {"mgsm-gpt35+cot", {75.2, 64.8, 65.2, 57.6, 55.6, 38.4, 69.2, 65.6, 68.0, 76.4, 64.0}, 63.6},
    };
    for (const auto& row : rows) {
        EXPECT_NEAR(avg_of_cells(row.cells), row.avg, 0.05) << row.name;
    }
}

TEST(AccuracyByLanguage, CellsAvgAndOrder) {
    auto records = small_fixture();
    AccuracyTable table = accuracy_by_language(records);
    EXPECT_EQ(table.dataset, Dataset::MGSM);
    EXPECT_EQ(table.n_per_cell, 10u);
    ASSERT_EQ(table.languages.size(), 2u);
    EXPECT_EQ(table.languages[0], Language::en);  // canonical order puts en before sw
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].strategy, "direct");
    EXPECT_DOUBLE_EQ(table.rows[0].cells[0], 100.0);
    EXPECT_DOUBLE_EQ(table.rows[0].avg, 100.0);
    EXPECT_DOUBLE_EQ(table.rows[1].cells[0], 50.0);
    EXPECT_DOUBLE_EQ(table.rows[1].avg, 50.0);
}

TEST(AccuracyByLanguage, RecountOracle) {
    // Independent recount straight off the records.
    auto records = small_fixture();
    AccuracyTable table = accuracy_by_language(records);
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < table.languages.size(); ++i) {
            size_t total = 0;
            size_t correct = 0;
            for (const auto& r : records) {
                if (r.strategy == row.strategy && r.lang == table.languages[i]) {
                    ++total;
                    if (r.correct) ++correct;
                }
            }
            double expected = round_half_up(100.0 * static_cast<double>(correct) /
                                                static_cast<double>(total),
                                            1);
            EXPECT_DOUBLE_EQ(row.cells[i], expected);
        }
    }
}

TEST(AccuracyByLanguage, PermutationInvariance) {
    auto records = small_fixture();
    AccuracyTable before = accuracy_by_language(records);
    std::mt19937 gen(11);
    std::shuffle(records.begin(), records.end(), gen);
    AccuracyTable after = accuracy_by_language(records);
    // row order may change with shuffling; compare per strategy
    for (const auto& row : before.rows) {
        auto it = std::find_if(after.rows.begin(), after.rows.end(),
                               [&](const AccuracyRow& r) { return r.strategy == row.strategy; });
        ASSERT_NE(it, after.rows.end());
        EXPECT_EQ(it->cells, row.cells);
        EXPECT_DOUBLE_EQ(it->avg, row.avg);
    }
}

TEST(AccuracyByLanguage, RaggedCellsRejectedNamingTheHole) {
    auto records = small_fixture();
    records.pop_back();  // drop one cot/sw record
    try {
        accuracy_by_language(records);
        FAIL() << "expected raggedness error";
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("cot"), std::string::npos) << msg;
        EXPECT_NE(msg.find("sw"), std::string::npos) << msg;
    }
}

TEST(AccuracyByLanguage, MultiDatasetSplitsIntoTables) {
    auto records = small_fixture();
    records.push_back(make_record(Dataset::XCOPA, Language::zh, "direct", "x1", true));
    EXPECT_THROW(accuracy_by_language(records), std::invalid_argument);
    auto tables = accuracy_tables(records);
    ASSERT_EQ(tables.size(), 2u);
    EXPECT_EQ(tables[0].dataset, Dataset::MGSM);
    EXPECT_EQ(tables[1].dataset, Dataset::XCOPA);
}

TEST(ResourceStatsTest, AveragesAndTotalRelation) {
    std::vector<RunRecord> records;
    RunRecord a = make_record(Dataset::MGSM, Language::en, "sot[111]", "m1", true);
    a.in_tokens = 100;
    a.out_tokens = 900;
    a.latency_s = 4.0;
    RunRecord b = a;
    b.item_id = "m2";
    b.in_tokens = 287;
    b.out_tokens = 960;
    b.latency_s = 4.336;
    records = {a, b};

    ResourceStats stats = resource_stats(records);
    EXPECT_DOUBLE_EQ(stats.avg_in, 193.5);
    EXPECT_DOUBLE_EQ(stats.avg_out, 930.0);
    EXPECT_DOUBLE_EQ(stats.avg_total, 1123.5);
    EXPECT_DOUBLE_EQ(stats.avg_total, stats.avg_in + stats.avg_out);
    ASSERT_TRUE(stats.avg_decode_s);
    EXPECT_DOUBLE_EQ(*stats.avg_decode_s, 4.168);

    // single-record average passes through
    std::vector<RunRecord> one{a};
    one[0].latency_s = 4.168;
    EXPECT_DOUBLE_EQ(*resource_stats(one).avg_decode_s, 4.168);

    // all-cached runs report tokens but no decode time
    for (auto& r : records) r.latency_s.reset();
    ResourceStats cached = resource_stats(records);
    EXPECT_FALSE(cached.avg_decode_s);
    EXPECT_DOUBLE_EQ(cached.avg_in, 193.5);
}

TEST(ResourceStatsTest, FailedRecordsExcludedAndEmptyRejected) {
    RunRecord failed = make_record(Dataset::MGSM, Language::en, "direct", "m1", false);
    failed.failed = true;
    std::vector<RunRecord> only_failed{failed};
    EXPECT_THROW(resource_stats(only_failed), std::invalid_argument);
    std::vector<RunRecord> none;
    EXPECT_THROW(resource_stats(none), std::invalid_argument);

    RunRecord ok = make_record(Dataset::MGSM, Language::en, "direct", "m2", true);
    ok.in_tokens = 10;
    ok.out_tokens = 20;
    std::vector<RunRecord> mixed{failed, ok};
    ResourceStats stats = resource_stats(mixed);
    EXPECT_EQ(stats.n_records, 1u);
    EXPECT_DOUBLE_EQ(stats.avg_in, 10.0);
}

TEST(ResourceStatsTest, EstimatedUsageIsSurfacedNotHidden) {
    RunRecord est = make_record(Dataset::MGSM, Language::en, "direct", "m1", true);
    est.usage_estimated = true;
    std::vector<RunRecord> records{est, make_record(Dataset::MGSM, Language::en, "direct", "m2", true)};
    EXPECT_EQ(resource_stats(records).n_estimated, 1u);

    ReportTables tables = build_report_tables(records);
    std::string md = render_report(tables, ReportFormat::Markdown).at("report.md");
    EXPECT_NE(md.find("estimated"), std::string::npos);
    std::string csv = render_report(tables, ReportFormat::Csv).at("resources.csv");
    EXPECT_NE(csv.find("n_estimated"), std::string::npos);
}

TEST(ResourceStatsTest, PaperRowRelationHolds) {
    // input + output = total for the published SoT averages
    EXPECT_NEAR(193.3 + 930.3, 1123.6, 0.05);
    EXPECT_NEAR(184.7 + 630.3, 815.0, 0.05);
    EXPECT_NEAR(194.3 + 770.7, 965.0, 0.05);
    // the published total carries an extra 0.1 of display rounding
    EXPECT_NEAR(185.7 + 555.2, 741.0, 0.15);
}

TEST(KnowledgeStatsTest, TableAndAvgRow) {
    std::vector<double> step2{3.78, 2.97, 2.03};
    std::vector<double> step3{1.80, 1.72, 1.77};
    EXPECT_EQ(format_fixed(knowledge_avg(step2), 2), "2.93");
    EXPECT_EQ(format_fixed(knowledge_avg(step3), 2), "1.76");

    std::vector<RunRecord> records;
    auto add = [&](Dataset d, size_t m, size_t ls, int idx) {
        RunRecord r = make_record(d, Language::en, "sot[111]", "k" + std::to_string(idx), true);
        r.step2_count = m;
        r.step3_count = ls;
        records.push_back(r);
    };
    add(Dataset::MGSM, 4, 2, 0);
    add(Dataset::MGSM, 3, 1, 1);
    add(Dataset::XCOPA, 2, 2, 2);
    KnowledgeTable table = knowledge_stats(records);
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].dataset, Dataset::MGSM);
    EXPECT_DOUBLE_EQ(table.rows[0].avg_step2, 3.5);
    EXPECT_DOUBLE_EQ(table.rows[1].avg_step2, 2.0);
    EXPECT_DOUBLE_EQ(table.avg_step2, round_half_up((3.5 + 2.0) / 2, 2));

    // all-empty sections yield zeros
    std::vector<RunRecord> zero;
    add(Dataset::MGSM, 0, 0, 3);
    zero.push_back(records.back());
    KnowledgeTable zt = knowledge_stats(zero);
    EXPECT_DOUBLE_EQ(zt.avg_step2, 0.0);
    EXPECT_DOUBLE_EQ(zt.avg_step3, 0.0);

    std::vector<RunRecord> no_traces{make_record(Dataset::MGSM, Language::en, "direct", "m1", true)};
    EXPECT_THROW(knowledge_stats(no_traces), std::invalid_argument);
}

TEST(RenderReport, DeterministicBytes) {
    auto records = small_fixture();
    ReportTables tables = build_report_tables(records);
    auto a = render_report(tables, ReportFormat::Markdown);
    auto b = render_report(tables, ReportFormat::Markdown);
    EXPECT_EQ(a, b);
    auto csv_a = render_report(tables, ReportFormat::Csv);
    auto csv_b = render_report(tables, ReportFormat::Csv);
    EXPECT_EQ(csv_a, csv_b);
    auto json_a = render_report(tables, ReportFormat::Json);
    EXPECT_FALSE(json_a.at("report.json").empty());
}

TEST(RenderReport, MarkdownColumnOrderFollowsTheDataset) {
    // full MGSM language set in canonical order
    std::vector<RunRecord> records;
    for (Language lang : dataset_language_order(Dataset::MGSM)) {
        records.push_back(make_record(Dataset::MGSM, lang, "direct", "m1", true));
    }
    ReportTables tables = build_report_tables(records);
    std::string md = render_report(tables, ReportFormat::Markdown).at("report.md");
    size_t pos = md.find("| Strategy | En | Sw | Ja | Bn | Th | Te | Ru | Zh | De | Es | Fr | Avg. |");
    EXPECT_NE(pos, std::string::npos) << md;
}

TEST(RenderReport, CsvRoundTrip) {
    auto records = small_fixture();
    for (auto& r : records) {
        if (r.item_id == "m3" && r.lang == Language::sw) r.correct = false;  // non-trivial cells
    }
    ReportTables tables = build_report_tables(records);
    std::string csv = render_report(tables, ReportFormat::Csv).at("report.csv");
    auto parsed = parse_accuracy_csv(csv);
    ASSERT_EQ(parsed.size(), tables.accuracy.size());
    for (size_t t = 0; t < parsed.size(); ++t) {
        const AccuracyTable& in = tables.accuracy[t];
        const AccuracyTable& out = parsed[t];
        EXPECT_EQ(out.dataset, in.dataset);
        EXPECT_EQ(out.languages, in.languages);
        EXPECT_EQ(out.n_per_cell, in.n_per_cell);
        ASSERT_EQ(out.rows.size(), in.rows.size());
        for (size_t i = 0; i < in.rows.size(); ++i) {
            EXPECT_EQ(out.rows[i].strategy, in.rows[i].strategy);
            ASSERT_EQ(out.rows[i].cells.size(), in.rows[i].cells.size());
            for (size_t j = 0; j < in.rows[i].cells.size(); ++j) {
                EXPECT_NEAR(out.rows[i].cells[j], in.rows[i].cells[j], 1e-9);
            }
            EXPECT_NEAR(out.rows[i].avg, in.rows[i].avg, 1e-9);
        }
    }
    // re-render equals the original bytes
    ReportTables reparsed;
    reparsed.accuracy = parsed;
    EXPECT_EQ(render_report(reparsed, ReportFormat::Csv).at("report.csv"), csv);
}
