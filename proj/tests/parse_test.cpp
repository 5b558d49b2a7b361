#include "sot/parse.hpp"

#include <gtest/gtest.h>

#include <json.hpp>
#include <random>

#include "sot/util.hpp"

using namespace sot;

namespace {

const std::filesystem::path kDataDir =
    std::filesystem::path(SOTBENCH_SOURCE_DIR) / "tests" / "data";

ExactDecimal dec(const char* s) { return *ExactDecimal::parse(s); }

std::string extract_str(const std::string& text, Language lang,
                        std::optional<bool> gold_fractional = std::nullopt) {
    auto result = extract_numeric_answer(text, lang, gold_fractional);
    return result ? result->numeric.to_string() : "<none>";
}

}  // namespace

TEST(ExtractNumeric, MarkerFirstThenLastNumber) {
    auto marker = extract_numeric_answer("Final Answer: The baker still has 59 cakes.", Language::en);
    ASSERT_TRUE(marker);
    EXPECT_EQ(marker->numeric.to_string(), "59");
    EXPECT_EQ(marker->method, ExtractionMethod::FinalMarker);

    auto last = extract_numeric_answer("这棵树最初有 9 个苹果。", Language::zh);
    ASSERT_TRUE(last);
    EXPECT_EQ(last->numeric.to_string(), "9");
    EXPECT_EQ(last->method, ExtractionMethod::LastNumber);

    auto fallback = extract_numeric_answer("1,234.5 then later 7", Language::en);
    ASSERT_TRUE(fallback);
    EXPECT_EQ(fallback->numeric.to_string(), "7");
    EXPECT_EQ(fallback->method, ExtractionMethod::LastNumber);
}

TEST(ExtractNumeric, ScriptDigits) {
    EXPECT_EQ(extract_str("১২৩", Language::bn), "123");
    EXPECT_EQ(extract_str("คำตอบ: ๔๒", Language::th), "42");
    EXPECT_EQ(extract_str("สমাধানం: ౯", Language::te), "9");
    EXPECT_EQ(extract_str("答え：４２", Language::ja), "42");
}

TEST(ExtractNumeric, SeparatorRules) {
    // dot-decimal languages
    EXPECT_EQ(extract_str("Final Answer: 1,234.5", Language::en), "1234.5");
    EXPECT_EQ(extract_str("Final Answer: 1,234,567", Language::en), "1234567");
    EXPECT_EQ(extract_str("Final Answer: 1.234", Language::en), "1.234");
    EXPECT_EQ(extract_str("total 1 234", Language::en), "1234");
    // comma-decimal languages
    EXPECT_EQ(extract_str("Antwort: 3,5", Language::de), "3.5");
    EXPECT_EQ(extract_str("Antwort: 1.234", Language::de), "1234");
    EXPECT_EQ(extract_str("Antwort: 1.234,56", Language::de), "1234.56");
    EXPECT_EQ(extract_str("Antwort: 3.14", Language::de), "3.14");
    EXPECT_EQ(extract_str("Ответ: 1 234,56", Language::ru), "1234.56");
}

TEST(ExtractNumeric, FractionsAndPercents) {
    EXPECT_EQ(extract_str("Final Answer: 3/4", Language::en), "0.75");
    EXPECT_EQ(extract_str("Final Answer: 70%", Language::en, true), "0.7");
    EXPECT_EQ(extract_str("Final Answer: 70%", Language::en, false), "70");
    EXPECT_EQ(extract_str("Final Answer: 70%", Language::en), "70");  // unknown gold: raw
    EXPECT_EQ(extract_str("Final Answer: -1/2", Language::en), "-0.5");
}

TEST(ExtractNumeric, FailureIsAValue) {
    EXPECT_FALSE(extract_numeric_answer("no numbers at all", Language::en));
    EXPECT_FALSE(extract_numeric_answer("", Language::en));
    EXPECT_FALSE(extract_numeric_answer("答案是四十二", Language::zh));
}

TEST(ExtractNumeric, SpanPointsIntoSource) {
    std::string text = "Final Answer: The baker still has 59 cakes.";
    auto result = extract_numeric_answer(text, Language::en);
    ASSERT_TRUE(result);
    EXPECT_EQ(text.substr(result->span_begin, result->span_end - result->span_begin), "59");
}

TEST(ExtractNumeric, DigitScriptHomomorphism) {
    // Transliterating ASCII digits into any supported script leaves the
    // extracted value unchanged.
    struct Script {
        const char* name;
        char32_t zero;
    };
    const Script scripts[] = {
        {"bengali", 0x09E6}, {"thai", 0x0E50},       {"telugu", 0x0C66},
        {"tamil", 0x0BE6},   {"devanagari", 0x0966}, {"fullwidth", 0xFF10},
    };
    auto encode_cp = [](char32_t cp, std::string& out) {
        if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    };
    std::mt19937 gen(42);
    for (int trial = 0; trial < 200; ++trial) {
        int digits = 1 + static_cast<int>(gen() % 6);
        std::string ascii;
        for (int i = 0; i < digits; ++i) ascii.push_back(static_cast<char>('0' + gen() % 10));
        std::string base = "value " + ascii + " end";
        auto expected = extract_numeric_answer(base, Language::en);
        ASSERT_TRUE(expected);
        for (const auto& script : scripts) {
            std::string transliterated = "value ";
            for (char c : ascii) encode_cp(script.zero + static_cast<char32_t>(c - '0'), transliterated);
            transliterated += " end";
            auto got = extract_numeric_answer(transliterated, Language::en);
            ASSERT_TRUE(got) << script.name << " " << ascii;
            EXPECT_EQ(got->numeric, expected->numeric) << script.name << " " << ascii;
        }
    }
}

TEST(ExtractNumeric, FuzzNeverThrows) {
    std::mt19937 gen(7);
    for (int i = 0; i < 10000; ++i) {
        size_t len = gen() % 64;
        std::string s;
        for (size_t j = 0; j < len; ++j) s.push_back(static_cast<char>(gen() % 256));
        EXPECT_NO_THROW({
            auto r = extract_numeric_answer(s, Language::en);
            (void)r;
        });
        EXPECT_NO_THROW({
            auto r = extract_choice(s, "choice a", "choice b");
            (void)r;
        });
        EXPECT_NO_THROW({
            auto t = parse_sot_trace(s);
            (void)t;
        });
    }
}

TEST(ExtractChoice, PaperPhrasings) {
    auto one = extract_choice("So the final answer is: 1.", "x", "y");
    ASSERT_TRUE(one);
    EXPECT_EQ(one->choice, 1);
    EXPECT_EQ(one->method, ExtractionMethod::FinalMarker);

    auto zero = extract_choice("Therefore, the final answer is \"0\" for Choice 0.", "x", "y");
    ASSERT_TRUE(zero);
    EXPECT_EQ(zero->choice, 0);

    auto text_match = extract_choice("我气喘吁吁。", "我失声了。", "我气喘吁吁。");
    ASSERT_TRUE(text_match);
    EXPECT_EQ(text_match->choice, 1);
    EXPECT_EQ(text_match->method, ExtractionMethod::ChoiceTextMatch);
}

TEST(ExtractChoice, ChoiceTokenAndAmbiguity) {
    auto token = extract_choice("I would pick Choice 1 because it fits.", "a", "b");
    ASSERT_TRUE(token);
    EXPECT_EQ(token->choice, 1);
    EXPECT_EQ(token->method, ExtractionMethod::ChoiceToken);

    // both choices quoted, no tokens, no markers -> ambiguous
    EXPECT_FALSE(extract_choice("maybe aaa or bbb", "aaa", "bbb"));
    EXPECT_FALSE(extract_choice("nothing relevant", "aaa", "bbb"));

    // last mention wins for tokens
    auto last = extract_choice("Choice 0 is weak. Choice 1 is strong.", "a", "b");
    ASSERT_TRUE(last);
    EXPECT_EQ(last->choice, 1);
}

TEST(ExtractChoice, MarkerNumbersBeyondBinaryAreSkipped) {
    auto r = extract_choice("The final answer is 42, i.e. choice 1.", "a", "b");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->choice, 1);
    EXPECT_EQ(r->method, ExtractionMethod::FinalMarker);
}

TEST(TraceParse, AppleTreeTrace) {
    SoTTrace trace = parse_sot_trace(read_file(kDataDir / "traces" / "apple_tree.txt"));
    ASSERT_EQ(trace.m(), 3u);
    EXPECT_EQ(trace.knowledge_entries[0], "Total number of apple trees: 52");
    EXPECT_EQ(trace.knowledge_entries[1], "Apples picked from one tree: 2");
    EXPECT_EQ(trace.knowledge_entries[2], "Apples left on the same tree: 7");
    EXPECT_TRUE(trace.lang_specific_entries.empty());
    ASSERT_TRUE(trace.thinking);
    EXPECT_EQ(trace.n_thinking_steps, 2u);
    ASSERT_TRUE(trace.final);
    auto answer = extract_numeric_answer(*trace.final, Language::zh);
    ASSERT_TRUE(answer);
    EXPECT_EQ(answer->numeric.to_string(), "9");
}

TEST(TraceParse, BakerTrace) {
    SoTTrace trace = parse_sot_trace(read_file(kDataDir / "traces" / "baker.txt"));
    EXPECT_EQ(trace.m(), 4u);
    EXPECT_GE(trace.lang_specific_entries.size(), 1u);
    ASSERT_TRUE(trace.final);
    auto answer = extract_numeric_answer(*trace.final, Language::zh);
    ASSERT_TRUE(answer);
    EXPECT_EQ(answer->numeric.to_string(), "59");
}

TEST(TraceParse, CopaTrace) {
    SoTTrace trace = parse_sot_trace(read_file(kDataDir / "traces" / "copa_breath.txt"));
    EXPECT_GE(trace.m(), 1u);
    ASSERT_TRUE(trace.final);
    auto choice = extract_choice(*trace.final, "我失声了。", "我气喘吁吁。");
    ASSERT_TRUE(choice);
    EXPECT_EQ(choice->choice, 1);
}

TEST(TraceParse, EmptyAndUnstructured) {
    SoTTrace empty = parse_sot_trace("");
    EXPECT_EQ(empty.m(), 0u);
    EXPECT_FALSE(empty.thinking);
    EXPECT_FALSE(empty.final);

    SoTTrace prose = parse_sot_trace("Just a plain answer with no sections. 42.");
    EXPECT_EQ(prose.m(), 0u);
    EXPECT_TRUE(prose.lang_specific_entries.empty());
    EXPECT_EQ(prose.raw, "Just a plain answer with no sections. 42.");
}

TEST(TraceParse, SkippedStepsAndPlainHeaders) {
    std::string text =
        "2. Extract relationships:\n"
        "- first: 1\n"
        "- second: 2\n"
        "3. Language-specific knowledge:\n"
        "No specific language-specific knowledge is needed here.\n"
        "4. Calculation:\n"
        "done\n"
        "Final Answer: 5\n";
    SoTTrace trace = parse_sot_trace(text);
    EXPECT_FALSE(trace.thinking);
    EXPECT_EQ(trace.m(), 2u);
    EXPECT_EQ(trace.knowledge_entries[0], "first: 1");
    EXPECT_TRUE(trace.lang_specific_entries.empty());
    ASSERT_TRUE(trace.final);
    EXPECT_EQ(*trace.final, "5");
}

TEST(TraceParse, DecimalLineIsNotAHeader) {
    SoTTrace trace = parse_sot_trace("1.5 liters of milk\nFinal Answer: 1.5");
    EXPECT_FALSE(trace.thinking);
    ASSERT_TRUE(trace.final);
}

TEST(CountKnowledge, MeansAndErrors) {
    SoTTrace a;
    a.knowledge_entries = {"x", "y", "z", "w", "v"};
    std::vector<SoTTrace> one{a};
    auto counts = count_knowledge(one);
    EXPECT_DOUBLE_EQ(counts.avg_step2, 5.0);
    EXPECT_EQ(format_fixed(counts.avg_step2, 2), "5.00");
    EXPECT_DOUBLE_EQ(counts.avg_step3, 0.0);

    SoTTrace b;
    b.knowledge_entries = {"x"};
    b.lang_specific_entries = {"u", "v"};
    std::vector<SoTTrace> two{a, b};
    counts = count_knowledge(two);
    EXPECT_DOUBLE_EQ(counts.avg_step2, 3.0);
    EXPECT_DOUBLE_EQ(counts.avg_step3, 1.0);

    std::vector<SoTTrace> none;
    EXPECT_THROW(count_knowledge(none), std::invalid_argument);
}

TEST(NumericEqual, ExactAndTolerance) {
    EXPECT_TRUE(numeric_equal(dec("9"), dec("9")));
    EXPECT_TRUE(numeric_equal(dec("9.0"), dec("9")));
    EXPECT_FALSE(numeric_equal(dec("59"), dec("76")));
    EXPECT_TRUE(numeric_equal(dec("76.519999"), dec("76.52")));
    EXPECT_FALSE(numeric_equal(dec("76.4"), dec("76.52")));
    // integral pair never gets tolerance
    EXPECT_FALSE(numeric_equal(dec("1000000"), dec("1000001")));
    EXPECT_TRUE(numeric_equal(dec("0.3333334"), dec("0.3333333")));
}

TEST(Rounding, HalfUpDisplay) {
    EXPECT_EQ(format_fixed(76.52, 1), "76.5");
    EXPECT_EQ(format_fixed(68.25, 1), "68.3");
    EXPECT_EQ(format_fixed(2.9266666, 2), "2.93");
    EXPECT_EQ(format_fixed(1.7633333, 2), "1.76");
    EXPECT_EQ(format_fixed(59.2727, 1), "59.3");
    EXPECT_EQ(format_fixed(0.05, 1), "0.1");
    EXPECT_EQ(format_fixed(-0.05, 1), "-0.1");
}

TEST(Markers, BundledTableMatchesDataFile) {
    std::string shipped =
        read_file(std::filesystem::path(SOTBENCH_SOURCE_DIR) / "data" / "markers.tsv");
    EXPECT_EQ(shipped, std::string(bundled_markers_tsv()));
    // and the shipped file parses
    MarkerTable table =
        MarkerTable::load_tsv(std::filesystem::path(SOTBENCH_SOURCE_DIR) / "data" / "markers.tsv");
    EXPECT_FALSE(table.markers_for(Language::zh).empty());
}

TEST(Markers, UnknownLanguageRejected) {
    EXPECT_THROW(MarkerTable::parse_tsv("xx\tmarker\n"), std::runtime_error);
    EXPECT_THROW(MarkerTable::parse_tsv("en\n"), std::runtime_error);
}

TEST(ExtractionCorpus, FullAgreementWithAnnotations) {
    using nlohmann::json;
    auto lines = split_lines(read_file(kDataDir / "extraction_corpus.jsonl"));
    size_t checked = 0;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        json row = json::parse(lines[i]);
        std::string text = row.at("text").get<std::string>();
        Language lang = *language_from_code(row.at("lang").get<std::string>());
        if (row.at("gold").is_null()) {
            EXPECT_FALSE(extract_numeric_answer(text, lang))
                << "line " << i + 1 << ": expected extraction failure for: " << text;
        } else {
            auto gold = ExactDecimal::parse(row.at("gold").get<std::string>());
            ASSERT_TRUE(gold) << "line " << i + 1 << ": bad gold";
            auto got = extract_numeric_answer(text, lang, !gold->is_integral());
            ASSERT_TRUE(got) << "line " << i + 1 << ": extraction failed for: " << text;
            EXPECT_TRUE(numeric_equal(got->numeric, *gold))
                << "line " << i + 1 << ": got " << got->numeric.to_string() << " want "
                << gold->to_string() << " for: " << text;
        }
        ++checked;
    }
    EXPECT_GE(checked, 200u);
}
