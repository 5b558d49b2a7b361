#include "sot/strategy.hpp"

#include <gtest/gtest.h>

#include "sot/corpus.hpp"
#include "sot/util.hpp"

using namespace sot;

namespace {

const std::filesystem::path kRoot = std::filesystem::path(SOTBENCH_SOURCE_DIR);
const std::filesystem::path kGolden = kRoot / "tests" / "data" / "golden";

struct Fixture {
    std::vector<BenchmarkItem> mgsm;
    std::vector<BenchmarkItem> xcopa;
    ExemplarStore store;

    Fixture() {
        std::vector<Language> langs{Language::en, Language::sw};
        mgsm = load_dataset(Dataset::MGSM, kRoot / "data" / "sample" / "mgsm", langs);
        std::vector<Language> zh{Language::zh};
        xcopa = load_dataset(Dataset::XCOPA, kRoot / "data" / "sample" / "xcopa", zh);
        store = ExemplarStore::load_jsonl(kRoot / "data" / "exemplars" / "mgsm.jsonl");
    }

    const BenchmarkItem& sw_item() const { return mgsm[11]; }  // m02 sw
    const BenchmarkItem& en_item() const { return mgsm[1]; }   // m02 en
    const BenchmarkItem& copa_item() const { return xcopa[0]; }

    ExemplarSet shots(const BenchmarkItem& item) const {
        return sample_exemplars(mgsm, 3, 7, item.id, store);
    }
};

size_t count_occurrences(const std::string& haystack, std::string_view needle) {
    size_t n = 0;
    for (size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

// Step sentences of prompt text, in order of appearance.
std::vector<int> step_sequence(const std::string& text, TaskKind kind) {
    const auto& tmpl = PromptTemplate::current();
    std::vector<std::pair<size_t, int>> hits;
    for (int step = 1; step <= 4; ++step) {
        size_t pos = text.find(tmpl.step_sentence(step, kind));
        if (pos != std::string::npos) hits.emplace_back(pos, step);
    }
    std::sort(hits.begin(), hits.end());
    std::vector<int> out;
    for (auto& [pos, step] : hits) out.push_back(step);
    return out;
}

}  // namespace

TEST(AblationMasks, TableOrder) {
    auto masks = enumerate_ablation_masks();
    ASSERT_EQ(masks.size(), 8u);
    EXPECT_EQ(masks.front(), (StepMask{false, false, false}));
    EXPECT_EQ(masks[1], (StepMask{true, false, false}));
    EXPECT_EQ(masks[2], (StepMask{false, true, false}));
    EXPECT_EQ(masks[3], (StepMask{false, false, true}));
    EXPECT_EQ(masks[4], (StepMask{true, true, false}));
    EXPECT_EQ(masks[5], (StepMask{true, false, true}));
    EXPECT_EQ(masks[6], (StepMask{false, true, true}));
    EXPECT_EQ(masks.back(), (StepMask{true, true, true}));
}

TEST(PromptAssembly, GoldenSnapshots) {
    Fixture fx;
    auto shots = fx.shots(fx.sw_item());
    auto check = [](const char* name, const PromptBundle& bundle) {
        EXPECT_EQ(bundle.user_text, read_file(kGolden / (std::string(name) + ".txt"))) << name;
    };
    check("direct_math", build_direct_prompt(fx.sw_item()));
    check("direct_copa", build_direct_prompt(fx.copa_item()));
    check("cot_math", build_cot_prompt(fx.sw_item()));
    check("fewshot_math", build_fewshot_prompt(fx.sw_item(), shots));
    check("sot_full_math", build_sot_prompt(fx.sw_item(), {true, true, true}));
    check("sot_mask_011_math", build_sot_prompt(fx.sw_item(), {false, true, true}));
    check("sot_plus_cot_math", build_sot_prompt(fx.sw_item(), {true, true, true}, nullptr, true));
    check("sot_plus_3shot_math", build_sot_prompt(fx.sw_item(), {true, true, true}, &shots, false));
    check("sot_full_copa", build_sot_prompt(fx.copa_item(), {true, true, true}));
    check("translate1_math", build_translation_variant(fx.sw_item(), TranslationType::Type1));
    check("translate2_math",
          build_translation_variant(
              fx.sw_item(), TranslationType::Type2,
              std::string("A baker baked 167 cakes and sold 108 of them. How many cakes are left?")));
}

TEST(PromptAssembly, Deterministic) {
    Fixture fx;
    auto shots = fx.shots(fx.sw_item());
    auto a = build_sot_prompt(fx.sw_item(), {true, true, true}, &shots, true);
    auto b = build_sot_prompt(fx.sw_item(), {true, true, true}, &shots, true);
    EXPECT_EQ(a.user_text, b.user_text);
    EXPECT_EQ(a.strategy_fingerprint, b.strategy_fingerprint);
}

TEST(PromptAssembly, MaskZeroIsDirectByteForByte) {
    Fixture fx;
    for (const auto* item : {&fx.sw_item(), &fx.en_item(), &fx.copa_item()}) {
        EXPECT_EQ(build_sot_prompt(*item, {false, false, false}).user_text,
                  build_direct_prompt(*item).user_text);
    }
}

TEST(PromptAssembly, VerbatimStepSentenceExactlyOnce) {
    Fixture fx;
    const auto& tmpl = PromptTemplate::current();
    for (StepMask mask : enumerate_ablation_masks()) {
        auto bundle = build_sot_prompt(fx.sw_item(), mask);
        bool enabled[5] = {false, mask.s1, mask.s2, mask.s3, mask.any()};
        for (int step = 1; step <= 4; ++step) {
            size_t expected = enabled[step] ? 1u : 0u;
            EXPECT_EQ(count_occurrences(bundle.user_text,
                                        std::string(tmpl.step_sentence(step, TaskKind::MathNumeric))),
                      expected)
                << "mask " << mask.bits() << " step " << step;
        }
        // question appears exactly once
        EXPECT_EQ(count_occurrences(bundle.user_text, fx.sw_item().question), 1u);
    }
}

TEST(PromptAssembly, MonotoneScaffolding) {
    Fixture fx;
    auto masks = enumerate_ablation_masks();
    for (const StepMask& a : masks) {
        auto pa = build_sot_prompt(fx.sw_item(), a);
        for (const StepMask& b : masks) {
            if (!a.subset_of(b)) continue;
            auto pb = build_sot_prompt(fx.sw_item(), b);
            // enabling steps only adds text
            EXPECT_LE(pa.user_text.size(), pb.user_text.size());
            // the step-sentence sequence of A is a subsequence of B's
            auto sa = step_sequence(pa.user_text, TaskKind::MathNumeric);
            auto sb = step_sequence(pb.user_text, TaskKind::MathNumeric);
            size_t j = 0;
            for (int step : sa) {
                while (j < sb.size() && sb[j] != step) ++j;
                EXPECT_LT(j, sb.size()) << "mask " << a.bits() << " not within " << b.bits();
                ++j;
            }
        }
    }
}

TEST(PromptAssembly, CotDiffersFromDirectOnlyByTheSentence) {
    Fixture fx;
    std::string direct = build_direct_prompt(fx.sw_item()).user_text;
    std::string cot = build_cot_prompt(fx.sw_item()).user_text;
    ASSERT_NE(cot.find("Let's think step by step in English."), std::string::npos);
    std::string removed = cot;
    size_t pos = removed.find("Let's think step by step in English.\n\n");
    ASSERT_NE(pos, std::string::npos);
    removed.erase(pos, std::string("Let's think step by step in English.\n\n").size());
    EXPECT_EQ(removed, direct);
}

TEST(PromptAssembly, FewShotStructure) {
    Fixture fx;
    auto shots = fx.shots(fx.sw_item());
    auto bundle = build_fewshot_prompt(fx.sw_item(), shots);
    // exactly 3 Q: blocks, all before the target question
    EXPECT_EQ(count_occurrences(bundle.user_text, "\nQ: "), 3u);
    EXPECT_EQ(count_occurrences(bundle.user_text, "Q: "), 3u);
    size_t target = bundle.user_text.find("Question (sw):");
    ASSERT_NE(target, std::string::npos);
    EXPECT_LT(bundle.user_text.rfind("Q: "), target);

    // permuted exemplars change the fingerprint
    ExemplarSet permuted = shots;
    std::swap(permuted.items[0], permuted.items[1]);
    EXPECT_NE(build_fewshot_prompt(fx.sw_item(), permuted).strategy_fingerprint,
              bundle.strategy_fingerprint);

    ExemplarSet empty;
    EXPECT_THROW(build_fewshot_prompt(fx.sw_item(), empty), std::invalid_argument);

    // exemplar sharing the item id is rejected
    ExemplarSet self;
    self.items.push_back({fx.sw_item(), "A: trivially."});
    EXPECT_THROW(build_fewshot_prompt(fx.sw_item(), self), std::invalid_argument);
}

TEST(PromptAssembly, TranslationVariants) {
    Fixture fx;
    auto t1 = build_translation_variant(fx.sw_item(), TranslationType::Type1);
    EXPECT_NE(t1.user_text.find(
                  "Translate the question into English if it is not in English for the following "
                  "step."),
              std::string::npos);
    EXPECT_EQ(t1.user_text.find("Think the question in English"), std::string::npos);

    // the conditional sentence stays as-is on English items
    auto t1_en = build_translation_variant(fx.en_item(), TranslationType::Type1);
    EXPECT_NE(t1_en.user_text.find("Translate the question into English if it is not in English"),
              std::string::npos);

    std::string translation = "How many apples are left?";
    auto t2 = build_translation_variant(fx.sw_item(), TranslationType::Type2, translation);
    EXPECT_NE(t2.user_text.find("\"How many apples are left?\" is the translation of question"),
              std::string::npos);

    EXPECT_THROW(build_translation_variant(fx.sw_item(), TranslationType::Type2),
                 std::invalid_argument);
    EXPECT_THROW(build_translation_variant(fx.sw_item(), TranslationType::Type2, std::string("")),
                 std::invalid_argument);
}

TEST(PromptAssembly, CopaItemOnMathOnlyTemplateFails) {
    Fixture fx;
    PromptTemplate math_only = PromptTemplate::math_only("math-only-test");
    EXPECT_THROW(build_sot_prompt(fx.copa_item(), {true, true, true}, nullptr, false, math_only),
                 std::invalid_argument);
    EXPECT_NO_THROW(build_sot_prompt(fx.en_item(), {true, true, true}, nullptr, false, math_only));
}

TEST(Fingerprints, SensitiveToItemSpecAndTemplate) {
    Fixture fx;
    auto a = build_direct_prompt(fx.en_item());
    auto b = build_direct_prompt(fx.mgsm[2]);
    EXPECT_NE(a.strategy_fingerprint, b.strategy_fingerprint);

    // same bytes, different strategy identity
    auto direct = build_direct_prompt(fx.en_item());
    auto sot_zero = build_sot_prompt(fx.en_item(), {false, false, false});
    EXPECT_EQ(direct.user_text, sot_zero.user_text);
    EXPECT_NE(direct.strategy_fingerprint, sot_zero.strategy_fingerprint);

    PromptTemplate other = PromptTemplate::math_only("sot-v2-test");
    EXPECT_NE(build_direct_prompt(fx.en_item(), other).strategy_fingerprint,
              direct.strategy_fingerprint);
}

TEST(StrategySpec, ValidationAndLabels) {
    EXPECT_EQ(StrategySpec::direct().label(), "direct");
    EXPECT_EQ(StrategySpec::cot().label(), "cot");
    EXPECT_EQ(StrategySpec::fewshot(3, 1).label(), "fewshot[k=3]");
    EXPECT_EQ(StrategySpec::sot({true, false, true}).label(), "sot[101]");
    EXPECT_EQ(StrategySpec::sot_plus_cot().label(), "sot[111]+cot");
    EXPECT_EQ(StrategySpec::sot_plus_fewshot(3, 1).label(), "sot[111]+fewshot[k=3]");
    EXPECT_EQ(StrategySpec::translate_type1().label(), "translate1");

    StrategySpec bad = StrategySpec::cot();
    bad.compose_cot = true;
    EXPECT_THROW(bad.validate(), std::invalid_argument);

    StrategySpec no_shots = StrategySpec::fewshot(0, 1);
    EXPECT_THROW(no_shots.validate(), std::invalid_argument);

    StrategySpec stray_shots = StrategySpec::direct();
    stray_shots.k_shots = 3;
    EXPECT_THROW(stray_shots.validate(), std::invalid_argument);

    StrategySpec zero_mask_compose = StrategySpec::sot({false, false, false});
    zero_mask_compose.compose_cot = true;
    EXPECT_THROW(zero_mask_compose.validate(), std::invalid_argument);
}

TEST(TranslationTableTest, LoadAndLookup) {
    auto table =
        TranslationTable::load_jsonl(kRoot / "data" / "translations" / "mgsm.jsonl");
    auto hit = table.translation_for("m02", Language::sw);
    ASSERT_TRUE(hit);
    EXPECT_NE(hit->find("baker"), std::string::npos);
    EXPECT_FALSE(table.translation_for("m02", Language::ja));
    EXPECT_FALSE(table.translation_for("nope", Language::sw));
}
