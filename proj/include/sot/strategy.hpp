#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sot/corpus.hpp"
#include "sot/types.hpp"

namespace sot {

// Which of steps 1-3 are enabled; answer generation (step 4) is always on.
// The all-false mask is defined to produce the Direct prompt.
struct StepMask {
    bool s1 = false;
    bool s2 = false;
    bool s3 = false;

    bool any() const { return s1 || s2 || s3; }
    bool subset_of(const StepMask& other) const {
        return (!s1 || other.s1) && (!s2 || other.s2) && (!s3 || other.s3);
    }
    std::string bits() const {
        return std::string{s1 ? '1' : '0', s2 ? '1' : '0', s3 ? '1' : '0'};
    }
    bool operator==(const StepMask&) const = default;
};

// The eight step-scope combinations, in ablation row order
// (off,off,off) ... (on,on,on).
std::vector<StepMask> enumerate_ablation_masks();

enum class StrategyKind { Direct, CoT, FewShot, SoT, TranslateType1, TranslateType2 };

std::string_view to_string(StrategyKind k);

struct StrategySpec {
    StrategyKind kind = StrategyKind::Direct;
    StepMask mask;               // SoT only
    bool compose_cot = false;    // SoT only
    bool compose_fewshot = false;  // SoT only
    size_t k_shots = 0;
    uint64_t seed = 0;

    static StrategySpec direct();
    static StrategySpec cot();
    static StrategySpec fewshot(size_t k, uint64_t seed);
    static StrategySpec sot(StepMask mask);
    static StrategySpec sot_full();
    static StrategySpec sot_plus_cot();
    static StrategySpec sot_plus_fewshot(size_t k, uint64_t seed);
    static StrategySpec translate_type1();
    static StrategySpec translate_type2();

    // Throws std::invalid_argument when the field combination is invalid.
    void validate() const;

    // Canonical label, e.g. "sot[101]" or "sot[111]+fewshot[k=3]". Used for
    // report rows and record grouping.
    std::string label() const;

    bool uses_fewshot() const {
        return kind == StrategyKind::FewShot || (kind == StrategyKind::SoT && compose_fewshot);
    }
    bool is_sot_like() const {
        return kind == StrategyKind::SoT || kind == StrategyKind::TranslateType1 ||
               kind == StrategyKind::TranslateType2;
    }

    bool operator==(const StrategySpec&) const = default;
};

struct PromptBundle {
    std::string user_text;
    std::string strategy_fingerprint;  // sha256 over (template, spec, item, text)
    std::string template_version;
};

// Fixed prompt scaffold. Versioned so snapshots, cache keys and run metadata
// stay stable; a COPA-incapable variant exists to exercise the error path.
class PromptTemplate {
public:
    static const PromptTemplate& current();
    static PromptTemplate math_only(std::string version);

    const std::string& version() const { return version_; }
    bool supports(TaskKind kind) const;

    // The instruction sentence for step 1-4 in the given task's wording.
    std::string_view step_sentence(int step, TaskKind kind) const;

private:
    std::string version_;
    bool supports_copa_ = true;
};

PromptBundle build_direct_prompt(const BenchmarkItem& item,
                                 const PromptTemplate& tmpl = PromptTemplate::current());

PromptBundle build_cot_prompt(const BenchmarkItem& item,
                              const PromptTemplate& tmpl = PromptTemplate::current());

PromptBundle build_fewshot_prompt(const BenchmarkItem& item, const ExemplarSet& exemplars,
                                  const PromptTemplate& tmpl = PromptTemplate::current());

// Assembles the step scaffold for `mask`; the all-false mask yields the
// Direct prompt bytes. Exemplars (if given) compose few-shot; compose_cot
// appends the chain-of-thought sentence after step 4.
PromptBundle build_sot_prompt(const BenchmarkItem& item, StepMask mask,
                              const ExemplarSet* exemplars = nullptr, bool compose_cot = false,
                              const PromptTemplate& tmpl = PromptTemplate::current());

enum class TranslationType { Type1, Type2 };

// Full-mask SoT prompt with step 1 swapped for a translation instruction
// (Type1) or an externally supplied translation (Type2).
PromptBundle build_translation_variant(const BenchmarkItem& item, TranslationType type,
                                       const std::optional<std::string>& external_translation =
                                           std::nullopt,
                                       const PromptTemplate& tmpl = PromptTemplate::current());

// Dispatch on a StrategySpec; exemplars/translation must be supplied when the
// spec calls for them.
PromptBundle build_prompt(const BenchmarkItem& item, const StrategySpec& spec,
                          const ExemplarSet* exemplars = nullptr,
                          const std::optional<std::string>& translation = std::nullopt,
                          const PromptTemplate& tmpl = PromptTemplate::current());

// Pre-computed translations for Type-2 runs, keyed by (item id, language).
// File format: JSONL {"id":..., "lang":..., "translation":...}.
class TranslationTable {
public:
    static TranslationTable load_jsonl(const std::filesystem::path& path);

    std::optional<std::string> translation_for(const std::string& id, Language lang) const;
    bool empty() const { return map_.empty(); }

private:
    std::map<std::pair<std::string, std::string>, std::string> map_;
};

}  // namespace sot
