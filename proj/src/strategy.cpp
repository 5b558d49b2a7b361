#include "sot/strategy.hpp"

#include <stdexcept>

#include <json.hpp>

#include "sot/util.hpp"

namespace sot {

namespace {

// Step instruction sentences, math wording.
constexpr std::string_view kStep1Math = "Think the question in English if it is not in English";
constexpr std::string_view kStep2Math =
    "Extract relationships between numbers from the question using Named Entity Recognition "
    "(NER) in the order they appear.";
constexpr std::string_view kStep3Math =
    "Leverage language-specific knowledge to identify the relationships between numbers, "
    "their units, and quantities.";
constexpr std::string_view kStep4Math =
    "Based on the relationships, calculate the final answer in the Source Language.";

// COPA wording for steps 2-4; step 1 is shared.
constexpr std::string_view kStep2Copa =
    "Extract relationships from the premise and the choices in the order they appear.";
constexpr std::string_view kStep3Copa =
    "Leverage language-specific knowledge to identify the relationships between the premise "
    "and the choices.";
constexpr std::string_view kStep4Copa =
    "Based on the relationships, determine the final answer in the Source Language.";

constexpr std::string_view kCotSentence = "Let's think step by step in English.";
constexpr std::string_view kTranslateType1 =
    "Translate the question into English if it is not in English for the following step.";
constexpr std::string_view kTranslateType2Suffix =
    " is the translation of question for the following step.";

constexpr std::string_view kDirectMath = "Solve the following problem.";
constexpr std::string_view kDirectCopa =
    "Select the more plausible choice for the following problem.";
constexpr std::string_view kFooterMath =
    "End your response with one line of the form \"Final Answer: <value>\".";
constexpr std::string_view kFooterCopa =
    "End your response with one line of the form \"Final Answer: 0\" or \"Final Answer: 1\".";
constexpr std::string_view kStepsHeader = "Follow these steps:";
constexpr std::string_view kExamplesHeader = "Examples:";

constexpr std::string_view kTemplateVersion = "sot-v1";

std::string question_block(const BenchmarkItem& item) {
    std::string out = "Question (" + std::string(to_string(item.lang)) + "):\n";
    if (item.task == TaskKind::MathNumeric) {
        out += item.question;
    } else {
        out += "Premise: " + item.copa.premise + "\n";
        out += "Choice 0: " + item.copa.choice0 + "\n";
        out += "Choice 1: " + item.copa.choice1 + "\n";
        out += "Relation: ";
        out += item.copa.relation == CopaRelation::Cause ? "cause" : "effect";
    }
    return out;
}

std::string_view footer_for(TaskKind kind) {
    return kind == TaskKind::MathNumeric ? kFooterMath : kFooterCopa;
}

std::string join_blocks(const std::vector<std::string>& blocks) {
    std::string out;
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (i) out += "\n\n";
        out += blocks[i];
    }
    return out;
}

std::string exemplar_block(const Exemplar& ex) {
    std::string q;
    if (ex.item.task == TaskKind::MathNumeric) {
        q = ex.item.question;
    } else {
        q = "Premise: " + ex.item.copa.premise + "\nChoice 0: " + ex.item.copa.choice0 +
            "\nChoice 1: " + ex.item.copa.choice1 + "\nRelation: " +
            (ex.item.copa.relation == CopaRelation::Cause ? "cause" : "effect");
    }
    return "Q: " + q + "\nA: " + ex.solution;
}

void append_exemplars(std::vector<std::string>& blocks, const BenchmarkItem& item,
                      const ExemplarSet& exemplars) {
    if (exemplars.items.empty()) {
        throw std::invalid_argument("few-shot prompt requires a non-empty exemplar set");
    }
    for (const auto& ex : exemplars.items) {
        if (ex.item.id == item.id) {
            throw std::invalid_argument("exemplar shares id '" + ex.item.id +
                                        "' with the item under evaluation");
        }
    }
    blocks.emplace_back(kExamplesHeader);
    for (const auto& ex : exemplars.items) blocks.push_back(exemplar_block(ex));
}

void check_task_supported(const BenchmarkItem& item, const PromptTemplate& tmpl) {
    if (!tmpl.supports(item.task)) {
        throw std::invalid_argument("template " + tmpl.version() +
                                    " does not support this task kind");
    }
}

PromptBundle finish(const BenchmarkItem& item, const std::string& label, std::string user_text,
                    const PromptTemplate& tmpl) {
    std::string key;
    key += tmpl.version();
    key += '\x1f';
    key += label;
    key += '\x1f';
    key += to_string(item.dataset);
    key += '\x1f';
    key += item.id;
    key += '\x1f';
    key += to_string(item.lang);
    key += '\x1f';
    key += user_text;

    PromptBundle bundle;
    bundle.user_text = std::move(user_text);
    bundle.strategy_fingerprint = sha256_hex(key);
    bundle.template_version = tmpl.version();
    return bundle;
}

std::string direct_text(const BenchmarkItem& item) {
    std::vector<std::string> blocks;
    blocks.emplace_back(item.task == TaskKind::MathNumeric ? kDirectMath : kDirectCopa);
    blocks.push_back(question_block(item));
    blocks.emplace_back(footer_for(item.task));
    return join_blocks(blocks);
}

// Shared scaffold for SoT and the translation variants.
std::string sot_text(const BenchmarkItem& item, StepMask mask,
                     const std::optional<std::string>& step1_override,
                     const ExemplarSet* exemplars, bool compose_cot, const PromptTemplate& tmpl) {
    std::string steps;
    steps += kStepsHeader;
    if (mask.s1) {
        steps += "\n1. ";
        steps += step1_override ? *step1_override : std::string(tmpl.step_sentence(1, item.task));
    }
    if (mask.s2) {
        steps += "\n2. ";
        steps += tmpl.step_sentence(2, item.task);
    }
    if (mask.s3) {
        steps += "\n3. ";
        steps += tmpl.step_sentence(3, item.task);
    }
    steps += "\n4. ";
    steps += tmpl.step_sentence(4, item.task);
    if (compose_cot) {
        steps += '\n';
        steps += kCotSentence;
    }

    std::vector<std::string> blocks;
    blocks.push_back(std::move(steps));
    if (exemplars) append_exemplars(blocks, item, *exemplars);
    blocks.push_back(question_block(item));
    blocks.emplace_back(footer_for(item.task));
    return join_blocks(blocks);
}

}  // namespace

std::vector<StepMask> enumerate_ablation_masks() {
    return {
        {false, false, false},
        {true, false, false},
        {false, true, false},
        {false, false, true},
        {true, true, false},
        {true, false, true},
        {false, true, true},
        {true, true, true},
    };
}

std::string_view to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::Direct: return "direct";
        case StrategyKind::CoT: return "cot";
        case StrategyKind::FewShot: return "fewshot";
        case StrategyKind::SoT: return "sot";
        case StrategyKind::TranslateType1: return "translate1";
        case StrategyKind::TranslateType2: return "translate2";
    }
    return "?";
}

StrategySpec StrategySpec::direct() { return {}; }

StrategySpec StrategySpec::cot() {
    StrategySpec s;
    s.kind = StrategyKind::CoT;
    return s;
}

StrategySpec StrategySpec::fewshot(size_t k, uint64_t seed) {
    StrategySpec s;
    s.kind = StrategyKind::FewShot;
    s.k_shots = k;
    s.seed = seed;
    return s;
}

StrategySpec StrategySpec::sot(StepMask mask) {
    StrategySpec s;
    s.kind = StrategyKind::SoT;
    s.mask = mask;
    return s;
}

StrategySpec StrategySpec::sot_full() { return sot({true, true, true}); }

StrategySpec StrategySpec::sot_plus_cot() {
    StrategySpec s = sot_full();
    s.compose_cot = true;
    return s;
}

StrategySpec StrategySpec::sot_plus_fewshot(size_t k, uint64_t seed) {
    StrategySpec s = sot_full();
    s.compose_fewshot = true;
    s.k_shots = k;
    s.seed = seed;
    return s;
}

StrategySpec StrategySpec::translate_type1() {
    StrategySpec s;
    s.kind = StrategyKind::TranslateType1;
    s.mask = {true, true, true};
    return s;
}

StrategySpec StrategySpec::translate_type2() {
    StrategySpec s;
    s.kind = StrategyKind::TranslateType2;
    s.mask = {true, true, true};
    return s;
}

void StrategySpec::validate() const {
    if ((compose_cot || compose_fewshot) && kind != StrategyKind::SoT) {
        throw std::invalid_argument("compose_cot/compose_fewshot are only valid with the SoT kind");
    }
    if (kind == StrategyKind::SoT && (compose_cot || compose_fewshot) && !mask.any()) {
        throw std::invalid_argument("composition requires at least one enabled SoT step");
    }
    bool wants_shots = uses_fewshot();
    if (wants_shots && k_shots == 0) {
        throw std::invalid_argument("few-shot strategy requires k_shots > 0");
    }
    if (!wants_shots && k_shots != 0) {
        throw std::invalid_argument("k_shots must be 0 unless few-shot is involved");
    }
}

std::string StrategySpec::label() const {
    std::string out{to_string(kind)};
    if (kind == StrategyKind::SoT) {
        out += "[" + mask.bits() + "]";
        if (compose_cot) out += "+cot";
        if (compose_fewshot) out += "+fewshot[k=" + std::to_string(k_shots) + "]";
    } else if (kind == StrategyKind::FewShot) {
        out += "[k=" + std::to_string(k_shots) + "]";
    }
    return out;
}

const PromptTemplate& PromptTemplate::current() {
    static const PromptTemplate tmpl = [] {
        PromptTemplate t;
        t.version_ = kTemplateVersion;
        t.supports_copa_ = true;
        return t;
    }();
    return tmpl;
}

PromptTemplate PromptTemplate::math_only(std::string version) {
    PromptTemplate t;
    t.version_ = std::move(version);
    t.supports_copa_ = false;
    return t;
}

bool PromptTemplate::supports(TaskKind kind) const {
    return kind == TaskKind::MathNumeric || supports_copa_;
}

std::string_view PromptTemplate::step_sentence(int step, TaskKind kind) const {
    if (kind == TaskKind::MathNumeric) {
        switch (step) {
            case 1: return kStep1Math;
            case 2: return kStep2Math;
            case 3: return kStep3Math;
            case 4: return kStep4Math;
        }
    } else {
        switch (step) {
            case 1: return kStep1Math;  // shared wording
            case 2: return kStep2Copa;
            case 3: return kStep3Copa;
            case 4: return kStep4Copa;
        }
    }
    throw std::invalid_argument("step must be 1-4");
}

PromptBundle build_direct_prompt(const BenchmarkItem& item, const PromptTemplate& tmpl) {
    check_task_supported(item, tmpl);
    return finish(item, StrategySpec::direct().label(), direct_text(item), tmpl);
}

PromptBundle build_cot_prompt(const BenchmarkItem& item, const PromptTemplate& tmpl) {
    check_task_supported(item, tmpl);
    std::vector<std::string> blocks;
    blocks.emplace_back(item.task == TaskKind::MathNumeric ? kDirectMath : kDirectCopa);
    blocks.push_back(question_block(item));
    blocks.emplace_back(kCotSentence);
    blocks.emplace_back(footer_for(item.task));
    return finish(item, StrategySpec::cot().label(), join_blocks(blocks), tmpl);
}

PromptBundle build_fewshot_prompt(const BenchmarkItem& item, const ExemplarSet& exemplars,
                                  const PromptTemplate& tmpl) {
    check_task_supported(item, tmpl);
    std::vector<std::string> blocks;
    blocks.emplace_back(item.task == TaskKind::MathNumeric ? kDirectMath : kDirectCopa);
    append_exemplars(blocks, item, exemplars);
    blocks.push_back(question_block(item));
    blocks.emplace_back(footer_for(item.task));
    auto spec = StrategySpec::fewshot(exemplars.k(), 0);
    return finish(item, spec.label(), join_blocks(blocks), tmpl);
}

PromptBundle build_sot_prompt(const BenchmarkItem& item, StepMask mask,
                              const ExemplarSet* exemplars, bool compose_cot,
                              const PromptTemplate& tmpl) {
    check_task_supported(item, tmpl);
    StrategySpec spec = StrategySpec::sot(mask);
    spec.compose_cot = compose_cot;
    if (exemplars) {
        spec.compose_fewshot = true;
        spec.k_shots = exemplars->k();
    }
    spec.validate();

    std::string text = (!mask.any() && !compose_cot && !exemplars)
                           ? direct_text(item)
                           : sot_text(item, mask, std::nullopt, exemplars, compose_cot, tmpl);
    return finish(item, spec.label(), std::move(text), tmpl);
}

PromptBundle build_translation_variant(const BenchmarkItem& item, TranslationType type,
                                       const std::optional<std::string>& external_translation,
                                       const PromptTemplate& tmpl) {
    check_task_supported(item, tmpl);
    StepMask full{true, true, true};
    std::string step1;
    StrategySpec spec;
    if (type == TranslationType::Type1) {
        step1 = std::string(kTranslateType1);
        spec = StrategySpec::translate_type1();
    } else {
        if (!external_translation || external_translation->empty()) {
            throw std::invalid_argument(
                "Type 2 translation variant requires a non-empty external translation");
        }
        step1 = "\"" + *external_translation + "\"" + std::string(kTranslateType2Suffix);
        spec = StrategySpec::translate_type2();
    }
    std::string text = sot_text(item, full, step1, nullptr, false, tmpl);
    return finish(item, spec.label(), std::move(text), tmpl);
}

PromptBundle build_prompt(const BenchmarkItem& item, const StrategySpec& spec,
                          const ExemplarSet* exemplars, const std::optional<std::string>& translation,
                          const PromptTemplate& tmpl) {
    spec.validate();
    switch (spec.kind) {
        case StrategyKind::Direct:
            return build_direct_prompt(item, tmpl);
        case StrategyKind::CoT:
            return build_cot_prompt(item, tmpl);
        case StrategyKind::FewShot:
            if (!exemplars) throw std::invalid_argument("few-shot strategy requires exemplars");
            return build_fewshot_prompt(item, *exemplars, tmpl);
        case StrategyKind::SoT:
            if (spec.compose_fewshot && !exemplars) {
                throw std::invalid_argument("SoT few-shot composition requires exemplars");
            }
            return build_sot_prompt(item, spec.mask, spec.compose_fewshot ? exemplars : nullptr,
                                    spec.compose_cot, tmpl);
        case StrategyKind::TranslateType1:
            return build_translation_variant(item, TranslationType::Type1, std::nullopt, tmpl);
        case StrategyKind::TranslateType2:
            return build_translation_variant(item, TranslationType::Type2, translation, tmpl);
    }
    throw std::invalid_argument("unknown strategy kind");
}

TranslationTable TranslationTable::load_jsonl(const std::filesystem::path& path) {
    using nlohmann::json;
    TranslationTable table;
    int line_no = 0;
    for (const auto& line : split_lines(read_file(path))) {
        ++line_no;
        if (trim(line).empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": bad JSON: " + e.what());
        }
        for (const char* key : {"id", "lang", "translation"}) {
            if (!row.contains(key) || !row.at(key).is_string()) {
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": missing string field \"" + key + "\"");
            }
        }
        if (!language_from_code(row.at("lang").get<std::string>())) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": unknown language tag");
        }
        table.map_[{row.at("id").get<std::string>(), row.at("lang").get<std::string>()}] =
            row.at("translation").get<std::string>();
    }
    return table;
}

std::optional<std::string> TranslationTable::translation_for(const std::string& id,
                                                             Language lang) const {
    auto it = map_.find({id, std::string(to_string(lang))});
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

}  // namespace sot
