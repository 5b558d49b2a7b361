#include "sot/types.hpp"

#include <array>

namespace sot {

namespace {

struct LangEntry {
    Language lang;
    std::string_view code;
};

constexpr std::array<LangEntry, 19> kLanguages{{
    {Language::en, "en"}, {Language::sw, "sw"}, {Language::ja, "ja"},
    {Language::bn, "bn"}, {Language::th, "th"}, {Language::te, "te"},
    {Language::ru, "ru"}, {Language::zh, "zh"}, {Language::de, "de"},
    {Language::es, "es"}, {Language::fr, "fr"}, {Language::et, "et"},
    {Language::ht, "ht"}, {Language::id, "id"}, {Language::it, "it"},
    {Language::qu, "qu"}, {Language::ta, "ta"}, {Language::tr, "tr"},
    {Language::vi, "vi"},
}};

}  // namespace

std::string_view to_string(Language lang) {
    for (const auto& e : kLanguages) {
        if (e.lang == lang) return e.code;
    }
    return "??";
}

std::optional<Language> language_from_code(std::string_view code) {
    for (const auto& e : kLanguages) {
        if (e.code == code) return e.lang;
    }
    return std::nullopt;
}

const std::vector<Language>& all_languages() {
    static const std::vector<Language> langs = [] {
        std::vector<Language> v;
        for (const auto& e : kLanguages) v.push_back(e.lang);
        return v;
    }();
    return langs;
}

bool uses_decimal_comma(Language lang) {
    return lang == Language::de || lang == Language::es || lang == Language::fr ||
           lang == Language::ru;
}

std::string_view to_string(Dataset d) {
    switch (d) {
        case Dataset::MGSM: return "mgsm";
        case Dataset::MSVAMP: return "msvamp";
        case Dataset::XCOPA: return "xcopa";
    }
    return "?";
}

std::optional<Dataset> dataset_from_name(std::string_view name) {
    if (name == "mgsm" || name == "MGSM") return Dataset::MGSM;
    if (name == "msvamp" || name == "MSVAMP") return Dataset::MSVAMP;
    if (name == "xcopa" || name == "XCOPA") return Dataset::XCOPA;
    return std::nullopt;
}

const std::vector<Language>& dataset_language_order(Dataset d) {
    using L = Language;
    static const std::vector<L> mgsm{L::en, L::sw, L::ja, L::bn, L::th, L::te,
                                     L::ru, L::zh, L::de, L::es, L::fr};
    static const std::vector<L> msvamp{L::en, L::sw, L::ja, L::bn, L::th,
                                       L::ru, L::zh, L::de, L::es, L::fr};
    static const std::vector<L> xcopa{L::et, L::ht, L::id, L::it, L::qu, L::sw,
                                      L::ta, L::th, L::tr, L::vi, L::zh};
    switch (d) {
        case Dataset::MGSM: return mgsm;
        case Dataset::MSVAMP: return msvamp;
        case Dataset::XCOPA: return xcopa;
    }
    return mgsm;
}

TaskKind task_kind_of(Dataset d) {
    return d == Dataset::XCOPA ? TaskKind::CopaChoice : TaskKind::MathNumeric;
}

}  // namespace sot
