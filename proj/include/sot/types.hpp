#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sot/decimal.hpp"

namespace sot {

enum class Language {
    en, sw, ja, bn, th, te, ru, zh, de, es, fr,
    et, ht, id, it, qu, ta, tr, vi,
};

std::string_view to_string(Language lang);
std::optional<Language> language_from_code(std::string_view code);
const std::vector<Language>& all_languages();

// Languages that conventionally write decimals with a comma.
bool uses_decimal_comma(Language lang);

enum class Dataset { MGSM, MSVAMP, XCOPA };

std::string_view to_string(Dataset d);
std::optional<Dataset> dataset_from_name(std::string_view name);

// Report column order for each dataset.
const std::vector<Language>& dataset_language_order(Dataset d);

enum class TaskKind { MathNumeric, CopaChoice };

TaskKind task_kind_of(Dataset d);

enum class CopaRelation { Cause, Effect };

struct CopaQuestion {
    std::string premise;
    std::string choice0;
    std::string choice1;
    CopaRelation relation = CopaRelation::Cause;
};

struct BenchmarkItem {
    Dataset dataset = Dataset::MGSM;
    std::string id;
    Language lang = Language::en;
    TaskKind task = TaskKind::MathNumeric;

    // MathNumeric
    std::string question;
    std::string gold_number;  // canonical exact-decimal string

    // CopaChoice
    CopaQuestion copa;
    int gold_choice = 0;
};

}  // namespace sot
