#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sot/decimal.hpp"
#include "sot/types.hpp"

namespace sot {

// Final-answer marker strings per language, plus a universal row ("*")
// that applies everywhere. Bundled copy mirrors data/markers.tsv.
class MarkerTable {
public:
    static const MarkerTable& bundled();
    static MarkerTable load_tsv(const std::filesystem::path& path);
    static MarkerTable parse_tsv(std::string_view content);

    // Universal markers followed by the language's own.
    std::vector<std::string> markers_for(Language lang) const;
    std::vector<std::string> all_markers() const;

private:
    std::vector<std::string> universal_;
    std::map<Language, std::vector<std::string>> per_lang_;
};

// The TSV content behind MarkerTable::bundled(), byte-identical to the
// shipped data/markers.tsv.
std::string_view bundled_markers_tsv();

enum class ExtractionMethod { FinalMarker, LastNumber, ChoiceToken, ChoiceTextMatch };

std::string_view to_string(ExtractionMethod m);

struct ExtractedAnswer {
    TaskKind kind = TaskKind::MathNumeric;
    ExactDecimal numeric;  // MathNumeric
    int choice = 0;        // CopaChoice
    size_t span_begin = 0;  // byte range in the source text
    size_t span_end = 0;
    ExtractionMethod method = ExtractionMethod::LastNumber;
};

// Marker-first, last-number-fallback extraction. Handles script digits,
// thousands separators, decimal commas (de/es/fr/ru), fractions "a/b" and
// percents. A percent is divided by 100 only when the caller says the gold
// is fractional. Returns nullopt when no number is found; never throws on
// arbitrary UTF-8.
std::optional<ExtractedAnswer> extract_numeric_answer(
    std::string_view text, Language lang,
    std::optional<bool> gold_is_fractional = std::nullopt,
    const MarkerTable& markers = MarkerTable::bundled());

// Choice extraction: standalone 0/1 after a final marker, then a
// "choice N" token, then unique containment of a choice's text.
std::optional<ExtractedAnswer> extract_choice(
    std::string_view text, std::string_view choice0, std::string_view choice1,
    const MarkerTable& markers = MarkerTable::bundled());

struct SoTTrace {
    std::optional<std::string> thinking;            // step 1 body
    std::vector<std::string> knowledge_entries;     // step 2 items
    std::vector<std::string> lang_specific_entries; // step 3 items
    std::optional<std::string> final;               // after a Final Answer marker
    size_t n_thinking_steps = 0;  // non-empty lines of the thinking section (heuristic)
    std::string raw;

    size_t m() const { return knowledge_entries.size(); }
};

// Tolerant split on numbered top-level headers "1."-"4." (markdown/bold
// variants included) plus a "Final Answer" marker line. Unmatched text
// yields an empty trace with raw preserved.
SoTTrace parse_sot_trace(std::string_view text);

struct KnowledgeCounts {
    double avg_step2 = 0.0;
    double avg_step3 = 0.0;
};

// Means of per-trace entry counts. Throws std::invalid_argument on empty input.
KnowledgeCounts count_knowledge(std::span<const SoTTrace> traces);

// Exact-decimal equality; relative tolerance 1e-6 only when either side
// is non-integral.
bool numeric_equal(const ExactDecimal& extracted, const ExactDecimal& gold);

// Display rounding, half away from zero.
double round_half_up(double v, int digits);
std::string format_fixed(double v, int digits);

}  // namespace sot
