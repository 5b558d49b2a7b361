#include "sot/parse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sot/util.hpp"

namespace sot {

namespace {

// ---------------------------------------------------------------------------
// Marker table
// ---------------------------------------------------------------------------

constexpr std::string_view kBundledMarkersTsv =
    "# Final-answer markers, one row per language: lang<TAB>marker[<TAB>marker...]\n"
    "# The '*' row applies to every language. ASCII matches are case-insensitive.\n"
    "*\tfinal answer\tthe answer is\tanswer is\tanswer:\n"
    "en\tThe final answer\n"
    "zh\t答案\t最终答案\n"
    "ja\t答え\t最終的な答え\n"
    "bn\tউত্তর\n"
    "th\tคำตอบ\n"
    "te\tసమాధానం\n"
    "ru\tОтвет\tответ\n"
    "de\tAntwort\tantwort\n"
    "es\tRespuesta\trespuesta\n"
    "fr\tRéponse\tréponse\n"
    "sw\tJibu\tjibu\n"
    "et\tVastus\tvastus\n"
    "ht\tRepons\trepons\n"
    "id\tJawaban\tjawaban\n"
    "it\tRisposta\trisposta\n"
    "qu\tKutichiy\tkutichiy\n"
    "ta\tவிடை\tபதில்\n"
    "tr\tCevap\tcevap\tYanıt\tyanıt\n"
    "vi\tĐáp án\tđáp án\tCâu trả lời\tcâu trả lời\n";

// ---------------------------------------------------------------------------
// Number scanning
// ---------------------------------------------------------------------------

std::optional<int> digit_value(char32_t cp) {
    static constexpr char32_t kZeros[] = {
        0x0030,  // ASCII
        0x0660,  // Arabic-Indic
        0x06F0,  // Extended Arabic-Indic
        0x0966,  // Devanagari
        0x09E6,  // Bengali
        0x0A66,  // Gurmukhi
        0x0AE6,  // Gujarati
        0x0B66,  // Oriya
        0x0BE6,  // Tamil
        0x0C66,  // Telugu
        0x0CE6,  // Kannada
        0x0D66,  // Malayalam
        0x0E50,  // Thai
        0x0ED0,  // Lao
        0x0F20,  // Tibetan
        0x1040,  // Myanmar
        0x17E0,  // Khmer
        0xFF10,  // Fullwidth
    };
    for (char32_t z : kZeros) {
        if (cp >= z && cp <= z + 9) return static_cast<int>(cp - z);
    }
    return std::nullopt;
}

// Folds fullwidth and typographic variants onto ASCII; 0 = not punctuation
// we care about.
char normalize_punct(char32_t cp) {
    switch (cp) {
        case U'.': case 0xFF0E: return '.';
        case U',': case 0xFF0C: return ',';
        case U'%': case 0xFF05: return '%';
        case U'/': case 0xFF0F: case 0x2044: return '/';
        case U'-': case 0xFF0D: case 0x2212: return '-';
        case U'+': case 0xFF0B: return '+';
        case U' ': case 0x00A0: case 0x2009: case 0x202F: return ' ';
        default: return 0;
    }
}

struct Cp {
    char32_t cp;
    size_t begin;
    size_t end;
};

std::vector<Cp> decode(std::string_view text) {
    std::vector<Cp> cps;
    cps.reserve(text.size());
    size_t pos = 0;
    while (pos < text.size()) {
        size_t b = pos;
        char32_t c = utf8_next(text, pos);
        cps.push_back({c, b, pos});
    }
    return cps;
}

struct NumToken {
    ExactDecimal value;
    size_t begin = 0;
    size_t end = 0;
    bool percent = false;
};

struct DigitGroup {
    std::string digits;
    size_t start_cp = 0;
};

ExactDecimal make_decimal(bool negative, std::string ip, std::string fp) {
    return ExactDecimal::from_parts(negative, std::move(ip), std::move(fp));
}

struct Interp {
    ExactDecimal value;
    size_t raw_groups_consumed;
};

// Decides decimal vs thousands separators for one scanned token. May consume
// only a prefix of the groups; the scanner resumes at the first unconsumed
// group.
Interp interpret_groups(const std::vector<DigitGroup>& groups, const std::vector<char>& seps,
                        bool negative, bool comma_decimal) {
    // Fold space-joined groups first: spaces are always thousands separators
    // (validated as 3-digit groups during scanning).
    std::vector<std::string> folded;
    std::vector<char> fseps;          // '.' or ',' between folded groups
    std::vector<size_t> last_raw;     // raw index of the last raw group in each folded group
    folded.push_back(groups[0].digits);
    last_raw.push_back(0);
    for (size_t k = 0; k < seps.size(); ++k) {
        if (seps[k] == ' ') {
            folded.back() += groups[k + 1].digits;
            last_raw.back() = k + 1;
        } else {
            fseps.push_back(seps[k]);
            folded.push_back(groups[k + 1].digits);
            last_raw.push_back(k + 1);
        }
    }

    const size_t nf = folded.size();
    auto consumed_through = [&](size_t folded_idx) { return last_raw[folded_idx] + 1; };
    if (nf == 1) {
        return {make_decimal(negative, folded[0], ""), consumed_through(0)};
    }

    size_t dots = static_cast<size_t>(std::count(fseps.begin(), fseps.end(), '.'));
    size_t commas = fseps.size() - dots;
    bool all3_after_first = std::all_of(folded.begin() + 1, folded.end(),
                                        [](const std::string& g) { return g.size() == 3; });
    bool g0_groupable = folded[0].size() >= 1 && folded[0].size() <= 3;

    auto concat_all = [&] {
        std::string s;
        for (const auto& g : folded) s += g;
        return s;
    };
    auto concat_int_before_last = [&] {
        std::string s;
        for (size_t k = 0; k + 1 < nf; ++k) s += folded[k];
        return s;
    };

    if (dots > 0 && commas > 0) {
        // Both present: the last separator is the decimal point.
        return {make_decimal(negative, concat_int_before_last(), folded.back()),
                consumed_through(nf - 1)};
    }
    if (commas > 0) {
        if (comma_decimal && commas == 1) {
            return {make_decimal(negative, folded[0], folded[1]), consumed_through(1)};
        }
        if (all3_after_first && g0_groupable) {
            return {make_decimal(negative, concat_all(), ""), consumed_through(nf - 1)};
        }
        return {make_decimal(negative, folded[0], ""), consumed_through(0)};
    }
    // Dots only.
    if (!comma_decimal) {
        if (dots == 1) {
            return {make_decimal(negative, folded[0], folded[1]), consumed_through(1)};
        }
        if (all3_after_first && g0_groupable) {
            return {make_decimal(negative, concat_all(), ""), consumed_through(nf - 1)};
        }
        return {make_decimal(negative, folded[0], folded[1]), consumed_through(1)};
    }
    if (dots == 1) {
        if (folded[1].size() == 3 && g0_groupable) {
            return {make_decimal(negative, folded[0] + folded[1], ""), consumed_through(1)};
        }
        return {make_decimal(negative, folded[0], folded[1]), consumed_through(1)};
    }
    if (all3_after_first && g0_groupable) {
        return {make_decimal(negative, concat_all(), ""), consumed_through(nf - 1)};
    }
    return {make_decimal(negative, folded[0], folded[1]), consumed_through(1)};
}

std::vector<NumToken> scan_numbers(std::string_view text, Language lang) {
    const std::vector<Cp> cps = decode(text);
    const size_t n = cps.size();
    const bool comma_decimal = uses_decimal_comma(lang);
    std::vector<NumToken> out;

    auto is_digit = [&](size_t k) { return k < n && digit_value(cps[k].cp).has_value(); };

    size_t i = 0;
    while (i < n) {
        if (!is_digit(i)) {
            ++i;
            continue;
        }

        std::vector<DigitGroup> groups;
        std::vector<char> seps;
        size_t j = i;
        auto read_run = [&] {
            DigitGroup g;
            g.start_cp = j;
            while (is_digit(j)) {
                g.digits.push_back(static_cast<char>('0' + *digit_value(cps[j].cp)));
                ++j;
            }
            groups.push_back(std::move(g));
        };
        read_run();
        while (j < n) {
            char p = normalize_punct(cps[j].cp);
            if ((p == '.' || p == ',') && is_digit(j + 1)) {
                seps.push_back(p);
                ++j;
                read_run();
            } else if (p == ' ') {
                size_t k = j + 1;
                int run = 0;
                while (is_digit(k) && run <= 3) {
                    ++k;
                    ++run;
                }
                if (run != 3) break;
                seps.push_back(' ');
                ++j;
                read_run();
            } else {
                break;
            }
        }

        // Sign applies when the '-' is not glued to a word or number.
        bool negative = false;
        size_t start_cp = i;
        if (i > 0 && normalize_punct(cps[i - 1].cp) == '-') {
            bool blocked = false;
            if (i >= 2) {
                char32_t before = cps[i - 2].cp;
                bool ascii_alnum = before < 128 &&
                                   (std::isalnum(static_cast<unsigned char>(before)) != 0);
                blocked = ascii_alnum || digit_value(before).has_value();
            }
            if (!blocked) {
                negative = true;
                start_cp = i - 1;
            }
        }

        Interp in = interpret_groups(groups, seps, negative, comma_decimal);
        size_t last_group = in.raw_groups_consumed - 1;
        size_t end_cp = groups[last_group].start_cp + groups[last_group].digits.size();

        NumToken tok;
        tok.value = in.value;

        bool consumed_all = in.raw_groups_consumed == groups.size();
        if (consumed_all) {
            // Simple fraction: plain integer numerator and denominator.
            if (groups.size() == 1 && end_cp < n && normalize_punct(cps[end_cp].cp) == '/' &&
                is_digit(end_cp + 1)) {
                size_t k = end_cp + 1;
                std::string den;
                while (is_digit(k)) {
                    den.push_back(static_cast<char>('0' + *digit_value(cps[k].cp)));
                    ++k;
                }
                ExactDecimal d = make_decimal(false, den, "");
                if (!d.is_zero()) {
                    if (auto frac = ExactDecimal::from_fraction(in.value, d)) {
                        tok.value = *frac;
                        end_cp = k;
                    }
                }
            }
            if (end_cp < n && normalize_punct(cps[end_cp].cp) == '%') {
                tok.percent = true;
                ++end_cp;
            }
        }

        tok.begin = cps[start_cp].begin;
        tok.end = cps[end_cp - 1].end;
        out.push_back(std::move(tok));

        i = consumed_all ? end_cp : groups[in.raw_groups_consumed].start_cp;
    }
    return out;
}

// Byte offset just past the last marker occurrence, or nullopt.
std::optional<size_t> find_last_marker_end(std::string_view text,
                                           const std::vector<std::string>& markers) {
    std::optional<size_t> best_start;
    size_t best_end = 0;
    for (const auto& m : markers) {
        if (m.empty() || m.size() > text.size()) continue;
        for (size_t pos = 0; pos + m.size() <= text.size(); ++pos) {
            if (starts_with_ci(text.substr(pos), m)) {
                size_t end = pos + m.size();
                if (!best_start || pos > *best_start || (pos == *best_start && end > best_end)) {
                    best_start = pos;
                    best_end = end;
                }
            }
        }
    }
    if (!best_start) return std::nullopt;
    return best_end;
}

}  // namespace

// ---------------------------------------------------------------------------
// MarkerTable
// ---------------------------------------------------------------------------

const MarkerTable& MarkerTable::bundled() {
    static const MarkerTable table = parse_tsv(kBundledMarkersTsv);
    return table;
}

MarkerTable MarkerTable::load_tsv(const std::filesystem::path& path) {
    return parse_tsv(read_file(path));
}

MarkerTable MarkerTable::parse_tsv(std::string_view content) {
    MarkerTable table;
    int line_no = 0;
    for (const auto& line : split_lines(content)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, '\t');
        if (fields.size() < 2) {
            throw std::runtime_error("markers.tsv line " + std::to_string(line_no) +
                                     ": expected lang<TAB>marker");
        }
        std::vector<std::string> markers;
        for (size_t i = 1; i < fields.size(); ++i) {
            if (!fields[i].empty()) markers.push_back(fields[i]);
        }
        if (fields[0] == "*") {
            table.universal_ = std::move(markers);
            continue;
        }
        auto lang = language_from_code(fields[0]);
        if (!lang) {
            throw std::runtime_error("markers.tsv line " + std::to_string(line_no) +
                                     ": unknown language tag '" + fields[0] + "'");
        }
        table.per_lang_[*lang] = std::move(markers);
    }
    return table;
}

std::vector<std::string> MarkerTable::markers_for(Language lang) const {
    std::vector<std::string> out = universal_;
    auto it = per_lang_.find(lang);
    if (it != per_lang_.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
}

std::vector<std::string> MarkerTable::all_markers() const {
    std::vector<std::string> out = universal_;
    for (const auto& [lang, ms] : per_lang_) {
        out.insert(out.end(), ms.begin(), ms.end());
    }
    return out;
}

std::string_view bundled_markers_tsv() { return kBundledMarkersTsv; }

std::string_view to_string(ExtractionMethod m) {
    switch (m) {
        case ExtractionMethod::FinalMarker: return "final_marker";
        case ExtractionMethod::LastNumber: return "last_number";
        case ExtractionMethod::ChoiceToken: return "choice_token";
        case ExtractionMethod::ChoiceTextMatch: return "choice_text_match";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Answer extraction
// ---------------------------------------------------------------------------

std::optional<ExtractedAnswer> extract_numeric_answer(std::string_view text, Language lang,
                                                      std::optional<bool> gold_is_fractional,
                                                      const MarkerTable& markers) {
    auto tokens = scan_numbers(text, lang);
    if (tokens.empty()) return std::nullopt;

    const NumToken* chosen = nullptr;
    ExtractionMethod method = ExtractionMethod::LastNumber;
    if (auto marker_end = find_last_marker_end(text, markers.markers_for(lang))) {
        for (const auto& t : tokens) {
            if (t.begin >= *marker_end) {
                chosen = &t;
                method = ExtractionMethod::FinalMarker;
                break;
            }
        }
    }
    if (!chosen) chosen = &tokens.back();

    ExactDecimal value = chosen->value;
    if (chosen->percent && gold_is_fractional.value_or(false)) value = value.scaled_down(2);

    ExtractedAnswer out;
    out.kind = TaskKind::MathNumeric;
    out.numeric = value;
    out.span_begin = chosen->begin;
    out.span_end = chosen->end;
    out.method = method;
    return out;
}

namespace {

std::optional<size_t> find_last_ci(std::string_view text, std::string_view needle) {
    return rfind_ci(text, needle);
}

}  // namespace

std::optional<ExtractedAnswer> extract_choice(std::string_view text, std::string_view choice0,
                                              std::string_view choice1,
                                              const MarkerTable& markers) {
    static const ExactDecimal kZero = *ExactDecimal::parse("0");
    static const ExactDecimal kOne = *ExactDecimal::parse("1");

    auto result = [&](int choice, size_t b, size_t e, ExtractionMethod m) {
        ExtractedAnswer out;
        out.kind = TaskKind::CopaChoice;
        out.choice = choice;
        out.span_begin = b;
        out.span_end = e;
        out.method = m;
        return out;
    };

    // (1) standalone 0/1 after the last final-answer marker
    if (auto marker_end = find_last_marker_end(text, markers.all_markers())) {
        for (const auto& t : scan_numbers(text, Language::en)) {
            if (t.begin < *marker_end || t.percent || !t.value.is_integral()) continue;
            if (t.value == kZero) return result(0, t.begin, t.end, ExtractionMethod::FinalMarker);
            if (t.value == kOne) return result(1, t.begin, t.end, ExtractionMethod::FinalMarker);
        }
    }

    // (2) explicit "choice N" token, last mention wins
    auto find_token = [&](std::string_view spaced, std::string_view glued)
        -> std::optional<std::pair<size_t, size_t>> {
        if (auto pos = find_last_ci(text, spaced)) return std::pair{*pos, *pos + spaced.size()};
        if (auto pos = find_last_ci(text, glued)) return std::pair{*pos, *pos + glued.size()};
        return std::nullopt;
    };
    auto t0 = find_token("choice 0", "choice0");
    auto t1 = find_token("choice 1", "choice1");
    if (t0 || t1) {
        if (!t1 || (t0 && t0->first > t1->first)) {
            return result(0, t0->first, t0->second, ExtractionMethod::ChoiceToken);
        }
        return result(1, t1->first, t1->second, ExtractionMethod::ChoiceToken);
    }

    // (3) unique containment of a choice's text
    std::string ntext = normalize_whitespace(text);
    std::string n0 = normalize_whitespace(choice0);
    std::string n1 = normalize_whitespace(choice1);
    bool has0 = !n0.empty() && ntext.find(n0) != std::string::npos;
    bool has1 = !n1.empty() && ntext.find(n1) != std::string::npos;
    if (has0 == has1) return std::nullopt;  // ambiguous or absent
    int choice = has1 ? 1 : 0;
    std::string raw_needle = trim(choice ? choice1 : choice0);
    size_t b = 0;
    size_t e = text.size();
    if (size_t pos = text.find(raw_needle); pos != std::string_view::npos) {
        b = pos;
        e = pos + raw_needle.size();
    }
    return result(choice, b, e, ExtractionMethod::ChoiceTextMatch);
}

// ---------------------------------------------------------------------------
// Trace parsing
// ---------------------------------------------------------------------------

namespace {

// Strips leading markdown decoration: whitespace, '#' runs, '*'/'_' runs.
std::string_view strip_markdown_prefix(std::string_view line) {
    size_t p = 0;
    auto skip_ws = [&] {
        while (p < line.size() && (line[p] == ' ' || line[p] == '\t')) ++p;
    };
    skip_ws();
    while (p < line.size() && line[p] == '#') ++p;
    skip_ws();
    while (p < line.size() && (line[p] == '*' || line[p] == '_')) ++p;
    skip_ws();
    return line.substr(p);
}

std::string strip_entry_decoration(std::string_view line) {
    std::string t = trim(line);
    size_t p = 0;
    while (p < t.size() && (t[p] == '-' || t[p] == '*' || t[p] == '+')) ++p;
    // UTF-8 bullets
    for (std::string_view bullet : {std::string_view("•"), std::string_view("·"),
                                    std::string_view("–")}) {
        if (t.compare(p, bullet.size(), bullet) == 0) p += bullet.size();
    }
    while (p < t.size() && (t[p] == ' ' || t[p] == '\t')) ++p;
    t = t.substr(p);
    while (!t.empty() && t.back() == '*') t.pop_back();
    return trim(t);
}

bool is_no_knowledge_phrase(std::string_view entry) {
    std::string low = ascii_lower(entry);
    return low.find("no specific language-specific knowledge") != std::string::npos ||
           low.find("no language-specific knowledge") != std::string::npos;
}

}  // namespace

SoTTrace parse_sot_trace(std::string_view text) {
    SoTTrace trace;
    trace.raw = std::string(text);

    std::vector<std::string> sections[5];
    std::vector<std::string> final_lines;
    int current = 0;       // 0 = preamble
    int last_header = 0;
    bool in_final = false;

    for (const auto& raw_line : split_lines(text)) {
        std::string_view core = strip_markdown_prefix(raw_line);

        if (starts_with_ci(core, "final answer")) {
            in_final = true;
            size_t q = std::string_view("final answer").size();
            while (q < core.size()) {
                if (core[q] == ':' || core[q] == '*' || core[q] == ' ' || core[q] == '\t') {
                    ++q;
                } else if (core.compare(q, 3, "：") == 0) {  // fullwidth colon
                    q += 3;
                } else {
                    break;
                }
            }
            std::string rest = trim(core.substr(q));
            if (!rest.empty()) final_lines.push_back(std::move(rest));
            continue;
        }

        if (!core.empty() && core[0] >= '1' && core[0] <= '4') {
            bool punct = false;
            size_t after = 0;
            if (core.size() >= 2 && (core[1] == '.' || core[1] == ')')) {
                punct = true;
                after = 2;
            } else if (core.size() >= 4 &&
                       (core.compare(1, 3, "．") == 0 || core.compare(1, 3, "、") == 0)) {
                punct = true;
                after = 4;
            }
            // "1.5" is a number, not a header
            if (punct && after < core.size() && core[after] >= '0' && core[after] <= '9') {
                punct = false;
            }
            int step = core[0] - '0';
            if (punct && step > last_header) {
                last_header = step;
                current = step;
                in_final = false;
                continue;
            }
        }

        std::string entry = trim(raw_line);
        if (entry.empty()) continue;
        if (in_final) {
            final_lines.push_back(std::move(entry));
        } else if (current >= 1 && current <= 4) {
            std::string cleaned = strip_entry_decoration(entry);
            if (!cleaned.empty()) sections[current].push_back(std::move(cleaned));
        }
    }

    if (!sections[1].empty()) {
        std::string joined;
        for (size_t i = 0; i < sections[1].size(); ++i) {
            if (i) joined += '\n';
            joined += sections[1][i];
        }
        trace.thinking = std::move(joined);
        trace.n_thinking_steps = sections[1].size();
    }
    trace.knowledge_entries = std::move(sections[2]);
    for (auto& e : sections[3]) {
        if (!is_no_knowledge_phrase(e)) trace.lang_specific_entries.push_back(std::move(e));
    }
    if (!final_lines.empty()) {
        std::string joined;
        for (size_t i = 0; i < final_lines.size(); ++i) {
            if (i) joined += '\n';
            joined += final_lines[i];
        }
        trace.final = std::move(joined);
    }
    return trace;
}

KnowledgeCounts count_knowledge(std::span<const SoTTrace> traces) {
    if (traces.empty()) {
        throw std::invalid_argument("count_knowledge: mean of zero traces is undefined");
    }
    double s2 = 0.0;
    double s3 = 0.0;
    for (const auto& t : traces) {
        s2 += static_cast<double>(t.knowledge_entries.size());
        s3 += static_cast<double>(t.lang_specific_entries.size());
    }
    return {s2 / static_cast<double>(traces.size()), s3 / static_cast<double>(traces.size())};
}

// ---------------------------------------------------------------------------
// Scoring helpers
// ---------------------------------------------------------------------------

bool numeric_equal(const ExactDecimal& extracted, const ExactDecimal& gold) {
    if (extracted == gold) return true;
    if (extracted.is_integral() && gold.is_integral()) return false;
    long double a = extracted.to_double();
    long double b = gold.to_double();
    long double tol = 1e-6L * std::max<long double>(1.0L, std::fabs(static_cast<double>(b)));
    return std::fabs(static_cast<double>(a - b)) <= tol;
}

double round_half_up(double v, int digits) {
    if (v < 0) return -round_half_up(-v, digits);
    long double p = std::pow(10.0L, digits);
    return static_cast<double>(std::floor(static_cast<long double>(v) * p + 0.5L + 1e-9L) / p);
}

std::string format_fixed(double v, int digits) {
    double r = round_half_up(v, digits);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, r);
    return buf;
}

}  // namespace sot
