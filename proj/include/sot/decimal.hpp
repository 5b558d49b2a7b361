#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sot {

// Arbitrary-precision decimal value kept as digit strings so that gold
// answers and extracted numbers never pass through binary floats.
// Canonical form: int_part has no leading zeros ("0" when empty),
// frac_part has no trailing zeros, and zero is never negative.
class ExactDecimal {
public:
    ExactDecimal() = default;

    // Accepts "[+-]digits[.digits]". Returns nullopt on anything else.
    static std::optional<ExactDecimal> parse(std::string_view s);

    static ExactDecimal from_parts(bool negative, std::string int_part, std::string frac_part);

    // Long division num/den, up to `max_frac_digits` fraction digits
    // (terminates early when exact). Nullopt when den == 0.
    static std::optional<ExactDecimal> from_fraction(const ExactDecimal& num,
                                                     const ExactDecimal& den,
                                                     int max_frac_digits = 15);

    std::string to_string() const;
    double to_double() const;

    bool is_integral() const { return frac_.empty(); }
    bool is_zero() const { return int_ == "0" && frac_.empty(); }
    bool negative() const { return negative_; }

    // Value divided by 10^n (used for percents).
    ExactDecimal scaled_down(int n) const;

    // Value + 1, exact.
    ExactDecimal plus_one() const;

    bool operator==(const ExactDecimal& other) const = default;

private:
    bool negative_ = false;
    std::string int_ = "0";
    std::string frac_;

    void canonicalize();
};

}  // namespace sot
