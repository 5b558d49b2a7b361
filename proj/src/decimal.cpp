#include "sot/decimal.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace sot {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Increments a digit string in place.
void string_increment(std::string& digits) {
    int carry = 1;
    for (size_t i = digits.size(); i-- > 0 && carry;) {
        int d = digits[i] - '0' + carry;
        digits[i] = static_cast<char>('0' + d % 10);
        carry = d / 10;
    }
    if (carry) digits.insert(digits.begin(), '1');
}

// Decrements a nonzero digit string in place.
void string_decrement(std::string& digits) {
    for (size_t i = digits.size(); i-- > 0;) {
        if (digits[i] > '0') {
            digits[i]--;
            break;
        }
        digits[i] = '9';
    }
    while (digits.size() > 1 && digits.front() == '0') digits.erase(digits.begin());
}

}  // namespace

void ExactDecimal::canonicalize() {
    size_t nz = 0;
    while (nz + 1 < int_.size() && int_[nz] == '0') ++nz;
    int_.erase(0, nz);
    if (int_.empty()) int_ = "0";
    while (!frac_.empty() && frac_.back() == '0') frac_.pop_back();
    if (int_ == "0" && frac_.empty()) negative_ = false;
}

std::optional<ExactDecimal> ExactDecimal::parse(std::string_view s) {
    ExactDecimal d;
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        d.negative_ = s[i] == '-';
        ++i;
    }
    size_t dot = s.find('.', i);
    std::string_view ip = dot == std::string_view::npos ? s.substr(i) : s.substr(i, dot - i);
    std::string_view fp = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (!all_digits(ip)) return std::nullopt;
    if (dot != std::string_view::npos && !all_digits(fp)) return std::nullopt;
    d.int_ = std::string(ip);
    d.frac_ = std::string(fp);
    d.canonicalize();
    return d;
}

ExactDecimal ExactDecimal::from_parts(bool negative, std::string int_part, std::string frac_part) {
    ExactDecimal d;
    d.negative_ = negative;
    d.int_ = int_part.empty() ? "0" : std::move(int_part);
    d.frac_ = std::move(frac_part);
    d.canonicalize();
    return d;
}

std::optional<ExactDecimal> ExactDecimal::from_fraction(const ExactDecimal& num,
                                                        const ExactDecimal& den,
                                                        int max_frac_digits) {
    if (den.is_zero()) return std::nullopt;
    if (!num.is_integral() || !den.is_integral()) return std::nullopt;

    // Schoolbook long division over digit strings.
    auto mod_step = [](unsigned long long rem, char digit, unsigned long long divisor,
                       std::string& quotient) {
        rem = rem * 10 + static_cast<unsigned long long>(digit - '0');
        quotient.push_back(static_cast<char>('0' + rem / divisor));
        return rem % divisor;
    };
    // Fits comfortably: denominators in model output are small.
    if (den.int_.size() > 18) return std::nullopt;
    unsigned long long divisor = std::strtoull(den.int_.c_str(), nullptr, 10);

    std::string int_q;
    unsigned long long rem = 0;
    for (char c : num.int_) rem = mod_step(rem, c, divisor, int_q);

    std::string frac_q;
    for (int i = 0; i < max_frac_digits && rem != 0; ++i) rem = mod_step(rem, '0', divisor, frac_q);

    return from_parts(num.negative_ != den.negative_, std::move(int_q), std::move(frac_q));
}

std::string ExactDecimal::to_string() const {
    std::string out;
    if (negative_) out.push_back('-');
    out += int_;
    if (!frac_.empty()) {
        out.push_back('.');
        out += frac_;
    }
    return out;
}

double ExactDecimal::to_double() const {
    return std::strtod(to_string().c_str(), nullptr);
}

ExactDecimal ExactDecimal::scaled_down(int n) const {
    std::string digits = int_ + frac_;
    int scale = static_cast<int>(frac_.size()) + n;
    while (static_cast<int>(digits.size()) < scale) digits.insert(digits.begin(), '0');
    std::string ip = digits.substr(0, digits.size() - static_cast<size_t>(scale));
    std::string fp = digits.substr(digits.size() - static_cast<size_t>(scale));
    return from_parts(negative_, std::move(ip), std::move(fp));
}

ExactDecimal ExactDecimal::plus_one() const {
    ExactDecimal out = *this;
    if (!negative_) {
        string_increment(out.int_);
    } else if (out.int_ == "0" && !frac_.empty()) {
        // -0.f + 1 = 1 - 0.f, computed digit-wise from the right.
        std::string comp;
        bool borrow_into = true;  // lowest digit subtracts from 10, the rest from 9
        for (size_t i = frac_.size(); i-- > 0;) {
            int d = (borrow_into ? 10 : 9) - (frac_[i] - '0');
            borrow_into = false;
            comp.insert(comp.begin(), static_cast<char>('0' + d % 10));
        }
        out = from_parts(false, "0", std::move(comp));
    } else {
        // Negative integer (canonical zero is never negative).
        string_decrement(out.int_);
    }
    out.canonicalize();
    return out;
}

}  // namespace sot
