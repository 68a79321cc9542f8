#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace lexmatcher {

/// Exact non-negative threshold used where a boundary comparison must not
/// drift through floating point ("ratio exactly 1/3" keeps, etc.).
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    /// Accepts "1/3", "0.3", "3", "0.40".
    static Rational parse(std::string_view text);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    // Compare the ratio a/b against this value with exact integer arithmetic
    // (b and den must be positive): ratio_lt(a, b) means a/b < num/den.
    bool ratio_lt(std::int64_t a, std::int64_t b) const { return a * den < num * b; }
    bool ratio_gt(std::int64_t a, std::int64_t b) const { return a * den > num * b; }
    bool ratio_le(std::int64_t a, std::int64_t b) const { return a * den <= num * b; }
    bool ratio_ge(std::int64_t a, std::int64_t b) const { return a * den >= num * b; }

    bool operator==(const Rational& other) const {
        return num * other.den == other.num * den;
    }
    bool operator<(const Rational& other) const {
        return num * other.den < other.num * den;
    }
};

} // namespace lexmatcher
