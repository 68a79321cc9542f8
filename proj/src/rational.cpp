#include "lexmatcher/rational.hpp"

#include "lexmatcher/error.hpp"

#include <charconv>

namespace lexmatcher {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("invalid rational literal: '" + std::string(whole) + "'");
    }
    return value;
}

} // namespace

Rational Rational::parse(std::string_view text) {
    if (text.empty()) throw ConfigError("empty rational literal");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational r{parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text)};
        if (r.den <= 0) throw ConfigError("rational denominator must be positive: '" + std::string(text) + "'");
        return r;
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string_view frac = text.substr(dot + 1);
        if (frac.size() > 15) frac = frac.substr(0, 15);
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        std::int64_t whole = dot == 0 ? 0 : parse_int(text.substr(0, dot), text);
        std::int64_t frac_v = frac.empty() ? 0 : parse_int(frac, text);
        return Rational{whole * den + frac_v, den};
    }
    return Rational{parse_int(text, text), 1};
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

} // namespace lexmatcher
