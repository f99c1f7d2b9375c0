#ifndef RTREE_COVER_RATIONAL_HPP
#define RTREE_COVER_RATIONAL_HPP

#include <gmpxx.h>

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "rtree_cover/error.hpp"

namespace rtree_cover {

/// Exact arbitrary-precision rational. Every length, offset and distance in
/// the library is one of these; there is no floating point anywhere.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational abs_diff(const Rational& a, const Rational& b) {
    return a < b ? Rational(b - a) : Rational(a - b);
}

inline const Rational& min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// "p/q" in lowest terms, or "p" when the denominator is one.
inline std::string to_string(const Rational& r) { return r.get_str(); }

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

} // namespace detail

/// Parses `integer | integer "/" positive-integer`. A leading '-' is accepted
/// on the numerator only.
inline Rational parse_rational(std::string_view text) {
    auto body = text;
    bool negative = false;
    if (!body.empty() && body.front() == '-') {
        negative = true;
        body.remove_prefix(1);
    }
    const auto slash = body.find('/');
    const auto num = body.substr(0, slash);
    const auto den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den)) {
        throw parse_error("malformed rational '" + std::string(text) + "'", 0);
    }
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw parse_error("zero denominator in '" + std::string(text) + "'", 0);
    if (negative) n = -n;
    Rational r(n, d);
    r.canonicalize();
    return r;
}

} // namespace rtree_cover

#endif // RTREE_COVER_RATIONAL_HPP
