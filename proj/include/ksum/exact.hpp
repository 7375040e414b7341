#pragma once

// Exact arbitrary-precision integers and rationals. Everything geometric in
// this library is computed over these types; no floating point is involved
// in any sign decision.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace ksum {

using Integer = mpz_class;

// Always reduced, denominator strictly positive (canonical form is a GMP
// invariant as long as values are built through the helpers below).
using Rational = mpq_class;

struct DivisionByZero : std::domain_error {
    DivisionByZero() : std::domain_error("exact division by zero") {}
};

struct ParseError : std::invalid_argument {
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

inline int sign_of(const Integer& x) { return mpz_sgn(x.get_mpz_t()); }
inline int sign_of(const Rational& x) { return mpq_sgn(x.get_mpq_t()); }

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw DivisionByZero{};
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(Integer num, Integer den) {
    if (sign_of(den) == 0) throw DivisionByZero{};
    Rational r(std::move(num), std::move(den));
    r.canonicalize();
    return r;
}

inline Rational rat_add(const Rational& a, const Rational& b) { return a + b; }
inline Rational rat_mul(const Rational& a, const Rational& b) { return a * b; }

inline Rational rat_div(const Rational& a, const Rational& b) {
    if (sign_of(b) == 0) throw DivisionByZero{};
    return a / b;
}

// Total order: negative when a < b, zero when equal, positive when a > b.
inline int rat_cmp(const Rational& a, const Rational& b) {
    return cmp(a, b);
}

inline Integer int_pow(Integer base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// Bit lengths of the reduced numerator and denominator. Diagnostics only.
inline std::pair<std::size_t, std::size_t> bit_size_telemetry(const Rational& x) {
    return {mpz_sizeinbase(x.get_num().get_mpz_t(), 2),
            mpz_sizeinbase(x.get_den().get_mpz_t(), 2)};
}

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

inline Integer parse_integer_body(std::string_view s, std::string_view whole) {
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) throw ParseError("not an exact number: '" + std::string(whole) + "'");
    Integer v(std::string(s), 10);
    return neg ? Integer(-v) : v;
}

} // namespace detail

inline Integer parse_integer(std::string_view s) {
    return detail::parse_integer_body(s, s);
}

// Accepts "p", "p/q" and plain decimal strings ("0.25" -> 1/4), all converted
// exactly. Anything else (exponents, hex, stray characters) is rejected.
inline Rational parse_rational(std::string_view s) {
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Integer num = detail::parse_integer_body(s.substr(0, slash), s);
        Integer den = detail::parse_integer_body(s.substr(slash + 1), s);
        if (sign_of(den) == 0) throw ParseError("zero denominator: '" + std::string(s) + "'");
        return make_rational(std::move(num), std::move(den));
    }
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view frac = s.substr(dot + 1);
        if (!detail::all_digits(frac)) throw ParseError("not an exact number: '" + std::string(s) + "'");
        std::string_view head = s.substr(0, dot);
        bool neg = !head.empty() && head[0] == '-';
        Integer whole = head.empty() || head == "-" || head == "+"
                            ? Integer(0)
                            : detail::parse_integer_body(head, s);
        Integer scale = int_pow(10, static_cast<unsigned long>(frac.size()));
        Integer num = abs(whole) * scale + Integer(std::string(frac), 10);
        if (neg || sign_of(whole) < 0) num = -num;
        return make_rational(std::move(num), std::move(scale));
    }
    return Rational(detail::parse_integer_body(s, s));
}

inline bool looks_like_decimal(std::string_view s) {
    return s.find('.') != std::string_view::npos;
}

inline std::string to_string(const Rational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline std::string to_string(const Integer& x) { return x.get_str(); }

} // namespace ksum
