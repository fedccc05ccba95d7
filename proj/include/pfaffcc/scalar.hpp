#ifndef PFAFFCC_SCALAR_HPP
#define PFAFFCC_SCALAR_HPP

#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <type_traits>

#include <gmpxx.h>

#include "errors.hpp"

namespace pfaffcc
{

using Integer = mpz_class;
using Rational = mpq_class;

// Ring operations needed by the generic pfaffian code. zero/one take a sample
// element so that rings whose elements carry shape (polynomials know their
// variable count) can build matching constants.
template <typename S, typename = void>
struct ring_traits {
    static S zero_like(const S &) { return S(0); }
    static S one_like(const S &) { return S(1); }
    static bool is_zero(const S &s) { return s == 0; }
};

template <typename S>
inline S zero_like(const S &sample)
{
    return ring_traits<S>::zero_like(sample);
}

template <typename S>
inline S one_like(const S &sample)
{
    return ring_traits<S>::one_like(sample);
}

template <typename S>
inline bool is_zero(const S &s)
{
    return ring_traits<S>::is_zero(s);
}

template <typename S>
inline constexpr bool is_float_v = std::is_floating_point_v<S>;

// Sign of a field element: -1, 0, +1.
inline int sign_of(const Rational &r) { return sgn(r); }
inline int sign_of(const Integer &z) { return sgn(z); }
inline int sign_of(double d) { return (d > 0) - (d < 0); }

inline Rational abs_of(const Rational &r) { return abs(r); }
inline double abs_of(double d) { return std::fabs(d); }

inline double to_double(const Rational &r) { return r.get_d(); }
inline double to_double(double d) { return d; }

template <typename S>
S from_rational(const Rational &r)
{
    if constexpr (std::is_same_v<S, Rational>) {
        return r;
    } else {
        return static_cast<S>(r.get_d());
    }
}

// Parses "7", "-3/4", "0.125", "1e-3", "+2.5E2" into an exact rational.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    s = s.substr(start);
    if (s.empty()) throw ValidationError("empty number");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_rational(std::string_view(s).substr(0, slash));
        Rational den = parse_rational(std::string_view(s).substr(slash + 1));
        if (den == 0) throw ValidationError("zero denominator in '" + s + "'");
        Rational r = num / den;
        r.canonicalize();
        return r;
    }

    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') {
        negative = s[i] == '-';
        ++i;
    }
    std::string digits;
    long exponent = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point) --exponent;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw ValidationError("not a number: '" + s + "'");
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw ValidationError("not a number: '" + s + "'");
        ++i;
        std::size_t used = 0;
        long e = 0;
        try {
            e = std::stol(s.substr(i), &used);
        } catch (const std::exception &) {
            throw ValidationError("bad exponent in '" + s + "'");
        }
        if (used != s.size() - i) throw ValidationError("not a number: '" + s + "'");
        exponent += e;
    }
    if (exponent > 4000 || exponent < -4000) throw ValidationError("exponent out of range in '" + s + "'");

    Integer mant(digits, 10);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational r = exponent < 0 ? Rational(mant, scale) : Rational(mant * scale, 1);
    r.canonicalize();
    if (negative) r = -r;
    return r;
}

// "num/den", or "num" when the denominator is one.
inline std::string format_rational(const Rational &r)
{
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

// 17 significant digits, enough to round-trip a double.
inline std::string format_double(double d)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

inline std::string format_scalar(const Rational &r) { return format_rational(r); }
inline std::string format_scalar(double d) { return format_double(d); }

// Exact integer power with a possibly negative exponent.
inline Rational pow_int(const Rational &base, long e)
{
    if (e == 0) return Rational(1);
    bool invert = e < 0;
    unsigned long k = static_cast<unsigned long>(invert ? -e : e);
    if (invert && base == 0) throw DegenerateError("zero raised to a negative power");
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), k);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), k);
    Rational r = invert ? Rational(den, num) : Rational(num, den);
    r.canonicalize();
    return r;
}

inline bool is_integer(const Rational &r) { return r.get_den() == 1; }

} // namespace pfaffcc

#endif
