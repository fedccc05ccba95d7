#ifndef PFAFFCC_POLYNOMIAL_HPP
#define PFAFFCC_POLYNOMIAL_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace pfaffcc
{

// Exponent vector packed into one machine word: 7 bits per variable, variable
// 0 in the most significant field. Comparing packed words therefore compares
// exponent vectors lexicographically, and multiplying monomials is integer
// addition as long as no field exceeds max_exponent.
class Monomial
{
public:
    static constexpr std::size_t max_vars = 9;
    static constexpr unsigned bits = 7;
    static constexpr unsigned max_exponent = (1u << bits) - 1;

    constexpr Monomial() = default;
    static constexpr Monomial from_packed(std::uint64_t w) { return Monomial(w); }

    static Monomial from_exponents(std::span<const unsigned> e)
    {
        if (e.size() > max_vars) throw ValidationError("too many variables for a packed monomial");
        std::uint64_t w = 0;
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (e[v] > max_exponent) throw ValidationError("exponent exceeds packed monomial range");
            w |= static_cast<std::uint64_t>(e[v]) << shift(v);
        }
        return Monomial(w);
    }

    static constexpr unsigned shift(std::size_t v) { return static_cast<unsigned>((max_vars - 1 - v) * bits); }
    static constexpr std::uint64_t unit(std::size_t v) { return std::uint64_t{1} << shift(v); }

    constexpr std::uint64_t packed() const { return m_word; }
    constexpr unsigned exponent(std::size_t v) const
    {
        return static_cast<unsigned>((m_word >> shift(v)) & max_exponent);
    }
    constexpr unsigned degree() const
    {
        unsigned d = 0;
        for (std::size_t v = 0; v < max_vars; ++v) d += exponent(v);
        return d;
    }

    std::vector<unsigned> exponents(std::size_t nvars) const
    {
        std::vector<unsigned> e(nvars);
        for (std::size_t v = 0; v < nvars; ++v) e[v] = exponent(v);
        return e;
    }

    // Caller guarantees no per-variable overflow.
    constexpr Monomial operator*(Monomial o) const { return Monomial(m_word + o.m_word); }

    friend constexpr bool operator==(Monomial a, Monomial b) { return a.m_word == b.m_word; }

private:
    constexpr explicit Monomial(std::uint64_t w) : m_word(w) {}
    std::uint64_t m_word = 0;
};

// Total degree first, then lexicographic on the exponent vector.
struct CanonicalOrder {
    bool operator()(Monomial a, Monomial b) const
    {
        unsigned da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return a.packed() < b.packed();
    }
};

struct PolyStats {
    std::uint64_t n_terms = 0;
    Integer min_coeff = 0;
    Integer max_coeff = 0;
    unsigned total_degree = 0;
};

// Multivariate polynomial with arbitrary-precision integer coefficients.
// Terms are kept sorted in CanonicalOrder with no zero coefficients, so two
// polynomials are equal iff their term vectors are equal.
class SparsePoly
{
public:
    struct Term {
        Monomial mono;
        Integer coeff;
        friend bool operator==(const Term &, const Term &) = default;
    };

    explicit SparsePoly(std::size_t nvars = 0) : m_nvars(nvars)
    {
        if (nvars > Monomial::max_vars) throw ValidationError("at most 9 variables are supported");
    }

    static SparsePoly constant(std::size_t nvars, const Integer &c)
    {
        SparsePoly p(nvars);
        if (c != 0) p.m_terms.push_back({Monomial{}, c});
        return p;
    }

    static SparsePoly variable(std::size_t nvars, std::size_t v)
    {
        if (v >= nvars) throw ValidationError("variable index out of range");
        SparsePoly p(nvars);
        p.m_terms.push_back({Monomial::from_packed(Monomial::unit(v)), Integer(1)});
        return p;
    }

    // Sum of variables lo..hi-1, each with coefficient one.
    static SparsePoly variable_range(std::size_t nvars, std::size_t lo, std::size_t hi)
    {
        std::vector<Term> t;
        for (std::size_t v = lo; v < hi; ++v) t.push_back({Monomial::from_packed(Monomial::unit(v)), Integer(1)});
        return from_terms(nvars, std::move(t));
    }

    // Combines duplicates, drops zeros and sorts.
    static SparsePoly from_terms(std::size_t nvars, std::vector<Term> terms)
    {
        SparsePoly p(nvars);
        for (const auto &t : terms)
            for (std::size_t v = nvars; v < Monomial::max_vars; ++v)
                if (t.mono.exponent(v) != 0) throw ValidationError("monomial uses a variable beyond nvars");
        std::sort(terms.begin(), terms.end(),
                  [](const Term &a, const Term &b) { return CanonicalOrder{}(a.mono, b.mono); });
        for (auto &t : terms) {
            if (!p.m_terms.empty() && p.m_terms.back().mono == t.mono) {
                p.m_terms.back().coeff += t.coeff;
            } else {
                if (!p.m_terms.empty() && p.m_terms.back().coeff == 0) p.m_terms.pop_back();
                p.m_terms.push_back(std::move(t));
            }
        }
        if (!p.m_terms.empty() && p.m_terms.back().coeff == 0) p.m_terms.pop_back();
        return p;
    }

    // Terms must already be canonical; used by kernels that produce sorted output.
    static SparsePoly from_canonical_terms(std::size_t nvars, std::vector<Term> terms)
    {
        SparsePoly p(nvars);
        p.m_terms = std::move(terms);
        return p;
    }

    std::size_t nvars() const { return m_nvars; }
    std::size_t size() const { return m_terms.size(); }
    bool is_zero() const { return m_terms.empty(); }
    std::span<const Term> terms() const { return m_terms; }

    unsigned degree() const
    {
        return m_terms.empty() ? 0 : m_terms.back().mono.degree();
    }

    Integer coeff(Monomial m) const
    {
        auto it = std::lower_bound(m_terms.begin(), m_terms.end(), m,
                                   [](const Term &t, Monomial k) { return CanonicalOrder{}(t.mono, k); });
        if (it != m_terms.end() && it->mono == m) return it->coeff;
        return 0;
    }

    // Largest exponent of each variable over all terms.
    std::array<unsigned, Monomial::max_vars> max_exponents() const
    {
        std::array<unsigned, Monomial::max_vars> e{};
        for (const auto &t : m_terms)
            for (std::size_t v = 0; v < m_nvars; ++v) e[v] = std::max(e[v], t.mono.exponent(v));
        return e;
    }

    SparsePoly operator-() const
    {
        SparsePoly r = *this;
        for (auto &t : r.m_terms) t.coeff = -t.coeff;
        return r;
    }

    friend SparsePoly operator+(const SparsePoly &a, const SparsePoly &b) { return merge(a, b, false); }
    friend SparsePoly operator-(const SparsePoly &a, const SparsePoly &b) { return merge(a, b, true); }
    friend SparsePoly operator*(const SparsePoly &a, const SparsePoly &b) { return multiply(a, b); }
    SparsePoly &operator+=(const SparsePoly &o) { return *this = *this + o; }
    SparsePoly &operator-=(const SparsePoly &o) { return *this = *this - o; }
    SparsePoly &operator*=(const SparsePoly &o) { return *this = *this * o; }

    friend bool operator==(const SparsePoly &a, const SparsePoly &b)
    {
        return a.m_nvars == b.m_nvars && a.m_terms == b.m_terms;
    }

private:
    static void check_compatible(const SparsePoly &a, const SparsePoly &b)
    {
        if (a.m_nvars != b.m_nvars) throw ValidationError("polynomial variable-count mismatch");
    }

    static SparsePoly merge(const SparsePoly &a, const SparsePoly &b, bool subtract)
    {
        check_compatible(a, b);
        SparsePoly r(a.m_nvars);
        r.m_terms.reserve(a.size() + b.size());
        CanonicalOrder less;
        auto i = a.m_terms.begin(), j = b.m_terms.begin();
        while (i != a.m_terms.end() || j != b.m_terms.end()) {
            if (j == b.m_terms.end() || (i != a.m_terms.end() && less(i->mono, j->mono))) {
                r.m_terms.push_back(*i++);
            } else if (i == a.m_terms.end() || less(j->mono, i->mono)) {
                r.m_terms.push_back({j->mono, subtract ? Integer(-j->coeff) : j->coeff});
                ++j;
            } else {
                Integer c = subtract ? Integer(i->coeff - j->coeff) : Integer(i->coeff + j->coeff);
                if (c != 0) r.m_terms.push_back({i->mono, std::move(c)});
                ++i;
                ++j;
            }
        }
        return r;
    }

    static SparsePoly multiply(const SparsePoly &a, const SparsePoly &b)
    {
        check_compatible(a, b);
        if (a.is_zero() || b.is_zero()) return SparsePoly(a.m_nvars);
        auto ea = a.max_exponents(), eb = b.max_exponents();
        for (std::size_t v = 0; v < a.m_nvars; ++v)
            if (ea[v] + eb[v] > Monomial::max_exponent)
                throw ValidationError("product exponent exceeds packed monomial range");

        std::unordered_map<std::uint64_t, Integer> acc;
        acc.reserve(a.size() * b.size() / 2 + 1);
        Integer prod;
        for (const auto &s : a.m_terms) {
            for (const auto &t : b.m_terms) {
                prod = s.coeff * t.coeff;
                acc[(s.mono * t.mono).packed()] += prod;
            }
        }
        std::vector<Term> terms;
        terms.reserve(acc.size());
        for (auto &[k, c] : acc)
            if (c != 0) terms.push_back({Monomial::from_packed(k), std::move(c)});
        std::sort(terms.begin(), terms.end(),
                  [](const Term &x, const Term &y) { return CanonicalOrder{}(x.mono, y.mono); });
        return from_canonical_terms(a.m_nvars, std::move(terms));
    }

    std::size_t m_nvars;
    std::vector<Term> m_terms;
};

template <>
struct ring_traits<SparsePoly> {
    static SparsePoly zero_like(const SparsePoly &s) { return SparsePoly(s.nvars()); }
    static SparsePoly one_like(const SparsePoly &s) { return SparsePoly::constant(s.nvars(), 1); }
    static bool is_zero(const SparsePoly &s) { return s.is_zero(); }
};

inline SparsePoly poly_add(const SparsePoly &a, const SparsePoly &b) { return a + b; }
inline SparsePoly poly_mul(const SparsePoly &a, const SparsePoly &b) { return a * b; }

inline PolyStats poly_stats(const SparsePoly &p)
{
    PolyStats s;
    s.n_terms = p.size();
    if (p.is_zero()) return s;
    s.min_coeff = p.terms().front().coeff;
    s.max_coeff = s.min_coeff;
    for (const auto &t : p.terms()) {
        if (t.coeff < s.min_coeff) s.min_coeff = t.coeff;
        if (t.coeff > s.max_coeff) s.max_coeff = t.coeff;
        s.total_degree = std::max(s.total_degree, t.mono.degree());
    }
    return s;
}

inline bool poly_is_nonneg(const SparsePoly &p)
{
    return std::all_of(p.terms().begin(), p.terms().end(), [](const auto &t) { return t.coeff > 0; });
}

inline Rational poly_eval(const SparsePoly &p, std::span<const Rational> point)
{
    if (point.size() != p.nvars()) throw ValidationError("evaluation point has the wrong length");
    auto maxe = p.max_exponents();
    std::vector<std::vector<Rational>> powers(p.nvars());
    for (std::size_t v = 0; v < p.nvars(); ++v) {
        powers[v].resize(maxe[v] + 1);
        powers[v][0] = 1;
        for (unsigned k = 1; k <= maxe[v]; ++k) powers[v][k] = powers[v][k - 1] * point[v];
    }
    Rational sum = 0;
    Rational term;
    for (const auto &t : p.terms()) {
        term = t.coeff;
        for (std::size_t v = 0; v < p.nvars(); ++v) {
            unsigned e = t.mono.exponent(v);
            if (e != 0) term *= powers[v][e];
        }
        sum += term;
    }
    return sum;
}

inline Rational poly_eval(const SparsePoly &p, std::initializer_list<Rational> point)
{
    std::vector<Rational> v(point);
    return poly_eval(p, std::span<const Rational>(v));
}

// Text format: header "nvars=k nterms=N", then one "coeff e1 ... ek" line per
// term in canonical order.
inline void write_poly(std::ostream &os, const SparsePoly &p)
{
    os << "nvars=" << p.nvars() << " nterms=" << p.size() << '\n';
    for (const auto &t : p.terms()) {
        os << t.coeff.get_str();
        for (std::size_t v = 0; v < p.nvars(); ++v) os << ' ' << t.mono.exponent(v);
        os << '\n';
    }
}

inline std::string to_text(const SparsePoly &p)
{
    std::ostringstream os;
    write_poly(os, p);
    return os.str();
}

inline SparsePoly read_poly(std::istream &is)
{
    std::string header;
    if (!std::getline(is, header)) throw ValidationError("missing polynomial header");
    std::size_t nvars = 0;
    unsigned long long nterms = 0;
    if (std::sscanf(header.c_str(), "nvars=%zu nterms=%llu", &nvars, &nterms) != 2)
        throw ValidationError("bad polynomial header: '" + header + "'");
    if (nvars > Monomial::max_vars) throw ValidationError("too many variables in polynomial header");
    std::vector<SparsePoly::Term> terms;
    terms.reserve(nterms);
    std::string line, coeff;
    std::vector<unsigned> e(nvars);
    for (unsigned long long k = 0; k < nterms; ++k) {
        if (!std::getline(is, line)) throw ValidationError("polynomial text truncated");
        std::istringstream ls(line);
        if (!(ls >> coeff)) throw ValidationError("bad term line: '" + line + "'");
        for (auto &x : e)
            if (!(ls >> x)) throw ValidationError("bad term line: '" + line + "'");
        std::string rest;
        if (ls >> rest) throw ValidationError("trailing data in term line: '" + line + "'");
        Integer c;
        if (c.set_str(coeff, 10) != 0) throw ValidationError("bad coefficient: '" + coeff + "'");
        terms.push_back({Monomial::from_exponents(e), std::move(c)});
    }
    return SparsePoly::from_terms(nvars, std::move(terms));
}

inline SparsePoly from_text(const std::string &text)
{
    std::istringstream is(text);
    return read_poly(is);
}

// Human-readable form, e.g. "x1^2 + 2*x1*x2 - x2".
inline std::string to_display(const SparsePoly &p, const std::string &var = "x")
{
    if (p.is_zero()) return "0";
    std::string out;
    for (const auto &t : p.terms()) {
        Integer c = t.coeff;
        bool neg = c < 0;
        if (neg) c = -c;
        out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
        std::string mono;
        for (std::size_t v = 0; v < p.nvars(); ++v) {
            unsigned e = t.mono.exponent(v);
            if (e == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += var + std::to_string(v + 1);
            if (e > 1) mono += "^" + std::to_string(e);
        }
        if (mono.empty()) {
            out += c.get_str();
        } else {
            if (c != 1) out += c.get_str() + "*";
            out += mono;
        }
    }
    return out;
}

inline std::ostream &operator<<(std::ostream &os, const SparsePoly &p) { return os << to_display(p); }

} // namespace pfaffcc

#endif
