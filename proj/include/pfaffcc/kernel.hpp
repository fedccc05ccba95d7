#ifndef PFAFFCC_KERNEL_HPP
#define PFAFFCC_KERNEL_HPP

// Pfaffian kernel for denominator-cleared distance matrices. Every entry of
// such a matrix is a product of linear forms, and the term of a perfect
// matching M is the product of q_ab^2 over all pairs ab not in M. Terms are
// therefore expanded by repeated multiplication with linear forms, and all
// matchings sharing a prefix are summed before the shared factors are
// applied. Polynomials here are homogeneous, stored as sorted packed keys.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"
#include "pfaffian.hpp"
#include "polynomial.hpp"
#include "scalar.hpp"

namespace pfaffcc
{
namespace detail
{

__extension__ using Int128 = __int128;
__extension__ using UInt128 = unsigned __int128;

struct KernelOverflow : std::overflow_error {
    KernelOverflow() : std::overflow_error("128-bit coefficient overflow") {}
};

struct KernelTermLimit : std::runtime_error {
    explicit KernelTermLimit(std::size_t terms)
        : std::runtime_error("term limit exceeded (" + std::to_string(terms) + " terms)")
    {
    }
};

inline Integer to_integer(Int128 v)
{
    const bool neg = v < 0;
    UInt128 u = neg ? UInt128(0) - static_cast<UInt128>(v) : static_cast<UInt128>(v);
    Integer r(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
    r <<= 64;
    r += static_cast<unsigned long>(static_cast<std::uint64_t>(u));
    return neg ? Integer(-r) : r;
}

inline Int128 to_int128(const Integer &z)
{
    if (mpz_sizeinbase(z.get_mpz_t(), 2) > 126) throw KernelOverflow();
    Integer a = abs(z);
    Integer hi = a >> 64;
    Integer lo = a - (hi << 64);
    UInt128 u = (static_cast<UInt128>(hi.get_ui()) << 64) | static_cast<UInt128>(lo.get_ui());
    return sgn(z) < 0 ? -static_cast<Int128>(u) : static_cast<Int128>(u);
}

inline Int128 checked_add(Int128 a, Int128 b)
{
    Int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw KernelOverflow();
    return r;
}
inline Integer checked_add(const Integer &a, const Integer &b) { return a + b; }

inline Int128 checked_neg(Int128 a)
{
    Int128 r;
    if (__builtin_sub_overflow(Int128(0), a, &r)) throw KernelOverflow();
    return r;
}
inline Integer checked_neg(const Integer &a) { return -a; }

inline Int128 checked_mul(Int128 a, long b)
{
    Int128 r;
    if (__builtin_mul_overflow(a, static_cast<Int128>(b), &r)) throw KernelOverflow();
    return r;
}
inline Integer checked_mul(const Integer &a, long b) { return a * b; }

inline bool coeff_is_zero(Int128 a) { return a == 0; }
inline bool coeff_is_zero(const Integer &a) { return a == 0; }

// Sorted (ascending packed key) list of terms of a homogeneous polynomial.
template <typename C>
struct TermList {
    std::vector<std::uint64_t> keys;
    std::vector<C> coeffs;

    std::size_t size() const { return keys.size(); }
    bool empty() const { return keys.empty(); }

    static TermList one()
    {
        TermList t;
        t.keys.push_back(0);
        t.coeffs.push_back(C(1));
        return t;
    }

    void negate()
    {
        for (auto &c : coeffs) c = checked_neg(c);
    }
};

// out = (a shifted by off_a) + (b shifted by off_b); zero sums dropped.
template <typename C>
void merge_shifted(const TermList<C> &a, std::uint64_t off_a, const TermList<C> &b, std::uint64_t off_b,
                   TermList<C> &out)
{
    out.keys.clear();
    out.coeffs.clear();
    out.keys.reserve(a.size() + b.size());
    out.coeffs.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    const std::size_t na = a.size(), nb = b.size();
    while (i < na && j < nb) {
        const std::uint64_t ka = a.keys[i] + off_a, kb = b.keys[j] + off_b;
        if (ka < kb) {
            out.keys.push_back(ka);
            out.coeffs.push_back(a.coeffs[i++]);
        } else if (kb < ka) {
            out.keys.push_back(kb);
            out.coeffs.push_back(b.coeffs[j++]);
        } else {
            C s = checked_add(a.coeffs[i++], b.coeffs[j++]);
            if (!coeff_is_zero(s)) {
                out.keys.push_back(ka);
                out.coeffs.push_back(std::move(s));
            }
        }
    }
    for (; i < na; ++i) {
        out.keys.push_back(a.keys[i] + off_a);
        out.coeffs.push_back(a.coeffs[i]);
    }
    for (; j < nb; ++j) {
        out.keys.push_back(b.keys[j] + off_b);
        out.coeffs.push_back(b.coeffs[j]);
    }
}

template <typename C>
TermList<C> add(const TermList<C> &a, const TermList<C> &b)
{
    if (a.empty()) return b;
    if (b.empty()) return a;
    TermList<C> out;
    merge_shifted(a, 0, b, 0, out);
    return out;
}

template <typename C>
class DistanceKernel
{
public:
    // var_map sends each gap variable to the variable it is identified with
    // in the output; empty means the identity.
    DistanceKernel(const DistanceForms &forms, std::size_t term_limit, std::vector<std::size_t> var_map = {})
        : m_forms(forms), m_term_limit(term_limit), m_var_map(std::move(var_map))
    {
    }

    // p * (x_lo + ... + x_{hi-1}).
    TermList<C> times_form(const TermList<C> &p, const LinearForm &f) const
    {
        if (f.is_one() || p.empty()) return p;
        std::vector<TermList<C>> level;
        if (m_var_map.empty()) {
            level.reserve((f.width() + 1) / 2);
            for (std::size_t v = f.lo; v < f.hi; v += 2) {
                TermList<C> t;
                if (v + 1 < f.hi) {
                    merge_shifted(p, Monomial::unit(v), p, Monomial::unit(v + 1), t);
                } else {
                    t = shifted(p, Monomial::unit(v), 1);
                }
                level.push_back(std::move(t));
            }
        } else {
            std::vector<std::pair<std::size_t, long>> counts;
            for (std::size_t v = f.lo; v < f.hi; ++v) {
                const std::size_t u = m_var_map[v];
                if (!counts.empty() && counts.back().first == u) {
                    ++counts.back().second;
                } else {
                    counts.emplace_back(u, 1);
                }
            }
            for (auto [u, c] : counts) level.push_back(shifted(p, Monomial::unit(u), c));
        }
        while (level.size() > 1) {
            std::vector<TermList<C>> next;
            for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
                TermList<C> t;
                merge_shifted(level[i], 0, level[i + 1], 0, t);
                next.push_back(std::move(t));
            }
            if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
            level = std::move(next);
        }
        check_limit(level.front());
        return std::move(level.front());
    }

    // Multiplies by every form, widest first while the polynomial is small.
    TermList<C> times_forms(TermList<C> p, std::vector<LinearForm> fs) const
    {
        std::stable_sort(fs.begin(), fs.end(),
                         [](const LinearForm &a, const LinearForm &b) { return a.width() > b.width(); });
        for (const auto &f : fs) p = times_form(p, f);
        return p;
    }

    // Squared forms shared by every matching of `rest_mask` extended by (r0, j).
    std::vector<LinearForm> branch_factors(std::size_t r0, std::size_t j, std::uint64_t remaining) const
    {
        std::vector<LinearForm> out;
        for (std::uint64_t m = remaining; m != 0; m &= m - 1) {
            const auto k = static_cast<std::size_t>(std::countr_zero(m));
            for (const auto &f : {m_forms.form(r0, k), m_forms.form(j, k)}) {
                if (f.is_one()) continue;
                out.push_back(f);
                out.push_back(f);
            }
        }
        return out;
    }

    // Sum over all perfect matchings M of the index set `mask` of
    // sign(M) * prod_{ab in mask, ab not in M} q_ab^2.
    TermList<C> pfaffian_of(std::uint64_t mask) const
    {
        if (mask == 0) return TermList<C>::one();
        const auto r0 = static_cast<std::size_t>(std::countr_zero(mask));
        const std::uint64_t rest = mask & (mask - 1);
        TermList<C> sum;
        std::size_t t = 0;
        for (std::uint64_t m = rest; m != 0; m &= m - 1, ++t) {
            const auto j = static_cast<std::size_t>(std::countr_zero(m));
            const std::uint64_t remaining = rest & ~(std::uint64_t{1} << j);
            TermList<C> term = times_forms(pfaffian_of(remaining), branch_factors(r0, j, remaining));
            if (t % 2 == 1) term.negate();
            sum = add(sum, term);
            check_limit(sum);
        }
        return sum;
    }

    // Contribution of the matchings with canonical index in [lo, hi), the
    // canonical order being the one of for_each_matching.
    TermList<C> range_sum(std::uint64_t lo, std::uint64_t hi) const
    {
        const std::uint64_t full = full_mask(m_forms.order());
        return range_sum(full, {}, false, 0, lo, hi);
    }

private:
    TermList<C> range_sum(std::uint64_t mask, const std::vector<LinearForm> &prefix, bool negative,
                          std::uint64_t base, std::uint64_t lo, std::uint64_t hi) const
    {
        const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
        const std::uint64_t count = matching_count(size);
        if (lo <= base && base + count <= hi) {
            TermList<C> t = times_forms(pfaffian_of(mask), prefix);
            if (negative) t.negate();
            return t;
        }
        const auto r0 = static_cast<std::size_t>(std::countr_zero(mask));
        const std::uint64_t rest = mask & (mask - 1);
        const std::uint64_t sub = matching_count(size - 2);
        TermList<C> sum;
        std::size_t t = 0;
        for (std::uint64_t m = rest; m != 0; m &= m - 1, ++t) {
            const std::uint64_t child = base + t * sub;
            if (child + sub <= lo || child >= hi) continue;
            const auto j = static_cast<std::size_t>(std::countr_zero(m));
            const std::uint64_t remaining = rest & ~(std::uint64_t{1} << j);
            std::vector<LinearForm> next = prefix;
            auto extra = branch_factors(r0, j, remaining);
            next.insert(next.end(), extra.begin(), extra.end());
            sum = add(sum, range_sum(remaining, next, negative != (t % 2 == 1), child, lo, hi));
            check_limit(sum);
        }
        return sum;
    }

    void check_limit(const TermList<C> &p) const
    {
        if (m_term_limit != 0 && p.size() > m_term_limit) throw KernelTermLimit(p.size());
    }

    static TermList<C> shifted(const TermList<C> &p, std::uint64_t off, long mult)
    {
        TermList<C> t;
        t.keys.reserve(p.size());
        for (auto k : p.keys) t.keys.push_back(k + off);
        if (mult == 1) {
            t.coeffs = p.coeffs;
        } else {
            t.coeffs.reserve(p.size());
            for (const auto &c : p.coeffs) t.coeffs.push_back(checked_mul(c, mult));
        }
        return t;
    }

    const DistanceForms &m_forms;
    std::size_t m_term_limit;
    std::vector<std::size_t> m_var_map;
};

template <typename C>
SparsePoly to_sparse(const TermList<C> &t, std::size_t nvars)
{
    std::vector<SparsePoly::Term> terms;
    terms.reserve(t.size());
    bool homogeneous = true;
    const unsigned d0 = t.empty() ? 0 : Monomial::from_packed(t.keys.front()).degree();
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto m = Monomial::from_packed(t.keys[i]);
        if (m.degree() != d0) homogeneous = false;
        if constexpr (std::is_same_v<C, Integer>) {
            terms.push_back({m, t.coeffs[i]});
        } else {
            terms.push_back({m, to_integer(t.coeffs[i])});
        }
    }
    if (homogeneous) return SparsePoly::from_canonical_terms(nvars, std::move(terms));
    return SparsePoly::from_terms(nvars, std::move(terms));
}

template <typename C>
TermList<C> from_sparse(const SparsePoly &p)
{
    TermList<C> t;
    std::vector<std::pair<std::uint64_t, C>> tmp;
    tmp.reserve(p.size());
    for (const auto &term : p.terms()) {
        if constexpr (std::is_same_v<C, Integer>) {
            tmp.emplace_back(term.mono.packed(), term.coeff);
        } else {
            tmp.emplace_back(term.mono.packed(), to_int128(term.coeff));
        }
    }
    std::sort(tmp.begin(), tmp.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    for (auto &[k, c] : tmp) {
        t.keys.push_back(k);
        t.coeffs.push_back(std::move(c));
    }
    return t;
}

} // namespace detail
} // namespace pfaffcc

#endif
