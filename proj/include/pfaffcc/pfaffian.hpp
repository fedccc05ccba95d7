#ifndef PFAFFCC_PFAFFIAN_HPP
#define PFAFFCC_PFAFFIAN_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "scalar.hpp"

namespace pfaffcc
{

// One perfect matching of {0..n-1}: pairs (r, s) with r < s listed in order
// of increasing r, and the parity of the permutation [r1 s1 r2 s2 ...].
struct MatchingTerm {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    int sign = 1;
};

// (n-1)!!, the number of perfect matchings of n points; 1 for n = 0.
inline std::uint64_t matching_count(std::size_t n)
{
    if (n % 2 != 0) return 0;
    std::uint64_t c = 1;
    for (std::size_t k = n; k > 1; k -= 2) c *= k - 1;
    return c;
}

namespace detail
{

template <typename F>
void enumerate_matchings(std::vector<std::size_t> &rest, MatchingTerm &cur, std::uint64_t &index, std::uint64_t lo,
                         std::uint64_t hi, F &f)
{
    if (index >= hi) return;
    if (rest.empty()) {
        if (index >= lo) f(cur, index);
        ++index;
        return;
    }
    const std::uint64_t sub = matching_count(rest.size() - 2);
    const std::size_t first = rest.front();
    for (std::size_t t = 0; t + 1 < rest.size(); ++t) {
        if (index + sub <= lo) {
            index += sub;
            continue;
        }
        if (index >= hi) return;
        const std::size_t partner = rest[t + 1];
        std::vector<std::size_t> next;
        next.reserve(rest.size() - 2);
        for (std::size_t k = 1; k < rest.size(); ++k)
            if (k != t + 1) next.push_back(rest[k]);
        cur.pairs.emplace_back(first, partner);
        const int saved = cur.sign;
        if (t % 2 == 1) cur.sign = -cur.sign;
        enumerate_matchings(next, cur, index, lo, hi, f);
        cur.sign = saved;
        cur.pairs.pop_back();
    }
}

} // namespace detail

// Visits the perfect matchings with canonical index in [lo, hi). The canonical
// order pairs the smallest free point with each remaining point in increasing
// order, recursively; f receives (term, index).
template <typename F>
void for_each_matching(std::size_t n, std::uint64_t lo, std::uint64_t hi, F &&f)
{
    if (n % 2 != 0) throw DegenerateError("pfaffian undefined for odd order");
    std::vector<std::size_t> rest(n);
    for (std::size_t i = 0; i < n; ++i) rest[i] = i;
    MatchingTerm cur;
    std::uint64_t index = 0;
    detail::enumerate_matchings(rest, cur, index, lo, std::min(hi, matching_count(n)), f);
}

template <typename F>
void for_each_matching(std::size_t n, F &&f)
{
    for_each_matching(n, 0, matching_count(n), std::forward<F>(f));
}

namespace detail
{

template <typename S>
std::size_t term_size(const S &)
{
    return 1;
}
template <typename S>
    requires requires(const S &s) { s.size(); }
std::size_t term_size(const S &s)
{
    return s.size();
}

// Product of the entries on a matching, smallest factors first.
template <typename S>
S matching_product(const SkewMatrix<S> &a, const MatchingTerm &m)
{
    std::vector<S> f;
    f.reserve(m.pairs.size());
    for (auto [r, s] : m.pairs) f.push_back(a.upper(r, s));
    std::stable_sort(f.begin(), f.end(), [](const S &x, const S &y) { return term_size(x) < term_size(y); });
    S p = f.front();
    for (std::size_t k = 1; k < f.size(); ++k) p = p * f[k];
    return p;
}

template <typename S>
S matching_range_sum(const SkewMatrix<S> &a, std::uint64_t lo, std::uint64_t hi)
{
    S sum = zero_like(a.zero());
    for_each_matching(a.size(), lo, hi, [&](const MatchingTerm &m, std::uint64_t) {
        if (m.sign > 0) {
            sum = sum + matching_product(a, m);
        } else {
            sum = sum - matching_product(a, m);
        }
    });
    return sum;
}

// Pairwise merge in fixed index order: ((p0+p1)+(p2+p3))+...
template <typename S>
S tree_sum(std::vector<S> parts)
{
    while (parts.size() > 1) {
        std::vector<S> next;
        next.reserve((parts.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
        if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return std::move(parts.front());
}

} // namespace detail

// Signed sum over all (n-1)!! perfect matchings. With workers > 1 the index
// range is split into contiguous slices whose partial sums are merged in a
// fixed tree order, so exact rings give identical results for any worker count.
template <typename S>
S pfaffian_matchings(const SkewMatrix<S> &a, unsigned workers = 1)
{
    const std::size_t n = a.size();
    if (n % 2 != 0) throw DegenerateError("pfaffian undefined for odd order");
    const std::uint64_t total = matching_count(n);
    workers = std::max(1u, static_cast<unsigned>(std::min<std::uint64_t>(workers, total)));
    if (workers == 1) return detail::matching_range_sum(a, 0, total);

    std::vector<S> parts(workers, zero_like(a.zero()));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        std::uint64_t lo = total * w / workers, hi = total * (w + 1) / workers;
        pool.emplace_back([&, w, lo, hi] { parts[w] = detail::matching_range_sum(a, lo, hi); });
    }
    for (auto &t : pool) t.join();
    return detail::tree_sum(std::move(parts));
}

namespace detail
{

// Pfaffian of the principal submatrix on the index bitmask, expanding along
// the largest surviving index; results memoized by mask.
template <typename S>
S pfaffian_mask(const SkewMatrix<S> &a, std::uint64_t mask, std::unordered_map<std::uint64_t, S> &memo)
{
    if (mask == 0) return one_like(a.zero());
    if (auto it = memo.find(mask); it != memo.end()) return it->second;
    const std::size_t last = 63 - static_cast<std::size_t>(std::countl_zero(mask));
    const std::uint64_t without_last = mask & ~(std::uint64_t{1} << last);
    S sum = zero_like(a.zero());
    std::size_t pos = 0;
    for (std::uint64_t m = without_last; m != 0; m &= m - 1, ++pos) {
        const std::size_t j = static_cast<std::size_t>(std::countr_zero(m));
        const S &entry = a.upper(j, last);
        if (is_zero(entry)) continue;
        S sub = pfaffian_mask(a, without_last & ~(std::uint64_t{1} << j), memo);
        if (pos % 2 == 0) {
            sum = sum + entry * sub;
        } else {
            sum = sum - entry * sub;
        }
    }
    memo.emplace(mask, sum);
    return sum;
}

inline std::uint64_t full_mask(std::size_t n)
{
    if (n > 63) throw ValidationError("pfaffian order too large");
    return n == 0 ? 0 : (~std::uint64_t{0} >> (64 - n));
}

} // namespace detail

// Laplace-style expansion along the last row with subset memoization.
template <typename S>
S pfaffian_recursive(const SkewMatrix<S> &a)
{
    if (a.size() % 2 != 0) throw DegenerateError("pfaffian undefined for odd order");
    std::unordered_map<std::uint64_t, S> memo;
    return detail::pfaffian_mask(a, detail::full_mask(a.size()), memo);
}

template <typename S>
S pfaffian(const SkewMatrix<S> &a)
{
    return pfaffian_recursive(a);
}

// Appends a last row/column whose upper entries are all `one`.
template <typename S>
SkewMatrix<S> border(const SkewMatrix<S> &a, const S &one)
{
    const std::size_t n = a.size();
    SkewMatrix<S> b(n + 1, a.zero());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) b.set(i, j, a.upper(i, j));
    for (std::size_t i = 0; i < n; ++i) b.set(i, n, one);
    return b;
}

template <typename S>
SkewMatrix<S> border(const SkewMatrix<S> &a)
{
    return border(a, one_like(a.zero()));
}

// Pfaffian of the submatrix with the given rows/columns deleted; the empty
// pfaffian is one.
template <typename S>
S pfaffian_minor(const SkewMatrix<S> &a, const std::vector<std::size_t> &removed)
{
    std::uint64_t mask = detail::full_mask(a.size());
    for (std::size_t r : removed) {
        if (r >= a.size()) throw ValidationError("removed index out of range");
        mask &= ~(std::uint64_t{1} << r);
    }
    if (std::popcount(mask) % 2 != 0) throw DegenerateError("pfaffian undefined for odd order");
    std::unordered_map<std::uint64_t, S> memo;
    return detail::pfaffian_mask(a, mask, memo);
}

// Determinant of the matrix with row `row` and column `col` deleted.
template <typename S>
S det_minor(const SkewMatrix<S> &a, std::size_t row, std::size_t col)
{
    if (row >= a.size() || col >= a.size()) throw ValidationError("minor index out of range");
    return determinant(DenseMatrix<S>::from_skew(a).without(row, col));
}

template <typename S>
S det(const SkewMatrix<S> &a)
{
    return determinant(DenseMatrix<S>::from_skew(a));
}

} // namespace pfaffcc

#endif
