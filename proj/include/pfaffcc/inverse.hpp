#ifndef PFAFFCC_INVERSE_HPP
#define PFAFFCC_INVERSE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"
#include "matrix.hpp"
#include "pfaffian.hpp"
#include "scalar.hpp"

namespace pfaffcc
{

// Relative positivity threshold used in floating point.
inline constexpr double float_tolerance = 1e-12;

// All real solutions (m, c) of Q m + c L = q, parametrized by one real s:
// m(s) = base + s * dir, c(s) = c0 + s * c1. For even n the parameter is c
// itself (dir = -Q^{-1} L); for odd n c is fixed and dir spans ker Q.
template <typename S>
struct RealMassSolution {
    std::vector<S> base, dir;
    S c0, c1;
    bool even = true;

    std::vector<S> masses(const S &s) const
    {
        std::vector<S> m(base.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = base[i] + s * dir[i];
        return m;
    }
    S c(const S &s) const { return c0 + s * c1; }
};

// max_i |(Q m + c L - q)_i|
template <typename S>
S residual(const CollinearConfig<S> &cfg, const std::vector<S> &m, const S &c)
{
    const auto q = q_matrix(cfg);
    S worst(0);
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        S r = c - cfg.q[i];
        for (std::size_t k = 0; k < cfg.size(); ++k) r += q(i, k) * m[k];
        worst = std::max<S>(worst, abs_of(r));
    }
    return worst;
}

template <typename S>
RealMassSolution<S> solve_real_masses(const CollinearConfig<S> &cfg)
{
    const std::size_t n = cfg.size();
    const auto qm = q_matrix(cfg);
    const auto dense = DenseMatrix<S>::from_skew(qm);
    RealMassSolution<S> sol{{}, {}, S(0), S(0), n % 2 == 0};
    if (sol.even) {
        auto u = solve_linear(dense, cfg.q);
        auto v = solve_linear(dense, std::vector<S>(n, S(1)));
        if (!u || !v) throw DegenerateError("degenerate configuration: Pf Q vanishes");
        sol.base = std::move(*u);
        sol.dir = std::move(*v);
        for (auto &d : sol.dir) d = -d;
        sol.c1 = S(1);
        return sol;
    }

    // Odd n: [Q | L] has rank n when Pf border(Q) != 0. Drop the column of the
    // last mass (any column whose minor is invertible would do) for one
    // solution, then add the kernel of Q.
    std::optional<std::vector<S>> part;
    std::size_t dropped = n;
    for (std::size_t j = n; j-- > 0 && !part;) {
        DenseMatrix<S> a(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0, col = 0; k < n; ++k)
                if (k != j) a(i, col++) = dense(i, k);
            a(i, n - 1) = S(1);
        }
        part = solve_linear(a, cfg.q);
        if (part) dropped = j;
    }
    if (!part) throw DegenerateError("degenerate configuration: Pf border(Q) vanishes");
    sol.base.assign(n, S(0));
    for (std::size_t k = 0, col = 0; k < n; ++k)
        if (k != dropped) sol.base[k] = (*part)[col++];
    sol.c0 = (*part)[n - 1];

    bool nonzero = false;
    for (std::size_t i = 0; i < n; ++i) {
        S pf = pfaffian_minor(qm, {i});
        sol.dir.push_back(i % 2 == 0 ? pf : S(-pf));
        if constexpr (is_float_v<S>) {
            nonzero = nonzero || pf != 0;
        } else {
            nonzero = nonzero || !is_zero(pf);
        }
    }
    if (!nonzero) throw DegenerateError("degenerate configuration: Q has rank below n - 1");
    return sol;
}

template <typename S>
struct FeasibilityResult {
    bool feasible = false;
    bool boundary = false; // some mass can only reach zero, not a positive value
    std::string reason;

    // Direct method: open interval of the family parameter (nullopt = unbounded).
    std::optional<S> param_lo, param_hi;
    std::optional<S> c_lo, c_hi;
    std::vector<S> masses; // witness, strictly positive when feasible
    std::optional<S> c;

    // Hull method: omitted column j (1-based) of every facet simplex whose
    // interior contains x, and barycentric weights for the first one.
    std::vector<std::size_t> facets;
    std::vector<S> weights;
    std::size_t singular_facets = 0;
    bool used_direct = false; // the hull test deferred to the direct method
};

namespace detail
{

template <typename S>
S tolerance_for(const std::vector<S> &v)
{
    if constexpr (is_float_v<S>) {
        S scale(0);
        for (const auto &x : v) scale = std::max<S>(scale, std::fabs(x));
        return float_tolerance * std::max<S>(scale, 1);
    } else {
        return S(0);
    }
}

} // namespace detail

// Positive masses from the real family: the intersection over i of
// {s : base_i + s dir_i > 0}.
template <typename S>
FeasibilityResult<S> positive_masses(const RealMassSolution<S> &sol)
{
    FeasibilityResult<S> r;
    const S tb = detail::tolerance_for(sol.base), td = detail::tolerance_for(sol.dir);
    std::optional<S> lo, hi;
    for (std::size_t i = 0; i < sol.base.size(); ++i) {
        const S &b = sol.base[i], &d = sol.dir[i];
        if (abs_of(d) <= td) {
            if (b > tb) continue;
            r.boundary = abs_of(b) <= tb;
            r.reason = r.boundary ? "boundary: mass " + std::to_string(i + 1) + " is zero for every solution"
                                  : "mass " + std::to_string(i + 1) + " is negative for every solution";
            return r;
        }
        S t = -b / d;
        if (d > 0) {
            if (!lo || t > *lo) lo = t;
        } else {
            if (!hi || t < *hi) hi = t;
        }
    }
    r.param_lo = lo;
    r.param_hi = hi;
    if (lo && hi) {
        S width = *hi - *lo;
        S scale = std::max<S>(std::max<S>(abs_of(*lo), abs_of(*hi)), S(1));
        S tol(0);
        if constexpr (is_float_v<S>) tol = float_tolerance * scale;
        if (width <= tol) {
            r.boundary = abs_of(width) <= tol;
            r.reason = r.boundary ? "boundary: the positivity interval is a single point"
                                  : "the positivity interval is empty";
            return r;
        }
    }
    S s(0);
    if (lo && hi) {
        s = (*lo + *hi) / S(2);
    } else if (lo) {
        s = *lo + S(1);
    } else if (hi) {
        s = *hi - S(1);
    }
    r.feasible = true;
    r.masses = sol.masses(s);
    r.c = sol.c(s);
    if (sol.even) {
        r.c_lo = lo;
        r.c_hi = hi;
    } else {
        r.c_lo = sol.c0;
        r.c_hi = sol.c0;
    }
    return r;
}

// Ground-truth decision of the positive-mass inverse problem.
template <typename S>
FeasibilityResult<S> solve_positive_direct(const CollinearConfig<S> &cfg)
{
    return positive_masses(solve_real_masses(cfg));
}

// Y_ik = Q_ik - Q_{i+1,k} at the configuration with the given gaps, and the
// central projections p(Y_k) = Y_k / (Q_1k + Q_kn).
template <typename S>
struct YMatrix {
    DenseMatrix<S> y;         // (n-1) x n
    std::vector<S> col_sums;  // Q_1k + Q_kn
    DenseMatrix<S> projected; // columns p(Y_k)
};

template <typename S>
std::vector<S> normalize_gaps(std::vector<S> x)
{
    if (x.empty()) throw ValidationError("empty gap vector");
    S sum(0);
    for (const auto &v : x) {
        if (!(v > 0)) throw ValidationError("gaps must be positive");
        sum += v;
    }
    for (auto &v : x) v /= sum;
    return x;
}

template <typename S>
YMatrix<S> y_vectors(const std::vector<S> &gaps, const Rational &alpha)
{
    const auto x = normalize_gaps(gaps);
    const std::size_t n = x.size() + 1;
    const auto qm = q_matrix(config_from_gaps(x, alpha));
    YMatrix<S> ym{DenseMatrix<S>(n - 1, n), std::vector<S>(n, S(0)), DenseMatrix<S>(n - 1, n)};
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i + 1 < n; ++i) ym.y(i, k) = qm(i, k) - qm(i + 1, k);
        ym.col_sums[k] = qm(0, k) + qm(k, n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) ym.projected(i, k) = ym.y(i, k) / ym.col_sums[k];
    }
    return ym;
}

// Is x in the open convex hull of the p(Y_k)? Tested facet by facet: x lies
// inside the simplex omitting column j iff C_j w = x has w > 0. Points that
// only touch facet boundaries, or where every C_j is singular, are decided by
// the direct method.
template <typename S>
FeasibilityResult<S> hull_membership(const std::vector<S> &gaps, const Rational &alpha)
{
    const auto x = normalize_gaps(gaps);
    const std::size_t n = x.size() + 1;
    const auto ym = y_vectors(x, alpha);
    FeasibilityResult<S> r;
    bool touches = false;
    S tol(0);
    if constexpr (is_float_v<S>) tol = S(float_tolerance);
    for (std::size_t j = 0; j < n; ++j) {
        DenseMatrix<S> c(n - 1, n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t k = 0, col = 0; k < n; ++k)
                if (k != j) c(i, col++) = ym.projected(i, k);
        auto w = solve_linear(c, x);
        if (!w) {
            ++r.singular_facets;
            continue;
        }
        const S wmin = *std::min_element(w->begin(), w->end());
        if (wmin > tol) {
            if (r.facets.empty()) r.weights = *w;
            r.facets.push_back(j + 1);
        } else if (wmin >= -tol) {
            touches = true;
        }
    }
    if (!r.facets.empty()) {
        r.feasible = true;
        return r;
    }
    if (touches || r.singular_facets == n) {
        auto direct = solve_positive_direct(config_from_gaps(x, alpha));
        direct.singular_facets = r.singular_facets;
        direct.used_direct = true;
        return direct;
    }
    r.reason = "x is outside the convex hull of the projected columns";
    return r;
}

// Some 2 <= j <= n-2 (1-based) has 2 x_j > sum of all gaps.
template <typename S>
std::optional<std::size_t> exclusion_index(const std::vector<S> &gaps)
{
    S sum(0);
    for (const auto &v : gaps) sum += v;
    // In floating point a gap of exactly half the span must not round into the region.
    S bound = sum;
    if constexpr (is_float_v<S>) bound *= 1 + float_tolerance;
    for (std::size_t j = 2; j + 1 <= gaps.size(); ++j)
        if (S(2) * gaps[j - 1] > bound) return j;
    return std::nullopt;
}

template <typename S>
bool quick_exclusion(const std::vector<S> &gaps)
{
    return exclusion_index(gaps).has_value();
}

template <typename S>
bool quick_exclusion(const CollinearConfig<S> &cfg)
{
    return quick_exclusion(gap_coords(cfg).x);
}

struct RegionRow {
    std::vector<std::uint32_t> k; // grid indices
    bool member = false;
    bool excluded = false;
    std::vector<std::size_t> facets;
    bool direct = false;
    std::string c_lo, c_hi; // formatted; empty when unbounded/infeasible
    std::vector<std::string> x;
};

struct RegionScan {
    std::size_t n;
    Rational alpha;
    std::size_t resolution;
    bool exact;
    std::vector<RegionRow> rows;
};

// Interior grid of the simplex: x_i = (k_i + 1) / (R + n - 1), k_i >= 0,
// sum k_i = R, in lexicographic order of k.
inline std::vector<std::vector<std::uint32_t>> simplex_grid(std::size_t dims, std::size_t resolution)
{
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> k(dims, 0);
    auto rec = [&](auto &self, std::size_t i, std::size_t left) -> void {
        if (i + 1 == dims) {
            k[i] = static_cast<std::uint32_t>(left);
            out.push_back(k);
            return;
        }
        for (std::size_t v = 0; v <= left; ++v) {
            k[i] = static_cast<std::uint32_t>(v);
            self(self, i + 1, left - v);
        }
    };
    rec(rec, 0, resolution);
    return out;
}

namespace detail
{

template <typename S>
RegionRow evaluate_point(const std::vector<std::uint32_t> &k, std::size_t resolution, const Rational &alpha)
{
    const std::size_t dims = k.size();
    const long den = static_cast<long>(resolution + dims);
    RegionRow row;
    row.k = k;
    std::vector<S> x;
    for (auto ki : k) {
        Rational v(static_cast<long>(ki) + 1, den);
        v.canonicalize();
        x.push_back(from_rational<S>(v));
        row.x.push_back(format_scalar(x.back()));
    }
    row.excluded = quick_exclusion(x);
    auto hull = hull_membership(x, alpha);
    row.member = hull.feasible;
    row.facets = hull.facets;
    auto direct = hull.used_direct ? hull : solve_positive_direct(config_from_gaps(x, alpha));
    row.direct = direct.feasible;
    if (direct.feasible) {
        if (direct.c_lo) row.c_lo = format_scalar(*direct.c_lo);
        if (direct.c_hi) row.c_hi = format_scalar(*direct.c_hi);
    }
    return row;
}

} // namespace detail

template <typename S>
RegionScan scan_region(std::size_t n, const Rational &alpha, std::size_t resolution, unsigned workers = 1)
{
    if (n != 4 && n != 5) throw ValidationError("region scan supports n = 4 and n = 5");
    if (resolution < 2) throw ValidationError("resolution must be at least 2");
    if (alpha <= 0) throw ValidationError("alpha must be positive");
    if constexpr (!is_float_v<S>) {
        if (!exact_alpha(alpha)) throw ValidationError("exact scan needs an integer alpha");
    }
    const auto grid = simplex_grid(n - 1, resolution);
    RegionScan scan{n, alpha, resolution, !is_float_v<S>, std::vector<RegionRow>(grid.size())};
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(grid.size())));
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < grid.size(); i += workers)
            scan.rows[i] = detail::evaluate_point<S>(grid[i], resolution, alpha);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto &t : pool) t.join();
    }
    return scan;
}

inline void write_region_csv(std::ostream &os, const RegionScan &scan)
{
    for (std::size_t i = 1; i < scan.n; ++i) os << 'x' << i << ',';
    os << "member,excluded,facets,feasible_direct,c_lo,c_hi\n";
    for (const auto &r : scan.rows) {
        for (const auto &x : r.x) os << x << ',';
        os << (r.member ? "true" : "false") << ',' << (r.excluded ? "true" : "false") << ',';
        for (std::size_t f = 0; f < r.facets.size(); ++f) os << (f ? ";" : "") << r.facets[f];
        os << ',' << (r.direct ? "true" : "false") << ',' << r.c_lo << ',' << r.c_hi << '\n';
    }
}

// Static raster of an n = 4 scan in the (x1, x2) plane.
inline void write_region_svg(std::ostream &os, const RegionScan &scan)
{
    if (scan.n != 4) throw ValidationError("SVG output is available for n = 4 only");
    const double size = 600, cell = size / static_cast<double>(scan.resolution + 3);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<polygon points=\"0," << size << ' ' << size << ',' << size << " 0,0\" fill=\"none\" stroke=\"black\"/>\n";
    const double den = static_cast<double>(scan.resolution + 3);
    for (const auto &r : scan.rows) {
        const char *fill = r.member ? "#3b6ea5" : (r.excluded ? "#d9a441" : "#e6e6e6");
        const double x1 = (r.k[0] + 1) / den, x2 = (r.k[1] + 1) / den;
        os << "<rect x=\"" << x1 * size - cell / 2 << "\" y=\"" << size - x2 * size - cell / 2 << "\" width=\""
           << cell << "\" height=\"" << cell << "\" fill=\"" << fill << "\"/>\n";
    }
    os << "</svg>\n";
}

} // namespace pfaffcc

#endif
