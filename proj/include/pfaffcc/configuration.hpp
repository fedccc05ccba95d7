#ifndef PFAFFCC_CONFIGURATION_HPP
#define PFAFFCC_CONFIGURATION_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "polynomial.hpp"
#include "scalar.hpp"

namespace pfaffcc
{

// Positions q1 > q2 > ... > qn on a line and the homogeneity exponent alpha
// of the 1/r^alpha potential.
template <typename S>
struct CollinearConfig {
    std::vector<S> q;
    Rational alpha;

    std::size_t size() const { return q.size(); }
};

template <typename S>
CollinearConfig<S> make_config(std::vector<S> q, const Rational &alpha)
{
    if (alpha <= 0) throw ValidationError("alpha must be positive");
    if (q.size() < 2) throw ValidationError("a configuration needs at least two points");
    for (const auto &x : q) {
        if constexpr (is_float_v<S>) {
            if (!std::isfinite(x)) throw ValidationError("positions must be finite");
        }
    }
    for (std::size_t i = 0; i + 1 < q.size(); ++i)
        if (!(q[i] > q[i + 1])) throw ValidationError("positions are not strictly decreasing");
    return CollinearConfig<S>{std::move(q), alpha};
}

// Comma-separated positions, each a decimal or p/q rational.
inline std::vector<Rational> parse_positions(std::string_view text)
{
    std::vector<Rational> out;
    std::size_t start = 0;
    while (true) {
        auto comma = text.find(',', start);
        auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_rational(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline CollinearConfig<Rational> parse_config(std::string_view positions, std::string_view alpha)
{
    return make_config(parse_positions(positions), parse_rational(alpha));
}

inline CollinearConfig<double> to_float(const CollinearConfig<Rational> &c)
{
    std::vector<double> q;
    q.reserve(c.size());
    for (const auto &x : c.q) q.push_back(x.get_d());
    return CollinearConfig<double>{std::move(q), c.alpha};
}

// Exact arithmetic is available when alpha is an integer.
inline bool exact_alpha(const Rational &alpha) { return is_integer(alpha); }

// |d|^(-alpha-1) for a positive distance d.
template <typename S>
S inverse_power(const S &d, const Rational &alpha)
{
    if constexpr (std::is_same_v<S, Rational>) {
        if (!exact_alpha(alpha)) throw ValidationError("exact arithmetic needs an integer alpha");
        return pow_int(d, -(alpha.get_num().get_si() + 1));
    } else {
        return std::pow(d, -(alpha.get_d() + 1.0));
    }
}

// Q_ij = (q_i - q_j)|q_i - q_j|^(-alpha-2), i.e. q_ij^(-alpha-1) above the diagonal.
template <typename S>
SkewMatrix<S> q_matrix(const CollinearConfig<S> &cfg)
{
    const std::size_t n = cfg.size();
    SkewMatrix<S> m(n, S(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, inverse_power<S>(S(cfg.q[i] - cfg.q[j]), cfg.alpha));
    return m;
}

template <typename S>
struct GapCoords {
    S x0;             // centroid (1/n) sum q_i
    std::vector<S> x; // consecutive gaps q_j - q_{j+1}
};

template <typename S>
GapCoords<S> gap_coords(const CollinearConfig<S> &cfg)
{
    GapCoords<S> g{S(0), {}};
    for (const auto &v : cfg.q) g.x0 += v;
    g.x0 /= S(static_cast<long>(cfg.size()));
    for (std::size_t j = 0; j + 1 < cfg.size(); ++j) g.x.push_back(cfg.q[j] - cfg.q[j + 1]);
    return g;
}

// B with q = B (x0, x1, ..., x_{n-1}); column 0 is all ones and
// column j > 0 holds 1 - j/n on rows i <= j (1-based) and -j/n below.
inline DenseMatrix<Rational> b_matrix(std::size_t n)
{
    if (n < 2) throw ValidationError("b_matrix needs n >= 2");
    DenseMatrix<Rational> b(n, n);
    for (std::size_t i = 1; i <= n; ++i) {
        b(i - 1, 0) = 1;
        for (std::size_t j = 1; j < n; ++j) {
            Rational frac(static_cast<long>(j), static_cast<long>(n));
            frac.canonicalize();
            b(i - 1, j) = i <= j ? Rational(1 - frac) : Rational(-frac);
        }
    }
    return b;
}

// B^{-1}: first row 1/n, then the difference stencil rows e_i - e_{i+1}.
inline DenseMatrix<Rational> b_inverse(std::size_t n)
{
    if (n < 2) throw ValidationError("b_inverse needs n >= 2");
    DenseMatrix<Rational> m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        m(0, j) = Rational(1, static_cast<unsigned long>(n));
        m(0, j).canonicalize();
    }
    for (std::size_t i = 1; i < n; ++i) {
        m(i, i - 1) = 1;
        m(i, i) = -1;
    }
    return m;
}

template <typename S>
std::vector<S> positions_from_gaps(const GapCoords<S> &g)
{
    const std::size_t n = g.x.size() + 1;
    auto b = b_matrix(n);
    std::vector<S> coords;
    coords.push_back(g.x0);
    coords.insert(coords.end(), g.x.begin(), g.x.end());
    std::vector<S> q(n, S(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q[i] += from_rational<S>(b(i, j)) * coords[j];
    return q;
}

// Configuration with the given positive gaps and q_n = 0.
template <typename S>
CollinearConfig<S> config_from_gaps(const std::vector<S> &x, const Rational &alpha)
{
    std::vector<S> q(x.size() + 1, S(0));
    for (std::size_t i = x.size(); i-- > 0;) q[i] = q[i + 1] + x[i];
    return make_config(std::move(q), alpha);
}

// Translate so q_n = 0 and scale so q_1 - q_n = 1.
template <typename S>
CollinearConfig<S> normalized(const CollinearConfig<S> &cfg)
{
    const S lo = cfg.q.back();
    const S span = cfg.q.front() - lo;
    CollinearConfig<S> out = cfg;
    for (auto &v : out.q) v = (v - lo) / span;
    return out;
}

// q~_j = -1/(q_j - q_n), j < n.
template <typename S>
CollinearConfig<S> crisscross(const CollinearConfig<S> &cfg)
{
    const std::size_t n = cfg.size();
    if (n < 3) throw ValidationError("crisscross needs at least three points");
    std::vector<S> t;
    t.reserve(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) t.push_back(S(-1) / S(cfg.q[j] - cfg.q[n - 1]));
    return make_config(std::move(t), cfg.alpha);
}

// Scalars linking Q m_hat + c_hat L = q to the central configuration equation
// lambda m_j (q_j - q0) = -alpha sum_k m_j m_k Q_jk with q0 the centre of mass.
template <typename S>
struct InverseSolutionScalars {
    S lambda;              // negative whenever the masses are positive
    S c_hat;               // translation, equal to the centre of mass
    std::vector<S> m_hat;  // masses scaled by -alpha / lambda
    std::vector<S> masses; // physical masses
};

// Physical masses t * m_hat with lambda = -alpha * t.
template <typename S>
InverseSolutionScalars<S> physical_from_linear(const std::vector<S> &m_hat, const S &c_hat, const Rational &alpha,
                                              const S &t = S(1))
{
    InverseSolutionScalars<S> r{S(-from_rational<S>(alpha) * t), c_hat, m_hat, {}};
    for (const auto &m : m_hat) r.masses.push_back(t * m);
    return r;
}

// m_hat = -(alpha / lambda) m and c_hat = centre of mass.
template <typename S>
InverseSolutionScalars<S> linear_from_physical(const CollinearConfig<S> &cfg, const std::vector<S> &m,
                                              const S &lambda)
{
    if (!(lambda < 0)) throw ValidationError("lambda must be negative");
    InverseSolutionScalars<S> r{lambda, S(0), {}, m};
    S total(0);
    for (std::size_t k = 0; k < m.size(); ++k) {
        r.c_hat += m[k] * cfg.q[k];
        total += m[k];
    }
    r.c_hat /= total;
    const S scale = -from_rational<S>(cfg.alpha) / lambda;
    for (const auto &mk : m) r.m_hat.push_back(scale * mk);
    return r;
}

// max_j |lambda m_j (q_j - q0) + alpha sum_k m_j m_k Q_jk|
template <typename S>
S central_residual(const CollinearConfig<S> &cfg, const std::vector<S> &m, const S &lambda)
{
    const std::size_t n = cfg.size();
    const auto q = q_matrix(cfg);
    S total(0), q0(0);
    for (std::size_t k = 0; k < n; ++k) {
        q0 += m[k] * cfg.q[k];
        total += m[k];
    }
    q0 /= total;
    const S a = from_rational<S>(cfg.alpha);
    S worst(0);
    for (std::size_t j = 0; j < n; ++j) {
        S r = lambda * m[j] * (cfg.q[j] - q0);
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) r += a * m[j] * m[k] * q(j, k);
        worst = std::max<S>(worst, abs_of(r));
    }
    return worst;
}

// Sum of gap variables lo..hi-1 (0-based); an empty range stands for the constant 1.
struct LinearForm {
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool is_one() const { return lo == hi; }
    std::size_t width() const { return hi - lo; }
};

// The distance forms q_ab of a denominator-cleared matrix: for every pair
// a < b, the linear form in gap variables standing for q_a - q_b.
class DistanceForms
{
public:
    DistanceForms(std::size_t order, std::size_t nvars, std::vector<LinearForm> upper)
        : m_order(order), m_nvars(nvars), m_upper(std::move(upper))
    {
    }

    std::size_t order() const { return m_order; }
    std::size_t nvars() const { return m_nvars; }
    const LinearForm &form(std::size_t a, std::size_t b) const
    {
        if (a > b) std::swap(a, b);
        return m_upper[a * (2 * m_order - a - 1) / 2 + (b - a - 1)];
    }

    SparsePoly form_poly(std::size_t a, std::size_t b) const
    {
        const auto &f = form(a, b);
        if (f.is_one()) return SparsePoly::constant(m_nvars, 1);
        return SparsePoly::variable_range(m_nvars, f.lo, f.hi);
    }

    // Forms multiplied together in entry (i, j): every pair meeting {i, j}
    // other than (i, j) itself.
    std::vector<LinearForm> entry_factors(std::size_t i, std::size_t j) const
    {
        std::vector<LinearForm> out;
        for (std::size_t a = 0; a < m_order; ++a)
            for (std::size_t b = a + 1; b < m_order; ++b) {
                bool meets = a == i || a == j || b == i || b == j;
                if (meets && !(a == std::min(i, j) && b == std::max(i, j))) out.push_back(form(a, b));
            }
        return out;
    }

    SparsePoly entry_poly(std::size_t i, std::size_t j) const
    {
        SparsePoly p = SparsePoly::constant(m_nvars, 1);
        for (const auto &f : entry_factors(i, j))
            if (!f.is_one()) p = p * SparsePoly::variable_range(m_nvars, f.lo, f.hi);
        return p;
    }

    SkewMatrix<SparsePoly> matrix() const
    {
        SkewMatrix<SparsePoly> m(m_order, SparsePoly(m_nvars));
        for (std::size_t i = 0; i < m_order; ++i)
            for (std::size_t j = i + 1; j < m_order; ++j) m.set(i, j, entry_poly(i, j));
        return m;
    }

private:
    std::size_t m_order;
    std::size_t m_nvars;
    std::vector<LinearForm> m_upper;
};

enum class Variant { P, PTilde };

inline std::string to_string(Variant v) { return v == Variant::P ? "p" : "ptilde"; }

inline Variant parse_variant(std::string_view s)
{
    if (s == "p" || s == "P") return Variant::P;
    if (s == "ptilde" || s == "p~" || s == "PTilde" || s == "pt") return Variant::PTilde;
    throw ValidationError("unknown variant '" + std::string(s) + "' (expected p or ptilde)");
}

// q_ab = x_a + ... + x_{b-1} in the n-1 gap variables.
inline DistanceForms p_forms(std::size_t n)
{
    if (n < 4 || n % 2 != 0) throw ValidationError("P matrix needs even n >= 4");
    std::vector<LinearForm> up;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) up.push_back({a, b});
    return DistanceForms(n, n - 1, std::move(up));
}

// Bordered crisscross matrix of order n: q~_ab = x~_a + ... + x~_{b-1} for
// b < n in the n-2 variables x~, and q~_an = 1 on the border.
inline DistanceForms p_tilde_forms(std::size_t n)
{
    if (n < 4 || n % 2 != 0) throw ValidationError("P~ matrix needs even n >= 4");
    std::vector<LinearForm> up;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) up.push_back(b + 1 == n ? LinearForm{0, 0} : LinearForm{a, b});
    return DistanceForms(n, n - 2, std::move(up));
}

inline DistanceForms distance_forms(std::size_t n, Variant v)
{
    return v == Variant::P ? p_forms(n) : p_tilde_forms(n);
}

inline SkewMatrix<SparsePoly> p_matrix_symbolic(std::size_t n) { return p_forms(n).matrix(); }
inline SkewMatrix<SparsePoly> p_tilde_matrix_symbolic(std::size_t n) { return p_tilde_forms(n).matrix(); }

} // namespace pfaffcc

#endif
