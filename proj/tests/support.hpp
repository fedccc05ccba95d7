#ifndef PFAFFCC_TESTS_SUPPORT_HPP
#define PFAFFCC_TESTS_SUPPORT_HPP

#include <pfaffcc/pfaffcc.hpp>

#include <random>
#include <vector>

namespace support
{

using namespace pfaffcc;
using Rng = std::mt19937_64;

inline long uniform_int(Rng &g, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(g); }

inline Rational random_rational(Rng &g, long bound = 20, long den_bound = 9)
{
    Rational r(uniform_int(g, -bound, bound), static_cast<unsigned long>(uniform_int(g, 1, den_bound)));
    r.canonicalize();
    return r;
}

inline Rational random_positive(Rng &g, long bound = 20, long den_bound = 9)
{
    Rational r(uniform_int(g, 1, bound), static_cast<unsigned long>(uniform_int(g, 1, den_bound)));
    r.canonicalize();
    return r;
}

inline SkewMatrix<Rational> random_skew(std::size_t n, Rng &g)
{
    SkewMatrix<Rational> a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a.set(i, j, random_rational(g));
    return a;
}

inline std::vector<Rational> random_gaps(std::size_t count, Rng &g)
{
    std::vector<Rational> x;
    for (std::size_t i = 0; i < count; ++i) x.push_back(random_positive(g));
    return x;
}

// Ordered positions from random positive gaps and a random shift.
inline CollinearConfig<Rational> random_config(std::size_t n, const Rational &alpha, Rng &g)
{
    auto cfg = config_from_gaps(random_gaps(n - 1, g), alpha);
    const Rational shift = random_rational(g);
    for (auto &q : cfg.q) q += shift;
    return cfg;
}

inline CollinearConfig<double> random_config_float(std::size_t n, double alpha, Rng &g)
{
    std::uniform_real_distribution<double> gap(0.05, 1.0), shift(-1.0, 1.0);
    std::vector<double> q(n);
    q[n - 1] = shift(g);
    for (std::size_t i = n - 1; i-- > 0;) q[i] = q[i + 1] + gap(g);
    Rational a;
    a = alpha;
    return make_config(q, a);
}

// Uniform-ish rational point in the open simplex of the given dimension.
inline std::vector<Rational> random_simplex_rational(std::size_t dims, Rng &g)
{
    auto x = random_gaps(dims, g);
    return normalize_gaps(x);
}

inline std::vector<double> random_simplex_double(std::size_t dims, Rng &g)
{
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x(dims);
    for (auto &v : x) v = e(g) + 1e-6;
    return normalize_gaps(x);
}

inline SparsePoly random_poly(std::size_t nvars, Rng &g, std::size_t max_terms = 6, unsigned max_exp = 4)
{
    std::vector<SparsePoly::Term> terms;
    const auto count = static_cast<std::size_t>(uniform_int(g, 0, static_cast<long>(max_terms)));
    std::vector<unsigned> e(nvars);
    for (std::size_t t = 0; t < count; ++t) {
        for (auto &x : e) x = static_cast<unsigned>(uniform_int(g, 0, max_exp));
        terms.push_back({Monomial::from_exponents(e), Integer(uniform_int(g, -50, 50))});
    }
    return SparsePoly::from_terms(nvars, std::move(terms));
}

} // namespace support

#endif
