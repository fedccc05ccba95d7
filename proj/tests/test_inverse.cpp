#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "support.hpp"

using namespace pfaffcc;

namespace
{

std::vector<Rational> rationals(std::initializer_list<const char *> xs)
{
    std::vector<Rational> out;
    for (const char *x : xs) out.push_back(parse_rational(x));
    return out;
}

// Orthogonal projection onto sum = 0.
std::vector<Rational> centred(std::vector<Rational> v)
{
    Rational mean = 0;
    for (const auto &x : v) mean += x;
    mean /= static_cast<long>(v.size());
    for (auto &x : v) x -= mean;
    return v;
}

template <typename S>
bool all_positive(const std::vector<S> &v)
{
    return std::all_of(v.begin(), v.end(), [](const S &x) { return x > 0; });
}

} // namespace

TEST(RealMasses, TwoBodyFamily)
{
    const auto sol = solve_real_masses(parse_config("1/2,-1/2", "1"));
    EXPECT_TRUE(sol.even);
    for (const Rational c : {Rational(0), Rational(1, 3), Rational(-2)}) {
        const auto m = sol.masses(c);
        EXPECT_EQ(sol.c(c), c);
        EXPECT_EQ(m[0], Rational(1, 2) + c);
        EXPECT_EQ(m[1], Rational(1, 2) - c);
    }
}

TEST(RealMasses, EquallySpacedFourBodyResidual)
{
    const auto cfg = parse_config("3,2,1,0", "1");
    const auto sol = solve_real_masses(cfg);
    for (const Rational c : {Rational(0), Rational(7, 5), Rational(-3)})
        EXPECT_EQ(residual(cfg, sol.masses(c), sol.c(c)), 0);
}

TEST(RealMasses, EvenFamilyHoldsIdenticallyInC)
{
    support::Rng g(1);
    for (std::size_t n : {2u, 4u, 6u}) {
        for (int trial = 0; trial < 30; ++trial) {
            const auto cfg = support::random_config(n, support::uniform_int(g, 1, 3), g);
            const auto sol = solve_real_masses(cfg);
            const Rational c = support::random_rational(g);
            ASSERT_EQ(residual(cfg, sol.masses(c), sol.c(c)), 0);
        }
    }
}

TEST(RealMasses, OddFamilyHasFixedTranslation)
{
    support::Rng g(2);
    for (std::size_t n : {3u, 5u, 7u}) {
        for (int trial = 0; trial < 30; ++trial) {
            const auto cfg = support::random_config(n, support::uniform_int(g, 1, 3), g);
            const auto sol = solve_real_masses(cfg);
            EXPECT_FALSE(sol.even);
            EXPECT_EQ(sol.c1, 0);
            const Rational s = support::random_rational(g);
            ASSERT_EQ(residual(cfg, sol.masses(s), sol.c(s)), 0);

            // dir spans the kernel of Q.
            const auto q = q_matrix(cfg);
            for (std::size_t i = 0; i < n; ++i) {
                Rational row = 0;
                for (std::size_t k = 0; k < n; ++k) row += q(i, k) * sol.dir[k];
                ASSERT_EQ(row, 0);
            }
        }
    }
}

TEST(RealMasses, ProjectedForceEqualsProjectedPositions)
{
    support::Rng g(3);
    for (std::size_t n : {3u, 4u, 5u, 6u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto cfg = support::random_config(n, 1, g);
            const auto sol = solve_real_masses(cfg);
            const auto m = sol.masses(support::random_rational(g));
            const auto qm = DenseMatrix<Rational>::from_skew(q_matrix(cfg)) * m;
            ASSERT_EQ(centred(qm), centred(cfg.q));
        }
    }
}

TEST(DirectFeasibility, TwoBodyInterval)
{
    const auto r = solve_positive_direct(parse_config("0.5,-0.5", "1"));
    ASSERT_TRUE(r.feasible);
    EXPECT_EQ(*r.c_lo, Rational(-1, 2));
    EXPECT_EQ(*r.c_hi, Rational(1, 2));
    EXPECT_EQ(r.masses, (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
}

TEST(DirectFeasibility, CentralGapTooWide)
{
    const auto r = solve_positive_direct(parse_config("1,0.8,0.2,0", "1"));
    EXPECT_FALSE(r.feasible);
    EXPECT_FALSE(r.reason.empty());
}

TEST(DirectFeasibility, ThreeBodyUniqueTranslation)
{
    const auto cfg = parse_config("3,2,1", "1");
    const auto r = solve_positive_direct(cfg);
    ASSERT_TRUE(r.feasible);
    EXPECT_EQ(*r.c, 2);
    EXPECT_EQ(*r.c_lo, 2);
    EXPECT_EQ(*r.c_hi, 2);
    EXPECT_TRUE(all_positive(r.masses));
    EXPECT_EQ(residual(cfg, r.masses, *r.c), 0);
}

TEST(DirectFeasibility, WitnessesSolveTheSystem)
{
    support::Rng g(4);
    int feasible = 0;
    for (std::size_t n : {3u, 4u, 5u, 6u}) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto cfg = support::random_config(n, support::uniform_int(g, 1, 2), g);
            const auto r = solve_positive_direct(cfg);
            if (!r.feasible) continue;
            ++feasible;
            ASSERT_TRUE(all_positive(r.masses));
            ASSERT_EQ(residual(cfg, r.masses, *r.c), 0);
        }
    }
    EXPECT_GT(feasible, 50);

    for (int trial = 0; trial < 200; ++trial) {
        const auto cfg = support::random_config_float(4, 0.5, g);
        const auto r = solve_positive_direct(cfg);
        if (!r.feasible) continue;
        double scale = 0;
        for (double q : cfg.q) scale = std::max(scale, std::fabs(q));
        ASSERT_TRUE(all_positive(r.masses));
        ASSERT_LE(residual(cfg, r.masses, *r.c), 1e-9 * scale);
    }
}

TEST(DirectFeasibility, BoundaryIsNotFeasible)
{
    // m = base + s * dir
    const auto half_line = positive_masses(RealMassSolution<Rational>{{1, 0}, {0, 1}, 0, 1, true});
    EXPECT_TRUE(half_line.feasible);
    EXPECT_EQ(*half_line.c_lo, 0);
    EXPECT_FALSE(half_line.c_hi.has_value());

    const auto zero_mass = positive_masses(RealMassSolution<Rational>{{0, 1}, {0, 1}, 0, 1, true});
    EXPECT_FALSE(zero_mass.feasible);
    EXPECT_TRUE(zero_mass.boundary);

    const auto single_point = positive_masses(RealMassSolution<Rational>{{-1, 1}, {1, -1}, 0, 1, true});
    EXPECT_FALSE(single_point.feasible);
    EXPECT_TRUE(single_point.boundary);

    const auto empty = positive_masses(RealMassSolution<Rational>{{-2, 1}, {1, -1}, 0, 1, true});
    EXPECT_FALSE(empty.feasible);
    EXPECT_FALSE(empty.boundary);

    const auto negative = positive_masses(RealMassSolution<Rational>{{-1, 1}, {0, 1}, 0, 1, true});
    EXPECT_FALSE(negative.feasible);
    EXPECT_FALSE(negative.boundary);
}

TEST(YVectors, ThreeBodyMatrix)
{
    const auto ym = y_vectors(rationals({"1/3", "2/3"}), Rational(1));
    const std::vector<std::vector<Rational>> want{{9, 9, Rational(-5, 4)}, {-8, Rational(9, 4), Rational(9, 4)}};
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(ym.y(i, k), want[i][k]) << i << "," << k;
    EXPECT_EQ(ym.col_sums[0], 1);
    EXPECT_EQ(ym.col_sums[2], 1);
}

TEST(YVectors, ColumnSumsAndProjection)
{
    support::Rng g(5);
    for (std::size_t n : {3u, 4u, 5u, 6u, 7u}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto x = support::random_simplex_rational(n - 1, g);
            const Rational alpha = support::uniform_int(g, 1, 3);
            const auto ym = y_vectors(x, alpha);
            const auto q = q_matrix(config_from_gaps(x, alpha));
            for (std::size_t k = 0; k < n; ++k) {
                Rational sum = 0, psum = 0;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    sum += ym.y(i, k);
                    psum += ym.projected(i, k);
                }
                ASSERT_EQ(sum, q(0, k) + q(k, n - 1));
                ASSERT_GT(sum, 0);
                ASSERT_EQ(psum, 1);
            }
        }
    }
    EXPECT_THROW(y_vectors(rationals({"1/2", "0", "1/2"}), Rational(1)), ValidationError);
}

TEST(HullMembership, KnownExamples)
{
    EXPECT_FALSE(hull_membership(rationals({"1/5", "3/5", "1/5"}), Rational(1)).feasible);
    const auto in = hull_membership(rationals({"3/5", "1/5", "1/5"}), Rational(1));
    ASSERT_TRUE(in.feasible);
    EXPECT_EQ(in.facets, (std::vector<std::size_t>{3, 4}));
    EXPECT_TRUE(all_positive(in.weights));

    support::Rng g(6);
    for (int trial = 0; trial < 200; ++trial) {
        const auto r = hull_membership(support::random_simplex_rational(2, g), Rational(support::uniform_int(g, 1, 3)));
        ASSERT_TRUE(r.feasible);
        ASSERT_NE(std::find(r.facets.begin(), r.facets.end(), 2u), r.facets.end());
    }
}

TEST(HullMembership, AgreesWithDirectMethod)
{
    support::Rng g(7);
    std::map<std::pair<std::size_t, int>, int> members;
    for (std::size_t n : {2u, 4u, 5u, 6u}) {
        for (long alpha : {1L, 2L}) {
            for (int trial = 0; trial < 150; ++trial) {
                const auto x = support::random_simplex_rational(n - 1, g);
                const auto hull = hull_membership(x, Rational(alpha));
                const auto direct = solve_positive_direct(config_from_gaps(x, Rational(alpha)));
                ASSERT_EQ(hull.feasible, direct.feasible) << "n = " << n;
                members[{n, static_cast<int>(alpha)}] += hull.feasible;
            }
        }
        for (int trial = 0; trial < 150; ++trial) {
            const auto x = support::random_simplex_double(n - 1, g);
            const auto hull = hull_membership(x, Rational(1, 2));
            const auto direct = solve_positive_direct(config_from_gaps(x, Rational(1, 2)));
            ASSERT_EQ(hull.feasible, direct.feasible) << "n = " << n;
        }
    }
    // Both verdicts occur, so the comparison is not vacuous.
    EXPECT_GT((members[{4, 1}]), 0);
    EXPECT_LT((members[{4, 1}]), 150);
}

TEST(HullMembership, BarycentricSignsWhenFirstGapDominates)
{
    support::Rng g(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
        Rational a;
        a = alpha;
        for (int trial = 0; trial < 200; ++trial) {
            const double x1 = 0.5 + 0.5 * (0.001 + 0.998 * u(g));
            const double x2 = (1 - x1) * (0.001 + 0.998 * u(g));
            const double x3 = 1 - x1 - x2;
            const auto ym = y_vectors(std::vector<double>{x1, x2, x3}, a);
            auto bary = [&](std::size_t k) {
                return std::array<double, 3>{2 * ym.projected(0, k) - 1, 2 * ym.projected(1, k),
                                             2 * ym.projected(2, k)};
            };
            const auto y1 = bary(0), y2 = bary(1), y4 = bary(3);
            ASSERT_TRUE(y1[0] > 0 && y1[1] < 0 && y1[2] < 0);
            ASSERT_TRUE(y2[0] < 0 && y2[1] > 0 && y2[2] < 0);
            ASSERT_TRUE(y4[0] < 0 && y4[1] < 0 && y4[2] > 0);
            ASSERT_TRUE(hull_membership(std::vector<double>{x1, x2, x3}, a).feasible);
        }
    }
}

TEST(HullMembership, InequalitiesWhenFirstGapDominates)
{
    support::Rng g(9);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
        const double e = -alpha - 1;
        for (int trial = 0; trial < 500; ++trial) {
            const double x1 = 0.5 + 0.5 * u(g);
            const double x2 = (1 - x1) * u(g);
            const double x3 = 1 - x1 - x2;
            ASSERT_LT(std::pow(x1 + x2, e), std::pow(x1, e));
            ASSERT_LT(std::pow(x2 + x3, e), std::pow(x3, e));
            ASSERT_GT(std::pow(x2 + x3, e), 1.0);
            ASSERT_LT(std::pow(x1, e) - std::pow(1 - x1, e), 0.0);
        }
    }
}

TEST(HullMembership, WideMiddleGapIsOutside)
{
    support::Rng g(10);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (double alpha : {0.5, 1.0, 2.0}) {
        Rational a;
        a = alpha;
        for (int trial = 0; trial < 200; ++trial) {
            const double x2 = 0.5 + 0.5 * u(g);
            const double x1 = (1 - x2) * u(g);
            const std::vector<double> x{x1, x2, 1 - x1 - x2};
            const auto ym = y_vectors(x, a);
            for (std::size_t k = 0; k < 4; ++k) ASSERT_LT(ym.projected(1, k), 0.5);
            ASSERT_FALSE(hull_membership(x, a).feasible);
        }
    }
}

TEST(Exclusion, Examples)
{
    EXPECT_EQ(exclusion_index(std::vector<double>{0.1, 0.6, 0.1, 0.2}), std::optional<std::size_t>(2));
    EXPECT_FALSE(quick_exclusion(std::vector<double>{0.6, 0.2, 0.2}));
    EXPECT_FALSE(quick_exclusion(std::vector<double>{0.1, 0.9}));
    EXPECT_FALSE(quick_exclusion(std::vector<double>{0.9}));
    EXPECT_TRUE(quick_exclusion(parse_config("1,0.8,0.2,0", "1")));
    // Scale does not matter.
    EXPECT_TRUE(quick_exclusion(std::vector<Rational>{1, 6, 1, 2}));
}

TEST(Exclusion, ExcludedPointsAreInfeasible)
{
    support::Rng g(11);
    int excluded = 0;
    for (std::size_t n : {4u, 5u, 6u}) {
        for (int trial = 0; trial < 300; ++trial) {
            const auto x = support::random_simplex_rational(n - 1, g);
            if (!quick_exclusion(x)) continue;
            ++excluded;
            ASSERT_FALSE(solve_positive_direct(config_from_gaps(x, Rational(1))).feasible);
            ASSERT_FALSE(hull_membership(x, Rational(2)).feasible);
        }
    }
    EXPECT_GT(excluded, 20);
}

TEST(RegionScan, GridDefinition)
{
    const auto grid = simplex_grid(3, 2);
    ASSERT_EQ(grid.size(), 6u);
    EXPECT_EQ(grid.front(), (std::vector<std::uint32_t>{0, 0, 2}));
    EXPECT_EQ(grid.back(), (std::vector<std::uint32_t>{2, 0, 0}));
    EXPECT_EQ(simplex_grid(4, 50).size(), 23426u);
}

TEST(RegionScan, SmallestGridIsFullyPopulated)
{
    const auto scan = scan_region<Rational>(4, Rational(1), 2);
    std::ostringstream os;
    write_region_csv(os, scan);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x1,x2,x3,member,excluded,facets,feasible_direct,c_lo,c_hi");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
    }
    EXPECT_EQ(rows, 6);
    EXPECT_EQ(scan.rows.front().x, (std::vector<std::string>{"1/5", "1/5", "3/5"}));
}

TEST(RegionScan, SymmetricAndDominatedRegion)
{
    const std::size_t res = 40;
    const auto scan = scan_region<Rational>(4, Rational(1), res, 2);
    std::map<std::vector<std::uint32_t>, const RegionRow *> by_k;
    for (const auto &r : scan.rows) by_k[r.k] = &r;
    for (const auto &r : scan.rows) {
        const auto *mirror = by_k.at({r.k[2], r.k[1], r.k[0]});
        ASSERT_EQ(r.member, mirror->member);
        ASSERT_EQ(r.member, r.direct);
        if (r.excluded) ASSERT_FALSE(r.member);
        if (2 * (r.k[0] + 1) > res + 3) ASSERT_TRUE(r.member);
    }
}

TEST(RegionScan, FloatAndExactAgree)
{
    const auto exact = scan_region<Rational>(5, Rational(1), 8);
    const auto approx = scan_region<double>(5, Rational(1), 8, 3);
    ASSERT_EQ(exact.rows.size(), approx.rows.size());
    for (std::size_t i = 0; i < exact.rows.size(); ++i) {
        ASSERT_EQ(exact.rows[i].member, approx.rows[i].member);
        ASSERT_EQ(exact.rows[i].excluded, approx.rows[i].excluded);
        ASSERT_EQ(exact.rows[i].facets, approx.rows[i].facets);
    }
}

TEST(RegionScan, RejectsUnsupportedInput)
{
    EXPECT_THROW(scan_region<double>(6, Rational(1), 10), ValidationError);
    EXPECT_THROW(scan_region<double>(4, Rational(1), 1), ValidationError);
    EXPECT_THROW(scan_region<Rational>(4, Rational(1, 2), 10), ValidationError);
    const auto five = scan_region<double>(5, Rational(1), 2);
    std::ostringstream os;
    EXPECT_THROW(write_region_svg(os, five), ValidationError);
}
