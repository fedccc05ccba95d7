// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <unistd.h>

#include "support.hpp"

using namespace pfaffcc;
namespace fs = std::filesystem;

namespace
{

// Collects the first failure message of a criterion.
struct Check {
    std::string failure;

    void require(bool cond, const std::string &what)
    {
        if (!cond && failure.empty()) failure = what;
    }
    bool ok() const { return failure.empty(); }
};

template <typename T>
std::string str(const T &v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

void expect_stats(Check &c, const PositivityRun &run, std::size_t terms, const char *max, std::size_t degree,
                  const std::string &label)
{
    const auto &s = run.report.stats;
    c.require(s.n_terms == terms, label + ": " + str(s.n_terms) + " terms");
    c.require(s.min_coeff == 1, label + ": min " + s.min_coeff.get_str());
    c.require(s.max_coeff == Integer(max), label + ": max " + s.max_coeff.get_str());
    c.require(s.total_degree == degree, label + ": degree " + str(s.total_degree));
    c.require(run.report.all_nonneg && run.report.complete && run.report.full, label + ": not a full certificate");
}

PositivityOptions workers_only()
{
    PositivityOptions o;
    o.workers = default_workers();
    return o;
}

std::string fast_tier(Check &c)
{
    const auto p4 = verify_positivity(4, Variant::P, workers_only());
    c.require(p4.report.stats.n_terms == 25 && p4.report.stats.min_coeff == 1 && p4.report.stats.max_coeff == 19,
              "n = 4 P statistics");
    const auto t4 = verify_positivity(4, Variant::PTilde, workers_only());
    c.require(to_display(t4.poly) == "x2^4 + 2*x1*x2^3 + x1^2*x2^2 + 2*x1^3*x2 + x1^4",
              "n = 4 P~ is " + to_display(t4.poly));
    expect_stats(c, verify_positivity(6, Variant::P, workers_only()), 7993, "6217712", 24, "n = 6 P");
    expect_stats(c, verify_positivity(6, Variant::PTilde, workers_only()), 519, "3018", 16, "n = 6 P~");
    return "n = 4 P, P~ and n = 6 P, P~ exact";
}

std::string slow_tier(Check &c)
{
    expect_stats(c, verify_positivity(8, Variant::PTilde, workers_only()), 306016, "922577565632", 36, "n = 8 P~");
    expect_stats(c, verify_positivity(8, Variant::P, workers_only()), 8863399, "1974986029814430328", 48, "n = 8 P");

    // n = 10: a truncated, variable-merged slice computed straight through
    // must equal the same slice interrupted and resumed from checkpoints.
    const auto dir = fs::temp_directory_path() / ("pfaffcc_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    PositivityOptions o;
    o.workers = 1;
    o.merged_vars = 4;
    o.first_matching = 105;
    o.last_matching = 225;
    o.chunk_size = 15;
    const auto straight = verify_positivity(10, Variant::PTilde, o);
    o.checkpoint_dir = dir;
    o.max_chunks = 3;
    const auto partial = verify_positivity(10, Variant::PTilde, o);
    c.require(!partial.report.complete && partial.report.matchings_processed == 45, "n = 10 interrupted run");
    o.max_chunks = 0;
    o.workers = std::max(2u, default_workers());
    const auto resumed = verify_positivity(10, Variant::PTilde, o);
    c.require(resumed.report.complete && !resumed.report.full, "n = 10 resumed run incomplete");
    c.require(to_text(resumed.poly) == to_text(straight.poly), "n = 10 resume differs from straight run");
    fs::remove_all(dir);
    return "n = 8 P, P~ exact; n = 10 slice of 120 matchings (" + str(straight.report.stats.n_terms) +
           " terms, 4 merged variables) resumes identically";
}

std::string identities(Check &c)
{
    support::Rng g(1);
    for (std::size_t n : {2u, 4u, 6u, 8u}) {
        for (int t = 0; t < 200; ++t) {
            const auto a = support::random_skew(n, g);
            const Rational pf = pfaffian(a);
            c.require(pf * pf == det(a), "Pf^2 != det at n = " + str(n));
            const auto i = static_cast<std::size_t>(support::uniform_int(g, 0, static_cast<long>(n) - 2));
            c.require(pfaffian(a.swapped(i, i + 1)) == -pf, "swap rule at n = " + str(n));
            if (n <= 8 && t < 20) c.require(pfaffian_recursive(a) == pfaffian_matchings(a), "recursion vs matchings");
        }
    }
    for (int t = 0; t < 100; ++t) {
        const auto a = support::random_skew(6, g);
        const Rational pf = pfaffian(a);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = i + 1; j < 6; ++j) {
                const Rational rhs = pfaffian_minor(a, {i, j}) * pf;
                c.require(det_minor(a, i, j) == -rhs, "minor determinant identity");
            }
    }
    return "Pf^2 = det (800), swap (800), det of minors (100 x 15), recursion = matching sum";
}

template <typename S>
S pf4(const SkewMatrix<S> &q)
{
    return q(0, 1) * q(2, 3) - q(0, 2) * q(1, 3) + q(1, 2) * q(0, 3);
}

template <typename S>
void four_point_checks(Check &c, const CollinearConfig<S> &cfg, support::Rng &g, double tol)
{
    const auto q = q_matrix(cfg);
    auto gt = [tol](const S &a, const S &b) {
        if constexpr (std::is_same_v<S, double>) return a - b > -tol * std::max(std::fabs(a), std::fabs(b));
        else return a > b;
    };
    c.require(gt(q(0, 1) * q(2, 3), q(0, 2) * q(1, 3)), "Q12 Q34 > Q13 Q24");
    c.require(gt(q(1, 2) * q(0, 3), q(0, 2) * q(1, 3)), "Q23 Q14 > Q13 Q24");
    const S base = pf4(q);
    c.require(base > 0, "Pf Q > 0 for four points");

    auto up = cfg;
    const long k = support::uniform_int(g, 1, 99);
    up.q[3] = cfg.q[3] + (cfg.q[2] - cfg.q[3]) * S(k) / S(100);
    c.require(gt(pf4(q_matrix(up)), base), "Pf increasing in q4");
    auto out = cfg;
    out.q[0] = cfg.q[0] + S(support::uniform_int(g, 1, 50)) / S(10);
    c.require(gt(base, pf4(q_matrix(out))), "Pf decreasing in q1");
}

std::string order_inequalities(Check &c)
{
    support::Rng g(2);
    for (int t = 0; t < 250; ++t) {
        four_point_checks(c, support::random_config_float(4, 0.5, g), g, 1e-9);
        for (long alpha : {1L, 2L, 3L}) four_point_checks(c, support::random_config(4, alpha, g), g, 0);
    }
    for (int t = 0; t < 500; ++t) {
        const long alpha = support::uniform_int(g, 1, 3);
        c.require(pfaffian(border(q_matrix(support::random_config(5, alpha, g)), Rational(1))) > 0,
                  "Pf border(Q) > 0 for five points");
        const double a = 0.25 + 3 * std::uniform_real_distribution<double>(0, 1)(g);
        c.require(pfaffian(border(q_matrix(support::random_config_float(5, a, g)), 1.0)) > 0,
                  "Pf border(Q) > 0 for five points (float)");
    }
    return "1000 four-point configurations, 1000 bordered five-point configurations";
}

std::string polynomialization(Check &c)
{
    support::Rng g(3);
    for (std::size_t n : {4u, 6u}) {
        const SparsePoly pf = verify_positivity(n, Variant::P, workers_only()).poly;
        for (int t = 0; t < 100; ++t) {
            const auto gaps = support::random_gaps(n - 1, g);
            auto cfg = config_from_gaps(gaps, Rational(1));
            const Rational shift = support::random_rational(g);
            for (auto &v : cfg.q) v += shift;
            const auto q = q_matrix(cfg);
            const Rational pfq = pfaffian(q);

            Rational prod = 1;
            for (std::size_t j = 0; j + 1 < n; ++j) prod *= q(j, n - 1);
            c.require(pfq == prod * pfaffian(border(q_matrix(crisscross(cfg)), Rational(1))),
                      "crisscross identity at n = " + str(n));

            Rational dist = 1;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) dist *= (cfg.q[i] - cfg.q[j]) * (cfg.q[i] - cfg.q[j]);
            c.require(poly_eval(pf, gaps) == dist * pfq, "Pf P = prod q_ij^2 Pf Q at n = " + str(n));
        }
    }
    return "crisscross and cleared-denominator identities on 200 configurations";
}

std::string oracle_equivalence(Check &c)
{
    support::Rng g(4);
    std::map<std::string, std::pair<int, int>> tally; // members, points
    for (std::size_t n : {4u, 6u}) {
        for (int t = 0; t < 500; ++t) {
            for (long alpha : {1L, 2L}) {
                const auto x = support::random_simplex_rational(n - 1, g);
                const auto cfg = config_from_gaps(x, Rational(alpha));
                const auto hull = hull_membership(x, Rational(alpha));
                const auto direct = solve_positive_direct(cfg);
                c.require(hull.feasible == direct.feasible, "hull and direct disagree (exact)");
                if (direct.feasible) c.require(residual(cfg, direct.masses, *direct.c) == 0, "witness residual");
                auto &k = tally["n=" + str(n) + " a=" + str(alpha)];
                k.first += hull.feasible;
                ++k.second;
            }
            const auto x = support::random_simplex_double(n - 1, g);
            const auto cfg = config_from_gaps(x, Rational(1, 2));
            const auto hull = hull_membership(x, Rational(1, 2));
            const auto direct = solve_positive_direct(cfg);
            c.require(hull.feasible == direct.feasible, "hull and direct disagree (float)");
            if (direct.feasible) c.require(residual(cfg, direct.masses, *direct.c) <= 1e-9, "witness residual (float)");
            auto &k = tally["n=" + str(n) + " a=1/2"];
            k.first += hull.feasible;
            ++k.second;
        }
    }
    std::string s;
    for (const auto &[key, v] : tally) s += (s.empty() ? "" : ", ") + key + " " + str(v.first) + "/" + str(v.second);
    return "members per case: " + s;
}

std::string exclusion_soundness(Check &c)
{
    std::size_t excluded = 0, members = 0, points = 0;
    for (std::size_t n : {4u, 5u}) {
        const std::size_t res = n == 4 ? 200 : 50;
        const auto scan = scan_region<Rational>(n, Rational(1), res, default_workers());
        std::map<std::vector<std::uint32_t>, const RegionRow *> by_k;
        for (const auto &r : scan.rows) by_k[r.k] = &r;
        for (const auto &r : scan.rows) {
            ++points;
            members += r.member;
            c.require(r.member == r.direct, "scan hull/direct mismatch");
            if (r.excluded) {
                ++excluded;
                c.require(!r.member && !r.direct, "excluded point is feasible");
            }
            if (n == 4) {
                c.require(by_k.at({r.k[2], r.k[1], r.k[0]})->member == r.member, "n = 4 region not symmetric");
                if (2 * (r.k[0] + 1) > res + 3) c.require(r.member, "x1 > 1/2 point outside the region");
            }
        }
    }
    return str(points) + " grid points, " + str(excluded) + " excluded, " + str(members) + " members";
}

std::string three_body(Check &c)
{
    support::Rng g(5);
    for (int t = 0; t < 250; ++t) {
        for (long alpha : {1L, 2L, 3L}) {
            const auto cfg = support::random_config(3, alpha, g);
            const auto r = solve_positive_direct(cfg);
            c.require(r.feasible, "n = 3 infeasible");
            if (r.feasible) c.require(residual(cfg, r.masses, *r.c) == 0, "n = 3 residual");
        }
        const auto cfg = support::random_config_float(3, 0.5, g);
        const auto r = solve_positive_direct(cfg);
        c.require(r.feasible, "n = 3 infeasible (alpha 1/2)");
        if (r.feasible) c.require(residual(cfg, r.masses, *r.c) <= 1e-9, "n = 3 residual (alpha 1/2)");
    }
    return "1000 configurations feasible";
}

} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<std::string(Check &)>>> criteria{
        {"pfaffian certificates, fast tier", fast_tier},
        {"pfaffian certificates, n = 8 and n = 10 resume", slow_tier},
        {"pfaffian identities", identities},
        {"four- and five-point order inequalities", order_inequalities},
        {"crisscross and cleared-denominator identities", polynomialization},
        {"hull membership agrees with direct feasibility", oracle_equivalence},
        {"exclusion soundness and region shape", exclusion_soundness},
        {"three bodies always feasible", three_body},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        std::string detail;
        const auto start = std::chrono::steady_clock::now();
        try {
            detail = criteria[i].second(c);
        } catch (const std::exception &e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.1fs", secs);
        if (c.ok()) {
            std::cout << "PASS " << i + 1 << " " << criteria[i].first << ": " << detail << " [" << timing << "]\n";
        } else {
            ++failures;
            std::cout << "FAIL " << i + 1 << " " << criteria[i].first << ": " << c.failure << " [" << timing << "]\n";
        }
        std::cout.flush();
    }
    return failures == 0 ? 0 : 1;
}
