// Walks the equally spaced four-body line: the Q pfaffian, the one-parameter
// family of real masses and the range of c giving positive masses, then the
// same question for a configuration inside the excluded band.

#include <pfaffcc/pfaffcc.hpp>

#include <iostream>

using namespace pfaffcc;

static void report(const char *positions)
{
    const auto cfg = parse_config(positions, "1");
    const auto sol = solve_real_masses(cfg);
    const auto res = positive_masses(sol);
    std::cout << "q = (" << positions << ")\n";
    std::cout << "  Pf Q = " << format_scalar(pfaffian(q_matrix(cfg))) << '\n';
    std::cout << "  excluded by the gap test: " << (quick_exclusion(cfg) ? "yes" : "no") << '\n';
    if (!res.feasible) {
        std::cout << "  no positive masses: " << res.reason << "\n\n";
        return;
    }
    std::cout << "  positive masses for c in (" << format_scalar(*res.c_lo) << ", " << format_scalar(*res.c_hi)
              << ")\n  e.g. c = " << format_scalar(*res.c) << ":";
    for (const auto &m : res.masses) std::cout << ' ' << format_scalar(m);
    std::cout << "\n  residual " << format_scalar(residual(cfg, res.masses, *res.c)) << "\n\n";
}

int main()
{
    report("3,2,1,0");
    report("1,4/5,1/5,0");
}
