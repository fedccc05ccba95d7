// pfaffcc command-line tool: pfaffians of collinear configurations, the
// inverse mass problem, polynomial positivity certificates and region scans.

#include <CLI11.hpp>
#include <json.hpp>

#include <pfaffcc/pfaffcc.hpp>

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace pfaffcc;

namespace
{

enum Exit { ok = 0, bad_input = 2, degenerate = 3, budget = 4 };

struct ArithFlags {
    bool exact = false;
    bool floating = false;

    void add_to(CLI::App *cmd)
    {
        auto *e = cmd->add_flag("--exact", exact, "exact rational arithmetic (needs an integer alpha)");
        cmd->add_flag("--float", floating, "double precision arithmetic")->excludes(e);
    }

    // Exact unless asked otherwise or alpha is not an integer.
    bool use_exact(const Rational &alpha) const
    {
        if (exact && !exact_alpha(alpha)) throw ValidationError("--exact needs an integer alpha");
        return exact || (!floating && exact_alpha(alpha));
    }
};

std::string join(const std::vector<std::string> &v, const char *sep = ",")
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

template <typename S>
std::vector<std::string> formatted(const std::vector<S> &v)
{
    std::vector<std::string> out;
    for (const auto &x : v) out.push_back(format_scalar(x));
    return out;
}

std::size_t parse_bytes(const std::string &text)
{
    if (text.empty()) return 0;
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(text, &pos);
    std::size_t mult = 1;
    if (pos < text.size()) {
        switch (std::toupper(static_cast<unsigned char>(text[pos]))) {
        case 'K': mult = std::size_t{1} << 10; break;
        case 'M': mult = std::size_t{1} << 20; break;
        case 'G': mult = std::size_t{1} << 30; break;
        default: throw ValidationError("bad memory budget '" + text + "'");
        }
        if (pos + 1 != text.size()) throw ValidationError("bad memory budget '" + text + "'");
    }
    return static_cast<std::size_t>(v) * mult;
}

template <typename S>
int run_pfaffian(const CollinearConfig<S> &cfg)
{
    const auto q = q_matrix(cfg);
    if (cfg.size() % 2 == 0) {
        std::cout << format_scalar(pfaffian(q)) << '\n';
    } else {
        std::cout << "border " << format_scalar(pfaffian(border(q, S(1)))) << '\n';
    }
    return ok;
}

template <typename S>
int run_solve(const CollinearConfig<S> &cfg)
{
    const auto sol = solve_real_masses(cfg);
    const auto res = positive_masses(sol);
    std::cout << "n " << cfg.size() << '\n';
    if (sol.even) {
        std::vector<S> v = sol.dir;
        for (auto &x : v) x = -x;
        std::cout << "family m(c) = u - c*v\n";
        std::cout << "u " << join(formatted(sol.base)) << '\n';
        std::cout << "v " << join(formatted(v)) << '\n';
    } else {
        std::cout << "family m(t) = u + t*v, c fixed\n";
        std::cout << "u " << join(formatted(sol.base)) << '\n';
        std::cout << "v " << join(formatted(sol.dir)) << '\n';
        std::cout << "c " << format_scalar(sol.c0) << '\n';
    }
    std::cout << "feasible " << (res.feasible ? "true" : "false") << '\n';
    if (res.feasible) {
        auto bound = [](const std::optional<S> &b, const char *inf) { return b ? format_scalar(*b) : std::string(inf); };
        if (sol.even) std::cout << "c_interval (" << bound(res.c_lo, "-inf") << ", " << bound(res.c_hi, "inf") << ")\n";
        if (!sol.even) std::cout << "t_interval (" << bound(res.param_lo, "-inf") << ", " << bound(res.param_hi, "inf") << ")\n";
        std::cout << "masses " << join(formatted(res.masses)) << '\n';
        if (sol.even) std::cout << "c " << format_scalar(*res.c) << '\n';
    } else {
        std::cout << "reason " << res.reason << '\n';
    }
    return ok;
}

template <typename S>
void scan_and_write(std::size_t n, const Rational &alpha, std::size_t res, unsigned workers, const std::string &out,
                    const std::string &svg)
{
    const auto scan = scan_region<S>(n, alpha, res, workers);
    {
        std::ofstream os(out, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + out);
        write_region_csv(os, scan);
    }
    if (!svg.empty()) {
        std::ofstream os(svg, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + svg);
        write_region_svg(os, scan);
    }
    std::size_t members = 0, excluded = 0, direct = 0;
    for (const auto &r : scan.rows) {
        members += r.member;
        excluded += r.excluded;
        direct += r.direct;
    }
    std::cout << "points " << scan.rows.size() << "\nmembers " << members << "\nfeasible_direct " << direct
              << "\nexcluded " << excluded << "\ncsv " << out << '\n';
    if (!svg.empty()) std::cout << "svg " << svg << '\n';
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Pfaffians and the inverse problem for collinear central configurations"};
    app.require_subcommand(1);

    std::string q_text, alpha_text = "1";
    ArithFlags arith;

    auto *pf = app.add_subcommand("pfaffian", "pfaffian of the Q matrix (bordered when n is odd)");
    pf->add_option("--q", q_text, "strictly decreasing positions, comma separated")->required();
    pf->add_option("--alpha", alpha_text, "potential exponent (default 1)");
    arith.add_to(pf);

    auto *solve = app.add_subcommand("solve", "real and positive masses making the configuration central");
    solve->add_option("--q", q_text, "strictly decreasing positions, comma separated")->required();
    solve->add_option("--alpha", alpha_text, "potential exponent (default 1)");
    arith.add_to(solve);

    std::size_t n = 0;
    std::string variant_text = "p", budget_text, out_dir = ".", checkpoint_dir;
    unsigned workers = default_workers();
    std::uint64_t chunk_size = 0, max_chunks = 0, first = 0, last = std::numeric_limits<std::uint64_t>::max();
    std::size_t merge_vars = 0;
    bool opt_in_long = false, no_dump = false, print_poly = false, show_progress = false;
    auto *verify = app.add_subcommand("verify", "expand the pfaffian of P or P~ and report its coefficients");
    verify->add_option("--n", n, "even matrix order, 4..10")->required();
    verify->add_option("--variant", variant_text, "p or ptilde (default p)");
    verify->add_option("--workers", workers, "worker threads (default $PFAFFCC_WORKERS or all cores)");
    verify->add_option("--memory-budget", budget_text, "approximate memory limit, e.g. 4G");
    verify->add_option("--out-dir", out_dir, "directory for report.jsonl and the polynomial dump");
    verify->add_option("--checkpoint-dir", checkpoint_dir, "save finished chunks here and reuse them");
    verify->add_option("--chunk-size", chunk_size, "matchings per chunk");
    verify->add_option("--max-chunks", max_chunks, "stop after computing this many chunks");
    verify->add_option("--first-matching", first, "first canonical matching index");
    verify->add_option("--last-matching", last, "one past the last canonical matching index");
    verify->add_option("--merge-vars", merge_vars, "identify the trailing gap variables down to this many");
    verify->add_flag("--opt-in-long", opt_in_long, "allow the multi-day n = 10 computation");
    verify->add_flag("--no-dump", no_dump, "do not write the polynomial");
    verify->add_flag("--print", print_poly, "print the polynomial");
    verify->add_flag("--progress", show_progress, "report progress on stderr");

    std::size_t res = 0;
    std::string csv_path, svg_path;
    unsigned region_workers = default_workers();
    auto *region = app.add_subcommand("region", "scan the simplex of normalized gaps");
    region->add_option("--n", n, "number of bodies, 4 or 5")->required();
    region->add_option("--alpha", alpha_text, "potential exponent (default 1)");
    region->add_option("--res", res, "grid resolution, at least 2")->required();
    region->add_option("--out", csv_path, "CSV output path")->required();
    region->add_option("--svg", svg_path, "optional SVG raster (n = 4)");
    region->add_option("--workers", region_workers, "worker threads");
    arith.add_to(region);

    std::string x_text;
    auto *exclude = app.add_subcommand("exclude", "test the 2 x_j > 1 exclusion criterion");
    auto *eq = exclude->add_option("--q", q_text, "strictly decreasing positions");
    exclude->add_option("--x", x_text, "positive gaps x_1..x_{n-1}")->excludes(eq);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return bad_input;
    }

    try {
        if (pf->parsed() || solve->parsed()) {
            const auto cfg = parse_config(q_text, alpha_text);
            const bool exact = arith.use_exact(cfg.alpha);
            if (pf->parsed()) return exact ? run_pfaffian(cfg) : run_pfaffian(to_float(cfg));
            return exact ? run_solve(cfg) : run_solve(to_float(cfg));
        }

        if (verify->parsed()) {
            const Variant variant = parse_variant(variant_text);
            PositivityOptions opt;
            opt.workers = workers;
            opt.memory_budget_bytes = parse_bytes(budget_text);
            opt.checkpoint_dir = checkpoint_dir;
            opt.chunk_size = chunk_size;
            opt.max_chunks = max_chunks;
            opt.first_matching = first;
            opt.last_matching = last;
            opt.merged_vars = merge_vars;
            opt.allow_long = opt_in_long;
            if (show_progress)
                opt.progress = [](std::uint64_t done, std::uint64_t total) {
                    std::fprintf(stderr, "progress %llu/%llu matchings\n", static_cast<unsigned long long>(done),
                                 static_cast<unsigned long long>(total));
                };
            if (n == 10 && opt_in_long)
                std::cerr << "warning: n = 10 needs on the order of 5e8 terms (tens of GB) and days of CPU\n";
            const auto run = verify_positivity(n, variant, opt);
            const auto &r = run.report;
            std::cout << r.stats.n_terms << " terms, min " << r.stats.min_coeff << ", max " << r.stats.max_coeff
                      << ", degree " << r.stats.total_degree << '\n';
            std::cout << "nonnegative " << (r.all_nonneg ? "true" : "false") << '\n';
            std::cout << "matchings " << r.matchings_processed << '/' << r.matchings_total << '\n';
            if (print_poly) std::cout << run.poly << '\n';

            fs::create_directories(out_dir);
            nlohmann::ordered_json j;
            j["n"] = r.n;
            j["variant"] = to_string(r.variant);
            j["nterms"] = r.stats.n_terms;
            j["min"] = r.stats.min_coeff.get_str();
            j["max"] = r.stats.max_coeff.get_str();
            j["degree"] = r.stats.total_degree;
            j["seconds"] = r.wall_time;
            j["nonnegative"] = r.all_nonneg;
            j["matchings"] = r.matchings_processed;
            j["complete"] = r.complete;
            j["full"] = r.full;
            {
                std::ofstream os(fs::path(out_dir) / "report.jsonl", std::ios::app);
                os << j.dump() << '\n';
            }
            if (!r.complete) {
                std::cout << "incomplete: rerun with the same --checkpoint-dir to resume\n";
                return ok;
            }
            if (!no_dump) {
                std::string name = "pf_" + to_string(variant) + "_" + std::to_string(n);
                if (!r.full) name += "_partial";
                const auto path = fs::path(out_dir) / (name + ".poly");
                std::ofstream os(path, std::ios::binary | std::ios::trunc);
                write_poly(os, run.poly);
                std::cout << "polynomial " << path.string() << '\n';
            }
            if (r.full && r.all_nonneg && r.stats.n_terms > 0) std::cout << "claim " << positivity_implies(r).statement << '\n';
            return ok;
        }

        if (region->parsed()) {
            const Rational alpha = parse_rational(alpha_text);
            if (alpha <= 0) throw ValidationError("alpha must be positive");
            if (arith.use_exact(alpha)) {
                scan_and_write<Rational>(n, alpha, res, region_workers, csv_path, svg_path);
            } else {
                scan_and_write<double>(n, alpha, res, region_workers, csv_path, svg_path);
            }
            return ok;
        }

        if (exclude->parsed()) {
            std::vector<Rational> gaps;
            if (!q_text.empty()) {
                gaps = gap_coords(parse_config(q_text, "1")).x;
            } else if (!x_text.empty()) {
                gaps = parse_positions(x_text);
                for (const auto &g : gaps)
                    if (g <= 0) throw ValidationError("gaps must be positive");
            } else {
                throw ValidationError("exclude needs --q or --x");
            }
            const auto j = exclusion_index(gaps);
            std::cout << "excluded " << (j ? "true" : "false") << '\n';
            if (j) std::cout << "index " << *j << '\n';
            return ok;
        }
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_input;
    } catch (const DegenerateError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return degenerate;
    } catch (const BudgetExceeded &e) {
        std::cerr << "error: " << e.what() << " (progress: " << e.progress() << " matchings)\n";
        return budget;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return ok;
}
