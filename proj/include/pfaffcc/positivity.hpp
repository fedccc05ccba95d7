#ifndef PFAFFCC_POSITIVITY_HPP
#define PFAFFCC_POSITIVITY_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "configuration.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "pfaffian.hpp"
#include "polynomial.hpp"

namespace pfaffcc
{

// PFAFFCC_WORKERS if set, otherwise the hardware thread count.
inline unsigned default_workers()
{
    if (const char *env = std::getenv("PFAFFCC_WORKERS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct PositivityOptions {
    unsigned workers = 0;                // 0: default_workers()
    std::size_t memory_budget_bytes = 0; // 0: unlimited
    std::filesystem::path checkpoint_dir; // empty: no checkpoints
    std::uint64_t chunk_size = 0;        // matchings per chunk; 0: one top-level branch
    std::uint64_t max_chunks = 0;        // stop after computing this many chunks; 0: no limit
    std::uint64_t first_matching = 0;    // restrict to canonical matching indices [first, last)
    std::uint64_t last_matching = std::numeric_limits<std::uint64_t>::max();
    std::size_t merged_vars = 0;         // identify trailing gap variables down to this many; 0: off
    bool allow_long = false;             // required for n = 10 on the full variable set
    std::function<void(std::uint64_t done, std::uint64_t total)> progress;
};

struct PositivityReport {
    std::size_t n = 0;
    Variant variant = Variant::P;
    PolyStats stats;
    bool all_nonneg = false;
    double wall_time = 0;
    std::uint64_t matchings_processed = 0;
    std::uint64_t matchings_total = 0; // matchings selected for this run
    bool complete = false;             // every selected matching was accumulated
    bool full = false;                 // the selection was the whole pfaffian, unmerged
};

struct PositivityRun {
    PositivityReport report;
    SparsePoly poly;
};

// Rough per-term cost of the kernel's working set, used to turn a byte
// budget into a term limit.
inline constexpr std::size_t bytes_per_term = 96;

inline std::string chunk_file_name(Variant v, std::size_t n, std::uint64_t chunk)
{
    return "pf_" + to_string(v) + "_" + std::to_string(n) + "_" + std::to_string(chunk) + ".part";
}

struct ChunkHeader {
    std::size_t n = 0;
    Variant variant = Variant::P;
    std::uint64_t chunk = 0, lo = 0, hi = 0;
    std::size_t merged_vars = 0;

    std::string line() const
    {
        std::ostringstream os;
        os << "# pfaffcc-chunk n=" << n << " variant=" << to_string(variant) << " chunk=" << chunk << " lo=" << lo
           << " hi=" << hi << " merged=" << merged_vars;
        return os.str();
    }
};

// Atomically writes a chunk's partial sum (temporary file, then rename).
inline void write_chunk(const std::filesystem::path &dir, const ChunkHeader &h, const SparsePoly &p)
{
    std::filesystem::create_directories(dir);
    const auto final_path = dir / chunk_file_name(h.variant, h.n, h.chunk);
    auto tmp = final_path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write checkpoint " + tmp.string());
        os << h.line() << '\n';
        write_poly(os, p);
        os.flush();
        if (!os) throw std::runtime_error("failed writing checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
}

// Loads a chunk file if present; a header that disagrees with the run is an error.
inline std::optional<SparsePoly> read_chunk(const std::filesystem::path &dir, const ChunkHeader &h)
{
    const auto path = dir / chunk_file_name(h.variant, h.n, h.chunk);
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    std::string first;
    std::getline(is, first);
    if (first != h.line())
        throw ValidationError("checkpoint " + path.string() + " belongs to a different run (" + first + ")");
    return read_poly(is);
}

namespace detail
{

// Running sum kept in 128-bit coefficients until one overflows.
class ChunkAccumulator
{
public:
    bool empty() const { return std::visit([](const auto &t) { return t.empty(); }, m_sum); }
    std::size_t size() const { return std::visit([](const auto &t) { return t.size(); }, m_sum); }

    void add(const TermList<Int128> &t)
    {
        if (auto *s = std::get_if<TermList<Int128>>(&m_sum)) {
            try {
                *s = detail::add(*s, t);
                return;
            } catch (const KernelOverflow &) {
                promote();
            }
        }
        add(widen(t));
    }

    void add(const TermList<Integer> &t)
    {
        promote();
        auto &s = std::get<TermList<Integer>>(m_sum);
        s = detail::add(s, t);
    }

    void add(const ChunkAccumulator &o)
    {
        std::visit([this](const auto &t) { add(t); }, o.m_sum);
    }

    SparsePoly to_poly(std::size_t nvars) const
    {
        return std::visit([nvars](const auto &t) { return to_sparse(t, nvars); }, m_sum);
    }

private:
    static TermList<Integer> widen(const TermList<Int128> &t)
    {
        TermList<Integer> w;
        w.keys = t.keys;
        w.coeffs.reserve(t.size());
        for (auto c : t.coeffs) w.coeffs.push_back(to_integer(c));
        return w;
    }

    void promote()
    {
        if (auto *s = std::get_if<TermList<Int128>>(&m_sum)) {
            TermList<Integer> w = widen(*s);
            m_sum = std::move(w);
        }
    }

    std::variant<TermList<Int128>, TermList<Integer>> m_sum;
};

struct Chunk {
    std::uint64_t id, lo, hi;
};

inline std::vector<std::size_t> merge_map(std::size_t nvars, std::size_t merged)
{
    if (merged == 0 || merged >= nvars) return {};
    std::vector<std::size_t> m(nvars);
    for (std::size_t v = 0; v < nvars; ++v) m[v] = std::min(v, merged - 1);
    return m;
}

} // namespace detail

// Pfaffian of the symbolic P (or P~) matrix of order n, accumulated chunk by
// chunk over the canonical matching order. Chunks are distributed to workers
// in contiguous blocks; exact arithmetic makes the result independent of the
// worker count and of which chunks came from checkpoints.
inline PositivityRun verify_positivity(std::size_t n, Variant variant, const PositivityOptions &opt = {})
{
    if (n < 4 || n > 10 || n % 2 != 0) throw ValidationError("n must be even with 4 <= n <= 10");
    const DistanceForms forms = distance_forms(n, variant);
    const std::size_t out_vars = opt.merged_vars == 0 ? forms.nvars() : std::min(opt.merged_vars, forms.nvars());
    if (opt.merged_vars > Monomial::max_vars) throw ValidationError("too many merged variables");

    const std::uint64_t total = matching_count(n);
    const std::uint64_t lo = std::min(opt.first_matching, total);
    const std::uint64_t hi = std::min(opt.last_matching, total);
    if (lo > hi) throw ValidationError("empty or inverted matching range");
    const bool full = lo == 0 && hi == total && out_vars == forms.nvars();
    if (n == 10 && full && !opt.allow_long)
        throw BudgetExceeded("n = 10 on all variables needs roughly 10^9 terms per matching and days of CPU; "
                             "pass the long-run opt-in to proceed",
                             0);

    const std::uint64_t chunk_size = opt.chunk_size != 0 ? opt.chunk_size : matching_count(n - 2);
    std::vector<detail::Chunk> chunks;
    for (std::uint64_t id = lo / chunk_size; id * chunk_size < hi; ++id) {
        const std::uint64_t a = std::max(lo, id * chunk_size), b = std::min(hi, (id + 1) * chunk_size);
        if (a < b) chunks.push_back({id, a, b});
    }

    unsigned workers = opt.workers != 0 ? opt.workers : default_workers();
    workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, chunks.size())));
    const std::size_t term_limit = opt.memory_budget_bytes / bytes_per_term;
    const auto var_map = detail::merge_map(forms.nvars(), opt.merged_vars);
    const detail::DistanceKernel<detail::Int128> narrow(forms, term_limit, var_map);
    const detail::DistanceKernel<Integer> wide(forms, term_limit, var_map);

    const auto start = std::chrono::steady_clock::now();
    std::vector<detail::ChunkAccumulator> parts(workers);
    std::atomic<std::uint64_t> computed{0}, processed{0};
    std::atomic<bool> stop{false};
    std::mutex progress_mutex;
    int last_percent = -1;
    std::exception_ptr failure;

    auto header_for = [&](const detail::Chunk &c) {
        return ChunkHeader{n, variant, c.id, c.lo, c.hi, opt.merged_vars};
    };

    auto run_chunk = [&](const detail::Chunk &c, detail::ChunkAccumulator &acc) {
        if (!opt.checkpoint_dir.empty()) {
            if (auto saved = read_chunk(opt.checkpoint_dir, header_for(c))) {
                if (saved->nvars() != out_vars) throw ValidationError("checkpoint has the wrong variable count");
                try {
                    acc.add(detail::from_sparse<detail::Int128>(*saved));
                } catch (const detail::KernelOverflow &) {
                    acc.add(detail::from_sparse<Integer>(*saved));
                }
                return true;
            }
        }
        if (opt.max_chunks != 0 && computed.fetch_add(1) >= opt.max_chunks) return false;
        detail::ChunkAccumulator piece;
        try {
            piece.add(narrow.range_sum(c.lo, c.hi));
        } catch (const detail::KernelOverflow &) {
            piece.add(wide.range_sum(c.lo, c.hi));
        }
        if (!opt.checkpoint_dir.empty()) write_chunk(opt.checkpoint_dir, header_for(c), piece.to_poly(out_vars));
        acc.add(piece);
        return true;
    };

    auto worker = [&](unsigned w) {
        const std::size_t first = chunks.size() * w / workers, last = chunks.size() * (w + 1) / workers;
        try {
            for (std::size_t i = first; i < last && !stop; ++i) {
                if (!run_chunk(chunks[i], parts[w])) break;
                if (term_limit != 0 && parts[w].size() > term_limit) throw detail::KernelTermLimit(parts[w].size());
                const std::uint64_t done = processed += chunks[i].hi - chunks[i].lo;
                if (opt.progress) {
                    std::lock_guard lock(progress_mutex);
                    const int pct = static_cast<int>(100 * done / std::max<std::uint64_t>(1, hi - lo));
                    if (pct > last_percent) {
                        last_percent = pct;
                        opt.progress(done, hi - lo);
                    }
                }
            }
        } catch (...) {
            std::lock_guard lock(progress_mutex);
            if (!failure) failure = std::current_exception();
            stop = true;
        }
    };

    if (workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker, w);
        for (auto &t : pool) t.join();
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const detail::KernelTermLimit &e) {
            throw BudgetExceeded(std::string("memory budget exceeded: ") + e.what(), processed.load());
        }
    }

    // Fixed pairwise order over worker slots.
    while (parts.size() > 1) {
        std::vector<detail::ChunkAccumulator> next;
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
            parts[i].add(parts[i + 1]);
            next.push_back(std::move(parts[i]));
        }
        if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }

    PositivityRun run{{}, parts.front().to_poly(out_vars)};
    auto &r = run.report;
    r.n = n;
    r.variant = variant;
    r.stats = poly_stats(run.poly);
    r.all_nonneg = poly_is_nonneg(run.poly);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.matchings_processed = processed.load();
    r.matchings_total = hi - lo;
    r.complete = r.matchings_processed == r.matchings_total;
    r.full = full;
    return run;
}

inline PositivityRun verify_positivity(std::size_t n, Variant variant, unsigned workers)
{
    PositivityOptions opt;
    opt.workers = workers;
    return verify_positivity(n, variant, opt);
}

struct PositivityClaim {
    std::size_t n;
    Variant variant;
    std::string statement;
};

// The conclusion a complete non-negative certificate supports: the
// denominators cleared to build P and P~ are positive products of distances,
// so Pf Q > 0 for every ordered configuration of n points at alpha = 1.
inline PositivityClaim positivity_implies(const PositivityReport &r)
{
    if (!r.complete || !r.full) throw ValidationError("report does not cover the whole pfaffian");
    if (r.stats.n_terms == 0) throw ValidationError("pfaffian is the zero polynomial");
    if (!r.all_nonneg) throw ValidationError("pfaffian has a negative coefficient");
    std::string s = "Pf Q > 0 for every ordered collinear configuration of " + std::to_string(r.n) +
                    " points with alpha = 1";
    if (r.variant == Variant::PTilde)
        s += " (via the bordered crisscross matrix of order " + std::to_string(r.n) + ")";
    return {r.n, r.variant, s};
}

} // namespace pfaffcc

#endif
