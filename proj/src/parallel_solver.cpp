#include "rootcross/parallel_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

namespace rootcross {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kDeflationTolerance = 1e-6;
constexpr int kMaxCensusDoublings = 6;

struct Stripped {
    Polynomial q;  // normalized, or a constant when p = c z^k
    int zeros = 0;
};

Stripped strip_zero_roots(const Polynomial& p)
{
    Polynomial cur = p;
    int zeros = 0;
    while (cur.degree() >= 1) {
        auto n = normalize(cur);
        if (auto* q = std::get_if<Polynomial>(&n))
            return {std::move(*q), zeros};
        cur = shift_down(cur);
        ++zeros;
    }
    return {cur, zeros};
}

Heading heading_for(const Crossing& c)
{
    return c.kind == CrossingKind::Up ? Heading::Leftward : Heading::Rightward;
}

std::vector<Trajectory> run_tracks(const Polynomial& q, const std::vector<Crossing>& starts, const SolverOptions& opts)
{
    const std::size_t n = starts.size();
    std::vector<Trajectory> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (opts.schedule_seed) {
        std::mt19937_64 rng(*opts.schedule_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            const std::size_t idx = order[i];
            try {
                out[idx] = track(q, starts[idx], heading_for(starts[idx]), opts.tracker);
            } catch (...) {
                errors[idx] = std::current_exception();
            }
        }
    };

    std::size_t threads = opts.threads > 0 ? static_cast<std::size_t>(opts.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(work);
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

// Roots of `current` one at a time, each refined against `reference`. With
// keep_partial set, a failed single-root step ends the loop instead of throwing.
std::vector<Complex> deflation_roots(Polynomial current, const Polynomial& reference, const TrackerOptions& opts,
                                     bool keep_partial = false)
{
    std::vector<Complex> out;
    while (current.degree() >= 1) {
        try {
            const Complex z = locate_single_root(current, opts).root;
            out.push_back(refine_root(reference, z).root);
            current = deflate(current, z, kDeflationTolerance).quotient;
        } catch (const Error& e) {
            if (!keep_partial || (e.code() != ErrorCode::Unconverged && e.code() != ErrorCode::NotARoot))
                throw;
            break;
        }
    }
    return out;
}

void finish_report(SolverReport& rep, const Polynomial& p, std::vector<RootEntry> entries, int zeros)
{
    if (zeros > 0)
        entries.push_back(RootEntry{Complex{}, 0.0, zeros});
    for (RootEntry& e : entries)
        e.residual = relative_residual(p, e.root);
    std::sort(entries.begin(), entries.end(), [](const RootEntry& a, const RootEntry& b) {
        return a.root.real() != b.root.real() ? a.root.real() < b.root.real() : a.root.imag() < b.root.imag();
    });
    int total = 0;
    for (const RootEntry& e : entries)
        total += e.multiplicity;
    rep.roots = std::move(entries);
    rep.complete = total == p.degree();
    rep.vieta = vieta_check(p, rep.roots);
}

}  // namespace

const char* to_string(SolveMode mode)
{
    return mode == SolveMode::Parallel ? "parallel" : "deflation";
}

std::vector<Crossing> initial_crossings(const Polynomial& p)
{
    const int n = p.degree();
    if (n < 1)
        throw Error(ErrorCode::DegreeZero, "degree must be >= 1");
    const double phase = std::arg(p.leading());
    const double half = std::numbers::pi / (2.0 * n);
    double r = 2.0 * cauchy_bound(p);
    for (int attempt = 0; attempt <= kMaxCensusDoublings; ++attempt, r *= 2.0) {
        std::vector<Crossing> out;
        for (int k = 0; k < 2 * n; ++k) {
            const double seed = (k * std::numbers::pi - phase) / n;
            if (auto c = bracketed_crossing(p, r, seed - half, seed + half))
                out.push_back(*c);
        }
        std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.theta < b.theta; });
        out.erase(std::unique(out.begin(), out.end(),
                              [](const Crossing& a, const Crossing& b) { return std::abs(a.theta - b.theta) < 1e-14; }),
                  out.end());
        int up = 0;
        int down = 0;
        for (const Crossing& c : out) {
            up += c.kind == CrossingKind::Up && c.x > 0.0;
            down += c.kind == CrossingKind::Down && c.x < 0.0;
        }
        if (up >= n && down >= n)
            return out;
    }
    throw Error(ErrorCode::CensusShortfall, "large-radius crossing census fell short");
}

int estimate_multiplicity(const Polynomial& p, Complex z, double tol)
{
    int m = 0;
    Polynomial d = p;
    while (m < p.degree() && relative_residual(d, z) <= tol) {
        ++m;
        d = derivative(d);
    }
    return m;
}

RefinedRoot refine_root(const Polynomial& p, Complex z)
{
    const Complex z1 = newton_polish(p, z);
    RefinedRoot best{z1, 1};
    Polynomial d = p;
    const int limit = std::min(p.degree(), 10);
    for (int m = 2; m <= limit; ++m) {
        d = derivative(d);
        const Complex zm = newton_polish(d, best.root, 100);
        if (std::abs(zm - z1) > 1e-3 * (1.0 + std::abs(z1)))
            break;
        if (estimate_multiplicity(p, zm) < m)
            break;
        best = {zm, m};
    }
    return best;
}

std::vector<RootEntry> dedupe(const std::vector<Complex>& roots, const Polynomial& p)
{
    const std::size_t n = roots.size();
    std::vector<Complex> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = refine_root(p, roots[i]).root;

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double radius = std::max(1e-7, 1e-7 * std::max(std::abs(z[i]), std::abs(z[j])));
            if (std::abs(z[i] - z[j]) <= radius)
                parent[find(j)] = find(i);
        }

    // clusters in order of first appearance
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::ptrdiff_t> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
            clusters.emplace_back();
        }
        clusters[static_cast<std::size_t>(slot[root])].push_back(i);
    }

    std::vector<RootEntry> out;
    int budget = p.degree();
    for (const auto& members : clusters) {
        if (budget <= 0)
            break;
        Complex num{};
        double den = 0.0;
        for (std::size_t i : members) {
            const double w = 1.0 / (std::abs(p.eval(z[i])) + kEps * p.magnitude_at(std::abs(z[i])) + 1e-300);
            num += w * z[i];
            den += w;
        }
        const Complex center = num / den;
        const int by_derivatives = std::max(1, estimate_multiplicity(p, center));
        const int mult = std::min({static_cast<int>(members.size()), by_derivatives, budget});
        budget -= mult;
        out.push_back(RootEntry{center, relative_residual(p, center), mult});
    }
    std::sort(out.begin(), out.end(), [](const RootEntry& a, const RootEntry& b) {
        return a.root.real() != b.root.real() ? a.root.real() < b.root.real() : a.root.imag() < b.root.imag();
    });
    return out;
}

VietaCheck vieta_check(const Polynomial& p, const std::vector<RootEntry>& roots)
{
    const int n = p.degree();
    const Complex lead = p.leading();
    Complex sum{};
    Complex prod{1.0, 0.0};
    for (const RootEntry& e : roots) {
        sum += static_cast<double>(e.multiplicity) * e.root;
        for (int k = 0; k < e.multiplicity; ++k)
            prod *= e.root;
    }
    const Complex sum_target = -p[n - 1] / lead;
    const Complex prod_target = (n % 2 == 0 ? 1.0 : -1.0) * p[0] / lead;
    return VietaCheck{std::abs(sum - sum_target) / (1.0 + std::abs(sum_target)),
                      std::abs(prod - prod_target) / (1.0 + std::abs(prod_target))};
}

SolverReport solve_parallel(const Polynomial& p, const SolverOptions& opts, std::vector<Trajectory>* trajectories)
{
    if (p.degree() < 1)
        throw Error(ErrorCode::DegreeZero, "degree must be >= 1");
    opts.tracker.validate();

    SolverReport rep;
    rep.mode = SolveMode::Parallel;
    rep.degree = p.degree();

    auto [q, zeros] = strip_zero_roots(p);
    std::vector<RootEntry> entries;
    if (q.degree() >= 1) {
        const std::vector<Crossing> starts = initial_crossings(q);
        std::vector<Trajectory> tracks = run_tracks(q, starts, opts);

        std::vector<Complex> candidates;
        for (std::size_t i = 0; i < starts.size(); ++i) {
            const Trajectory& t = tracks[i];
            rep.tracks.push_back(TrackRecord{starts[i], t.heading, t.event, static_cast<int>(t.states.size())});
            if (const auto* rf = std::get_if<RootFound>(&t.event))
                candidates.push_back(rf->root);
        }
        entries = dedupe(candidates, q);

        int found = 0;
        for (const RootEntry& e : entries)
            found += e.multiplicity;
        if (found < q.degree()) {
            Polynomial quotient = q;
            std::vector<Complex> all;
            bool deflated = true;
            for (const RootEntry& e : entries)
                for (int k = 0; k < e.multiplicity; ++k) {
                    all.push_back(e.root);
                    if (!deflated)
                        continue;
                    const Complex z = newton_polish(quotient, e.root);
                    try {
                        quotient = deflate(quotient, z, kDeflationTolerance).quotient;
                    } catch (const Error&) {
                        deflated = false;
                    }
                }
            if (deflated)
                for (const Complex& z : deflation_roots(quotient, q, opts.tracker, true))
                    all.push_back(z);
            entries = dedupe(all, q);
            rep.fallback_used = true;
        }
        if (trajectories)
            *trajectories = std::move(tracks);
    }
    finish_report(rep, p, std::move(entries), zeros);
    return rep;
}

SolverReport solve_deflation(const Polynomial& p, const SolverOptions& opts)
{
    if (p.degree() < 1)
        throw Error(ErrorCode::DegreeZero, "degree must be >= 1");
    opts.tracker.validate();

    SolverReport rep;
    rep.mode = SolveMode::Deflation;
    rep.degree = p.degree();

    auto [q, zeros] = strip_zero_roots(p);
    std::vector<RootEntry> entries;
    if (q.degree() >= 1)
        entries = dedupe(deflation_roots(q, q, opts.tracker), q);
    finish_report(rep, p, std::move(entries), zeros);
    return rep;
}

}  // namespace rootcross
