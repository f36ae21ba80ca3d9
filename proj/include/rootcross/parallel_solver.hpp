#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rootcross/crossing_tracker.hpp"

namespace rootcross {

enum class SolveMode { Parallel, Deflation };

const char* to_string(SolveMode mode);

struct RootEntry {
    Complex root;
    double residual = 0.0;  ///< relative residual against the input polynomial
    int multiplicity = 1;
    friend bool operator==(const RootEntry&, const RootEntry&) = default;
};

struct TrackRecord {
    Crossing start;
    Heading heading = Heading::Rightward;
    TrackEvent event;
    int steps = 0;
    friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

/// Relative errors of the root-coefficient identities:
/// |sum g + a_{N-1}/a_N| / (1 + |a_{N-1}/a_N|) and
/// |prod g - (-1)^N a_0/a_N| / (1 + |a_0/a_N|), multiplicities counted.
struct VietaCheck {
    double sum_error = 0.0;
    double product_error = 0.0;
    friend bool operator==(const VietaCheck&, const VietaCheck&) = default;
};

struct SolverReport {
    SolveMode mode = SolveMode::Parallel;
    int degree = 0;
    bool complete = false;       ///< multiplicities sum to the degree
    bool fallback_used = false;  ///< parallel mode finished missing roots by deflation
    std::vector<RootEntry> roots;
    std::vector<TrackRecord> tracks;
    VietaCheck vieta;
    friend bool operator==(const SolverReport&, const SolverReport&) = default;
};

struct SolverOptions {
    TrackerOptions tracker;
    int threads = 0;                           ///< 0: hardware concurrency, 1: sequential
    std::optional<std::uint64_t> schedule_seed;  ///< shuffle task start order
    double vieta_tol = 1e-8;
};

/// Crossings at r0 = 2 * cauchy_bound(p), one per leading-term seed angle
/// (arg a_N + N theta = k pi), each refined by bisection inside its seed
/// bracket. Doubles r0 up to 6 times until at least N upcrossings lie at
/// x > 0 and N downcrossings at x < 0; throws CensusShortfall otherwise.
std::vector<Crossing> initial_crossings(const Polynomial& p);

/// Multiplicity suggested by vanishing Taylor coefficients at z: the largest m
/// with |p^(k)(z)| / sum |d^k a_n z^n| <= tol for every k < m (0 if p(z) is
/// not small).
int estimate_multiplicity(const Polynomial& p, Complex z, double tol = 1e-8);

struct RefinedRoot {
    Complex root;
    int multiplicity = 1;
};

/// Newton polish, then for a suspected m-fold root Newton on p^(m-1), which
/// has a simple root there and converges past the usual multiple-root limit.
RefinedRoot refine_root(const Polynomial& p, Complex z);

/// Single-linkage clusters of radius max(1e-7, 1e-7 |root|), centered at the
/// residual-weighted mean; multiplicity = min(cluster size, derivative test,
/// remaining degree). Output is sorted by (re, im).
std::vector<RootEntry> dedupe(const std::vector<Complex>& roots, const Polynomial& p);

VietaCheck vieta_check(const Polynomial& p, const std::vector<RootEntry>& roots);

/// All roots from the 2N large-radius crossings: upcrossings tracked
/// leftward, downcrossings rightward, concurrently. Missing roots are
/// recovered by deflating the found ones and running solve_deflation on the
/// quotient; if that also fails the report comes back with complete = false
/// rather than an exception. When trajectories is given it receives every track in start order.
SolverReport solve_parallel(const Polynomial& p, const SolverOptions& opts = {},
                            std::vector<Trajectory>* trajectories = nullptr);

/// Repeated single-root tracking and deflation; every root is polished
/// against the input polynomial. Throws Unconverged from the single-root step.
SolverReport solve_deflation(const Polynomial& p, const SolverOptions& opts = {});

}  // namespace rootcross
