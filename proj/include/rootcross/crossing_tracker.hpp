#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "rootcross/curve_geometry.hpp"
#include "rootcross/polynomial.hpp"

namespace rootcross {

/// Which variable parameterizes the crossing path.
enum class Param {
    RSystem,      ///< r independent; (theta, x) follow dtheta/dr, dx/dr
    ThetaSystem,  ///< theta independent; (r, x) follow dr/dtheta, dx/dtheta
};

enum class Heading { Rightward, Leftward };

const char* to_string(Param param);
const char* to_string(Heading heading);

struct TrackState {
    double r = 0.0;
    double theta = 0.0;
    double x = 0.0;
    Param param = Param::RSystem;
    int direction = 1;     ///< sign of the independent variable's increase
    double step = 1e-2;    ///< next trial step (relative in r, radians in theta)

    Complex point() const { return std::polar(r, theta); }
    friend bool operator==(const TrackState&, const TrackState&) = default;
};

struct RootFound {
    Complex root;        ///< Newton-polished
    Complex located;     ///< where the track itself put x = 0
    double residual = 0.0;
    friend bool operator==(const RootFound&, const RootFound&) = default;
};
struct CriticalPointHit {
    Complex location;
    friend bool operator==(const CriticalPointHit&, const CriticalPointHit&) = default;
};
struct BoundaryReached {
    double r_limit = 0.0;
    friend bool operator==(const BoundaryReached&, const BoundaryReached&) = default;
};
struct StepLimit {
    int steps = 0;
    friend bool operator==(const StepLimit&, const StepLimit&) = default;
};

using TrackEvent = std::variant<RootFound, CriticalPointHit, BoundaryReached, StepLimit>;

const char* event_name(const TrackEvent& event);

struct Trajectory {
    Heading heading = Heading::Rightward;
    std::vector<TrackState> states;
    TrackEvent event = StepLimit{};
};

struct TrackerOptions {
    double c = 0.5;            ///< switch to the theta-system when |Im a| <= c |Re a|
    double hysteresis = 0.1;   ///< relative band around c
    double initial_step = 1e-2;
    double min_step = 1e-13;
    double max_step = 0.1;
    double rtol = 1e-9;
    double atol = 1e-12;
    int max_steps = 20000;
    double root_tol = 1e-8;       ///< |x| < root_tol (1 + |a_N| r^N) ends a track at a root
    double residual_tol = 1e-10;  ///< relative residual a polished root must reach
    double critical_tol = 1e-10;  ///< |alpha| <= critical_tol * sum n |a_n| r^n is a critical point
    double r_min = 1e-8;
    double r_max_factor = 4.0;    ///< tracks stop beyond r_max_factor * cauchy_bound
    double nu = 0.0;              ///< rotation applied before single-root tracking
    int max_rotations = 4;

    /// Throws InvalidInput when a field is out of range.
    void validate() const;
};

struct RadialRates {
    double dphi_dr;
    double dx_dr;
};

struct AngularRates {
    double drho_dtheta;
    double dx_dtheta;
};

/// dphi/dr = Re a / (r Im a), dx/dr = |a|^2 / (r Im a) with a = alpha(p, r, theta).
/// Throws TangencySingular if |Im a| <= threshold |a|.
RadialRates rhs_r(const Polynomial& p, double r, double theta, double threshold = 1e-12);

/// drho/dtheta = r Im a / Re a, dx/dtheta = |a|^2 / Re a.
/// Throws RadialSingular if |Re a| <= threshold |a|.
AngularRates rhs_theta(const Polynomial& p, double r, double theta, double threshold = 1e-12);

/// RSystem when |Im a| > c |Re a|, otherwise ThetaSystem.
/// Throws CriticalPoint when |a| <= abs_tol.
Param choose_param(Complex alpha_val, double c, double abs_tol = 0.0);

/// One accepted adaptive step in the requested heading.
///
/// The trial step is integrated with Dormand-Prince 5(4) in the active system,
/// then projected back onto Im f_r = 0 (along theta for the r-system, along r
/// for the theta-system) and x is reset to Re f. A trial is rejected if its
/// error is too large, if projection fails, if x does not move in the heading
/// direction, or if the active denominator changed sign. The returned state
/// carries the re-chosen parameterization and direction.
///
/// Throws CriticalPoint when alpha vanishes at s, StepUnderflow when no step
/// above opts.min_step is accepted.
TrackState step(const Polynomial& p, const TrackState& s, Heading heading, const TrackerOptions& opts);

/// Initial state for a track starting at a non-tangent crossing.
TrackState initial_state(const Polynomial& p, const Crossing& start, Heading heading,
                         const TrackerOptions& opts);

/// Follow a crossing until x reaches 0, alpha vanishes, r leaves
/// [r_min, r_max_factor * cauchy_bound], or the step budget is spent.
/// Terminal conditions are reported through Trajectory::event, never thrown.
Trajectory track(const Polynomial& p, const Crossing& start, Heading heading, const TrackerOptions& opts);

/// e^{-i nu} p. Same roots; the preimage of the real axis becomes f^{-1}(e^{i nu} R).
Polynomial rotate(const Polynomial& p, double nu);

/// At most max_iter Newton iterations; returns the iterate with the smallest |p|.
Complex newton_polish(const Polynomial& p, Complex z, int max_iter = 20);

/// Largest r = 2^-k (k >= 0) with sum_{n>=1} |a_n| r^n < 0.5.
double small_radius(const Polynomial& p);

/// Rightmost upcrossing with x < 0, searched outward from small_radius(p).
/// Throws Unconverged if none exists below the Cauchy bound.
Crossing starting_crossing(const Polynomial& p);

/// True if p' has a zero on the real segment [a, b].
bool derivative_vanishes_on_segment(const Polynomial& p, double a = -1.0, double b = 0.0);

struct SingleRoot {
    Complex root;
    double residual = 0.0;  ///< relative residual against the input polynomial
    int rotations = 0;      ///< attempts that used a rotated polynomial
    double nu = 0.0;        ///< rotation of the successful attempt
    std::vector<TrackEvent> failed;  ///< terminal events of abandoned attempts
    Trajectory trajectory;
};

/// One root by tracking the small-radius upcrossing rightward, retrying on
/// rotated copies of the polynomial when a critical point is met (or when p'
/// vanishes on [-1, 0], where the unrotated path is not guaranteed).
/// Throws DegreeZero or Unconverged.
SingleRoot locate_single_root(const Polynomial& p, const TrackerOptions& opts);

inline Complex find_single_root(const Polynomial& p, const TrackerOptions& opts)
{
    return locate_single_root(p, opts).root;
}

}  // namespace rootcross
