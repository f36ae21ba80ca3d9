#pragma once

#include <optional>
#include <vector>

#include "rootcross/polynomial.hpp"

namespace rootcross {

enum class CrossingKind { Up, Down, Tangent };

const char* to_string(CrossingKind kind);

/// A point where the image curve f_r(t) = f(r e^{it}) meets the real axis.
struct Crossing {
    double r = 0.0;
    double theta = 0.0;  ///< in [0, 2pi)
    double x = 0.0;      ///< Re f_r(theta)
    CrossingKind kind = CrossingKind::Tangent;

    Complex preimage() const { return std::polar(r, theta); }
    friend bool operator==(const Crossing&, const Crossing&) = default;
};

inline constexpr double kClassificationTolerance = 1e-9;

/// f(r e^{i theta}).
Complex curve_point(const Polynomial& p, double r, double theta);

/// d/dtheta f_r(theta) = i r e^{i theta} f'(r e^{i theta}).
///
/// Along an r-parameterized crossing path this is the quantity the r-system is
/// built from; along a theta-parameterized path (where r depends on theta) it
/// is the same derivative evaluated at the current (r, theta), so one function
/// serves both systems.
Complex alpha(const Polynomial& p, double r, double theta);

/// Largest |Im f_r| that still counts as lying on the real axis.
///
/// 1e-12 (1 + |f|) plus a rounding floor proportional to sum |a_n| r^n, so the
/// test stays meaningful where f is small next to its terms (near roots).
double crossing_tolerance(const Polynomial& p, double r, Complex f);

/// Up / Down / Tangent by the sign of Im alpha relative to tol * |alpha|.
/// Throws NotOnAxis if (r, theta) is not on the real axis.
CrossingKind classify_crossing(const Polynomial& p, double r, double theta,
                               double tol = kClassificationTolerance);

/// Default theta grid size for find_crossings: max(64, 16 N).
int default_crossing_samples(const Polynomial& p);

/// All real-axis crossings of f_r, sorted by theta.
///
/// Sign changes of Im f_r on a uniform grid are bisected; local minima of
/// |Im f_r| without a sign change are minimized to catch tangencies and
/// crossing pairs that fall inside a single grid cell.
std::vector<Crossing> find_crossings(const Polynomial& p, double r, int samples = 0);

/// Crossing inside [a, b] when Im f_r changes sign between the endpoints.
std::optional<Crossing> bracketed_crossing(const Polynomial& p, double r, double a, double b);

/// f_r(2 pi k / m) for k = 0 .. m-1.
std::vector<Complex> sample_curve(const Polynomial& p, double r, int m);

/// Build a Crossing from a point known to be on the axis.
Crossing make_crossing(const Polynomial& p, double r, double theta,
                       double tol = kClassificationTolerance);

}  // namespace rootcross
