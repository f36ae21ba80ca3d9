#include "rootcross/curve_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rootcross {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

double im_curve(const Polynomial& p, double r, double theta)
{
    return curve_point(p, r, theta).imag();
}

// Bisect a sign change of Im f_r on [a, b] down to adjacent doubles.
double bisect_sign_change(const Polynomial& p, double r, double a, double b, double ga)
{
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b)
            break;
        const double gm = im_curve(p, r, mid);
        if (gm == 0.0)
            return mid;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    return std::abs(im_curve(p, r, a)) <= std::abs(im_curve(p, r, b)) ? a : b;
}

// Golden-section minimum of sign * Im f_r on [a, b].
double golden_minimum(const Polynomial& p, double r, double a, double b, double sign)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = sign * im_curve(p, r, c);
    double fd = sign * im_curve(p, r, d);
    for (int it = 0; it < 200 && (b - a) > 4.0 * kEps * std::max(1.0, std::abs(b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sign * im_curve(p, r, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sign * im_curve(p, r, d);
        }
    }
    return fc < fd ? c : d;
}

CrossingKind kind_of(Complex a, double tol)
{
    const double band = tol * std::abs(a);
    if (a.imag() > band)
        return CrossingKind::Up;
    if (a.imag() < -band)
        return CrossingKind::Down;
    return CrossingKind::Tangent;
}

}  // namespace

const char* to_string(CrossingKind kind)
{
    switch (kind) {
    case CrossingKind::Up: return "up";
    case CrossingKind::Down: return "down";
    case CrossingKind::Tangent: return "tangent";
    }
    return "unknown";
}

Complex curve_point(const Polynomial& p, double r, double theta)
{
    return p.eval(std::polar(r, theta));
}

Complex alpha(const Polynomial& p, double r, double theta)
{
    const Complex z = std::polar(r, theta);
    const auto [f, df] = p.eval_with_derivative(z);
    (void)f;
    return Complex{0.0, 1.0} * z * df;
}

double crossing_tolerance(const Polynomial& p, double r, Complex f)
{
    const double rounding = 8.0 * (p.degree() + 1) * kEps * p.magnitude_at(r);
    return 1e-12 * (1.0 + std::abs(f)) + rounding;
}

CrossingKind classify_crossing(const Polynomial& p, double r, double theta, double tol)
{
    const Complex f = curve_point(p, r, theta);
    if (!(std::abs(f.imag()) < crossing_tolerance(p, r, f)))
        throw Error(ErrorCode::NotOnAxis, "point is not on the real axis");
    return kind_of(alpha(p, r, theta), tol);
}

Crossing make_crossing(const Polynomial& p, double r, double theta, double tol)
{
    const double t = wrap_angle(theta);
    const CrossingKind kind = classify_crossing(p, r, t, tol);
    return Crossing{r, t, curve_point(p, r, t).real(), kind};
}

int default_crossing_samples(const Polynomial& p)
{
    return std::max(64, 16 * p.degree());
}

std::vector<Crossing> find_crossings(const Polynomial& p, double r, int samples)
{
    if (!(r > 0.0))
        throw Error(ErrorCode::InvalidInput, "radius must be positive");
    if (samples <= 0)
        samples = default_crossing_samples(p);
    if (samples < 4 * p.degree() || samples < 4)
        throw Error(ErrorCode::InvalidInput, "crossing grid needs at least 4 samples per degree");

    const auto m = static_cast<std::size_t>(samples);
    const double h = kTwoPi / static_cast<double>(samples);
    std::vector<double> grid(m + 1);
    std::vector<double> g(m + 1);
    for (std::size_t k = 0; k < m; ++k) {
        grid[k] = h * static_cast<double>(k);
        g[k] = im_curve(p, r, grid[k]);
    }
    grid[m] = kTwoPi;
    g[m] = g[0];

    std::vector<double> found;
    auto record = [&](double theta) { found.push_back(theta); };

    for (std::size_t k = 0; k < m; ++k) {
        if (g[k] == 0.0) {
            record(grid[k]);
        } else if ((g[k] < 0.0) != (g[k + 1] < 0.0) && g[k + 1] != 0.0) {
            record(bisect_sign_change(p, r, grid[k], grid[k + 1], g[k]));
        }

        // local minimum of |Im f_r| with no sign change on either side
        const std::size_t km = (k == 0) ? m - 1 : k - 1;
        const double gl = g[km];
        const double gr = g[k + 1];
        const bool same_sign = g[k] != 0.0 && (gl < 0.0) == (g[k] < 0.0) && (gr < 0.0) == (g[k] < 0.0)
                               && gl != 0.0 && gr != 0.0;
        if (!same_sign || !(std::abs(g[k]) < std::abs(gl)) || !(std::abs(g[k]) <= std::abs(gr)))
            continue;
        const double sign = g[k] > 0.0 ? 1.0 : -1.0;
        const double a = grid[k] - h;
        const double b = grid[k + 1];
        const double tmin = golden_minimum(p, r, a, b, sign);
        const Complex fmin = curve_point(p, r, tmin);
        const double v = sign * fmin.imag();
        if (std::abs(v) < crossing_tolerance(p, r, fmin)) {
            record(tmin);
        } else if (v < 0.0) {
            record(bisect_sign_change(p, r, a, tmin, gl));
            record(bisect_sign_change(p, r, tmin, b, fmin.imag()));
        }
    }

    std::vector<Crossing> out;
    out.reserve(found.size());
    for (double t : found) {
        const double tw = wrap_angle(t);
        const Complex f = curve_point(p, r, tw);
        out.push_back(Crossing{r, tw, f.real(), kind_of(alpha(p, r, tw), kClassificationTolerance)});
    }
    std::sort(out.begin(), out.end(), [](const Crossing& l, const Crossing& rr) { return l.theta < rr.theta; });
    return out;
}

std::optional<Crossing> bracketed_crossing(const Polynomial& p, double r, double a, double b)
{
    const double ga = im_curve(p, r, a);
    const double gb = im_curve(p, r, b);
    double t = 0.0;
    if (ga == 0.0)
        t = a;
    else if (gb == 0.0)
        t = b;
    else if ((ga < 0.0) != (gb < 0.0))
        t = bisect_sign_change(p, r, a, b, ga);
    else
        return std::nullopt;
    const double tw = wrap_angle(t);
    const Complex f = curve_point(p, r, tw);
    return Crossing{r, tw, f.real(), kind_of(alpha(p, r, tw), kClassificationTolerance)};
}

std::vector<Complex> sample_curve(const Polynomial& p, double r, int m)
{
    if (m <= 0)
        throw Error(ErrorCode::InvalidInput, "sample count must be positive");
    std::vector<Complex> pts;
    pts.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
        pts.push_back(curve_point(p, r, kTwoPi * k / m));
    return pts;
}

}  // namespace rootcross
