#include "rootcross/crossing_tracker.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rootcross/dormand_prince.hpp"

namespace rootcross {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kStageSingular = 1e-12;
// an underflowing step this close to f' = 0 is reported as a critical point
constexpr double kUnderflowCritical = 1e-4;
constexpr std::array<double, 4> kRotationSchedule{0.05, 0.11, 0.23, 0.47};

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

double heading_sign(Heading h) { return h == Heading::Rightward ? 1.0 : -1.0; }

// sum n |a_n| r^n, the scale of |alpha| at radius r
double alpha_scale(const Polynomial& p, double r)
{
    double acc = 0.0;
    double rn = 1.0;
    for (int n = 1; n <= p.degree(); ++n) {
        rn *= r;
        acc += n * std::abs(p[n]) * rn;
    }
    return acc;
}

bool is_critical(const Polynomial& p, double r, Complex a, double tol)
{
    return std::abs(a) <= tol * alpha_scale(p, r);
}

Param select_param(Complex a, double c, double hysteresis, Param current)
{
    const double ce = current == Param::RSystem ? c * (1.0 - hysteresis) : c * (1.0 + hysteresis);
    return std::abs(a.imag()) > ce * std::abs(a.real()) ? Param::RSystem : Param::ThetaSystem;
}

int direction_for(Param param, Complex a, Heading heading)
{
    const double s = param == Param::RSystem ? sign_of(a.imag()) : sign_of(a.real());
    return static_cast<int>(s * heading_sign(heading));
}

double projection_limit(const Polynomial& p, double r, Complex f)
{
    return 1e-10 * (1.0 + std::abs(f)) + 8.0 * (p.degree() + 1) * kEps * p.magnitude_at(r);
}

struct Advance {
    TrackState state;
    Complex alpha;
    double err = 0.0;
};

// Newton on theta at fixed r; returns the projected theta or nullopt.
std::optional<double> project_theta(const Polynomial& p, double r, double theta)
{
    for (int it = 0; it < 30; ++it) {
        const Complex f = curve_point(p, r, theta);
        if (std::abs(f.imag()) <= crossing_tolerance(p, r, f))
            return theta;
        const Complex a = alpha(p, r, theta);
        if (a.imag() == 0.0)
            return std::nullopt;
        const double d = f.imag() / a.imag();
        theta -= d;
        if (std::abs(d) <= 4.0 * kEps * std::max(1.0, std::abs(theta)))
            break;
    }
    const Complex f = curve_point(p, r, theta);
    if (std::abs(f.imag()) < projection_limit(p, r, f))
        return theta;
    return std::nullopt;
}

// Newton on r at fixed theta.
std::optional<double> project_radius(const Polynomial& p, double r, double theta)
{
    for (int it = 0; it < 30; ++it) {
        const Complex f = curve_point(p, r, theta);
        if (std::abs(f.imag()) <= crossing_tolerance(p, r, f))
            return r;
        const Complex a = alpha(p, r, theta);
        if (a.real() == 0.0)
            return std::nullopt;
        const double d = r * f.imag() / a.real();
        r += d;
        if (!(r > 0.0))
            return std::nullopt;
        if (std::abs(d) <= 4.0 * kEps * r)
            break;
    }
    const Complex f = curve_point(p, r, theta);
    if (std::abs(f.imag()) < projection_limit(p, r, f))
        return r;
    return std::nullopt;
}

// One Dormand-Prince trial of normalized size du in the given system, followed
// by projection. du is relative (dr = du * r) for the r-system and in radians
// for the theta-system.
std::optional<Advance> advance(const Polynomial& p, const TrackState& s, Param param, double du,
                               const TrackerOptions& opts)
{
    using Y = ode::Vec<2>;
    double r1 = 0.0;
    double theta1 = 0.0;
    double err = 0.0;

    if (param == Param::RSystem) {
        auto rhs = [&](double r, const Y& y) -> std::optional<Y> {
            if (!(r > 0.0))
                return std::nullopt;
            const Complex a = alpha(p, r, y[0]);
            if (!(std::abs(a.imag()) > kStageSingular * std::abs(a)))
                return std::nullopt;
            return Y{a.real() / (r * a.imag()), std::norm(a) / (r * a.imag())};
        };
        const double dr = du * s.r;
        const auto trial = ode::dopri5_step<2>(rhs, s.r, Y{s.theta, s.x}, dr);
        if (!trial)
            return std::nullopt;
        r1 = s.r + dr;
        if (!(r1 > 0.0))
            return std::nullopt;
        const double sc_theta = opts.atol + opts.rtol * std::max({1.0, std::abs(s.theta), std::abs(trial->y[0])});
        const double sc_x = opts.atol * (1.0 + p.magnitude_at(r1))
                            + opts.rtol * std::max(std::abs(s.x), std::abs(trial->y[1]));
        err = std::max(std::abs(trial->error[0]) / sc_theta, std::abs(trial->error[1]) / sc_x);
        const auto projected = project_theta(p, r1, trial->y[0]);
        if (!projected || std::abs(*projected - trial->y[0]) > std::max(1e-6, 0.01 * std::abs(du)))
            return std::nullopt;
        theta1 = *projected;
    } else {
        auto rhs = [&](double theta, const Y& y) -> std::optional<Y> {
            if (!(y[0] > 0.0))
                return std::nullopt;
            const Complex a = alpha(p, y[0], theta);
            if (!(std::abs(a.real()) > kStageSingular * std::abs(a)))
                return std::nullopt;
            return Y{y[0] * a.imag() / a.real(), std::norm(a) / a.real()};
        };
        const auto trial = ode::dopri5_step<2>(rhs, s.theta, Y{s.r, s.x}, du);
        if (!trial || !(trial->y[0] > 0.0))
            return std::nullopt;
        theta1 = s.theta + du;
        const double rr = std::max(s.r, trial->y[0]);
        const double sc_r = (opts.atol + opts.rtol) * rr;
        const double sc_x = opts.atol * (1.0 + p.magnitude_at(rr))
                            + opts.rtol * std::max(std::abs(s.x), std::abs(trial->y[1]));
        err = std::max(std::abs(trial->error[0]) / sc_r, std::abs(trial->error[1]) / sc_x);
        const auto projected = project_radius(p, trial->y[0], theta1);
        if (!projected || std::abs(*projected - trial->y[0]) > std::max(1e-6, 0.01 * std::abs(du)) * rr)
            return std::nullopt;
        r1 = *projected;
    }

    const Complex f = curve_point(p, r1, theta1);
    Advance out;
    out.state = s;
    out.state.r = r1;
    out.state.theta = wrap_angle(theta1);
    out.state.x = f.real();
    out.alpha = alpha(p, r1, theta1);
    out.err = err;
    return out;
}

struct StepOutcome {
    TrackState state;
    Complex alpha;
    Param used = Param::RSystem;
    double du = 0.0;
};

StepOutcome attempt_step(const Polynomial& p, const TrackState& s, Heading heading, const TrackerOptions& opts)
{
    const Complex a0 = alpha(p, s.r, s.theta);
    if (is_critical(p, s.r, a0, opts.critical_tol))
        throw Error(ErrorCode::CriticalPoint, "alpha vanishes at the tracked point");
    const Param param = select_param(a0, opts.c, opts.hysteresis, s.param);
    const int dir = direction_for(param, a0, heading);
    const double hs = heading_sign(heading);

    double h = std::clamp(s.step, opts.min_step, opts.max_step);
    while (h >= opts.min_step) {
        const double du = dir * h;
        const auto adv = advance(p, s, param, du, opts);
        if (!adv) {
            h *= 0.5;
            continue;
        }
        if (!(adv->err <= 1.0)) {
            h *= std::max(0.2, ode::step_factor(adv->err));
            continue;
        }
        const bool moved = hs * (adv->state.x - s.x) > 0.0;
        const bool same_branch = param == Param::RSystem
                                     ? sign_of(adv->alpha.imag()) == sign_of(a0.imag())
                                     : sign_of(adv->alpha.real()) == sign_of(a0.real());
        if (!moved || !same_branch) {
            h *= 0.5;
            continue;
        }
        StepOutcome out{adv->state, adv->alpha, param, du};
        out.state.param = select_param(adv->alpha, opts.c, opts.hysteresis, param);
        out.state.direction = direction_for(out.state.param, adv->alpha, heading);
        out.state.step = std::clamp(h * ode::step_factor(adv->err), opts.min_step, opts.max_step);
        return out;
    }
    throw Error(ErrorCode::StepUnderflow, "step size fell below the minimum");
}

double root_tolerance(const Polynomial& p, double r, const TrackerOptions& opts)
{
    return opts.root_tol * (1.0 + std::abs(p.leading()) * std::pow(r, p.degree()));
}

bool at_root(const Polynomial& p, const TrackState& s, const TrackerOptions& opts)
{
    const double tol = root_tolerance(p, s.r, opts);
    return std::abs(s.x) < tol && std::abs(p.eval(s.point())) < tol;
}

// Bisect the fraction of a bracketing step until |x| is below the root
// tolerance; returns the closest state found on the far side.
TrackState localize_root(const Polynomial& p, const TrackState& from, const StepOutcome& o, Heading heading,
                         const TrackerOptions& opts)
{
    const double hs = heading_sign(heading);
    TrackState best = o.state;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto adv = advance(p, from, o.used, mid * o.du, opts);
        if (!adv)
            break;
        TrackState cand = o.state;
        cand.r = adv->state.r;
        cand.theta = adv->state.theta;
        cand.x = adv->state.x;
        if (at_root(p, cand, opts))
            return cand;
        if (hs * cand.x < 0.0) {
            lo = mid;
        } else {
            hi = mid;
            best = cand;
        }
    }
    return best;
}

RootFound finish_root(const Polynomial& p, Complex located)
{
    const Complex root = newton_polish(p, located);
    return RootFound{root, located, std::abs(p.eval(root))};
}

}  // namespace

const char* to_string(Param param)
{
    return param == Param::RSystem ? "r" : "theta";
}

const char* to_string(Heading heading)
{
    return heading == Heading::Rightward ? "rightward" : "leftward";
}

const char* event_name(const TrackEvent& event)
{
    switch (event.index()) {
    case 0: return "RootFound";
    case 1: return "CriticalPoint";
    case 2: return "BoundaryReached";
    default: return "StepLimit";
    }
}

void TrackerOptions::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok)
            throw Error(ErrorCode::InvalidInput, what);
    };
    require(c > 0.0 && c < 1.0, "c must lie in (0, 1)");
    require(hysteresis >= 0.0 && hysteresis < 1.0, "hysteresis must lie in [0, 1)");
    require(min_step > 0.0 && min_step <= initial_step && initial_step <= max_step, "step bounds inconsistent");
    require(rtol > 0.0 && atol > 0.0, "integration tolerances must be positive");
    require(max_steps > 0, "max_steps must be positive");
    require(root_tol > 0.0 && residual_tol > 0.0 && critical_tol > 0.0, "tolerances must be positive");
    require(r_min > 0.0 && r_max_factor > 1.0, "radius limits inconsistent");
    require(max_rotations >= 0, "max_rotations must be non-negative");
    require(std::isfinite(nu), "nu must be finite");
}

RadialRates rhs_r(const Polynomial& p, double r, double theta, double threshold)
{
    const Complex a = alpha(p, r, theta);
    if (!(std::abs(a.imag()) > threshold * std::abs(a)))
        throw Error(ErrorCode::TangencySingular, "r-system is singular: Im alpha vanishes");
    return {a.real() / (r * a.imag()), std::norm(a) / (r * a.imag())};
}

AngularRates rhs_theta(const Polynomial& p, double r, double theta, double threshold)
{
    const Complex a = alpha(p, r, theta);
    if (!(std::abs(a.real()) > threshold * std::abs(a)))
        throw Error(ErrorCode::RadialSingular, "theta-system is singular: Re alpha vanishes");
    return {r * a.imag() / a.real(), std::norm(a) / a.real()};
}

Param choose_param(Complex alpha_val, double c, double abs_tol)
{
    if (std::abs(alpha_val) <= abs_tol || alpha_val == Complex{})
        throw Error(ErrorCode::CriticalPoint, "alpha vanishes");
    return std::abs(alpha_val.imag()) > c * std::abs(alpha_val.real()) ? Param::RSystem : Param::ThetaSystem;
}

TrackState step(const Polynomial& p, const TrackState& s, Heading heading, const TrackerOptions& opts)
{
    return attempt_step(p, s, heading, opts).state;
}

TrackState initial_state(const Polynomial& p, const Crossing& start, Heading heading, const TrackerOptions& opts)
{
    const Complex a = alpha(p, start.r, start.theta);
    if (is_critical(p, start.r, a, opts.critical_tol))
        throw Error(ErrorCode::CriticalPoint, "alpha vanishes at the start crossing");
    TrackState s;
    s.r = start.r;
    s.theta = start.theta;
    s.x = start.x;
    s.param = choose_param(a, opts.c);
    s.direction = direction_for(s.param, a, heading);
    s.step = opts.initial_step;
    return s;
}

Trajectory track(const Polynomial& p, const Crossing& start, Heading heading, const TrackerOptions& opts)
{
    opts.validate();
    if (start.kind == CrossingKind::Tangent)
        throw Error(ErrorCode::InvalidInput, "cannot start a track at a tangency");

    Trajectory t;
    t.heading = heading;
    TrackState s;
    try {
        s = initial_state(p, start, heading, opts);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CriticalPoint)
            throw;
        t.event = CriticalPointHit{start.preimage()};
        return t;
    }
    t.states.push_back(s);
    if (at_root(p, s, opts)) {
        t.event = finish_root(p, s.point());
        return t;
    }

    const double r_max = opts.r_max_factor * cauchy_bound(p);
    for (int k = 0; k < opts.max_steps; ++k) {
        StepOutcome o;
        try {
            o = attempt_step(p, s, heading, opts);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CriticalPoint) {
                t.event = CriticalPointHit{s.point()};
                return t;
            }
            if (e.code() == ErrorCode::StepUnderflow) {
                if (is_critical(p, s.r, alpha(p, s.r, s.theta), kUnderflowCritical))
                    t.event = CriticalPointHit{s.point()};
                else
                    t.event = StepLimit{k};
                return t;
            }
            throw;
        }

        const TrackState& next = o.state;
        const bool passed = heading == Heading::Rightward ? (s.x < 0.0 && next.x >= 0.0)
                                                          : (s.x > 0.0 && next.x <= 0.0);
        if (passed || at_root(p, next, opts)) {
            const TrackState located = at_root(p, next, opts) ? next : localize_root(p, s, o, heading, opts);
            t.states.push_back(located);
            t.event = finish_root(p, located.point());
            return t;
        }
        t.states.push_back(next);
        s = next;
        if (s.r > r_max || s.r < opts.r_min) {
            t.event = BoundaryReached{s.r};
            return t;
        }
    }
    t.event = StepLimit{opts.max_steps};
    return t;
}

Polynomial rotate(const Polynomial& p, double nu)
{
    const Complex w = std::polar(1.0, -nu);
    std::vector<Complex> c = p.coeffs();
    for (Complex& a : c)
        a *= w;
    return Polynomial(std::move(c));
}

Complex newton_polish(const Polynomial& p, Complex z, int max_iter)
{
    Complex best = z;
    double best_abs = std::abs(p.eval(z));
    for (int it = 0; it < max_iter && best_abs > 0.0; ++it) {
        const auto [f, df] = p.eval_with_derivative(z);
        if (df == Complex{})
            break;
        const Complex dz = f / df;
        z -= dz;
        const double fa = std::abs(p.eval(z));
        if (fa < best_abs) {
            best = z;
            best_abs = fa;
        }
        if (std::abs(dz) <= 4.0 * kEps * std::abs(z))
            break;
    }
    return best;
}

double small_radius(const Polynomial& p)
{
    const double a0 = std::abs(p[0]);
    double r = 1.0;
    for (int k = 0; k < 1100; ++k) {
        if (p.magnitude_at(r) - a0 < 0.5)
            return r;
        r *= 0.5;
    }
    return r;
}

Crossing starting_crossing(const Polynomial& p)
{
    const double limit = cauchy_bound(p);
    for (double r = small_radius(p); r <= limit; r *= std::sqrt(2.0)) {
        const auto crossings = find_crossings(p, r);
        const Crossing* best = nullptr;
        for (const Crossing& c : crossings)
            if (c.kind == CrossingKind::Up && c.x < 0.0 && (!best || c.x > best->x))
                best = &c;
        if (best)
            return *best;
    }
    throw Error(ErrorCode::Unconverged, "no upcrossing with x < 0 below the Cauchy bound");
}

bool derivative_vanishes_on_segment(const Polynomial& p, double a, double b)
{
    const Polynomial dp = derivative(p);
    if (dp.degree() == 0)
        return dp.is_zero();
    const int m = std::max(64, 16 * dp.degree());
    std::vector<double> t(static_cast<std::size_t>(m) + 1);
    std::vector<double> v(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        t[j] = a + (b - a) * static_cast<double>(j) / m;
        v[j] = std::abs(dp.eval(t[j]));
        if (v[j] == 0.0)
            return true;
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        const bool left_ok = j == 0 || v[j] <= v[j - 1];
        const bool right_ok = j + 1 == t.size() || v[j] <= v[j + 1];
        if (!left_ok || !right_ok)
            continue;
        double lo = t[j == 0 ? 0 : j - 1];
        double hi = t[j + 1 == t.size() ? j : j + 1];
        double c = hi - inv_phi * (hi - lo);
        double d = lo + inv_phi * (hi - lo);
        for (int it = 0; it < 200 && hi - lo > 4.0 * kEps; ++it) {
            if (std::abs(dp.eval(c)) < std::abs(dp.eval(d))) {
                hi = d;
                d = c;
                c = hi - inv_phi * (hi - lo);
            } else {
                lo = c;
                c = d;
                d = lo + inv_phi * (hi - lo);
            }
        }
        const double tm = 0.5 * (lo + hi);
        if (std::abs(dp.eval(tm)) <= 1e-8 * dp.magnitude_at(std::abs(tm)))
            return true;
    }
    return false;
}

SingleRoot locate_single_root(const Polynomial& p, const TrackerOptions& opts)
{
    opts.validate();
    const auto normalized = normalize(p);
    if (std::holds_alternative<ZeroRoot>(normalized))
        return SingleRoot{Complex{}, 0.0, 0, 0.0, {}, {}};
    const Polynomial& q = std::get<Polynomial>(normalized);

    std::vector<double> schedule;
    if (opts.nu != 0.0 || !derivative_vanishes_on_segment(q))
        schedule.push_back(opts.nu);
    for (double nu : kRotationSchedule) {
        if (static_cast<int>(schedule.size()) > opts.max_rotations)
            break;
        if (nu != opts.nu)
            schedule.push_back(nu);
    }

    SingleRoot out;
    int rotations = 0;
    for (double nu : schedule) {
        if (nu != 0.0)
            ++rotations;
        const Polynomial w = nu == 0.0 ? q : rotate(q, nu);
        Crossing start;
        try {
            start = starting_crossing(w);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Unconverged)
                throw;
            out.failed.push_back(StepLimit{0});
            continue;
        }
        Trajectory traj = track(w, start, Heading::Rightward, opts);
        if (const auto* rf = std::get_if<RootFound>(&traj.event)) {
            const Complex root = newton_polish(q, rf->root);
            const double res = relative_residual(p, root);
            if (res < opts.residual_tol) {
                out.root = root;
                out.residual = res;
                out.rotations = rotations;
                out.nu = nu;
                out.trajectory = std::move(traj);
                return out;
            }
        }
        out.failed.push_back(traj.event);
    }
    throw Error(ErrorCode::Unconverged, "no root found within the rotation budget");
}

}  // namespace rootcross
