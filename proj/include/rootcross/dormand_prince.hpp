#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace rootcross::ode {

template <std::size_t D>
using Vec = std::array<double, D>;

template <std::size_t D>
struct TrialStep {
    Vec<D> y;      ///< fifth-order solution
    Vec<D> error;  ///< difference between fifth- and fourth-order solutions
};

/// One Dormand-Prince 5(4) step of size h from (t, y).
///
/// rhs(t, y) returns std::nullopt where the system is singular; the whole step
/// then fails and the caller must shrink h.
template <std::size_t D, class Rhs>
std::optional<TrialStep<D>> dopri5_step(Rhs&& rhs, double t, const Vec<D>& y, double h)
{
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // fifth minus fourth order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto combine = [&](std::initializer_list<std::pair<double, const Vec<D>*>> terms) {
        Vec<D> out = y;
        for (const auto& [w, k] : terms)
            for (std::size_t i = 0; i < D; ++i)
                out[i] += h * w * (*k)[i];
        return out;
    };

    const auto k1 = rhs(t, y);
    if (!k1) return std::nullopt;
    const auto k2 = rhs(t + c2 * h, combine({{a21, &*k1}}));
    if (!k2) return std::nullopt;
    const auto k3 = rhs(t + c3 * h, combine({{a31, &*k1}, {a32, &*k2}}));
    if (!k3) return std::nullopt;
    const auto k4 = rhs(t + c4 * h, combine({{a41, &*k1}, {a42, &*k2}, {a43, &*k3}}));
    if (!k4) return std::nullopt;
    const auto k5 = rhs(t + c5 * h, combine({{a51, &*k1}, {a52, &*k2}, {a53, &*k3}, {a54, &*k4}}));
    if (!k5) return std::nullopt;
    const auto k6 = rhs(t + h, combine({{a61, &*k1}, {a62, &*k2}, {a63, &*k3}, {a64, &*k4}, {a65, &*k5}}));
    if (!k6) return std::nullopt;
    const Vec<D> y5 = combine({{b1, &*k1}, {b3, &*k3}, {b4, &*k4}, {b5, &*k5}, {b6, &*k6}});
    const auto k7 = rhs(t + h, y5);
    if (!k7) return std::nullopt;

    TrialStep<D> out{y5, {}};
    for (std::size_t i = 0; i < D; ++i)
        out.error[i] = h * (e1 * (*k1)[i] + e3 * (*k3)[i] + e4 * (*k4)[i] + e5 * (*k5)[i]
                            + e6 * (*k6)[i] + e7 * (*k7)[i]);
    return out;
}

/// Step-size multiplier from an error norm (order 5 controller with safety).
inline double step_factor(double err)
{
    if (err == 0.0)
        return 5.0;
    return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
}

}  // namespace rootcross::ode
