#include "rootcross/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rootcross {

double wrap_angle(double theta)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double t = std::fmod(theta, two_pi);
    if (t < 0.0)
        t += two_pi;
    // fmod of a value just below 0 can round up to exactly 2pi
    if (t >= two_pi)
        t = 0.0;
    return t;
}

double polar_angle(Complex z)
{
    if (z == Complex{})
        return 0.0;
    return wrap_angle(std::arg(z));
}

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::DegreeZero: return "DegreeZero";
    case ErrorCode::NotARoot: return "NotARoot";
    case ErrorCode::NotOnAxis: return "NotOnAxis";
    case ErrorCode::TangencySingular: return "TangencySingular";
    case ErrorCode::RadialSingular: return "RadialSingular";
    case ErrorCode::CriticalPoint: return "CriticalPoint";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::Unconverged: return "Unconverged";
    case ErrorCode::CensusShortfall: return "CensusShortfall";
    case ErrorCode::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs))
{
    if (coeffs_.empty())
        throw Error(ErrorCode::InvalidInput, "polynomial needs at least one coefficient");
    double largest = 0.0;
    for (const Complex& a : coeffs_) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw Error(ErrorCode::InvalidInput, "polynomial coefficients must be finite");
        largest = std::max(largest, std::abs(a));
    }
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= kTrimThreshold * largest)
        coeffs_.pop_back();
    if (largest == 0.0)
        coeffs_.assign(1, Complex{});
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots, Complex scale)
{
    std::vector<Complex> c{scale};
    for (const Complex& g : roots) {
        c.push_back(Complex{});
        for (std::size_t n = c.size() - 1; n > 0; --n)
            c[n] = c[n - 1] - g * c[n];
        c[0] = -g * c[0];
    }
    return Polynomial(std::move(c));
}

Complex Polynomial::eval(Complex z) const noexcept
{
    Complex acc = coeffs_.back();
    for (std::size_t n = coeffs_.size() - 1; n > 0; --n)
        acc = acc * z + coeffs_[n - 1];
    return acc;
}

std::pair<Complex, Complex> Polynomial::eval_with_derivative(Complex z) const noexcept
{
    Complex f = coeffs_.back();
    Complex df{};
    for (std::size_t n = coeffs_.size() - 1; n > 0; --n) {
        df = df * z + f;
        f = f * z + coeffs_[n - 1];
    }
    return {f, df};
}

double Polynomial::magnitude_at(double radius) const noexcept
{
    double acc = std::abs(coeffs_.back());
    for (std::size_t n = coeffs_.size() - 1; n > 0; --n)
        acc = acc * radius + std::abs(coeffs_[n - 1]);
    return acc;
}

std::variant<Polynomial, ZeroRoot> normalize(const Polynomial& p)
{
    if (p.degree() < 1)
        throw Error(ErrorCode::DegreeZero, "degree must be >= 1");
    const Complex a0 = p[0];
    if (a0 == Complex{})
        return ZeroRoot{};
    std::vector<Complex> c = p.coeffs();
    for (Complex& a : c)
        a = -a / a0;
    c[0] = Complex{-1.0, 0.0};
    return Polynomial(std::move(c));
}

Polynomial derivative(const Polynomial& p)
{
    if (p.degree() == 0)
        return Polynomial{};
    std::vector<Complex> c(static_cast<std::size_t>(p.degree()));
    for (int n = 1; n <= p.degree(); ++n)
        c[static_cast<std::size_t>(n - 1)] = static_cast<double>(n) * p[n];
    return Polynomial(std::move(c));
}

Polynomial shift_down(const Polynomial& p)
{
    if (p.degree() < 1 || p[0] != Complex{})
        throw Error(ErrorCode::InvalidInput, "shift_down requires a zero constant coefficient");
    return Polynomial(std::vector<Complex>(p.coeffs().begin() + 1, p.coeffs().end()));
}

Deflation deflate(const Polynomial& p, Complex root, double tolerance)
{
    if (p.degree() < 1)
        throw Error(ErrorCode::DegreeZero, "cannot deflate a constant");
    if (relative_residual(p, root) > tolerance)
        throw Error(ErrorCode::NotARoot, "deflation point is not a root within tolerance");

    const auto& a = p.coeffs();
    const std::size_t n = a.size() - 1;
    std::vector<Complex> q(n);
    Complex acc = a[n];
    for (std::size_t k = n; k > 0; --k) {
        q[k - 1] = acc;
        acc = acc * root + a[k - 1];
    }
    // acc now holds p(root), the division remainder
    if (q[0] != Complex{}) {
        const Complex s = -q[0];
        for (Complex& c : q)
            c /= s;
        q[0] = Complex{-1.0, 0.0};
    }
    return {Polynomial(std::move(q)), acc};
}

double cauchy_bound(const Polynomial& p)
{
    if (p.degree() < 1)
        throw Error(ErrorCode::DegreeZero, "cauchy bound needs degree >= 1");
    const double lead = std::abs(p.leading());
    double m = 0.0;
    for (int n = 0; n < p.degree(); ++n)
        m = std::max(m, std::abs(p[n]) / lead);
    return 1.0 + m;
}

double relative_residual(const Polynomial& p, Complex z)
{
    const double scale = p.magnitude_at(std::abs(z));
    if (scale == 0.0)
        return 0.0;
    return std::abs(p.eval(z)) / scale;
}

}  // namespace rootcross
