#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rootcross {

using Complex = std::complex<double>;

/// Polar angle of z reduced to [0, 2pi); zero maps to 0.
double polar_angle(Complex z);

/// Reduce an angle into [0, 2pi).
double wrap_angle(double theta);

enum class ErrorCode {
    DegreeZero,
    NotARoot,
    NotOnAxis,
    TangencySingular,
    RadialSingular,
    CriticalPoint,
    StepUnderflow,
    Unconverged,
    CensusShortfall,
    InvalidInput,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Complex polynomial a_0 + a_1 z + ... + a_N z^N with a_N != 0.
///
/// Coefficients are stored in ascending power order. Trailing coefficients
/// whose magnitude is below 1e-14 of the largest coefficient are trimmed at
/// construction, so degree() is the exact degree of what was kept. The zero
/// polynomial is represented by a single zero coefficient (degree 0).
/// Instances are immutable.
class Polynomial {
public:
    static constexpr double kTrimThreshold = 1e-14;

    Polynomial() : coeffs_{Complex{0.0, 0.0}} {}
    explicit Polynomial(std::vector<Complex> coeffs);
    Polynomial(std::initializer_list<Complex> coeffs)
        : Polynomial(std::vector<Complex>(coeffs)) {}

    /// Monic-times-scale expansion of scale * prod (z - roots[i]).
    static Polynomial from_roots(std::span<const Complex> roots, Complex scale = 1.0);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
    Complex operator[](int n) const { return coeffs_.at(static_cast<std::size_t>(n)); }
    Complex leading() const noexcept { return coeffs_.back(); }
    bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == Complex{}; }

    Complex operator()(Complex z) const noexcept { return eval(z); }
    Complex eval(Complex z) const noexcept;

    /// Value and first derivative in one Horner pass.
    std::pair<Complex, Complex> eval_with_derivative(Complex z) const noexcept;

    /// sum |a_n| |z|^n: the magnitude scale governing rounding error of eval at z.
    double magnitude_at(double radius) const noexcept;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    std::vector<Complex> coeffs_;
};

/// Returned by normalize() when a_0 == 0: zero is a root.
struct ZeroRoot {};

/// q = -p / a_0, so q has constant coefficient -1 and the roots of p.
std::variant<Polynomial, ZeroRoot> normalize(const Polynomial& p);

Polynomial derivative(const Polynomial& p);

/// Divide out a factor of z; requires a_0 == 0.
Polynomial shift_down(const Polynomial& p);

struct Deflation {
    Polynomial quotient;
    Complex remainder;
};

/// Synthetic division by (z - root), then rescale so the quotient's constant
/// coefficient is -1 (when it is nonzero). Throws NotARoot if
/// |p(root)| > tolerance * sum |a_n| |root|^n.
Deflation deflate(const Polynomial& p, Complex root, double tolerance = 1e-8);

/// 1 + max_{n<N} |a_n / a_N|; every root lies strictly inside this radius.
double cauchy_bound(const Polynomial& p);

/// |p(z)| / sum |a_n| |z|^n, the scale-free residual used across the library.
double relative_residual(const Polynomial& p, Complex z);

}  // namespace rootcross
