#include "doctest.h"
#include "rootcross/crossing_tracker.hpp"
#include "rootcross/curve_geometry.hpp"
#include "support/figure_cases.hpp"
#include "support/oracles.hpp"

using namespace rootcross;
using std::numbers::pi;

namespace {

const Polynomial kSquare({-1.0, 0.0, 1.0});
const Polynomial kLinear({-1.0, 1.0});

bool close(Complex a, Complex b, double tol = 1e-12)
{
    return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

}  // namespace

TEST_SUITE("curve_geometry") {

TEST_CASE("curve_point")
{
    CHECK(close(curve_point(kSquare, 2.0, 0.0), 3.0));
    CHECK(close(curve_point(kSquare, 2.0, pi / 2), -5.0));
    const Polynomial q = cases::fig2();
    for (double r : {1e-3, 1e-4})
        CHECK(std::abs(curve_point(q, r, 1.234) + 1.0) < 10.0 * r);
}

TEST_CASE("alpha examples")
{
    CHECK(close(alpha(kSquare, 2.0, 0.0), {0.0, 8.0}));
    CHECK(close(alpha(kLinear, 0.7, 0.0), {0.0, 0.7}));
    CHECK(close(alpha(kSquare, 2.0, pi / 2), {0.0, -8.0}));
}

TEST_CASE("alpha matches finite differences of the curve")
{
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Polynomial p = oracle::random_polynomial(rng, 1 + trial % 8);
        const double r = 0.05 + 4.95 * u(rng);
        const double theta = 2.0 * pi * u(rng);
        const Complex a = alpha(p, r, theta);
        const Complex fd = oracle::dcurve_dtheta(p.coeffs(), r, theta);
        CHECK(std::abs(fd - a) < 1e-6 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("classify_crossing")
{
    CHECK(classify_crossing(kSquare, 2.0, 0.0) == CrossingKind::Up);
    CHECK(classify_crossing(kSquare, 2.0, pi / 2) == CrossingKind::Down);
    CHECK(classify_crossing(kSquare, 1.0, 0.0) == CrossingKind::Up);
    CHECK(curve_point(kSquare, 1.0, 0.0) == Complex{0.0, 0.0});
    CHECK_THROWS_AS(classify_crossing(kSquare, 2.0, 0.3), Error);

    // f = -1 + iz - iz^2 on r = 1: alpha(0) = 1 is real, so theta = 0 is a tangency
    const Polynomial tangent({-1.0, Complex{0.0, 1.0}, Complex{0.0, -1.0}});
    CHECK(classify_crossing(tangent, 1.0, 0.0) == CrossingKind::Tangent);
}

TEST_CASE("find_crossings examples")
{
    SUBCASE("z^2 - 1 at r = 2")
    {
        const auto cs = find_crossings(kSquare, 2.0);
        REQUIRE(cs.size() == 4);
        const double thetas[] = {0.0, pi / 2, pi, 1.5 * pi};
        const double xs[] = {3.0, -5.0, 3.0, -5.0};
        const CrossingKind kinds[] = {CrossingKind::Up, CrossingKind::Down, CrossingKind::Up, CrossingKind::Down};
        for (int k = 0; k < 4; ++k) {
            CHECK(cs[k].theta == doctest::Approx(thetas[k]).epsilon(1e-12));
            CHECK(cs[k].x == doctest::Approx(xs[k]).epsilon(1e-12));
            CHECK(cs[k].kind == kinds[k]);
        }
    }
    SUBCASE("z - 1 at r = 0.5")
    {
        const auto cs = find_crossings(kLinear, 0.5);
        REQUIRE(cs.size() == 2);
        CHECK(cs[0].theta == doctest::Approx(0.0));
        CHECK(cs[0].x == doctest::Approx(-0.5));
        CHECK(cs[0].kind == CrossingKind::Up);
        CHECK(cs[1].theta == doctest::Approx(pi));
        CHECK(cs[1].x == doctest::Approx(-1.5));
        CHECK(cs[1].kind == CrossingKind::Down);
    }
    SUBCASE("grids coarser than 4N are rejected")
    {
        CHECK_THROWS_AS(find_crossings(cases::fig2(), 1.0, 8), Error);
    }
}

TEST_CASE("crossings satisfy their invariants")
{
    oracle::Corpus corpus(31);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = corpus.next(2 + trial % 7);
        const Polynomial q = std::get<Polynomial>(normalize(c.poly));
        const double r = u(corpus.rng());
        for (const Crossing& x : find_crossings(q, r)) {
            const Complex f = curve_point(q, r, x.theta);
            CHECK(std::abs(f.imag()) <= crossing_tolerance(q, r, f));
            CHECK(x.x == f.real());
            CHECK(x.theta >= 0.0);
            CHECK(x.theta < 2.0 * pi);
            const Complex a = alpha(q, r, x.theta);
            if (x.kind == CrossingKind::Up)
                CHECK(a.imag() > kClassificationTolerance * std::abs(a));
            if (x.kind == CrossingKind::Down)
                CHECK(a.imag() < -kClassificationTolerance * std::abs(a));
        }
    }
}

TEST_CASE("kinds alternate along the circle")
{
    oracle::Corpus corpus(37);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto c = corpus.next(2 + trial % 9);
        const Polynomial q = std::get<Polynomial>(normalize(c.poly));
        const auto cs = find_crossings(q, u(corpus.rng()));
        const bool any_tangent =
            std::any_of(cs.begin(), cs.end(), [](const Crossing& x) { return x.kind == CrossingKind::Tangent; });
        if (any_tangent)
            continue;
        REQUIRE(cs.size() % 2 == 0);
        for (std::size_t k = 0; k < cs.size(); ++k)
            CHECK(cs[k].kind != cs[(k + 1) % cs.size()].kind);
        ++checked;
    }
    CHECK(checked > 250);
}

TEST_CASE("small-radius geometry")
{
    oracle::Corpus corpus(41);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = corpus.next(1 + trial % 10);
        const Polynomial q = std::get<Polynomial>(normalize(c.poly));
        const double r = small_radius(q);
        CHECK(q.magnitude_at(r) - 1.0 < 0.5);
        for (const Complex& w : sample_curve(q, r, 256))
            CHECK(std::abs(w + 1.0) < 0.5);
        const auto cs = find_crossings(q, r);
        REQUIRE(cs.size() >= 2);
        const auto right = std::max_element(cs.begin(), cs.end(), [](const Crossing& a, const Crossing& b) {
            return a.x < b.x;
        });
        CHECK(right->kind == CrossingKind::Up);
        CHECK(right->x < 0.0);
    }
}

TEST_CASE("exactly two crossings once the linear term dominates")
{
    // sum_{n>=2} n |a_n| r^n <= |a_1| r / 2 makes arg(f_r + 1) strictly increasing
    auto dominated = [](const Polynomial& q, double r) {
        double s = 0.0;
        for (int n = 2; n <= q.degree(); ++n)
            s += n * std::abs(q[n]) * std::pow(r, n);
        return s <= 0.5 * std::abs(q[1]) * r;
    };
    oracle::Corpus corpus(42);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = corpus.next(1 + trial % 10);
        const Polynomial q = std::get<Polynomial>(normalize(c.poly));
        double r = small_radius(q);
        while (!dominated(q, r))
            r *= 0.5;
        const auto cs = find_crossings(q, r);
        REQUIRE(cs.size() == 2);
        const Crossing& right = cs[0].x > cs[1].x ? cs[0] : cs[1];
        const Crossing& left = cs[0].x > cs[1].x ? cs[1] : cs[0];
        CHECK(right.kind == CrossingKind::Up);
        CHECK(left.kind == CrossingKind::Down);
        CHECK(right.x < 0.0);
        CHECK(right.x > -1.0);
        CHECK(left.x < -1.0);
    }
    // without a linear term the small-radius curve winds twice
    CHECK(find_crossings(kSquare, 0.5).size() == 4);
}

TEST_CASE("large-radius census")
{
    oracle::Corpus corpus(43);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 10;
        const auto c = corpus.next(n);
        const Polynomial q = std::get<Polynomial>(normalize(c.poly));
        const auto cs = find_crossings(q, 2.0 * cauchy_bound(q));
        const auto up = std::count_if(cs.begin(), cs.end(),
                                      [](const Crossing& x) { return x.kind == CrossingKind::Up && x.x > 0; });
        const auto down = std::count_if(cs.begin(), cs.end(),
                                        [](const Crossing& x) { return x.kind == CrossingKind::Down && x.x < 0; });
        CHECK(up >= n);
        CHECK(down >= n);
    }
}

TEST_CASE("sample_curve")
{
    const auto a = sample_curve(kLinear, 1.0, 4);
    REQUIRE(a.size() == 4);
    CHECK(close(a[0], 0.0));
    CHECK(close(a[1], {-1.0, 1.0}));
    CHECK(close(a[2], -2.0));
    CHECK(close(a[3], {-1.0, -1.0}));

    const auto b = sample_curve(kSquare, 1.0, 4);
    CHECK(close(b[0], 0.0));
    CHECK(close(b[1], -2.0));
    CHECK(close(b[2], 0.0));
    CHECK(close(b[3], -2.0));

    const Polynomial q = cases::fig1();
    CHECK(sample_curve(q, 1.3, 17)[0] == curve_point(q, 1.3, 0.0));
    CHECK(curve_point(q, 1.3, 0.0) == curve_point(q, 1.3, wrap_angle(2.0 * pi)));
}

TEST_CASE("bracketed_crossing")
{
    const auto c = bracketed_crossing(kSquare, 2.0, 0.3, 2.0);
    REQUIRE(c.has_value());
    CHECK(c->theta == doctest::Approx(pi / 2).epsilon(1e-12));
    CHECK(c->kind == CrossingKind::Down);
    CHECK_FALSE(bracketed_crossing(kSquare, 2.0, 0.1, 0.2).has_value());
}

TEST_CASE("tangencies are detected")
{
    // Im f_r = cos(theta) - cos(2 theta) has a double zero at theta = 0
    const Polynomial q({-1.0, Complex{0.0, 1.0}, Complex{0.0, -1.0}});
    const auto cs = find_crossings(q, 1.0);
    const auto it = std::find_if(cs.begin(), cs.end(), [](const Crossing& x) { return std::abs(x.theta) < 1e-6; });
    REQUIRE(it != cs.end());
    CHECK(it->kind == CrossingKind::Tangent);
}

}
