#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latshell/phase.hpp"

#include <cmath>
#include <random>

using namespace latshell;

namespace {
std::vector<double> vec(std::initializer_list<double> v) { return std::vector<double>(v); }
} // namespace

TEST_CASE("evaluate examples") {
    const PhaseFunction dg = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    CHECK(dg.evaluate(vec({3, 4}), vec({0, 0})) == doctest::Approx(5.0));

    const PhaseFunction par2 = PhaseFunction::parabolic(2);
    CHECK(par2.evaluate(vec({1, 5}), vec({0, 1})) == doctest::Approx(3.0));

    const PhaseFunction par3 = PhaseFunction::parabolic(3);
    CHECK(par3.evaluate(vec({0.3, -1, 2}), vec({0.3, -1, 2})) == 0.0);

    CHECK_THROWS_AS((void)par2.evaluate(vec({1, 2, 3}), vec({0, 0, 0})), std::invalid_argument);
}

TEST_CASE("catalog exponents") {
    const PhaseFunction dg = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(3));
    for (const Rational& a : dg.alpha()) CHECK(a == 1);
    CHECK(dg.beta() == 1);

    const PhaseFunction par = PhaseFunction::parabolic(3);
    CHECK(par.alpha()[0] == Rational(3, 4));
    CHECK(par.alpha()[1] == Rational(3, 4));
    CHECK(par.alpha()[2] == Rational(3, 2));
    CHECK(par.beta() == Rational(3, 2));
    Rational sum(0);
    for (const Rational& a : par.alpha()) sum += a;
    CHECK(sum == 3);
}

TEST_CASE("dilation examples") {
    const AnisotropicDilation t1{{Rational(1), Rational(1)}, 3.0};
    const auto r1 = t1.apply(vec({1, 2}));
    CHECK(r1[0] == doctest::Approx(3.0));
    CHECK(r1[1] == doctest::Approx(6.0));

    const AnisotropicDilation t2{{Rational(2, 3), Rational(4, 3)}, 8.0};
    const auto r2 = t2.apply(vec({1, 1}));
    CHECK(r2[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r2[1] == doctest::Approx(16.0).epsilon(1e-12));

    const AnisotropicDilation t3{{Rational(2, 3), Rational(4, 3)}, 1.0};
    const auto r3 = t3.apply(vec({0.7, -0.3}));
    CHECK(r3[0] == 0.7);
    CHECK(r3[1] == -0.3);
}

TEST_CASE("dilation composition") {
    std::mt19937_64 rng(1101);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const std::vector<Rational> alpha = {Rational(2, 3), Rational(4, 3)};
    for (int it = 0; it < 200; ++it) {
        const double q1 = std::exp(u(rng)), q2 = std::exp(u(rng));
        const std::vector<double> x = {u(rng), u(rng)};
        const auto once = AnisotropicDilation{alpha, q1 * q2}.apply(x);
        const auto twice = AnisotropicDilation{alpha, q2}.apply(AnisotropicDilation{alpha, q1}.apply(x));
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(once[static_cast<std::size_t>(j)] - twice[static_cast<std::size_t>(j)]) <=
                  1e-12 * std::max(1.0, std::abs(once[static_cast<std::size_t>(j)])));
    }
}

TEST_CASE("quasi-homogeneity checker") {
    const PhaseFunction dg = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    const HomogeneityReport r1 = check_quasi_homogeneity(dg, 100, {2.0, 5.0}, 1e-10, 9001);
    CHECK(r1.pass);
    CHECK(r1.max_relative_error <= 1e-12);

    const PhaseFunction par = PhaseFunction::parabolic(2);
    const HomogeneityReport r2 = check_quasi_homogeneity(par, 100, {2.0, 5.0}, 1e-10, 9002);
    CHECK(r2.pass);

    // corrupted exponents break the scaling law
    const PhaseFunction bad = PhaseFunction::with_exponents(
        PhaseKind::difference_gauge, ConvexBody::euclidean_ball(2), 2,
        {Rational(1, 2), Rational(3, 2)}, Rational(1), /*validate=*/false);
    const HomogeneityReport r3 = check_quasi_homogeneity(bad, 100, {2.0, 5.0}, 1e-10, 9003);
    CHECK_FALSE(r3.pass);
    CHECK(r3.max_relative_error > 1e-2);

    CHECK_THROWS_AS(check_quasi_homogeneity(dg, 100, {}, 1e-10, 1), std::invalid_argument);
    CHECK_THROWS_AS(check_quasi_homogeneity(dg, 0, {2.0}, 1e-10, 1), std::invalid_argument);
}

TEST_CASE("exponent validation") {
    // sum != d
    CHECK_THROWS_AS(PhaseFunction::with_exponents(PhaseKind::parabolic, std::nullopt, 2,
                                                  {Rational(1, 2), Rational(1)}, Rational(1)),
                    std::invalid_argument);
    // alpha_j > 2d/(d+1)
    CHECK_THROWS_AS(PhaseFunction::with_exponents(PhaseKind::parabolic, std::nullopt, 2,
                                                  {Rational(1, 2), Rational(3, 2)}, Rational(1)),
                    std::invalid_argument);
    // nonpositive beta
    CHECK_THROWS_AS(PhaseFunction::with_exponents(PhaseKind::parabolic, std::nullopt, 2,
                                                  {Rational(1), Rational(1)}, Rational(0)),
                    std::invalid_argument);
    // the catalog parabolic exponents pass the same validation
    CHECK_NOTHROW(PhaseFunction::with_exponents(
        PhaseKind::parabolic, std::nullopt, 2, {Rational(2, 3), Rational(4, 3)}, Rational(4, 3)));
}

TEST_CASE("parabolic translation invariance") {
    const PhaseFunction par = PhaseFunction::parabolic(3);
    // exact at integer-valued inputs
    const std::vector<double> x = {3, -2, 7}, y = {1, 4, -5}, c = {10, -6, 2};
    std::vector<double> xc(3), yc(3);
    for (int j = 0; j < 3; ++j) {
        xc[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + c[static_cast<std::size_t>(j)];
        yc[static_cast<std::size_t>(j)] = y[static_cast<std::size_t>(j)] + c[static_cast<std::size_t>(j)];
    }
    CHECK(par.evaluate(x, y) == par.evaluate(xc, yc));

    std::mt19937_64 rng(1102);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int it = 0; it < 500; ++it) {
        std::vector<double> rx(3), ry(3), rc(3), rxc(3), ryc(3);
        for (int j = 0; j < 3; ++j) {
            rx[static_cast<std::size_t>(j)] = u(rng);
            ry[static_cast<std::size_t>(j)] = u(rng);
            rc[static_cast<std::size_t>(j)] = u(rng);
            rxc[static_cast<std::size_t>(j)] = rx[static_cast<std::size_t>(j)] + rc[static_cast<std::size_t>(j)];
            ryc[static_cast<std::size_t>(j)] = ry[static_cast<std::size_t>(j)] + rc[static_cast<std::size_t>(j)];
        }
        CHECK(std::abs(par.evaluate(rx, ry) - par.evaluate(rxc, ryc)) <= 1e-12);
    }
}

TEST_CASE("level windows") {
    const PhaseFunction par = PhaseFunction::parabolic(2);
    const PhaseLevelWindow w = par.level_window(Rational(1), Rational(0), Convention::closed);
    CHECK(w.contains({0, 1}));   // phi0 = 1
    CHECK(w.contains({1, 2}));   // 2 - 1 = 1
    CHECK_FALSE(w.contains({1, 1}));
    CHECK(par.parabolic_phi0({2, 5}) == 1);

    const PhaseFunction dg = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    const PhaseLevelWindow w2 = dg.level_window(Rational(5), Rational(0), Convention::closed);
    CHECK(w2.contains({3, 4}));
    CHECK(w2.contains({-5, 0}));
    CHECK_FALSE(w2.contains({4, 4}));

    // negative lower edge is vacuous: gauge >= 0 always qualifies below
    const PhaseLevelWindow w3 = dg.level_window(Rational(1, 2), Rational(1), Convention::closed);
    CHECK(w3.contains({0, 0}));
    CHECK(w3.contains({1, 0}));
    CHECK_FALSE(w3.contains({2, 0}));
}
