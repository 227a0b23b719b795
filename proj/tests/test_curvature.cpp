#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latshell/curvature.hpp"
#include "latshell/errors.hpp"

#include <cmath>
#include <random>

using namespace latshell;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return std::vector<double>(v); }

// random pair with |x - y| = r
void pair_at_distance(std::mt19937_64& rng, int d, double r, std::vector<double>& x,
                      std::vector<double>& y) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    x.assign(static_cast<std::size_t>(d), 0.0);
    y.assign(static_cast<std::size_t>(d), 0.0);
    double norm = 0;
    std::vector<double> dir(static_cast<std::size_t>(d));
    do {
        norm = 0;
        for (auto& v : dir) {
            v = gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (int j = 0; j < d; ++j) {
        y[static_cast<std::size_t>(j)] = u(rng);
        x[static_cast<std::size_t>(j)] =
            y[static_cast<std::size_t>(j)] + r * dir[static_cast<std::size_t>(j)] / norm;
    }
}

} // namespace

TEST_CASE("gradients") {
    const FDScheme fd{1e-4, 2};
    const PhaseFunction par2 = PhaseFunction::parabolic(2);
    const auto gx = grad_x(par2, vec({1, 5}), vec({0, 1}), fd);
    CHECK(gx[0] == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(gx[1] == doctest::Approx(1.0).epsilon(1e-8));
    const auto gy = grad_y(par2, vec({1, 5}), vec({0, 1}), fd);
    CHECK(gy[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(gy[1] == doctest::Approx(-1.0).epsilon(1e-8));

    const PhaseFunction dg = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    const auto g2 = grad_x(dg, vec({3, 4}), vec({0, 0}), fd);
    CHECK(g2[0] == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(g2[1] == doctest::Approx(0.8).epsilon(1e-6));

    CHECK_THROWS_AS((void)grad_x(par2, vec({1, 5}), vec({0, 1}), FDScheme{0.0, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)grad_x(par2, vec({1, 5}), vec({0, 1}), FDScheme{1e-4, 3}),
                    std::invalid_argument);
}

TEST_CASE("mixed hessian") {
    const FDScheme fd{1e-4, 2};
    const PhaseFunction par2 = PhaseFunction::parabolic(2);
    const auto m = mixed_hessian(par2, vec({0.4, 1.3}), vec({-0.2, 0.1}), fd);
    CHECK(m[0][0] == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(std::abs(m[0][1]) <= 1e-4);
    CHECK(std::abs(m[1][0]) <= 1e-4);
    CHECK(std::abs(m[1][1]) <= 1e-4);

    const PhaseFunction par3 = PhaseFunction::parabolic(3);
    const auto m3 = mixed_hessian(par3, vec({0.4, -0.7, 1.3}), vec({-0.2, 0.3, 0.1}), fd);
    CHECK(m3[0][0] == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(m3[1][1] == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(std::abs(m3[2][2]) <= 1e-4);

    // difference gauge of the ball along the first axis: diag(0, -1/r)
    const PhaseFunction dg = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    const double r = 1.5;
    const auto md = mixed_hessian(dg, vec({r, 0}), vec({0, 0}), fd);
    CHECK(std::abs(md[0][0]) <= 1e-4);
    CHECK(md[1][1] == doctest::Approx(-1.0 / r).epsilon(1e-4));
}

TEST_CASE("monge-ampere determinant closed forms") {
    const FDScheme fd{1e-4, 2};
    const PhaseFunction par2 = PhaseFunction::parabolic(2);
    std::mt19937_64 rng(301);
    std::vector<double> x, y;
    for (int it = 0; it < 100; ++it) {
        std::uniform_real_distribution<double> rdist(0.5, 2.0);
        pair_at_distance(rng, 2, rdist(rng), x, y);
        CHECK(monge_ampere_det(par2, x, y, fd) == doctest::Approx(-2.0).epsilon(5e-4));
    }

    // d=3 parabolic: |det| = 4; the paper's row/column order gives -4 here
    const PhaseFunction par3 = PhaseFunction::parabolic(3);
    pair_at_distance(rng, 3, 1.2, x, y);
    const double det3 = monge_ampere_det(par3, x, y, fd);
    CHECK(std::abs(det3) == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(det3 < 0);

    // difference gauge of the Euclidean ball at |x-y| = t: |det| = 1/t
    const PhaseFunction dg2 = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    for (double t : {0.5, 1.0, 2.0}) {
        for (int it = 0; it < 20; ++it) {
            pair_at_distance(rng, 2, t, x, y);
            CHECK(std::abs(monge_ampere_det(dg2, x, y, fd)) ==
                  doctest::Approx(1.0 / t).epsilon(1e-3));
        }
    }
    // and 1/t^2 in dimension 3
    const PhaseFunction dg3 = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(3));
    pair_at_distance(rng, 3, 1.0, x, y);
    CHECK(std::abs(monge_ampere_det(dg3, x, y, fd)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("order-4 scheme agrees") {
    std::mt19937_64 rng(302);
    std::vector<double> x, y;
    const PhaseFunction dg2 = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    for (double t : {0.5, 1.0, 2.0}) {
        pair_at_distance(rng, 2, t, x, y);
        CHECK(std::abs(monge_ampere_det(dg2, x, y, FDScheme{1e-3, 4})) ==
              doctest::Approx(1.0 / t).epsilon(1e-4));
    }
}

TEST_CASE("finite-difference convergence on a curved gauge") {
    // The parabolic phase is quadratic, so central differences are exact on it
    // and halving h only moves roundoff. The convergence check needs genuine
    // truncation error: the Euclidean difference gauge has it.
    std::mt19937_64 rng(303);
    std::vector<double> x, y;
    const PhaseFunction dg2 = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    const PhaseFunction par2 = PhaseFunction::parabolic(2);
    int improved = 0;
    const int trials = 100;
    for (int it = 0; it < trials; ++it) {
        std::uniform_real_distribution<double> rdist(0.6, 1.8);
        const double t = rdist(rng);
        pair_at_distance(rng, 2, t, x, y);
        const double coarse = std::abs(std::abs(monge_ampere_det(dg2, x, y, FDScheme{4e-2, 2})) - 1.0 / t);
        const double fine = std::abs(std::abs(monge_ampere_det(dg2, x, y, FDScheme{2e-2, 2})) - 1.0 / t);
        if (coarse >= 3.0 * fine) ++improved;
        // parabolic stays at roundoff level for any h
        CHECK(std::abs(monge_ampere_det(par2, x, y, FDScheme{4e-2, 2}) + 2.0) <= 1e-9);
    }
    CHECK(improved >= trials * 9 / 10);
}

TEST_CASE("determinant homogeneity in the level for the ball gauge") {
    std::mt19937_64 rng(304);
    std::vector<double> x, y;
    const PhaseFunction dg2 = PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2));
    pair_at_distance(rng, 2, 1.0, x, y);
    const double at1 = std::abs(monge_ampere_det(dg2, x, y, FDScheme{1e-4, 2}));
    for (double t : {0.5, 1.0, 2.0}) {
        pair_at_distance(rng, 2, t, x, y);
        const double att = std::abs(monge_ampere_det(dg2, x, y, FDScheme{1e-4, 2}));
        CHECK(att == doctest::Approx(at1 / t).epsilon(0.01)); // t^{1-d} scaling
    }
}

TEST_CASE("certify level set") {
    const FDScheme fd{1e-4, 2};

    LevelSetScan par_scan{PhaseFunction::parabolic(2), 1.0, 1000, 42, 0.05, 1e-3};
    const CertifyReport r1 = certify_level_set(par_scan, fd);
    CHECK(r1.hypothesis_pass);
    CHECK(r1.n_accepted >= 100);
    CHECK(r1.min_abs_det == doctest::Approx(2.0).epsilon(1e-6));

    LevelSetScan ball_scan{PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(3)), 1.0,
                           1000, 43, 0.05, 1e-3};
    const CertifyReport r2 = certify_level_set(ball_scan, fd);
    CHECK(r2.hypothesis_pass);
    // |det| = t^{-2} over |phi - 1| <= 0.05, so the min sits near 1/1.05^2
    CHECK(r2.min_abs_det > 0.85);
    CHECK(r2.min_abs_det < 1.05);

    // p=4 ball: curvature vanishes on the axes, near-axis samples sink the min
    LevelSetScan p4_scan{PhaseFunction::difference_gauge(ConvexBody::pball(4, 2)), 1.0, 2000, 44,
                         0.05, 1e-3};
    const CertifyReport r3 = certify_level_set(p4_scan, fd);
    CHECK_FALSE(r3.hypothesis_pass);
    CHECK(r3.min_abs_det < 1e-3);
    CHECK(r3.min_grad_x_norm > 0.1); // the gradients stay healthy; the det fails

    // determinism
    const CertifyReport r1b = certify_level_set(par_scan, fd);
    CHECK(r1b.min_abs_det == r1.min_abs_det);
    CHECK(r1b.n_accepted == r1.n_accepted);

    // empty level set: phi = |x-y| <= 2 on B x B but t = 100
    LevelSetScan empty_scan{PhaseFunction::difference_gauge(ConvexBody::euclidean_ball(2)), 100.0,
                            100, 45, 0.001, 1e-3};
    CHECK_THROWS_AS(certify_level_set(empty_scan, fd), LevelSetEmptyError);

    CHECK_THROWS_AS(
        certify_level_set(LevelSetScan{PhaseFunction::parabolic(2), -1.0, 10, 1, 0.05, 1e-3}, fd),
        std::invalid_argument);
}

TEST_CASE("projection fallback reaches thin level sets") {
    // parabolic at t = 1.9 with a thin band: x2 - y2 must be ~1.9 + (x1-y1)^2,
    // nearly impossible by rejection inside B x B, so projection kicks in.
    LevelSetScan thin{PhaseFunction::parabolic(2), 1.9, 50, 46, 0.002, 1e-3};
    const CertifyReport r = certify_level_set(thin, FDScheme{1e-4, 2});
    CHECK(r.projection_used);
    CHECK(r.n_accepted > 0);
    CHECK(r.min_abs_det == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("lu determinant") {
    CHECK(lu_determinant({0, 1, 0, 1, 0, 0, 0, 0, -2}, 3) == doctest::Approx(2.0));
    CHECK(lu_determinant({2, 0, 0, 3}, 2) == doctest::Approx(6.0));
    CHECK(lu_determinant({1, 2, 2, 4}, 2) == doctest::Approx(0.0));
}
