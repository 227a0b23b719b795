#pragma once

#include "latshell/geometry.hpp"
#include "latshell/rational.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace latshell {

enum class PhaseKind { difference_gauge, parabolic };

class PhaseFunction;

// Exact decision of |phi0(k) - level| <= delta at integer difference vectors
// (lower edge strict for the half-open convention). For difference_gauge the
// test runs on the body form with powered bounds; for parabolic directly on
// the integer value k_d - sum_{j<d} k_j^2.
class PhaseLevelWindow {
public:
    bool contains(const IntVec& k) const;

private:
    friend class PhaseFunction;
    PhaseKind kind_;
    const ConvexBody* body_ = nullptr; // borrowed from the owning phase
    RationalWindow window_;
    std::int64_t i128_coord_limit_ = 0;

    PhaseLevelWindow(PhaseKind kind, const ConvexBody* body, RationalWindow window,
                     std::int64_t limit)
        : kind_(kind), body_(body), window_(std::move(window)), i128_coord_limit_(limit) {}
};

// Phase function phi(x, y) with quasi-homogeneity exponents:
//   phi(q^{a_1}x_1, ..., q^{a_d}x_d, q^{a_1}y_1, ...) = q^beta phi(x, y).
//
// Catalog:
//   difference_gauge(B)  phi = ||x - y||_B          alpha_j = 1, beta = 1
//   parabolic(d)         phi = (x_d - y_d) - sum_{j<d} (x_j - y_j)^2
//                        alpha_j = d/(d+1) (j<d), alpha_d = beta = 2d/(d+1)
// Both are translation invariant: phi(x, y) = phi0(x - y).
class PhaseFunction {
public:
    static PhaseFunction difference_gauge(ConvexBody body);
    static PhaseFunction parabolic(int dim);
    // Same kinds with caller-supplied exponents. validate=false skips the
    // exponent invariants so tests can build deliberately broken phases.
    static PhaseFunction with_exponents(PhaseKind kind, std::optional<ConvexBody> body, int dim,
                                        std::vector<Rational> alpha, Rational beta,
                                        bool validate = true);

    PhaseKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    const std::vector<Rational>& alpha() const { return alpha_; }
    const Rational& beta() const { return beta_; }
    bool translation_invariant() const { return true; }
    const ConvexBody& body() const;

    double evaluate(std::span<const double> x, std::span<const double> y) const;
    double evaluate_phi0(std::span<const double> u) const;

    // phi0(k) exactly, parabolic only (the only catalog phi0 with integer values).
    __int128 parabolic_phi0(const IntVec& k) const;

    PhaseLevelWindow level_window(const Rational& level, const Rational& delta,
                                  Convention convention) const;

private:
    PhaseFunction(PhaseKind kind, int dim, std::optional<ConvexBody> body,
                  std::vector<Rational> alpha, Rational beta);

    PhaseKind kind_;
    int dim_;
    std::optional<ConvexBody> body_;
    std::vector<Rational> alpha_;
    Rational beta_;
};

// The map tau^alpha_q x = (q^{alpha_1} x_1, ..., q^{alpha_d} x_d).
struct AnisotropicDilation {
    std::vector<Rational> alpha;
    double q = 1.0;

    std::vector<double> apply(std::span<const double> x) const;
};

struct HomogeneityReport {
    double max_relative_error = 0.0;
    bool pass = false;
    double eps_floor = 0.0;
};

// Draws seeded samples with 1/2 <= |x - y| <= 2 and checks
// phi(tau_q x, tau_q y) against q^beta phi(x, y) for every q in q_values.
HomogeneityReport check_quasi_homogeneity(const PhaseFunction& phi, int sample_count,
                                          const std::vector<double>& q_values, double tol,
                                          std::uint64_t seed);

} // namespace latshell
