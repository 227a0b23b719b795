#pragma once

#include "latshell/phase.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace latshell {

// Central-difference scheme; order 4 applies one Richardson extrapolation
// step to the order-2 stencil.
struct FDScheme {
    double h = 1e-4;
    int order = 2; // 2 or 4
};

std::vector<double> grad_x(const PhaseFunction& phi, std::span<const double> x,
                           std::span<const double> y, const FDScheme& scheme);
std::vector<double> grad_y(const PhaseFunction& phi, std::span<const double> x,
                           std::span<const double> y, const FDScheme& scheme);

// M[i][j] ~ d^2 phi / dx_i dy_j via nested central differences.
std::vector<std::vector<double>> mixed_hessian(const PhaseFunction& phi,
                                               std::span<const double> x,
                                               std::span<const double> y,
                                               const FDScheme& scheme);

// Determinant of the (d+1)x(d+1) bordered matrix
//   [ 0            grad_x phi ]
//   [ -(grad_y phi)^T   d^2 phi / dx_i dy_j ]
// computed by LU factorization with partial pivoting.
double monge_ampere_det(const PhaseFunction& phi, std::span<const double> x,
                        std::span<const double> y, const FDScheme& scheme);

struct LevelSetScan {
    PhaseFunction phi;
    double t = 1.0;
    int n_samples = 1000;
    std::uint64_t seed = 0;
    double thickness = 0.05;
    double hypothesis_floor = 1e-3;
};

struct CertifyReport {
    double min_abs_det = 0.0;
    double min_grad_x_norm = 0.0;
    double min_grad_y_norm = 0.0;
    int n_accepted = 0;
    bool hypothesis_pass = false;
    // diagnostics
    std::int64_t n_draws = 0;
    std::int64_t n_rejected_near_diagonal = 0;
    bool projection_used = false;
    double floor = 0.0;
};

// Samples (x, y) uniformly from B x B (B the Euclidean unit ball), keeps
// |phi - t| <= thickness, and reports the minima of |det|, |grad_x|, |grad_y|
// over the accepted points. Falls back to 1D root-finding along x_d when the
// rejection rate is too high. Throws LevelSetEmptyError on zero acceptance.
CertifyReport certify_level_set(const LevelSetScan& scan, const FDScheme& scheme,
                                int workers = 0);

// det of a small dense matrix by LU with partial pivoting (row-major).
double lu_determinant(std::vector<double> m, int n);

} // namespace latshell
