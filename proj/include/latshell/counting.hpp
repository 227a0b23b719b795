#pragma once

#include "latshell/geometry.hpp"
#include "latshell/phase.hpp"
#include "latshell/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace latshell {

enum class CountMethod { brute, fiber, diff_weight, closed_form };

std::string count_method_name(CountMethod m);

struct CountResult {
    BigInt count;
    CountMethod method = CountMethod::brute;
    double wall_time = 0.0;
    std::uint64_t points_examined = 0;
    // False when some q^{alpha_j} or q^beta had to be resolved in floating
    // point (box sides then carry a half-ulp hazard).
    bool exact_scales = true;
};

// Lattice points k with R <= ||k||_B <= R+delta (closed) or with the lower
// edge strict (half_open).
struct ShellQuery {
    ConvexBody body;
    Rational R;
    Rational delta = Rational(0);
    Convention convention = Convention::closed;
};

// Pairs (n, m) with |n_j|, |m_j| <= C q^{alpha_j} and |phi(n,m) - q^beta| <= delta.
struct PairQuery {
    PhaseFunction phi;
    Rational q;
    Rational delta = Rational(0);
    Rational C = Rational(1);
    Convention convention = Convention::closed;
};

struct CountOptions {
    int workers = 0;                                   // 0: resolve from env/cores
    std::uint64_t brute_guard = 1'000'000'000ULL;      // max points for brute force
    bool override_guard = false;
};

CountResult shell_count_brute(const ShellQuery& query, const CountOptions& opts = {});
CountResult shell_count_fiber(const ShellQuery& query, const CountOptions& opts = {});

// N_B(R) = #{k : ||k||_B <= R}, fiber method.
CountResult ball_count(const ConvexBody& body, const Rational& R, const CountOptions& opts = {});

// D_B(R) = N_B(R) - |B| R^d.
double discrepancy(const ConvexBody& body, const Rational& R, const CountOptions& opts = {});

CountResult pair_count_brute(const PairQuery& query, const CountOptions& opts = {});
CountResult pair_count_diff_weight(const PairQuery& query, const CountOptions& opts = {});

// Closed form of the parabolic pair count at q = t^{d+1}, delta = 0:
// sum over u in Z^{d-1}, |u_j| <= L_j - 1, of
//   prod_{j<d} (L_j - |u_j|) * max(0, L_d - |t^{2d} + sum_j u_j^2|).
CountResult sharpness_count(int d, std::int64_t t, const Rational& C,
                            const CountOptions& opts = {});

// max(q^{d-2+2/(d+1)}, q^{d-beta} * delta).
double theorem_bound(double q, double delta, int d, double beta);

// Box half-sides floor(C q^{alpha_j}) and the level q^beta, resolved exactly
// when the rational powers exist, in floating point (flagged) otherwise.
struct ResolvedBoxes {
    std::vector<std::int64_t> half_side;
    Rational level;
    bool exact = true;
};
ResolvedBoxes resolve_pair_boxes(const PhaseFunction& phi, const Rational& q, const Rational& C);

} // namespace latshell
