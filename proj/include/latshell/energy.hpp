#pragma once

#include "latshell/analysis.hpp"
#include "latshell/counting.hpp"
#include "latshell/rational.hpp"

#include <cstdint>
#include <vector>

namespace latshell {

// Parameters of the discrete s-energy
//   E(q, s) = q^{-2d} sum_{a != a'} |x_a - x_{a'}|^{-s},
//   x_a = (a_1 / q^{alpha_1}, ..., a_d / q^{alpha_d}),  |a_j| <= floor(C q^{alpha_j}).
struct EnergyParams {
    int d = 2;
    std::int64_t q = 2;
    std::vector<Rational> alpha;
    Rational C = Rational(1);
    double s = 1.5;
};

// Difference-weight fast path: groups pairs by k = a - a' with the tent
// weight prod_j (L_j - |k_j|). Compensated chunk sums in a fixed order, so
// the result is bit-stable across worker counts.
double discrete_energy(const EnergyParams& params, const CountOptions& opts = {});

// Direct double loop over all ordered pairs; the oracle for the fast path.
// Guarded: N^2 pair evaluations must stay within opts.brute_guard.
double discrete_energy_direct(const EnergyParams& params, const CountOptions& opts = {});

struct DyadicSumResult {
    double value = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
};

// Double sum over a != a', |a|,|a'| <= C q^alpha of (|a-a'| / q^alpha)^{-s/i},
// against the reference envelope q^{alpha(1+s/i)} (s >= i) or q^{2 alpha} (s < i).
DyadicSumResult dyadic_inner_sum(std::int64_t q, const Rational& alpha_j, double s, int i,
                                 const Rational& C = Rational(1));

// E(q, s) across an ascending grid of at least 4 q values, with a log-log
// slope fit (boundedness shows up as slope ~ 0) and the max/min ratio.
ScanReport energy_scan(int d, const std::vector<Rational>& alpha, const Rational& C, double s,
                       const std::vector<std::int64_t>& q_list, const CountOptions& opts = {});

} // namespace latshell
