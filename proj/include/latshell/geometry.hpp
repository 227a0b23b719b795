#pragma once

#include "latshell/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace latshell {

// A d-dimensional integer lattice point.
using IntVec = std::vector<std::int64_t>;

// Shell inequality convention: closed keeps R <= ||k|| <= R+delta,
// half_open keeps R < ||k|| <= R+delta (so shell counts telescope).
enum class Convention { closed, half_open };

enum class BodyKind { euclidean_ball, ellipsoid, pball };

// Symmetric convex body presented by its gauge ||x||_B = inf{t>0 : x in tB}.
//
// Catalog kinds only. Each admits an exact membership test because
// gauge(k)^degree is an integer-valued polynomial at lattice points:
//   ball       sum k_j^2          degree 2
//   ellipsoid  k^T A k            degree 2   (A integer SPD)
//   pball      sum k_j^p          degree p   (p even)
class ConvexBody {
public:
    static ConvexBody euclidean_ball(int dim);
    static ConvexBody ellipsoid(std::vector<std::vector<std::int64_t>> A);
    static ConvexBody pball(int p, int dim);

    BodyKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    int degree() const { return degree_; }
    int pexp() const { return degree_; }
    const std::vector<std::vector<std::int64_t>>& matrix() const { return A_; }

    // ||x||_B in floating point; gauge(0) = 0.
    double gauge(std::span<const double> x) const;

    // gauge(k)^degree, exact.
    BigInt form(const IntVec& k) const;
    __int128 form_i128(const IntVec& k) const;
    // Largest coordinate magnitude for which form_i128 cannot overflow.
    std::int64_t form_i128_coord_limit() const;

    // |B| in the Lebesgue sense (closed forms via the Gamma function).
    double volume() const;

    // Per-coordinate extent of the unit body: max{|x_j| : gauge(x) <= 1}.
    // Any k with gauge(k) <= T satisfies |k_j| <= T * extent_j.
    std::vector<double> coordinate_extents() const;

    bool operator==(const ConvexBody&) const = default;

private:
    ConvexBody(BodyKind kind, int dim, int degree, std::vector<std::vector<std::int64_t>> A);

    BodyKind kind_;
    int dim_;
    int degree_;
    std::vector<std::vector<std::int64_t>> A_; // ellipsoid only
};

// Exact decision of R <= ||k||_B <= R+delta (closed) or R < ||k||_B <= R+delta
// (half_open). No floating-point rounding anywhere on the decision path.
bool shell_predicate_exact(const ConvexBody& body, const IntVec& k, const Rational& R,
                           const Rational& delta, Convention convention);

// Prepared window on the *form* value deciding lo <= gauge <= hi
// (lower_strict for the half-open variant). Bounds below 0 are clamped;
// a negative lower bound is vacuous since gauge >= 0.
RationalWindow gauge_form_window(const ConvexBody& body, const Rational& lo, const Rational& hi,
                                 bool lower_strict);

// det(A) for a small integer matrix, exact (Bareiss elimination).
BigInt integer_determinant(const std::vector<std::vector<std::int64_t>>& A);

} // namespace latshell
