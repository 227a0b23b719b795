#include "latshell/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace latshell {

namespace {

void check_dimension(const ConvexBody& body, std::size_t n) {
    if (static_cast<std::size_t>(body.dimension()) != n)
        throw std::invalid_argument("vector dimension does not match body dimension");
}

// Bareiss fraction-free elimination over mpz.
BigInt bareiss_det(std::vector<std::vector<BigInt>> m) {
    const std::size_t n = m.size();
    if (n == 0) return BigInt(1);
    BigInt prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return BigInt(0);
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : BigInt(-m[n - 1][n - 1]);
}

std::vector<std::vector<BigInt>> to_bigint_matrix(const std::vector<std::vector<std::int64_t>>& A) {
    std::vector<std::vector<BigInt>> m(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) {
        m[i].reserve(A[i].size());
        for (std::int64_t v : A[i]) m[i].emplace_back(static_cast<long>(v));
    }
    return m;
}

// Minor of A with row/col j removed (for inverse diagonal entries).
std::vector<std::vector<BigInt>> principal_minor(const std::vector<std::vector<std::int64_t>>& A,
                                                 std::size_t drop) {
    const std::size_t n = A.size();
    std::vector<std::vector<BigInt>> m;
    m.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == drop) continue;
        std::vector<BigInt> row;
        row.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == drop) continue;
            row.emplace_back(static_cast<long>(A[i][j]));
        }
        m.push_back(std::move(row));
    }
    return m;
}

double unit_ball_volume(int d) {
    return std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

} // namespace

BigInt integer_determinant(const std::vector<std::vector<std::int64_t>>& A) {
    return bareiss_det(to_bigint_matrix(A));
}

ConvexBody::ConvexBody(BodyKind kind, int dim, int degree,
                       std::vector<std::vector<std::int64_t>> A)
    : kind_(kind), dim_(dim), degree_(degree), A_(std::move(A)) {}

ConvexBody ConvexBody::euclidean_ball(int dim) {
    if (dim < 2) throw std::invalid_argument("body dimension must be >= 2");
    return ConvexBody(BodyKind::euclidean_ball, dim, 2, {});
}

ConvexBody ConvexBody::ellipsoid(std::vector<std::vector<std::int64_t>> A) {
    const std::size_t n = A.size();
    if (n < 2) throw std::invalid_argument("ellipsoid matrix must be at least 2x2");
    for (const auto& row : A)
        if (row.size() != n) throw std::invalid_argument("ellipsoid matrix must be square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (A[i][j] != A[j][i])
                throw std::invalid_argument("ellipsoid matrix must be symmetric");
    // Positive definiteness: all leading principal minors positive (exact).
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<std::vector<std::int64_t>> lead(k, std::vector<std::int64_t>(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) lead[i][j] = A[i][j];
        if (integer_determinant(lead) <= 0)
            throw std::invalid_argument("ellipsoid matrix must be positive definite");
    }
    return ConvexBody(BodyKind::ellipsoid, static_cast<int>(n), 2, std::move(A));
}

ConvexBody ConvexBody::pball(int p, int dim) {
    if (dim < 2) throw std::invalid_argument("body dimension must be >= 2");
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("pball exponent must be even and >= 2");
    return ConvexBody(BodyKind::pball, dim, p, {});
}

double ConvexBody::gauge(std::span<const double> x) const {
    check_dimension(*this, x.size());
    switch (kind_) {
    case BodyKind::euclidean_ball: {
        double s = 0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
    }
    case BodyKind::ellipsoid: {
        double s = 0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) s += static_cast<double>(A_[i][j]) * x[i] * x[j];
        return std::sqrt(s);
    }
    case BodyKind::pball: {
        double s = 0;
        for (double v : x) s += std::pow(std::abs(v), degree_);
        return std::pow(s, 1.0 / degree_);
    }
    }
    return 0;
}

BigInt ConvexBody::form(const IntVec& k) const {
    check_dimension(*this, k.size());
    BigInt s(0);
    switch (kind_) {
    case BodyKind::euclidean_ball:
        for (std::int64_t v : k) s += BigInt(v) * v;
        return s;
    case BodyKind::ellipsoid:
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) s += BigInt(A_[i][j]) * k[i] * k[j];
        return s;
    case BodyKind::pball: {
        for (std::int64_t v : k) {
            BigInt term(v);
            mpz_pow_ui(term.get_mpz_t(), term.get_mpz_t(), static_cast<unsigned long>(degree_));
            s += term;
        }
        return s;
    }
    }
    return s;
}

__int128 ConvexBody::form_i128(const IntVec& k) const {
    __int128 s = 0;
    switch (kind_) {
    case BodyKind::euclidean_ball:
        for (std::int64_t v : k) s += static_cast<__int128>(v) * v;
        return s;
    case BodyKind::ellipsoid:
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                s += static_cast<__int128>(A_[i][j]) * k[i] * k[j];
        return s;
    case BodyKind::pball:
        for (std::int64_t v : k) {
            __int128 term = 1;
            const __int128 base = v < 0 ? -v : v;
            for (int e = 0; e < degree_; ++e) term *= base;
            s += term;
        }
        return s;
    }
    return s;
}

std::int64_t ConvexBody::form_i128_coord_limit() const {
    // Keep d * max|term| below 2^120 with per-term bound B^degree * coeff.
    double coeff = 1.0;
    if (kind_ == BodyKind::ellipsoid) {
        double sum_abs = 0;
        for (const auto& row : A_)
            for (std::int64_t v : row) sum_abs += std::abs(static_cast<double>(v));
        coeff = sum_abs;
    } else {
        coeff = dim_;
    }
    const double budget = std::pow(2.0, 120.0) / coeff;
    const double limit = std::pow(budget, 1.0 / degree_);
    if (limit >= 9.0e18) return INT64_MAX;
    return static_cast<std::int64_t>(limit);
}

double ConvexBody::volume() const {
    switch (kind_) {
    case BodyKind::euclidean_ball:
        return unit_ball_volume(dim_);
    case BodyKind::ellipsoid: {
        const BigInt det = integer_determinant(A_);
        return unit_ball_volume(dim_) / std::sqrt(det.get_d());
    }
    case BodyKind::pball: {
        const double p = degree_;
        return std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), dim_) / std::tgamma(1.0 + dim_ / p);
    }
    }
    return 0;
}

std::vector<double> ConvexBody::coordinate_extents() const {
    switch (kind_) {
    case BodyKind::euclidean_ball:
    case BodyKind::pball:
        return std::vector<double>(static_cast<std::size_t>(dim_), 1.0);
    case BodyKind::ellipsoid: {
        // max{|x_j| : x^T A x <= 1} = sqrt((A^{-1})_{jj}) = sqrt(minor_jj / det A).
        const BigInt det = integer_determinant(A_);
        std::vector<double> out(static_cast<std::size_t>(dim_));
        for (int j = 0; j < dim_; ++j) {
            const BigInt minor = bareiss_det(principal_minor(A_, static_cast<std::size_t>(j)));
            out[static_cast<std::size_t>(j)] = std::sqrt(minor.get_d() / det.get_d());
        }
        return out;
    }
    }
    return {};
}

RationalWindow gauge_form_window(const ConvexBody& body, const Rational& lo, const Rational& hi,
                                 bool lower_strict) {
    const unsigned long deg = static_cast<unsigned long>(body.degree());
    auto powq = [deg](const Rational& r) {
        BigInt n, d;
        mpz_pow_ui(n.get_mpz_t(), r.get_num().get_mpz_t(), deg);
        mpz_pow_ui(d.get_mpz_t(), r.get_den().get_mpz_t(), deg);
        Rational out(n, d);
        out.canonicalize();
        return out;
    };
    if (hi < 0) {
        // Unsatisfiable: gauge >= 0 > hi. Encode as an empty window.
        return RationalWindow(Rational(1), Rational(0), false);
    }
    const bool lower_vacuous = lo < 0;
    const Rational lo_clamped = lower_vacuous ? Rational(0) : lo;
    return RationalWindow(powq(lo_clamped), powq(hi), lower_strict, lower_vacuous);
}

bool shell_predicate_exact(const ConvexBody& body, const IntVec& k, const Rational& R,
                           const Rational& delta, Convention convention) {
    if (R < 0) throw std::invalid_argument("shell predicate requires R >= 0");
    if (delta < 0) throw std::invalid_argument("shell predicate requires delta >= 0");
    check_dimension(body, k.size());
    const RationalWindow window =
        gauge_form_window(body, R, R + delta, convention == Convention::half_open);
    std::int64_t max_abs = 0;
    for (std::int64_t v : k) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs <= body.form_i128_coord_limit()) return window.contains(body.form_i128(k));
    return window.contains(body.form(k));
}

} // namespace latshell
