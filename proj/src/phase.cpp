#include "latshell/phase.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace latshell {

namespace {

void check_dim(int dim, std::size_t n, const char* what) {
    if (static_cast<std::size_t>(dim) != n)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

} // namespace

PhaseFunction::PhaseFunction(PhaseKind kind, int dim, std::optional<ConvexBody> body,
                             std::vector<Rational> alpha, Rational beta)
    : kind_(kind), dim_(dim), body_(std::move(body)), alpha_(std::move(alpha)),
      beta_(std::move(beta)) {}

PhaseFunction PhaseFunction::difference_gauge(ConvexBody body) {
    const int d = body.dimension();
    return PhaseFunction(PhaseKind::difference_gauge, d, std::move(body),
                         std::vector<Rational>(static_cast<std::size_t>(d), Rational(1)),
                         Rational(1));
}

PhaseFunction PhaseFunction::parabolic(int dim) {
    if (dim < 2) throw std::invalid_argument("parabolic phase requires dimension >= 2");
    std::vector<Rational> alpha(static_cast<std::size_t>(dim), Rational(dim, dim + 1));
    alpha.back() = Rational(2 * dim, dim + 1);
    return PhaseFunction(PhaseKind::parabolic, dim, std::nullopt, std::move(alpha),
                         Rational(2 * dim, dim + 1));
}

PhaseFunction PhaseFunction::with_exponents(PhaseKind kind, std::optional<ConvexBody> body,
                                            int dim, std::vector<Rational> alpha, Rational beta,
                                            bool validate) {
    if (kind == PhaseKind::difference_gauge) {
        if (!body) throw std::invalid_argument("difference_gauge phase requires a body");
        dim = body->dimension();
    } else if (dim < 2) {
        throw std::invalid_argument("phase dimension must be >= 2");
    }
    if (alpha.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("alpha length must equal the dimension");
    if (validate) {
        Rational sum(0);
        const Rational cap(2 * dim, dim + 1);
        for (const Rational& a : alpha) {
            if (a <= 0) throw std::invalid_argument("alpha entries must be positive");
            if (a > cap)
                throw std::invalid_argument("alpha entry exceeds 2d/(d+1)");
            sum += a;
        }
        if (sum != dim) throw std::invalid_argument("alpha entries must sum to d");
        if (beta <= 0) throw std::invalid_argument("beta must be positive");
    }
    return PhaseFunction(kind, dim, std::move(body), std::move(alpha), std::move(beta));
}

const ConvexBody& PhaseFunction::body() const {
    if (!body_) throw std::logic_error("phase has no body");
    return *body_;
}

double PhaseFunction::evaluate(std::span<const double> x, std::span<const double> y) const {
    check_dim(dim_, x.size(), "phase evaluate");
    check_dim(dim_, y.size(), "phase evaluate");
    std::vector<double> u(x.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = x[j] - y[j];
    return evaluate_phi0(u);
}

double PhaseFunction::evaluate_phi0(std::span<const double> u) const {
    check_dim(dim_, u.size(), "phase evaluate");
    if (kind_ == PhaseKind::difference_gauge) return body_->gauge(u);
    double s = u.back();
    for (std::size_t j = 0; j + 1 < u.size(); ++j) s -= u[j] * u[j];
    return s;
}

__int128 PhaseFunction::parabolic_phi0(const IntVec& k) const {
    if (kind_ != PhaseKind::parabolic)
        throw std::logic_error("parabolic_phi0 called on a non-parabolic phase");
    check_dim(dim_, k.size(), "phase evaluate");
    __int128 s = k.back();
    for (std::size_t j = 0; j + 1 < k.size(); ++j)
        s -= static_cast<__int128>(k[j]) * k[j];
    return s;
}

PhaseLevelWindow PhaseFunction::level_window(const Rational& level, const Rational& delta,
                                             Convention convention) const {
    if (delta < 0) throw std::invalid_argument("level window requires delta >= 0");
    const Rational lo = level - delta;
    const Rational hi = level + delta;
    const bool strict = convention == Convention::half_open;
    if (kind_ == PhaseKind::difference_gauge) {
        return PhaseLevelWindow(kind_, &*body_, gauge_form_window(*body_, lo, hi, strict),
                                body_->form_i128_coord_limit());
    }
    return PhaseLevelWindow(kind_, nullptr, RationalWindow(lo, hi, strict), 0);
}

bool PhaseLevelWindow::contains(const IntVec& k) const {
    if (kind_ == PhaseKind::parabolic) {
        __int128 s = k.back();
        for (std::size_t j = 0; j + 1 < k.size(); ++j)
            s -= static_cast<__int128>(k[j]) * k[j];
        return window_.contains(s);
    }
    std::int64_t max_abs = 0;
    for (std::int64_t v : k) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs <= i128_coord_limit_) return window_.contains(body_->form_i128(k));
    return window_.contains(body_->form(k));
}

std::vector<double> AnisotropicDilation::apply(std::span<const double> x) const {
    if (x.size() != alpha.size())
        throw std::invalid_argument("dilation: dimension mismatch");
    if (q <= 0) throw std::invalid_argument("dilation requires q > 0");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        out[j] = std::pow(q, alpha[j].get_d()) * x[j];
    return out;
}

HomogeneityReport check_quasi_homogeneity(const PhaseFunction& phi, int sample_count,
                                          const std::vector<double>& q_values, double tol,
                                          std::uint64_t seed) {
    if (q_values.empty()) throw std::invalid_argument("q_values must be nonempty");
    if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");

    const int d = phi.dimension();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    std::uniform_real_distribution<double> radius(0.5, 2.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    HomogeneityReport report;
    report.eps_floor = 1e-300;

    AnisotropicDilation tau{phi.alpha(), 1.0};
    for (int s = 0; s < sample_count; ++s) {
        std::vector<double> x(static_cast<std::size_t>(d));
        std::vector<double> dir(static_cast<std::size_t>(d));
        double norm = 0;
        for (auto& v : x) v = box(rng);
        do {
            norm = 0;
            for (auto& v : dir) {
                v = gauss(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
        } while (norm < 1e-12);
        const double r = radius(rng);
        std::vector<double> y(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            y[static_cast<std::size_t>(j)] =
                x[static_cast<std::size_t>(j)] - r * dir[static_cast<std::size_t>(j)] / norm;

        const double base = phi.evaluate(x, y);
        for (double q : q_values) {
            tau.q = q;
            const std::vector<double> tx = tau.apply(x);
            const std::vector<double> ty = tau.apply(y);
            const double lhs = phi.evaluate(tx, ty);
            const double rhs = std::pow(q, phi.beta().get_d()) * base;
            const double rel = std::abs(lhs - rhs) / (std::abs(rhs) + report.eps_floor);
            report.max_relative_error = std::max(report.max_relative_error, rel);
        }
    }
    report.pass = report.max_relative_error <= tol;
    return report;
}

} // namespace latshell
