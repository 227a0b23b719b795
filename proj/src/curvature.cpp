#include "latshell/curvature.hpp"

#include "latshell/errors.hpp"
#include "latshell/parallel.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace latshell {

namespace {

void validate_scheme(const FDScheme& scheme) {
    if (!(scheme.h > 0)) throw std::invalid_argument("finite-difference step must be positive");
    if (scheme.order != 2 && scheme.order != 4)
        throw std::invalid_argument("finite-difference order must be 2 or 4");
}

double checked(double v) {
    if (!std::isfinite(v)) throw std::domain_error("phase evaluation is not finite");
    return v;
}

// d phi / d x_i at step h (order 2).
double dphi_dxi(const PhaseFunction& phi, std::vector<double> x, const std::vector<double>& y,
                std::size_t i, double h) {
    x[i] += h;
    const double up = checked(phi.evaluate(x, y));
    x[i] -= 2 * h;
    const double down = checked(phi.evaluate(x, y));
    return (up - down) / (2 * h);
}

double dphi_dyi(const PhaseFunction& phi, const std::vector<double>& x, std::vector<double> y,
                std::size_t i, double h) {
    y[i] += h;
    const double up = checked(phi.evaluate(x, y));
    y[i] -= 2 * h;
    const double down = checked(phi.evaluate(x, y));
    return (up - down) / (2 * h);
}

double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

// 4-point cross stencil for d^2 phi / dx_i dy_j at step h (order 2).
double mixed_entry(const PhaseFunction& phi, std::vector<double> x, std::vector<double> y,
                   std::size_t i, std::size_t j, double h) {
    x[i] += h;
    y[j] += h;
    const double pp = checked(phi.evaluate(x, y));
    y[j] -= 2 * h;
    const double pm = checked(phi.evaluate(x, y));
    x[i] -= 2 * h;
    const double mm = checked(phi.evaluate(x, y));
    y[j] += 2 * h;
    const double mp = checked(phi.evaluate(x, y));
    return (pp - pm - mp + mm) / (4 * h * h);
}

std::vector<double> to_vec(std::span<const double> v) {
    return std::vector<double>(v.begin(), v.end());
}

double euclid_norm(const std::vector<double>& v) {
    double s = 0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
}

} // namespace

std::vector<double> grad_x(const PhaseFunction& phi, std::span<const double> x,
                           std::span<const double> y, const FDScheme& scheme) {
    validate_scheme(scheme);
    const std::vector<double> xv = to_vec(x), yv = to_vec(y);
    std::vector<double> g(xv.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double coarse = dphi_dxi(phi, xv, yv, i, scheme.h);
        g[i] = scheme.order == 2 ? coarse
                                 : richardson(coarse, dphi_dxi(phi, xv, yv, i, scheme.h / 2));
    }
    return g;
}

std::vector<double> grad_y(const PhaseFunction& phi, std::span<const double> x,
                           std::span<const double> y, const FDScheme& scheme) {
    validate_scheme(scheme);
    const std::vector<double> xv = to_vec(x), yv = to_vec(y);
    std::vector<double> g(yv.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double coarse = dphi_dyi(phi, xv, yv, i, scheme.h);
        g[i] = scheme.order == 2 ? coarse
                                 : richardson(coarse, dphi_dyi(phi, xv, yv, i, scheme.h / 2));
    }
    return g;
}

std::vector<std::vector<double>> mixed_hessian(const PhaseFunction& phi,
                                               std::span<const double> x,
                                               std::span<const double> y,
                                               const FDScheme& scheme) {
    validate_scheme(scheme);
    const std::vector<double> xv = to_vec(x), yv = to_vec(y);
    const std::size_t d = xv.size();
    std::vector<std::vector<double>> m(d, std::vector<double>(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double coarse = mixed_entry(phi, xv, yv, i, j, scheme.h);
            m[i][j] = scheme.order == 2
                          ? coarse
                          : richardson(coarse, mixed_entry(phi, xv, yv, i, j, scheme.h / 2));
        }
    }
    return m;
}

double lu_determinant(std::vector<double> m, int n) {
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(m[static_cast<std::size_t>(col * n + col)]);
        for (int r = col + 1; r < n; ++r) {
            const double v = std::abs(m[static_cast<std::size_t>(r * n + col)]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != col) {
            for (int c = 0; c < n; ++c)
                std::swap(m[static_cast<std::size_t>(pivot * n + c)],
                          m[static_cast<std::size_t>(col * n + c)]);
            det = -det;
        }
        const double diag = m[static_cast<std::size_t>(col * n + col)];
        det *= diag;
        for (int r = col + 1; r < n; ++r) {
            const double f = m[static_cast<std::size_t>(r * n + col)] / diag;
            for (int c = col + 1; c < n; ++c)
                m[static_cast<std::size_t>(r * n + c)] -= f * m[static_cast<std::size_t>(col * n + c)];
        }
    }
    return det;
}

double monge_ampere_det(const PhaseFunction& phi, std::span<const double> x,
                        std::span<const double> y, const FDScheme& scheme) {
    const int d = phi.dimension();
    const std::vector<double> gx = grad_x(phi, x, y, scheme);
    const std::vector<double> gy = grad_y(phi, x, y, scheme);
    const std::vector<std::vector<double>> mh = mixed_hessian(phi, x, y, scheme);

    const int n = d + 1;
    std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
    for (int j = 0; j < d; ++j) m[static_cast<std::size_t>(j + 1)] = gx[static_cast<std::size_t>(j)];
    for (int i = 0; i < d; ++i) m[static_cast<std::size_t>((i + 1) * n)] = -gy[static_cast<std::size_t>(i)];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            m[static_cast<std::size_t>((i + 1) * n + (j + 1))] =
                mh[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return lu_determinant(std::move(m), n);
}

CertifyReport certify_level_set(const LevelSetScan& scan, const FDScheme& scheme, int workers) {
    validate_scheme(scheme);
    if (!(scan.t > 0)) throw std::invalid_argument("level-set scan requires t > 0");
    if (scan.n_samples < 1) throw std::invalid_argument("level-set scan requires n_samples >= 1");

    const int d = scan.phi.dimension();
    std::mt19937_64 rng(scan.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto draw_in_ball = [&](std::vector<double>& out) {
        double norm = 0;
        do {
            norm = 0;
            for (auto& v : out) {
                v = gauss(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
        } while (norm < 1e-12);
        const double r = std::pow(unit(rng), 1.0 / d);
        for (auto& v : out) v *= r / norm;
    };

    const double diag_exclusion = 10.0 * scheme.h;
    auto too_close = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0;
        for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - y[j]) * (x[j] - y[j]);
        return std::sqrt(s) < diag_exclusion;
    };

    CertifyReport report;
    report.floor = scan.hypothesis_floor;

    std::vector<std::pair<std::vector<double>, std::vector<double>>> accepted;
    accepted.reserve(static_cast<std::size_t>(scan.n_samples));

    // Stage 1: plain rejection sampling on |phi - t| <= thickness.
    const std::int64_t max_draws = 1'000'000;
    std::vector<double> x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d));
    while (static_cast<int>(accepted.size()) < scan.n_samples && report.n_draws < max_draws) {
        ++report.n_draws;
        draw_in_ball(x);
        draw_in_ball(y);
        if (too_close(x, y)) {
            ++report.n_rejected_near_diagonal;
            continue;
        }
        if (std::abs(scan.phi.evaluate(x, y) - scan.t) <= scan.thickness)
            accepted.emplace_back(x, y);
    }

    // Stage 2: project draws onto the level set by root-finding along x_d.
    if (static_cast<int>(accepted.size()) < (scan.n_samples + 99) / 100) {
        report.projection_used = true;
        accepted.clear();
        std::int64_t attempts = 0;
        const std::int64_t max_attempts = 200'000;
        while (static_cast<int>(accepted.size()) < scan.n_samples && attempts < max_attempts) {
            ++attempts;
            ++report.n_draws;
            draw_in_ball(x);
            draw_in_ball(y);
            auto value_at = [&](double s) {
                std::vector<double> xs = x;
                xs[static_cast<std::size_t>(d - 1)] += s;
                return scan.phi.evaluate(xs, y) - scan.t;
            };
            // Bracket the root on a coarse grid of shifts.
            const double lo_s = -4.0, hi_s = 4.0;
            const int grid = 64;
            double prev_s = lo_s, prev_v = value_at(lo_s);
            double found_lo = 0, found_hi = 0;
            bool bracketed = false;
            for (int g = 1; g <= grid; ++g) {
                const double s = lo_s + (hi_s - lo_s) * g / grid;
                const double v = value_at(s);
                if (std::isfinite(prev_v) && std::isfinite(v) && prev_v * v <= 0 && prev_v != v) {
                    found_lo = prev_s;
                    found_hi = s;
                    bracketed = true;
                    break;
                }
                prev_s = s;
                prev_v = v;
            }
            if (!bracketed) continue;
            double f_lo = value_at(found_lo);
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (found_lo + found_hi);
                const double v = value_at(mid);
                if (f_lo * v <= 0) {
                    found_hi = mid;
                } else {
                    found_lo = mid;
                    f_lo = v;
                }
            }
            const double s = 0.5 * (found_lo + found_hi);
            std::vector<double> xs = x;
            xs[static_cast<std::size_t>(d - 1)] += s;
            if (std::abs(scan.phi.evaluate(xs, y) - scan.t) > scan.thickness) continue;
            if (too_close(xs, y)) {
                ++report.n_rejected_near_diagonal;
                continue;
            }
            accepted.emplace_back(std::move(xs), y);
        }
    }

    if (accepted.empty()) {
        std::ostringstream msg;
        msg << "level set |phi - " << scan.t << "| <= " << scan.thickness
            << " produced no samples after " << report.n_draws << " draws ("
            << report.n_rejected_near_diagonal << " rejected near the diagonal)";
        throw LevelSetEmptyError(msg.str());
    }

    report.n_accepted = static_cast<int>(accepted.size());

    // FD evaluation per sample; min-reductions are order independent.
    std::vector<double> dets(accepted.size()), gxn(accepted.size()), gyn(accepted.size());
    run_chunked(static_cast<std::int64_t>(accepted.size()), workers, [&](std::int64_t i) {
        const auto& [sx, sy] = accepted[static_cast<std::size_t>(i)];
        dets[static_cast<std::size_t>(i)] = std::abs(monge_ampere_det(scan.phi, sx, sy, scheme));
        gxn[static_cast<std::size_t>(i)] = euclid_norm(grad_x(scan.phi, sx, sy, scheme));
        gyn[static_cast<std::size_t>(i)] = euclid_norm(grad_y(scan.phi, sx, sy, scheme));
    });

    report.min_abs_det = dets[0];
    report.min_grad_x_norm = gxn[0];
    report.min_grad_y_norm = gyn[0];
    for (std::size_t i = 1; i < accepted.size(); ++i) {
        report.min_abs_det = std::min(report.min_abs_det, dets[i]);
        report.min_grad_x_norm = std::min(report.min_grad_x_norm, gxn[i]);
        report.min_grad_y_norm = std::min(report.min_grad_y_norm, gyn[i]);
    }
    report.hypothesis_pass = report.min_abs_det > scan.hypothesis_floor &&
                             report.min_grad_x_norm > scan.hypothesis_floor &&
                             report.min_grad_y_norm > scan.hypothesis_floor;
    return report;
}

} // namespace latshell
