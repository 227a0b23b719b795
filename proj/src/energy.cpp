#include "latshell/energy.hpp"

#include "latshell/errors.hpp"
#include "latshell/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace latshell {

namespace {

struct Grid {
    std::vector<std::int64_t> half; // box half-sides floor(C q^alpha_j)
    std::vector<double> scale;      // q^{alpha_j}
};

void validate(const EnergyParams& p) {
    if (p.d < 2) throw std::invalid_argument("energy requires d >= 2");
    if (p.q < 2) throw std::invalid_argument("energy requires q >= 2");
    if (p.alpha.size() != static_cast<std::size_t>(p.d))
        throw std::invalid_argument("alpha length must equal d");
    Rational sum(0);
    for (const Rational& a : p.alpha) {
        if (a <= 0) throw std::invalid_argument("alpha entries must be positive");
        sum += a;
    }
    if (sum != p.d) throw std::invalid_argument("alpha entries must sum to d");
    if (!(p.s >= (p.d + 1) / 2.0) || !(p.s < p.d))
        throw std::invalid_argument("s must satisfy (d+1)/2 <= s < d");
    if (p.C < 0) throw std::invalid_argument("C must be nonnegative");
}

// Coordinates ordered canonically by (alpha, original index) so that
// relabeling coordinates along with alpha reproduces the identical float sum.
Grid resolve_grid(const EnergyParams& p) {
    std::vector<std::size_t> order(p.alpha.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p.alpha[a] < p.alpha[b]; });
    Grid g;
    g.half.reserve(order.size());
    g.scale.reserve(order.size());
    const Rational q(static_cast<long>(p.q));
    for (std::size_t idx : order) {
        const Rational& a = p.alpha[idx];
        if (auto exact = exact_rational_power(q, a)) {
            g.half.push_back(floor_rational_i64(p.C * *exact));
            g.scale.push_back(exact->get_d());
        } else {
            const double scale = rational_power_double(q, a);
            g.half.push_back(static_cast<std::int64_t>(std::floor(p.C.get_d() * scale)));
            g.scale.push_back(scale);
        }
    }
    return g;
}

// Kahan accumulator.
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// Fixed pairwise tree over per-chunk sums (chunk boundaries are data-defined,
// so the reduction does not depend on the worker count).
double pairwise_reduce(std::vector<double> v) {
    if (v.empty()) return 0.0;
    while (v.size() > 1) {
        std::vector<double> next;
        next.reserve((v.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(v[i] + v[i + 1]);
        if (v.size() % 2 == 1) next.push_back(v.back());
        v = std::move(next);
    }
    return v[0];
}

double q_power(std::int64_t q, int e) {
    double out = 1.0;
    for (int i = 0; i < e; ++i) out *= static_cast<double>(q);
    return out;
}

bool advance_box(IntVec& k, const std::vector<std::int64_t>& half, std::size_t from) {
    for (std::size_t i = k.size(); i-- > from;) {
        if (k[i] < half[i]) {
            ++k[i];
            for (std::size_t j = i + 1; j < k.size(); ++j) k[j] = -half[j];
            return true;
        }
    }
    return false;
}

} // namespace

double discrete_energy(const EnergyParams& params, const CountOptions& opts) {
    validate(params);
    const Grid grid = resolve_grid(params);
    const std::size_t d = grid.half.size();

    std::vector<std::int64_t> diff_half(d);
    std::vector<double> weight_base(d);
    for (std::size_t j = 0; j < d; ++j) {
        diff_half[j] = 2 * grid.half[j];
        weight_base[j] = static_cast<double>(2 * grid.half[j] + 1);
    }

    const std::int64_t n_chunks = 2 * diff_half[0] + 1;
    std::vector<double> chunk_sums(static_cast<std::size_t>(n_chunks), 0.0);
    run_chunked(n_chunks, opts.workers, [&](std::int64_t chunk) {
        IntVec k(d);
        k[0] = -diff_half[0] + chunk;
        for (std::size_t j = 1; j < d; ++j) k[j] = -diff_half[j];
        Kahan acc;
        const double w0 = weight_base[0] - std::abs(static_cast<double>(k[0]));
        do {
            bool zero = true;
            for (std::size_t j = 0; j < d; ++j)
                if (k[j] != 0) { zero = false; break; }
            if (!zero) {
                double w = w0;
                double dist_sq = 0;
                for (std::size_t j = 0; j < d; ++j) {
                    if (j > 0) w *= weight_base[j] - std::abs(static_cast<double>(k[j]));
                    const double c = static_cast<double>(k[j]) / grid.scale[j];
                    dist_sq += c * c;
                }
                acc.add(w * std::pow(dist_sq, -params.s / 2.0));
            }
        } while (advance_box(k, diff_half, 1));
        chunk_sums[static_cast<std::size_t>(chunk)] = acc.sum;
    });

    return pairwise_reduce(std::move(chunk_sums)) / q_power(params.q, 2 * params.d);
}

double discrete_energy_direct(const EnergyParams& params, const CountOptions& opts) {
    validate(params);
    const Grid grid = resolve_grid(params);
    const std::size_t d = grid.half.size();

    long double volume = 1.0L;
    for (std::int64_t b : grid.half) volume *= static_cast<long double>(2 * b + 1);
    if (!opts.override_guard && volume * volume > static_cast<long double>(opts.brute_guard))
        throw TooLargeError("direct energy loop exceeds the feasibility guard; "
                            "use the difference-weight path");

    std::vector<std::vector<double>> points;
    IntVec a(d);
    for (std::size_t j = 0; j < d; ++j) a[j] = -grid.half[j];
    do {
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) x[j] = static_cast<double>(a[j]) / grid.scale[j];
        points.push_back(std::move(x));
    } while (advance_box(a, grid.half, 0));

    const std::uint64_t n = points.size();

    std::vector<double> chunk_sums(n, 0.0);
    run_chunked(static_cast<std::int64_t>(n), opts.workers, [&](std::int64_t i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        Kahan acc;
        for (std::size_t j = 0; j < n; ++j) {
            if (static_cast<std::size_t>(i) == j) continue;
            double dist_sq = 0;
            for (std::size_t c = 0; c < d; ++c) {
                const double delta = p[c] - points[j][c];
                dist_sq += delta * delta;
            }
            acc.add(std::pow(dist_sq, -params.s / 2.0));
        }
        chunk_sums[static_cast<std::size_t>(i)] = acc.sum;
    });

    return pairwise_reduce(std::move(chunk_sums)) / q_power(params.q, 2 * params.d);
}

DyadicSumResult dyadic_inner_sum(std::int64_t q, const Rational& alpha_j, double s, int i,
                                 const Rational& C) {
    if (q < 2) throw std::invalid_argument("dyadic sum requires q >= 2");
    if (i < 1) throw std::invalid_argument("dyadic sum requires i >= 1");
    if (!(s > 0)) throw std::invalid_argument("dyadic sum requires s > 0");
    if (alpha_j <= 0) throw std::invalid_argument("dyadic sum requires alpha > 0");

    const Rational qr(static_cast<long>(q));
    double scale;
    std::int64_t B;
    if (auto exact = exact_rational_power(qr, alpha_j)) {
        scale = exact->get_d();
        B = floor_rational_i64(C * *exact);
    } else {
        scale = rational_power_double(qr, alpha_j);
        B = static_cast<std::int64_t>(std::floor(C.get_d() * scale));
    }

    const double exponent = s / static_cast<double>(i);
    // Group ordered pairs by the positive difference value: 2(2B+1-delta) each.
    Kahan acc;
    for (std::int64_t delta = 1; delta <= 2 * B; ++delta) {
        const double w = 2.0 * static_cast<double>(2 * B + 1 - delta);
        acc.add(w * std::pow(static_cast<double>(delta) / scale, -exponent));
    }

    DyadicSumResult out;
    out.value = acc.sum;
    const double alpha_d = alpha_j.get_d();
    out.bound = s >= static_cast<double>(i)
                    ? std::pow(static_cast<double>(q), alpha_d * (1.0 + exponent))
                    : std::pow(static_cast<double>(q), 2.0 * alpha_d);
    out.ratio = out.value == 0.0 ? 0.0 : out.value / out.bound;
    return out;
}

ScanReport energy_scan(int d, const std::vector<Rational>& alpha, const Rational& C, double s,
                       const std::vector<std::int64_t>& q_list, const CountOptions& opts) {
    if (q_list.size() < 4)
        throw std::invalid_argument("energy scan requires at least 4 q values");
    for (std::size_t i = 1; i < q_list.size(); ++i)
        if (q_list[i] <= q_list[i - 1])
            throw std::invalid_argument("energy scan requires a strictly ascending q grid");

    ScanReport report;
    std::vector<std::pair<double, double>> fit_rows;
    double vmin = 0, vmax = 0;
    for (std::size_t i = 0; i < q_list.size(); ++i) {
        EnergyParams params{d, q_list[i], alpha, C, s};
        const double e = discrete_energy(params, opts);
        report.rows.push_back(ScanRow{static_cast<double>(q_list[i]), e, std::nullopt});
        if (e > 0) fit_rows.emplace_back(static_cast<double>(q_list[i]), e);
        else ++report.dropped_rows;
        if (i == 0) {
            vmin = vmax = e;
        } else {
            vmin = std::min(vmin, e);
            vmax = std::max(vmax, e);
        }
    }
    report.fit = fit_exponent(fit_rows);
    report.max_over_min = vmin > 0 ? vmax / vmin : 0.0;
    return report;
}

} // namespace latshell
