#include "latshell/analysis.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace latshell {

FitResult fit_exponent(const std::vector<std::pair<double, double>>& rows) {
    const std::size_t n = rows.size();
    if (n < 3) throw std::invalid_argument("degenerate regression: need at least 3 rows");
    std::set<double> xs;
    for (const auto& [x, y] : rows) {
        if (!(x > 0)) throw std::invalid_argument("fit_exponent requires x > 0");
        if (!(y > 0)) throw std::invalid_argument("fit_exponent requires y > 0");
        xs.insert(x);
    }
    if (xs.size() != n) throw std::invalid_argument("fit_exponent requires distinct x values");

    double mx = 0, my = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(rows[i].first);
        ly[i] = std::log(rows[i].second);
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = lx[i] - mx;
        const double dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }

    FitResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.slope * lx[i] + fit.intercept);
        ss_res += r * r;
    }
    // All responses equal gives syy = 0; a zero-residual fit is then perfect.
    fit.r_squared = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
    fit.stderr_slope = std::sqrt(std::max(ss_res, 0.0) / static_cast<double>(n - 2) / sxx);
    return fit;
}

BoundRatioStats bound_ratio_scan(const std::vector<RatioRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("bound_ratio_scan requires rows");
    BoundRatioStats stats;
    const std::size_t n = rows.size();
    const std::size_t mid = n / 2;
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(rows[i].bound > 0)) throw std::invalid_argument("bound_ratio_scan requires bounds > 0");
        const double ratio = rows[i].value / rows[i].bound;
        if (ratio > rows[best].value / rows[best].bound) best = i;
        if (i < mid)
            stats.first_half_max = std::max(stats.first_half_max, ratio);
        else
            stats.second_half_max = std::max(stats.second_half_max, ratio);
    }
    stats.max_ratio = rows[best].value / rows[best].bound;
    stats.argmax = rows[best].param;
    return stats;
}

} // namespace latshell
