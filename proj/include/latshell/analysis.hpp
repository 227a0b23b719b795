#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace latshell {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares on (log x, log y). Requires >= 3 rows, distinct x,
// and y > 0 for every row (callers filter zero counts and report the drops).
FitResult fit_exponent(const std::vector<std::pair<double, double>>& rows);

struct RatioRow {
    double param = 0.0;
    double value = 0.0;
    double bound = 0.0;
};

struct BoundRatioStats {
    double max_ratio = 0.0;
    double argmax = 0.0;        // parameter attaining max_ratio
    double first_half_max = 0.0;
    double second_half_max = 0.0;
};

// value/bound across a grid, with maxima over the full grid and over the
// parameter halves (split at row n/2, rows assumed ordered by parameter).
BoundRatioStats bound_ratio_scan(const std::vector<RatioRow>& rows);

struct ScanRow {
    double param = 0.0;
    double value = 0.0;
    std::optional<double> bound;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    FitResult fit;
    double max_over_min = 0.0;
    std::optional<BoundRatioStats> ratios;
    int dropped_rows = 0;
};

} // namespace latshell
