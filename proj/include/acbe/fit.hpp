#pragma once

#include <string>
#include <utility>
#include <vector>

// Order-of-convergence estimation: ordinary least squares on
// (log dt, log error).

namespace acbe {

struct RateReport {
    std::vector<std::pair<double, double>> levels;  // (dt, error)
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;      // RMS of the fit residuals
    double slope_stderr = 0.0;  // residual-based; 0 when only two levels
    bool low_confidence = false;  // fewer than three levels
};

/// Fits log(error) = slope * log(dt) + intercept. Requires at least two
/// levels, strictly positive errors, distinct dt values; throws
/// std::invalid_argument naming the offending level otherwise.
RateReport fit_rate(const std::vector<std::pair<double, double>>& levels);

}  // namespace acbe
