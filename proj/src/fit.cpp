#include "acbe/fit.hpp"

#include <cmath>
#include <stdexcept>

#include "acbe/csv.hpp"

namespace acbe {

RateReport fit_rate(const std::vector<std::pair<double, double>>& levels) {
    const std::size_t n = levels.size();
    if (n < 2) throw std::invalid_argument("fit_rate: need at least two levels");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(levels[i].second > 0.0))
            throw std::invalid_argument("fit_rate: nonpositive error " +
                                        csv::format_double(levels[i].second) + " at dt=" +
                                        csv::format_double(levels[i].first));
        for (std::size_t j = i + 1; j < n; ++j)
            if (levels[i].first == levels[j].first)
                throw std::invalid_argument("fit_rate: duplicate dt " +
                                            csv::format_double(levels[i].first));
    }

    double sx = 0.0, sy = 0.0;
    for (const auto& [dt, err] : levels) {
        sx += std::log(dt);
        sy += std::log(err);
    }
    const double xbar = sx / static_cast<double>(n);
    const double ybar = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [dt, err] : levels) {
        const double dx = std::log(dt) - xbar;
        sxx += dx * dx;
        sxy += dx * (std::log(err) - ybar);
    }

    RateReport report;
    report.levels = levels;
    report.slope = sxy / sxx;
    report.intercept = ybar - report.slope * xbar;
    double rss = 0.0;
    for (const auto& [dt, err] : levels) {
        const double r = std::log(err) - (report.slope * std::log(dt) + report.intercept);
        rss += r * r;
    }
    report.residual = std::sqrt(rss / static_cast<double>(n));
    report.low_confidence = n < 3;
    report.slope_stderr = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    return report;
}

}  // namespace acbe
