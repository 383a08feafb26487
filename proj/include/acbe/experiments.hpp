#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "acbe/config.hpp"
#include "acbe/fit.hpp"
#include "acbe/scheme.hpp"

// Experiment drivers: each turns a RunConfig into a report with the numbers
// behind one of the claims under test, the pass/fail verdict for its
// acceptance thresholds, and the CSV rows to publish. Drivers evaluate the
// claim's hypotheses up front and refuse to run (ConfigError) when violated.

namespace acbe {

/// sup over coarse grid times of the L2 distance between a reference
/// trajectory and a coarser one driven by the same noise. Rejects pairs with
/// different noise provenance or incompatible grids.
double pathwise_error(const Trajectory& reference, const Trajectory& coarse);

struct HolderReport {
    double gamma = 0.0;
    double quotient_sup = 0.0;
    std::int64_t pairs_evaluated = 0;
};

/// Empirical sup of ||u(t)-u(s)|| / |t-s|^gamma over dyadic lags from every
/// start index, on the trajectory subsampled to at most max_points states.
/// Rejects gamma outside [0, 1/2).
HolderReport holder_quotient(const Trajectory& trajectory, double gamma, int max_points = 2048);

// ---------------------------------------------------------------------------

struct SmoothingReport {
    RateReport fit;
    bool passed = false;
    std::vector<std::string> summary;
};
SmoothingReport run_smoothing(const RunConfig& config);

struct ConvolutionLevel {
    double dt = 0.0;
    double error_estimate = 0.0;
    double batch_std = 0.0;
};

struct ConvolutionReport {
    int p = 0;
    double beta = 0.0;
    double epsilon = 0.0;
    double hs_value = 0.0;  // truncated ||A^{(beta-1)/2+eps} Q^{1/2}||_HS
    std::vector<ConvolutionLevel> levels;
    std::optional<RateReport> fit;  // absent when fewer than two levels
    double batch_slope_stderr = 0.0;
    bool insufficient_levels = false;
    std::optional<double> m_doubled_slope;  // slope at 2M, same seeds
    bool passed = false;
    std::vector<std::string> summary;
};
ConvolutionReport run_convolution(const RunConfig& config);

struct PathwisePath {
    std::uint64_t path_index = 0;
    RateReport fit;
    double dt0_proxy = 0.0;  // coarsest dt from which the errors decrease monotonically
    std::vector<std::pair<double, double>> levels;  // (dt, sup error)
};

struct PathwiseReport {
    std::vector<PathwisePath> paths;
    double median_slope = 0.0;
    double fraction_above_040 = 0.0;
    double median_dt0_proxy = 0.0;
    int max_newton_iterations = 0;
    double max_newton_residual = 0.0;
    bool passed = false;
    std::vector<std::string> summary;
};
PathwiseReport run_pathwise_rate(const RunConfig& config);

struct StrongLevel {
    int p = 0;
    double dt = 0.0;
    double error_estimate = 0.0;
    double batch_std = 0.0;
};

struct StrongReport {
    std::vector<StrongLevel> levels;  // grouped by p, coarse to fine
    bool strictly_decreasing = false;
    double worst_last_over_first = 0.0;  // max over p
    bool statistically_insufficient = false;
    int max_newton_iterations = 0;
    double max_newton_residual = 0.0;
    bool passed = false;
    std::vector<std::string> summary;
};
StrongReport run_strong_convergence(const RunConfig& config);

struct MomentHorizon {
    double horizon = 0.0;
    double e_sup_l2_p = 0.0;  // E sup_n ||u^n||^p
    double e_sup_h1_p = 0.0;  // E sup_n ||u^n||_1^p
};

struct MomentReport {
    int p = 2;
    std::vector<MomentHorizon> horizons;
    double growth_intercept = 0.0;  // affine fit of the H1 estimate in T (p=2)
    double growth_slope = 0.0;
    double last_ratio = 0.0;        // value(T_last) / value(T_prev), H1 estimate
    double gronwall_gate_value = 0.0;  // T^{p-1} dt (enforced <= 1/2 for p > 2)
    int max_newton_iterations = 0;
    double max_newton_residual = 0.0;
    bool passed = false;
    std::vector<std::string> summary;
};
MomentReport run_moment_bounds(const RunConfig& config);

struct HolderPathResult {
    std::uint64_t path_index = 0;
    double quotient_base = 0.0;  // at fine dt
    double quotient_half = 0.0;  // at fine dt / 2, coupled
    double ratio = 0.0;
};

struct HolderExperimentReport {
    double gamma = 0.0;
    std::vector<HolderPathResult> paths;
    int max_newton_iterations = 0;
    bool passed = false;
    std::vector<std::string> summary;
};
HolderExperimentReport run_holder(const RunConfig& config);

struct LipschitzReport {
    int modes = 0;
    double max_ratio = 0.0;
    double max_ratio_doubled = 0.0;  // at 2M, same draws
    double relative_shift = 0.0;
    bool passed = false;
    std::vector<std::string> summary;
};
LipschitzReport run_lipschitz(const RunConfig& config);

struct SimulateReport {
    int max_newton_iterations = 0;
    double max_newton_residual = 0.0;
    std::vector<std::string> summary;
};
SimulateReport run_simulate(const RunConfig& config);

// ---------------------------------------------------------------------------

/// Dispatches config.experiment, writes the experiment's CSV files and
/// summary.txt under config.out_dir, prints the summary lines to stdout.
/// Returns the process exit code (0 pass, 1 acceptance failure).
int run_experiment_to_files(const RunConfig& config);

/// Binary trajectory dump/replay.
void dump_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);
Trajectory load_trajectory(const std::filesystem::path& path, const BasisPtr& basis);

}  // namespace acbe
