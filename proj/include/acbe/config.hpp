#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Plain-text key=value run configuration: one key per line, sections by
// prefix ("noise.r = 2.0"), '#' comments. Every experiment run echoes its
// effective configuration into its output headers.

namespace acbe {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    std::string experiment;

    int modes = 128;
    std::uint64_t master_seed = 20260809;
    int paths = 200;
    int threads = 0;  // 0 = hardware concurrency
    std::string out_dir = "out";

    double t_final = 1.0;
    std::vector<double> horizons = {1.0, 2.0, 4.0, 8.0};
    int fine_dt_log2 = -12;
    std::vector<int> levels_log2 = {-4, -5, -6, -7, -8, -9};

    double potential_c = 1.0;
    double potential_beta = 1.0;

    double noise_r = 2.0;
    double noise_q0 = 1.0;
    double noise_epsilon = 0.1;

    // Smoothness grade under test in the convolution experiment; sets the
    // hypothesis exponent s = (beta - 1)/2 + epsilon and the slope band.
    double beta_smoothness = 2.0;
    double accept_slope_min = 0.85;
    double accept_slope_max = 1.15;

    int p = 0;  // 0 = smallest even integer exceeding 1/epsilon
    std::vector<int> p_list = {1, 2};

    double newton_tol = 1e-10;
    int newton_max = 25;
    bool dealias = false;

    std::string kernel_backend = "auto";

    double holder_gamma = 0.45;
    int holder_paths = 4;
    int holder_max_points = 2048;

    int lipschitz_samples = 1000;
    double lipschitz_decay = 2.0;

    int moments_dt_log2 = -6;
    int moments_p = 2;

    double smoothing_decay = 4.0;

    std::int64_t simulate_path_index = 0;
    std::vector<int> simulate_modes = {1, 2, 3, 4};
    bool dump_noise = false;
    bool dump_state = false;

    bool check_m_doubling = false;

    bool operator==(const RunConfig&) const = default;

    double fine_dt() const;
    double level_dt(int level_log2) const;
    /// The p actually used by the convolution experiment.
    int resolved_p() const;
};

/// Parses configuration text. Unknown keys and invariant violations raise
/// ConfigError naming the key. Missing keys keep their defaults.
RunConfig parse_config(const std::string& text);

/// Full key=value form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Re-checks all cross-field invariants (also called by parse_config).
void validate_config(const RunConfig& config);

}  // namespace acbe
