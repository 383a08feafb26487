#include "acbe/config.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "acbe/csv.hpp"
#include "acbe/kernels.hpp"

namespace acbe {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
    return v;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    std::int64_t v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as an integer");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    char* end = nullptr;
    std::uint64_t v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos)
        throw ConfigError("key '" + key + "': cannot parse '" + value +
                          "' as an unsigned integer");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(static_cast<T>(parse(key, item)));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::ostringstream os;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ',';
        if constexpr (std::is_same_v<T, double>)
            os << csv::format_double(values[i]);
        else
            os << values[i];
    }
    return os.str();
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"experiment", [](RunConfig& c, const std::string&, const std::string& v) { c.experiment = v; }},
        {"modes", [](RunConfig& c, const std::string& k, const std::string& v) { c.modes = static_cast<int>(parse_int(k, v)); }},
        {"master_seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.master_seed = parse_uint(k, v); }},
        {"paths", [](RunConfig& c, const std::string& k, const std::string& v) { c.paths = static_cast<int>(parse_int(k, v)); }},
        {"threads", [](RunConfig& c, const std::string& k, const std::string& v) { c.threads = static_cast<int>(parse_int(k, v)); }},
        {"out_dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"t_final", [](RunConfig& c, const std::string& k, const std::string& v) { c.t_final = parse_double(k, v); }},
        {"horizons", [](RunConfig& c, const std::string& k, const std::string& v) { c.horizons = parse_list<double>(k, v, parse_double); }},
        {"fine_dt_log2", [](RunConfig& c, const std::string& k, const std::string& v) { c.fine_dt_log2 = static_cast<int>(parse_int(k, v)); }},
        {"levels_log2", [](RunConfig& c, const std::string& k, const std::string& v) { c.levels_log2 = parse_list<int>(k, v, parse_int); }},
        {"potential.c", [](RunConfig& c, const std::string& k, const std::string& v) { c.potential_c = parse_double(k, v); }},
        {"potential.beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.potential_beta = parse_double(k, v); }},
        {"noise.r", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_r = parse_double(k, v); }},
        {"noise.q0", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_q0 = parse_double(k, v); }},
        {"noise.epsilon", [](RunConfig& c, const std::string& k, const std::string& v) { c.noise_epsilon = parse_double(k, v); }},
        {"beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.beta_smoothness = parse_double(k, v); }},
        {"accept.slope_min", [](RunConfig& c, const std::string& k, const std::string& v) { c.accept_slope_min = parse_double(k, v); }},
        {"accept.slope_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.accept_slope_max = parse_double(k, v); }},
        {"p", [](RunConfig& c, const std::string& k, const std::string& v) { c.p = static_cast<int>(parse_int(k, v)); }},
        {"p_list", [](RunConfig& c, const std::string& k, const std::string& v) { c.p_list = parse_list<int>(k, v, parse_int); }},
        {"newton.tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.newton_tol = parse_double(k, v); }},
        {"newton.max_iter", [](RunConfig& c, const std::string& k, const std::string& v) { c.newton_max = static_cast<int>(parse_int(k, v)); }},
        {"dealias", [](RunConfig& c, const std::string& k, const std::string& v) { c.dealias = parse_bool(k, v); }},
        {"kernel.backend", [](RunConfig& c, const std::string&, const std::string& v) { c.kernel_backend = v; }},
        {"holder.gamma", [](RunConfig& c, const std::string& k, const std::string& v) { c.holder_gamma = parse_double(k, v); }},
        {"holder.paths", [](RunConfig& c, const std::string& k, const std::string& v) { c.holder_paths = static_cast<int>(parse_int(k, v)); }},
        {"holder.max_points", [](RunConfig& c, const std::string& k, const std::string& v) { c.holder_max_points = static_cast<int>(parse_int(k, v)); }},
        {"lipschitz.samples", [](RunConfig& c, const std::string& k, const std::string& v) { c.lipschitz_samples = static_cast<int>(parse_int(k, v)); }},
        {"lipschitz.decay", [](RunConfig& c, const std::string& k, const std::string& v) { c.lipschitz_decay = parse_double(k, v); }},
        {"moments.dt_log2", [](RunConfig& c, const std::string& k, const std::string& v) { c.moments_dt_log2 = static_cast<int>(parse_int(k, v)); }},
        {"moments.p", [](RunConfig& c, const std::string& k, const std::string& v) { c.moments_p = static_cast<int>(parse_int(k, v)); }},
        {"smoothing.decay", [](RunConfig& c, const std::string& k, const std::string& v) { c.smoothing_decay = parse_double(k, v); }},
        {"simulate.path", [](RunConfig& c, const std::string& k, const std::string& v) { c.simulate_path_index = parse_int(k, v); }},
        {"simulate.modes", [](RunConfig& c, const std::string& k, const std::string& v) { c.simulate_modes = parse_list<int>(k, v, parse_int); }},
        {"dump_noise", [](RunConfig& c, const std::string& k, const std::string& v) { c.dump_noise = parse_bool(k, v); }},
        {"dump_state", [](RunConfig& c, const std::string& k, const std::string& v) { c.dump_state = parse_bool(k, v); }},
        {"check_m_doubling", [](RunConfig& c, const std::string& k, const std::string& v) { c.check_m_doubling = parse_bool(k, v); }},
    };
    return table;
}

}  // namespace

double RunConfig::fine_dt() const { return std::ldexp(1.0, fine_dt_log2); }
double RunConfig::level_dt(int level_log2) const { return std::ldexp(1.0, level_log2); }

int RunConfig::resolved_p() const {
    if (p > 0) return p;
    // Smallest even integer exceeding 1/epsilon.
    int candidate = static_cast<int>(std::floor(1.0 / noise_epsilon)) + 1;
    if (candidate % 2 != 0) ++candidate;
    return candidate;
}

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value, got '" +
                              line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("unknown key '" + key + "' (line " + std::to_string(line_no) + ")");
        it->second(config, key, value);
    }
    validate_config(config);
    return config;
}

void validate_config(const RunConfig& c) {
    if (c.modes < 1) throw ConfigError("key 'modes': must be >= 1");
    if (c.paths < 1) throw ConfigError("key 'paths': must be >= 1");
    if (c.threads < 0) throw ConfigError("key 'threads': must be >= 0");
    if (!(c.t_final > 0.0)) throw ConfigError("key 't_final': must be > 0");
    if (!(c.potential_c > 0.0)) throw ConfigError("key 'potential.c': must be > 0");
    if (!(c.potential_beta > 0.0)) throw ConfigError("key 'potential.beta': must be > 0");
    if (!(c.noise_q0 > 0.0)) throw ConfigError("key 'noise.q0': must be > 0");
    if (c.noise_r < 0.0) throw ConfigError("key 'noise.r': must be >= 0");
    if (!(c.noise_epsilon > 0.0 && c.noise_epsilon < 0.5))
        throw ConfigError("key 'noise.epsilon': must lie in (0, 1/2)");
    if (!(c.newton_tol > 0.0)) throw ConfigError("key 'newton.tol': must be > 0");
    if (c.newton_max < 1) throw ConfigError("key 'newton.max_iter': must be >= 1");
    if (c.levels_log2.empty()) throw ConfigError("key 'levels_log2': empty");
    for (int level : c.levels_log2) {
        if (level < c.fine_dt_log2)
            throw ConfigError("key 'levels_log2': level 2^" + std::to_string(level) +
                              " is not a dyadic multiple of the fine level 2^" +
                              std::to_string(c.fine_dt_log2));
    }
    for (std::size_t i = 0; i + 1 < c.horizons.size(); ++i)
        if (!(c.horizons[i] < c.horizons[i + 1]))
            throw ConfigError("key 'horizons': must be strictly increasing");
    for (double h : c.horizons)
        if (!(h > 0.0)) throw ConfigError("key 'horizons': must be positive");
    if (c.p < 0) throw ConfigError("key 'p': must be >= 0 (0 = auto)");
    for (int p : c.p_list)
        if (p < 1) throw ConfigError("key 'p_list': entries must be >= 1");
    if (c.moments_p < 2) throw ConfigError("key 'moments.p': must be >= 2");
    if (c.holder_paths < 1) throw ConfigError("key 'holder.paths': must be >= 1");
    if (c.holder_max_points < 2) throw ConfigError("key 'holder.max_points': must be >= 2");
    if (c.lipschitz_samples < 1) throw ConfigError("key 'lipschitz.samples': must be >= 1");
    if (c.simulate_path_index < 0) throw ConfigError("key 'simulate.path': must be >= 0");
    try {
        kernels::parse_backend(c.kernel_backend);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("key 'kernel.backend': ") + e.what());
    }
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "experiment = " << c.experiment << '\n';
    os << "modes = " << c.modes << '\n';
    os << "master_seed = " << c.master_seed << '\n';
    os << "paths = " << c.paths << '\n';
    os << "threads = " << c.threads << '\n';
    os << "out_dir = " << c.out_dir << '\n';
    os << "t_final = " << csv::format_double(c.t_final) << '\n';
    os << "horizons = " << join(c.horizons) << '\n';
    os << "fine_dt_log2 = " << c.fine_dt_log2 << '\n';
    os << "levels_log2 = " << join(c.levels_log2) << '\n';
    os << "potential.c = " << csv::format_double(c.potential_c) << '\n';
    os << "potential.beta = " << csv::format_double(c.potential_beta) << '\n';
    os << "noise.r = " << csv::format_double(c.noise_r) << '\n';
    os << "noise.q0 = " << csv::format_double(c.noise_q0) << '\n';
    os << "noise.epsilon = " << csv::format_double(c.noise_epsilon) << '\n';
    os << "beta = " << csv::format_double(c.beta_smoothness) << '\n';
    os << "accept.slope_min = " << csv::format_double(c.accept_slope_min) << '\n';
    os << "accept.slope_max = " << csv::format_double(c.accept_slope_max) << '\n';
    os << "p = " << c.p << '\n';
    os << "p_list = " << join(c.p_list) << '\n';
    os << "newton.tol = " << csv::format_double(c.newton_tol) << '\n';
    os << "newton.max_iter = " << c.newton_max << '\n';
    os << "dealias = " << (c.dealias ? "true" : "false") << '\n';
    os << "kernel.backend = " << c.kernel_backend << '\n';
    os << "holder.gamma = " << csv::format_double(c.holder_gamma) << '\n';
    os << "holder.paths = " << c.holder_paths << '\n';
    os << "holder.max_points = " << c.holder_max_points << '\n';
    os << "lipschitz.samples = " << c.lipschitz_samples << '\n';
    os << "lipschitz.decay = " << csv::format_double(c.lipschitz_decay) << '\n';
    os << "moments.dt_log2 = " << c.moments_dt_log2 << '\n';
    os << "moments.p = " << c.moments_p << '\n';
    os << "smoothing.decay = " << csv::format_double(c.smoothing_decay) << '\n';
    os << "simulate.path = " << c.simulate_path_index << '\n';
    os << "simulate.modes = " << join(c.simulate_modes) << '\n';
    os << "dump_noise = " << (c.dump_noise ? "true" : "false") << '\n';
    os << "dump_state = " << (c.dump_state ? "true" : "false") << '\n';
    os << "check_m_doubling = " << (c.check_m_doubling ? "true" : "false") << '\n';
    return os.str();
}

}  // namespace acbe
