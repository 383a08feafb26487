#include "acbe/noise.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "acbe/csv.hpp"
#include "acbe/kernels.hpp"
#include "acbe/rng.hpp"

namespace acbe {
namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double lambda_of(int k) { return (k * kPi) * (k * kPi); }

}  // namespace

NoiseSpec::NoiseSpec(double decay_exponent, double amplitude, int mode_count)
    : decay_exponent_(decay_exponent), amplitude_(amplitude), mode_count_(mode_count) {
    if (!(amplitude > 0.0))
        throw std::invalid_argument("NoiseSpec: amplitude must be > 0 (got " +
                                    std::to_string(amplitude) + ")");
    if (decay_exponent < 0.0)
        throw std::invalid_argument("NoiseSpec: decay exponent must be >= 0");
    if (mode_count < 1) throw std::invalid_argument("NoiseSpec: mode_count must be >= 1");
}

double NoiseSpec::mode_variance(int k) const {
    return amplitude_ * std::pow(lambda_of(k), -decay_exponent_);
}

std::vector<double> NoiseSpec::mode_variances() const {
    std::vector<double> q(mode_count_);
    for (int k = 1; k <= mode_count_; ++k) q[k - 1] = mode_variance(k);
    return q;
}

HsNorm hs_norm(const NoiseSpec& spec, double s) {
    double sum = 0.0;
    for (int k = 1; k <= spec.mode_count(); ++k)
        sum += std::pow(lambda_of(k), 2.0 * s) * spec.mode_variance(k);
    // lambda_k^{2s} q_k ~ k^{4s - 2r}; p-series test.
    bool converges = 4.0 * s - 2.0 * spec.decay_exponent() < -1.0;
    return {std::sqrt(sum), converges};
}

IncrementArray WienerRecord::as_increments() const {
    IncrementArray out;
    out.dt = fine_dt;
    out.step_count = fine_count;
    out.mode_count = mode_count;
    out.master_seed = master_seed;
    out.path_index = path_index;
    out.values = increments;
    return out;
}

WienerRecord sample_increments(const NoiseSpec& spec, double fine_dt, std::int64_t fine_count,
                               std::uint64_t master_seed, std::uint64_t path_index) {
    if (!(fine_dt > 0.0)) throw std::invalid_argument("sample_increments: fine_dt must be > 0");
    if (fine_count < 0) throw std::invalid_argument("sample_increments: fine_count must be >= 0");
    const int m = spec.mode_count();
    WienerRecord rec;
    rec.fine_dt = fine_dt;
    rec.fine_count = fine_count;
    rec.mode_count = m;
    rec.master_seed = master_seed;
    rec.path_index = path_index;
    rec.mode_variances = spec.mode_variances();
    rec.increments.resize(static_cast<std::size_t>(fine_count) * m);
    std::vector<double> draws(fine_count);
    for (int k = 1; k <= m; ++k) {
        rng::NormalStream stream(master_seed,
                                 rng::make_stream_id(rng::StreamPurpose::increments, path_index,
                                                     static_cast<std::uint64_t>(k)));
        stream.fill(draws.data(), draws.size());
        const double sd = std::sqrt(fine_dt * rec.mode_variances[k - 1]);
        for (std::int64_t j = 0; j < fine_count; ++j)
            rec.increments[j * m + (k - 1)] = sd * draws[j];
    }
    return rec;
}

IncrementArray coarsen(const IncrementArray& increments, std::int64_t factor) {
    if (factor < 1) throw std::invalid_argument("coarsen: factor must be >= 1");
    if (factor > 1 && increments.step_count % factor != 0)
        throw std::invalid_argument("coarsen: factor " + std::to_string(factor) +
                                    " does not divide step count " +
                                    std::to_string(increments.step_count));
    if (factor == 1) return increments;

    if ((factor & (factor - 1)) == 0) {
        // Pairwise halving; the summation tree is identical along any dyadic
        // chain, so coarsen(coarsen(.,2),2) == coarsen(.,4) bit for bit.
        IncrementArray out = increments;
        for (std::int64_t f = factor; f > 1; f /= 2) {
            const std::int64_t steps = out.step_count / 2;
            const int m = out.mode_count;
            for (std::int64_t j = 0; j < steps; ++j)
                for (int k = 0; k < m; ++k)
                    out.values[j * m + k] =
                        out.values[2 * j * m + k] + out.values[(2 * j + 1) * m + k];
            out.values.resize(static_cast<std::size_t>(steps) * m);
            out.step_count = steps;
            out.dt *= 2.0;
        }
        return out;
    }
    const std::int64_t steps = increments.step_count / factor;
    const int m = increments.mode_count;
    IncrementArray out = increments;
    out.values.assign(static_cast<std::size_t>(steps) * m, 0.0);
    for (std::int64_t j = 0; j < steps; ++j)
        for (std::int64_t l = 0; l < factor; ++l)
            kernels::ops().axpy(1.0, increments.values.data() + (j * factor + l) * m,
                                out.values.data() + j * m, m);
    out.step_count = steps;
    out.dt = increments.dt * factor;
    return out;
}

IncrementArray coarsen(const WienerRecord& record, std::int64_t factor) {
    return coarsen(record.as_increments(), factor);
}

OUSubstepLaw ou_substep_law(double q, double lambda, double dt) {
    OUSubstepLaw law;
    law.var_x = q * dt;
    if (lambda == 0.0) {
        law.var_y = q * dt;
        law.cov_xy = q * dt;
    } else {
        law.var_y = q * (-std::expm1(-2.0 * lambda * dt)) / (2.0 * lambda);
        law.cov_xy = q * (-std::expm1(-lambda * dt)) / lambda;
    }
    law.cond_coeff = law.cov_xy / law.var_x;
    // Roundoff can push the conditional variance a hair below zero.
    law.cond_std = std::sqrt(std::max(0.0, law.var_y - law.cov_xy * law.cov_xy / law.var_x));
    return law;
}

OUCoupledPath sample_coupled_convolution(const WienerRecord& record, const EigenBasis& basis) {
    const int m = record.mode_count;
    if (m != basis.mode_count())
        throw std::invalid_argument("sample_coupled_convolution: record has M=" +
                                    std::to_string(m) + " but basis has M=" +
                                    std::to_string(basis.mode_count()));
    if (record.mode_variances.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("sample_coupled_convolution: record lacks mode variances");
    OUCoupledPath path;
    path.fine_dt = record.fine_dt;
    path.fine_count = record.fine_count;
    path.mode_count = m;
    path.master_seed = record.master_seed;
    path.path_index = record.path_index;
    path.values.resize(static_cast<std::size_t>(record.fine_count) * m);

    const double dt = record.fine_dt;
    std::vector<double> draws(record.fine_count);
    for (int k = 1; k <= m; ++k) {
        const double lambda = basis.eigenvalue(k);
        const OUSubstepLaw law = ou_substep_law(record.mode_variances[k - 1], lambda, dt);
        rng::NormalStream stream(record.master_seed,
                                 rng::make_stream_id(rng::StreamPurpose::ou_bridge,
                                                     record.path_index,
                                                     static_cast<std::uint64_t>(k)));
        stream.fill(draws.data(), draws.size());
        const double decay = std::exp(-lambda * dt);
        double w = 0.0;
        for (std::int64_t j = 0; j < record.fine_count; ++j) {
            const double x = record.increments[j * m + (k - 1)];
            const double y = law.cond_coeff * x + law.cond_std * draws[j];
            w = decay * w + y;
            path.values[j * m + (k - 1)] = w;
        }
    }
    return path;
}

void dump_record_csv(const WienerRecord& record, std::ostream& os) {
    os << "# wiener_record\n";
    os << "# modes = " << record.mode_count << "\n";
    os << "# fine_count = " << record.fine_count << "\n";
    os << "# fine_dt = " << csv::format_double(record.fine_dt) << "\n";
    os << "# master_seed = " << record.master_seed << "\n";
    os << "# path_index = " << record.path_index << "\n";
    for (int k = 0; k < record.mode_count; ++k) {
        for (std::int64_t j = 0; j < record.fine_count; ++j) {
            if (j) os << ',';
            os << csv::format_double(record.increments[j * record.mode_count + k]);
        }
        os << '\n';
    }
}

}  // namespace acbe
