#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "flevy/sample_path.hpp"

namespace flevy {

/// Discrete jump law given as (value, probability) atoms.
struct JumpAtom {
    double value;
    double probability;
};

/// Zero-mean two-sided Levy driver without Brownian part: a Poisson
/// process of intensity theta with jumps drawn from `jumps`, compensated
/// by the drift theta * E[jump].
struct LevyDriverSpec {
    enum class Kind { CompensatedPoisson, CompoundPoissonCompensated };

    Kind kind = Kind::CompensatedPoisson;
    double theta = 1.0;
    /// Ignored for CompensatedPoisson (unit jumps).
    std::vector<JumpAtom> jumps;
    std::uint64_t seed = 0;

    static LevyDriverSpec compensated_poisson(double theta, std::uint64_t seed = 0);
    static LevyDriverSpec compound_poisson(double theta, std::vector<JumpAtom> jumps,
                                           std::uint64_t seed = 0);

    /// Throws ConfigError on any violated invariant.
    void validate() const;

    /// Jump atoms with unit jumps filled in for CompensatedPoisson.
    std::vector<JumpAtom> atoms() const;

    double mean_jump() const;
    /// Compensation drift theta * E[jump].
    double compensation_rate() const;
};

/// E[L(1)^2] = theta * E[jump^2].
double second_moment(const LevyDriverSpec& spec);

/// Characteristic exponent psi_L(u) = sum_j theta p_j (exp(i u x_j) - 1 - i u x_j).
std::complex<double> psi_L(const LevyDriverSpec& spec, double u);

/// Sparse realisation of a two-sided driver on [t_min, t_max]: arrival
/// times and jump sizes plus the constant compensation rate. Arrivals on
/// [0, t_max] and on [t_min, 0) come from independent streams derived from
/// the spec's seed. Binning onto a grid of step dt gives independent
/// Poisson(theta * dt) counts per cell.
struct JumpTrain {
    double t_min = 0.0;
    double t_max = 0.0;
    double compensation_rate = 0.0;
    std::vector<double> times;  // ascending
    std::vector<double> sizes;

    std::size_t count() const { return times.size(); }
};

/// Default cap on the number of grid nodes of a dense path.
inline constexpr std::size_t kDefaultMaxNodes = std::size_t{1} << 27;

JumpTrain sample_jump_train(const LevyDriverSpec& spec, double t_min, double t_max);

/// Dense driver path on the nodes j*dt covering [t_min, t_max] with value
/// exactly 0 at t = 0. Jumps are attributed to the cell in which they
/// occur; the left-limit convention at negative times is not resolved
/// below grid resolution.
SamplePath bin_jump_train(const JumpTrain& train, double dt, std::size_t max_nodes = kDefaultMaxNodes);

/// sample_jump_train followed by bin_jump_train. Requires t_min < 0 < t_max.
SamplePath sample_two_sided_levy(const LevyDriverSpec& spec, double t_min, double t_max, double dt,
                                 std::size_t max_nodes = kDefaultMaxNodes);

/// Seed for replicate `index` of an ensemble with the given master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace flevy
