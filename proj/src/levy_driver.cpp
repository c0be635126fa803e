#include "flevy/levy_driver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "flevy/errors.hpp"
#include "flevy/special_functions.hpp"

namespace flevy {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Stream constants for the two halves of the time axis.
constexpr std::uint64_t kForwardStream = 0x46574452'5354524dULL;
constexpr std::uint64_t kBackwardStream = 0x42574452'5354524dULL;

class JumpSizeSampler {
public:
    explicit JumpSizeSampler(const std::vector<JumpAtom>& atoms) {
        std::vector<double> probs;
        for (const auto& a : atoms) {
            values_.push_back(a.value);
            probs.push_back(a.probability);
        }
        unit_ = atoms.size() == 1;
        dist_ = std::discrete_distribution<std::size_t>(probs.begin(), probs.end());
    }
    double operator()(std::mt19937_64& rng) {
        if (unit_) return values_[0];
        return values_[dist_(rng)];
    }

private:
    std::vector<double> values_;
    std::discrete_distribution<std::size_t> dist_;
    bool unit_ = false;
};

}  // namespace

LevyDriverSpec LevyDriverSpec::compensated_poisson(double theta, std::uint64_t seed) {
    LevyDriverSpec s;
    s.kind = Kind::CompensatedPoisson;
    s.theta = theta;
    s.seed = seed;
    return s;
}

LevyDriverSpec LevyDriverSpec::compound_poisson(double theta, std::vector<JumpAtom> jumps,
                                                std::uint64_t seed) {
    LevyDriverSpec s;
    s.kind = Kind::CompoundPoissonCompensated;
    s.theta = theta;
    s.jumps = std::move(jumps);
    s.seed = seed;
    return s;
}

void LevyDriverSpec::validate() const {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw ConfigError("driver intensity theta must be positive, got " + std::to_string(theta));
    if (kind == Kind::CompoundPoissonCompensated) {
        if (jumps.empty()) throw ConfigError("compound Poisson driver needs at least one jump atom");
        double total = 0.0;
        for (const auto& a : jumps) {
            if (!(a.probability >= 0.0) || !std::isfinite(a.value))
                throw ConfigError("jump atoms need finite values and non-negative probabilities");
            total += a.probability;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ConfigError("jump probabilities must sum to 1, got " + std::to_string(total));
    }
    double m2 = 0.0;
    for (const auto& a : atoms()) m2 += a.probability * a.value * a.value;
    if (!(m2 > 0.0)) throw ConfigError("driver second moment must be strictly positive");
}

std::vector<JumpAtom> LevyDriverSpec::atoms() const {
    if (kind == Kind::CompensatedPoisson) return {JumpAtom{1.0, 1.0}};
    return jumps;
}

double LevyDriverSpec::mean_jump() const {
    double m = 0.0;
    for (const auto& a : atoms()) m += a.probability * a.value;
    return m;
}

double LevyDriverSpec::compensation_rate() const { return theta * mean_jump(); }

double second_moment(const LevyDriverSpec& spec) {
    spec.validate();
    double m2 = 0.0;
    for (const auto& a : spec.atoms()) m2 += a.probability * a.value * a.value;
    return spec.theta * m2;
}

std::complex<double> psi_L(const LevyDriverSpec& spec, double u) {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& a : spec.atoms()) {
        const double ux = u * a.value;
        // exp(iux) - 1 - iux, with the real part written as -2 sin^2(ux/2)
        // to avoid cancellation for small ux.
        const double s = std::sin(0.5 * ux);
        acc += a.probability * std::complex<double>(-2.0 * s * s, std::sin(ux) - ux);
    }
    return spec.theta * acc;
}

JumpTrain sample_jump_train(const LevyDriverSpec& spec, double t_min, double t_max) {
    spec.validate();
    if (!(t_min < 0.0) || !(t_max > 0.0))
        throw ConfigError("two-sided driver needs t_min < 0 < t_max");
    JumpTrain train;
    train.t_min = t_min;
    train.t_max = t_max;
    train.compensation_rate = spec.compensation_rate();

    JumpSizeSampler sizes(spec.atoms());
    std::exponential_distribution<double> gap(spec.theta);

    std::mt19937_64 back(splitmix64(spec.seed ^ kBackwardStream));
    for (double t = -gap(back); t >= t_min; t -= gap(back)) {
        train.times.push_back(t);
        train.sizes.push_back(sizes(back));
    }
    std::reverse(train.times.begin(), train.times.end());
    std::reverse(train.sizes.begin(), train.sizes.end());

    std::mt19937_64 fwd(splitmix64(spec.seed ^ kForwardStream));
    for (double t = gap(fwd); t <= t_max; t += gap(fwd)) {
        train.times.push_back(t);
        train.sizes.push_back(sizes(fwd));
    }
    return train;
}

SamplePath bin_jump_train(const JumpTrain& train, double dt, std::size_t max_nodes) {
    if (!(dt > 0.0)) throw ConfigError("grid step dt must be positive");
    const double lo = std::ceil(train.t_min / dt - 1e-7);
    const double hi = std::floor(train.t_max / dt + 1e-7);
    if (hi - lo + 1.0 > static_cast<double>(max_nodes))
        throw SizingError("driver grid of " + std::to_string(hi - lo + 1.0) +
                          " nodes exceeds the cap of " + std::to_string(max_nodes));
    const auto j_lo = static_cast<long long>(lo);
    const auto j_hi = static_cast<long long>(hi);
    if (j_lo > 0 || j_hi < 0 || j_hi - j_lo < 1) throw GridError("driver grid must contain t = 0");

    const std::size_t cells = static_cast<std::size_t>(j_hi - j_lo);
    std::vector<double> increments(cells, -train.compensation_rate * dt);
    std::vector<CompensatedSum> jump_mass(cells);
    for (std::size_t i = 0; i < train.times.size(); ++i) {
        const auto k = static_cast<long long>(std::floor(train.times[i] / dt));
        if (k < j_lo || k >= j_hi) continue;
        jump_mass[static_cast<std::size_t>(k - j_lo)] += train.sizes[i];
    }
    for (std::size_t c = 0; c < cells; ++c) increments[c] += jump_mass[c].value();

    SamplePath path{static_cast<double>(j_lo) * dt, dt, std::vector<double>(cells + 1, 0.0)};
    const auto zero = static_cast<std::size_t>(-j_lo);
    CompensatedSum up;
    for (std::size_t j = zero; j < cells; ++j) {
        up += increments[j];
        path.values[j + 1] = up.value();
    }
    CompensatedSum down;
    for (std::size_t j = zero; j-- > 0;) {
        down += increments[j];
        path.values[j] = -down.value();
    }
    return path;
}

SamplePath sample_two_sided_levy(const LevyDriverSpec& spec, double t_min, double t_max, double dt,
                                 std::size_t max_nodes) {
    if (!(dt > 0.0)) throw ConfigError("grid step dt must be positive");
    if (!(t_min < 0.0) || !(t_max > 0.0))
        throw ConfigError("two-sided driver needs t_min < 0 < t_max");
    const double lo = std::floor(t_min / dt + 1e-7);
    const double hi = std::ceil(t_max / dt - 1e-7);
    if (hi - lo + 1.0 > static_cast<double>(max_nodes))
        throw SizingError("driver grid of " + std::to_string(hi - lo + 1.0) +
                          " nodes exceeds the cap of " + std::to_string(max_nodes));
    return bin_jump_train(sample_jump_train(spec, lo * dt, hi * dt), dt, max_nodes);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (index * 0xd1342543de82ef95ULL + 1));
}

}  // namespace flevy
