#include "flevy/young_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "flevy/errors.hpp"
#include "flevy/special_functions.hpp"

namespace flevy {

double rs_integral(const SamplePath& f, const SamplePath& h) {
    require_same_grid(f, h, "rs_integral");
    CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) acc += f.values[i] * (h.values[i + 1] - h.values[i]);
    return acc.value();
}

double p_variation(std::span<const double> values, double p) {
    if (!(p >= 1.0)) throw ConfigError("p-variation needs p >= 1");
    const std::size_t m = values.size();
    if (m < 2) return 0.0;
    if (p == 1.0) {
        CompensatedSum tv;
        for (std::size_t i = 0; i + 1 < m; ++i) tv += std::abs(values[i + 1] - values[i]);
        return tv.value();
    }
    // best[j]: largest sum over subdivisions of nodes 0..j ending at j
    std::vector<double> best(m, 0.0);
    for (std::size_t j = 1; j < m; ++j) {
        double top = 0.0;
        for (std::size_t i = 0; i < j; ++i)
            top = std::max(top, best[i] + std::pow(std::abs(values[j] - values[i]), p));
        best[j] = top;
    }
    return best[m - 1];
}

double p_variation(const SamplePath& f, double p) { return p_variation(std::span<const double>(f.values), p); }

SamplePath cumulative_rs_integral(const SamplePath& h, const SamplePath& g) {
    require_same_grid(h, g, "cumulative_rs_integral");
    SamplePath phi{h.t0, h.dt, std::vector<double>(h.size(), 0.0)};
    CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
        acc += h.values[i] * (g.values[i + 1] - g.values[i]);
        phi.values[i + 1] = acc.value();
    }
    return phi;
}

double chain_rule_residual(const std::function<double(double)>& F,
                           const std::function<double(double)>& F_prime, const SamplePath& g) {
    if (g.size() < 2) throw ConfigError("chain rule residual needs at least two nodes");
    CompensatedSum acc;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) acc += F_prime(g.values[i]) * (g.values[i + 1] - g.values[i]);
    return std::abs(F(g.values.back()) - F(g.values.front()) - acc.value());
}

}  // namespace flevy
