#include "flevy/sample_path.hpp"

#include <cmath>
#include <string>

#include "flevy/errors.hpp"

namespace flevy {

std::optional<std::size_t> SamplePath::node_index(double t) const {
    const double pos = (t - t0) / dt;
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9 * std::max(1.0, std::abs(pos)) || r < 0.0 ||
        r > static_cast<double>(values.size()) - 1.0)
        return std::nullopt;
    return static_cast<std::size_t>(r);
}

std::size_t SamplePath::require_node(double t) const {
    auto idx = node_index(t);
    if (!idx)
        throw GridError("time " + std::to_string(t) + " is not a grid node of the path");
    return *idx;
}

SamplePath SamplePath::subsample(std::size_t stride) const {
    if (stride == 0) throw ConfigError("subsample stride must be positive");
    SamplePath out{t0, dt * static_cast<double>(stride), {}};
    out.values.reserve(values.size() / stride + 1);
    for (std::size_t i = 0; i < values.size(); i += stride) out.values.push_back(values[i]);
    return out;
}

SamplePath SamplePath::slice(double t_start, double t_end) const {
    const std::size_t a = require_node(t_start);
    const std::size_t b = require_node(t_end);
    if (b < a) throw GridError("slice end precedes slice start");
    return SamplePath{time(a), dt, std::vector<double>(values.begin() + a, values.begin() + b + 1)};
}

void SamplePath::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("path step dt must be positive");
    if (values.size() < 2) throw ConfigError("path needs at least two nodes");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("path contains a non-finite value");
}

void require_same_grid(const SamplePath& a, const SamplePath& b, const char* what) {
    const double tol = 1e-9 * std::max(a.dt, b.dt);
    if (a.size() != b.size() || std::abs(a.dt - b.dt) > 1e-12 * a.dt || std::abs(a.t0 - b.t0) > tol)
        throw GridError(std::string(what) + ": paths do not share a grid");
}

long long grid_index(double t, double dt) {
    const double pos = t / dt;
    const double r = std::round(pos);
    if (std::abs(pos - r) > 1e-9 * std::max(1.0, std::abs(pos)))
        throw GridError("time " + std::to_string(t) + " is not a multiple of the grid step");
    return static_cast<long long>(r);
}

}  // namespace flevy
