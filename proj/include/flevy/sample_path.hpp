#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace flevy {

/// Uniformly gridded real-valued path. Node i sits at time t0 + i*dt;
/// node times are never stored.
struct SamplePath {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double t_end() const { return time(values.size() - 1); }

    /// Index of the node at time t, if t lies on the grid (relative
    /// tolerance 1e-9 of dt).
    std::optional<std::size_t> node_index(double t) const;

    /// Index of the node at time t; throws GridError if t is off-grid.
    std::size_t require_node(double t) const;

    /// Every stride-th node starting at node 0.
    SamplePath subsample(std::size_t stride) const;

    /// Nodes with times in [t_start, t_end] (both must be grid nodes).
    SamplePath slice(double t_start, double t_end) const;

    /// Throws ConfigError unless dt > 0, size >= 2 and all values finite.
    void validate() const;
};

/// Throws GridError unless a and b have the same t0, dt and length.
void require_same_grid(const SamplePath& a, const SamplePath& b, const char* what);

/// Integer index of the grid node at time t for a grid of step dt
/// anchored at 0; throws GridError if t is not a multiple of dt.
long long grid_index(double t, double dt);

}  // namespace flevy
