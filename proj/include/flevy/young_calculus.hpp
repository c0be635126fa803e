#pragma once

#include <functional>
#include <span>

#include "flevy/sample_path.hpp"

namespace flevy {

/// Left-endpoint Riemann-Stieltjes sum  sum_i f_i (h_{i+1} - h_i).
/// f and h must share a grid.
double rs_integral(const SamplePath& f, const SamplePath& h);

/// Supremum of sum |f(x_i) - f(x_{i-1})|^p over all subdivisions through
/// grid nodes that contain both endpoints. Exact, O(m^2).
double p_variation(std::span<const double> values, double p);
double p_variation(const SamplePath& f, double p);

/// phi(t_0) = 0, phi(t_{i+1}) = phi(t_i) + h_i (g_{i+1} - g_i).
SamplePath cumulative_rs_integral(const SamplePath& h, const SamplePath& g);

/// |F(g_end) - F(g_start) - sum_i F'(g_i) (g_{i+1} - g_i)|.
double chain_rule_residual(const std::function<double(double)>& F,
                           const std::function<double(double)>& F_prime, const SamplePath& g);

}  // namespace flevy
