#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "flevy/frac_levy.hpp"
#include "flevy/levy_driver.hpp"
#include "flevy/sample_path.hpp"

namespace flevy {

struct FloupParams {
    double lambda = 1.0;        // friction, 1/time
    double past_cutoff = -40.0; // a < 0: lower end of the integration-by-parts integral

    void validate() const;
};

/// Smallest |a| (returned as a < 0) with e^{lambda a} |a|^{d + 0.6} < tol * path_scale.
double choose_past_cutoff(double d, double lambda, double tol = 1e-8, double path_scale = 1.0);

/// FLOUP on the grid nodes of `flp` in [t_min, t_max]:
/// L_t - e^{-lambda(t-a)} L_a - lambda int_a^t e^{-lambda(t-s)} L_s ds,
/// with the integral by the trapezoid rule. The cutoff is snapped down to
/// the nearest grid node.
SamplePath floup_via_ibp(const SamplePath& flp, const FloupParams& params, double t_min, double t_max);

/// Dense gridded FLP from the driver's arrivals on [cutoff, t_max], then
/// floup_via_ibp on [t_min, t_max]. The train must cover the FLP window.
SamplePath simulate_floup(const JumpTrain& train, const FlpParams& flp, const FloupParams& params, double t_min,
                          double t_max);

/// Explicit Euler for dX = -lambda X dt + dL^d from X_tau = x0, on the
/// nodes of `flp` from tau to its end.
SamplePath euler_langevin(const SamplePath& flp, double lambda, double tau, double x0);

/// l_t = floup_t - e^{-lambda(t - tau)} (floup_tau - z) on the whole grid.
SamplePath ou_operator(const SamplePath& floup, double lambda, double tau, double z);

struct LangevinResidual {
    double max_residual = 0.0;
    SamplePath profile;  // l_t - l_s + lambda int_s^t l du - (L_t - L_s), s = first node
};

/// Integral-form Langevin residual of `path` against `flp` (trapezoid rule
/// for the time integral). `flp` must contain every node of `path`.
LangevinResidual langevin_residual(const SamplePath& path, const SamplePath& flp, double lambda);

/// Gamma(1-2d) m2 / (Gamma(d) Gamma(1-d)).
double rs_covariance_constant(double d, double m2);

/// Cov(int f dL^d, int g dL^d) = rs_covariance_constant(d, m2) *
/// int int f(t) g(s) |t - s|^{2d-1} ds dt over [lo, hi]^2. The transverse
/// integral runs in v = |t - s|^{2d}.
double cov_rs_integrals(const std::function<double(double)>& f, const std::function<double(double)>& g,
                        double d, double m2, double quad_tol,
                        double lo = -std::numeric_limits<double>::infinity(), double hi = 0.0);

/// Gamma(d) Gamma(1-2d) / Gamma(1-d) |t - s|^{2d-1}; throws when t == s.
double gripenberg_norros(double t, double s, double d);

/// int_{-inf}^{min(t,s)} (t-u)^{d-1} (s-u)^{d-1} du by quadrature.
double gripenberg_norros_quadrature(double t, double s, double d, double quad_tol = 1e-12);

/// N-term large-lag expansion of Cov(FLOUP_t, FLOUP_{t+s}).
double floup_autocov_asymptotic(double s, int N, double d, double lambda, double m2);

/// Var of the stationary FLOUP: rs_covariance_constant(d, m2) Gamma(2d) / lambda^{2d+1}.
double floup_variance(double d, double lambda, double m2);

/// Cov(FLOUP_0, FLOUP_s) by the double quadrature.
double floup_autocovariance(double s, double d, double lambda, double m2, double quad_tol = 1e-8);

/// Grid FLOUP (gridded FLP sum followed by floup_via_ibp with cutoff
/// `span` before each observation) evaluated at listed times directly from
/// a driver's arrivals. The scheme is linear in the driver increments, so
/// one response table per lag is built once and shared across replicates.
class FloupObservationKernel {
public:
    FloupObservationKernel(const FlpParams& flp, double lambda, double span, std::span<const double> times);

    const std::vector<long long>& nodes() const { return nodes_; }
    std::vector<double> evaluate_jumps(const JumpTrain& train) const;

private:
    FlpParams flp_;
    double lambda_;
    std::vector<long long> nodes_;
    long long window_cells_ = 0;
    double scale_ = 0.0;
    double weight_total_ = 0.0;      // IBP weights applied to a constant path
    std::vector<double> powers_;     // m^d
    std::vector<double> response_;   // response_[q] = sum_m w_m (q - m)_+^d
    std::vector<double> comp_;       // per node: compensation sum
};

}  // namespace flevy
