#pragma once

#include <array>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "flevy/levy_driver.hpp"
#include "flevy/quadrature.hpp"
#include "flevy/sample_path.hpp"

namespace flevy {

/// Parameters of the gridded fractional Levy process approximation.
struct FlpParams {
    double d = 0.25;                    // fractional integration parameter, 0 < d < 1/2
    int n = 100;                        // grid steps per unit time
    double past_window_exponent = 2.0;  // kernel integrated from time -n^exponent

    void validate() const;
    double hurst() const { return d + 0.5; }
    double dt() const { return 1.0 / n; }
    /// Number of driver cells in the past window, round(n^exponent * n).
    long long window_cells() const;
    /// Start of the past window in time units.
    double window_start() const { return -static_cast<double>(window_cells()) / n; }
};

/// ((t - s)_+^d - (-s)_+^d) / Gamma(d + 1).
double flp_kernel(double t, double s, double d);

/// Exponents of the three error orders of the gridded approximation,
/// O(n^e0) + O(n^e1) + O(n^e2). Reported as a budget label only.
std::array<double, 3> flp_error_orders(double d);

/// Precomputed weights for evaluating the gridded FLP sum on a fixed set of
/// output nodes (node j at time j / n). Shared across replicates.
class FlpGridKernel {
public:
    /// Output nodes are all grid nodes in [t_min, t_max].
    FlpGridKernel(const FlpParams& params, double t_min, double t_max);
    /// Output nodes at the given times, each of which must be a grid node.
    FlpGridKernel(const FlpParams& params, std::span<const double> times);

    const FlpParams& params() const { return params_; }
    const std::vector<long long>& nodes() const { return nodes_; }
    bool contiguous() const { return contiguous_; }
    /// Output as a path; only valid for contiguous node sets.
    SamplePath as_path(std::vector<double> values) const;

    /// FLP values at the output nodes for a driver given as increments
    /// over cells [k/n, (k+1)/n), k = first_cell, first_cell + 1, ...
    std::vector<double> evaluate_increments(std::span<const double> increments, long long first_cell) const;

    /// FLP values at the output nodes for a sparse driver. Only arrivals
    /// inside the past window contribute, as in the dense sum.
    std::vector<double> evaluate_jumps(const JumpTrain& train) const;

private:
    void build();
    double weight(long long j, long long k) const;  // without the 1/(n^d Gamma(d+1)) factor

    FlpParams params_;
    std::vector<long long> nodes_;
    bool contiguous_ = false;
    long long window_cells_ = 0;
    double scale_ = 0.0;              // n^-d / Gamma(d + 1)
    std::vector<double> powers_;      // powers_[m] = m^d
    std::vector<double> comp_weight_; // per output node: sum_k kernel weight over the window
};

/// Gridded FLP from a dense driver path whose step is 1/n, whose grid
/// contains t = 0 and which covers [-n^exponent, t_max]. Output on the grid
/// nodes in [t_min, t_max]; the value at t = 0 is exactly 0.
SamplePath simulate_flp(const SamplePath& driver, const FlpParams& params, double t_min, double t_max);

/// Same sum evaluated directly from the driver's arrivals.
SamplePath simulate_flp(const JumpTrain& train, const FlpParams& params, double t_min, double t_max);

/// Cov(L^d_t, L^d_s) = m2 / (2 Gamma(2d+2) sin(pi (d + 1/2))) (|t|^{2d+1} + |s|^{2d+1} - |t-s|^{2d+1}),
/// with m2 = E[L(1)^2].
double flp_covariance(double t, double s, double d, double m2);

/// Right-sided Riemann-Liouville integral
/// (I^alpha_- f)(x) = 1/Gamma(alpha) int_x^inf f(t) (t - x)^(alpha-1) dt,
/// computed with the substitution u = (t - x)^alpha. f must vanish beyond
/// support_end (if finite) or decay fast enough for the improper integral.
double riemann_liouville_minus(const RealFn& f, double alpha, double x, double quad_tol,
                               double support_end = std::numeric_limits<double>::infinity());

/// Kernel of the FLOUP with respect to the driver:
/// (I^d_- e^{-lambda(t - .)} 1{t >= .})(t - lag) for lag >= 0, 0 for lag < 0.
double floup_kernel(double lag, double d, double lambda, double quad_tol = 1e-12);

/// Characteristic function of the FLOUP at times t_points with weights u_weights:
/// exp( int psi_L( sum_j u_j (I^d_- e^{-lambda(t_j - .)} 1{t_j >= .})(s) ) ds ).
std::complex<double> floup_characteristic_function(const LevyDriverSpec& spec, double d, double lambda,
                                                   std::span<const double> t_points,
                                                   std::span<const double> u_weights, double quad_tol);

}  // namespace flevy
