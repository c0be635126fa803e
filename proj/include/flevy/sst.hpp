#pragma once

#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "flevy/sample_path.hpp"

namespace flevy {

using RealMap = std::function<double(double)>;

/// Open interval (lo, hi); either end may be infinite. lo_closed admits
/// the finite lower end as a state (used by the squared FLOUP, which
/// starts from z >= 0).
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool lo_closed = false;

    bool contains(double x) const;
    /// Strictly inside, ignoring lo_closed.
    bool interior(double x) const { return x > lo && x < hi; }
    std::string describe() const;
};

struct ProperTriple {
    std::string name;
    Interval interval;
    RealMap mu;
    RealMap sigma;
    RealMap psi;
    double lambda = 0.0;
    RealMap f;      // state space transform, R -> I
    RealMap f_inv;  // I -> R
    std::vector<double> sigma_zeros;  // zeros of sigma inside I
    bool strongly_proper = false;
    std::string reason;  // why the triple is not strongly proper, if it is not
};

struct PropertyCheck {
    std::string name;
    bool pass = true;
    double worst_probe = 0.0;
    double worst_value = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<PropertyCheck> checks;
    double lambda_recovered = 0.0;
    bool proper = false;           // P1-P3 and the transform checks
    bool strongly_proper = false;  // additionally P4

    const PropertyCheck& check(const std::string& name) const;
};

/// Probes on a warped grid that reaches deep towards both ends of I.
std::vector<double> interval_probes(const Interval& interval, int probe_count);

/// Checks (P1)-(P4) plus transform consistency on probe_count probes.
ValidationReport validate_strongly_proper(const ProperTriple& triple, int probe_count = 64);

/// f(x) = psi^{-1}(-lambda x) by bracketing and bisection inside I.
/// Throws NumericalError when no bracket is found (psi does not cover R).
RealMap sst_from_psi(RealMap psi, double lambda, const Interval& interval);

/// X_t = f(l_t) with l = ou_operator(floup, lambda, tau, f_inv(z)); X_tau = z.
SamplePath solve_sde(const ProperTriple& triple, const SamplePath& floup, double lambda_check, double tau,
                     double z);

/// Stationary solution f(FLOUP_t).
SamplePath solve_sde_stationary(const ProperTriple& triple, const SamplePath& floup, double lambda_check);

struct SolutionReport {
    enum class Contract { S1_S2_pass, fail };

    double max_residual = 0.0;
    SamplePath residual_profile;
    double mesh = 0.0;
    Contract contract = Contract::fail;
    std::size_t nodes_outside = 0;
    std::string message;
};

/// residual_t = X_t - X_0 - trapezoid int mu(X) du - sum sigma(X_i)(L_{i+1} - L_i).
/// The contract passes when X stays in I and max_residual <= tolerance.
SolutionReport residual_check(const SamplePath& X, const ProperTriple& triple, const SamplePath& flp,
                              double tolerance = std::numeric_limits<double>::infinity());

using ModelParams = std::map<std::string, double>;

/// Model catalog. Identifiers: power, affine-drift, trig, cir, log,
/// squared-floup. Unknown parameter names and inadmissible values are
/// rejected with ConfigError.
ProperTriple catalog(const std::string& model_id, const ModelParams& params = {});

/// Catalog identifiers and their parameter names with defaults.
const std::map<std::string, ModelParams>& catalog_defaults();

/// ((sigma / 2) l_t)^2 for a FLOUP (or OU-operator path) l built with rate lambda_half.
SamplePath squared_floup(const SamplePath& floup, double sigma, double lambda_half, double floup_rate);

}  // namespace flevy
