#pragma once

#include <functional>

namespace flevy {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

using RealFn = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
/// Nodes never touch the endpoints, so integrable endpoint singularities
/// are tolerated (at the cost of more subdivisions). Throws NumericalError
/// when the error estimate stays above tolerance after max_intervals.
QuadResult integrate(const RealFn& f, double a, double b, const QuadOptions& opts = {});

/// Integral over [a, +inf) through the map x = a + (1 - u) / u.
QuadResult integrate_to_infinity(const RealFn& f, double a, const QuadOptions& opts = {});

/// Integral over (-inf, b] through the map x = b - (1 - u) / u.
QuadResult integrate_from_minus_infinity(const RealFn& f, double b, const QuadOptions& opts = {});

/// Integral over [a, +inf), a > 0, for integrands decaying like x^(-p)
/// with p > 1. The map x = a * r^(-1/(p-1)) turns such a tail into a
/// bounded integrand on r in (0, 1].
QuadResult integrate_algebraic_tail(const RealFn& f, double a, double p, const QuadOptions& opts = {});

}  // namespace flevy
