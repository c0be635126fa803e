#include "flevy/floup.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flevy/errors.hpp"
#include "flevy/quadrature.hpp"
#include "flevy/special_functions.hpp"

namespace flevy {

namespace {

void require_d(double d) {
    if (!(d > 0.0 && d < 0.5))
        throw ConfigError("fractional parameter d must lie in (0, 1/2), got " + std::to_string(d));
}

void require_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("friction lambda must be positive");
}

// Index of the first node >= t and of the last node <= t.
long long first_node_at_or_after(const SamplePath& p, double t) {
    return static_cast<long long>(std::ceil((t - p.t0) / p.dt - 1e-9));
}
long long last_node_at_or_before(const SamplePath& p, double t) {
    return static_cast<long long>(std::floor((t - p.t0) / p.dt + 1e-9));
}

// Outer integral of f over [out_lo, out_hi]; inner integral of g against
// |t - s|^{2d-1} over [in_lo, in_hi], split at t and taken in v = |t-s|^{2d}.
double singular_double_integral(const std::function<double(double)>& f, const std::function<double(double)>& g,
                                double d, double quad_tol, double out_lo, double out_hi, double in_lo,
                                double in_hi) {
    const double two_d = 2.0 * d;
    const double inv = 1.0 / two_d;
    const QuadOptions inner_opts{quad_tol * 1e-2, quad_tol * 1e-2, 20000};
    const QuadOptions outer_opts{quad_tol, quad_tol, 20000};
    auto inner = [&](double t) {
        double below = 0.0, above = 0.0;
        auto left = [&](double v) { return g(t - std::pow(v, inv)); };
        auto right = [&](double v) { return g(t + std::pow(v, inv)); };
        if (std::isinf(in_lo))
            below = integrate_to_infinity(left, 0.0, inner_opts).value;
        else if (t > in_lo)
            below = integrate(left, 0.0, std::pow(t - in_lo, two_d), inner_opts).value;
        if (std::isinf(in_hi))
            above = integrate_to_infinity(right, 0.0, inner_opts).value;
        else if (in_hi > t)
            above = integrate(right, 0.0, std::pow(in_hi - t, two_d), inner_opts).value;
        return (below + above) * inv;
    };
    auto outer = [&](double t) {
        const double ft = f(t);
        return ft == 0.0 ? 0.0 : ft * inner(t);
    };
    if (std::isinf(out_lo) && std::isinf(out_hi))
        return integrate_from_minus_infinity(outer, 0.0, outer_opts).value +
               integrate_to_infinity(outer, 0.0, outer_opts).value;
    if (std::isinf(out_lo)) return integrate_from_minus_infinity(outer, out_hi, outer_opts).value;
    if (std::isinf(out_hi)) return integrate_to_infinity(outer, out_lo, outer_opts).value;
    return integrate(outer, out_lo, out_hi, outer_opts).value;
}

}  // namespace

void FloupParams::validate() const {
    require_lambda(lambda);
    if (!(past_cutoff < 0.0)) throw ConfigError("FLOUP past cutoff must be negative");
}

double choose_past_cutoff(double d, double lambda, double tol, double path_scale) {
    require_d(d);
    require_lambda(lambda);
    if (!(tol > 0.0) || !(path_scale > 0.0)) throw ConfigError("cutoff tolerance and path scale must be positive");
    const double target = std::log(tol * path_scale);
    const double power = d + 0.6;
    auto g = [&](double x) { return -lambda * x + power * std::log(x); };
    // g decreases beyond its maximum at power / lambda.
    double lo = std::max(power / lambda, 1e-12);
    if (g(lo) < target) return -lo;
    double hi = 2.0 * lo;
    while (g(hi) >= target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < target ? hi : lo) = mid;
    }
    return -hi;
}

SamplePath floup_via_ibp(const SamplePath& flp, const FloupParams& params, double t_min, double t_max) {
    params.validate();
    flp.validate();
    const long long ia = last_node_at_or_before(flp, params.past_cutoff);
    if (ia < 0) throw GridError("FLP path does not reach the past cutoff " + std::to_string(params.past_cutoff));
    const long long lo = std::max(first_node_at_or_after(flp, t_min), ia);
    const long long hi = last_node_at_or_before(flp, t_max);
    if (hi >= static_cast<long long>(flp.size()))
        throw GridError("FLP path ends before " + std::to_string(t_max));
    if (hi < lo) throw GridError("FLOUP output range is empty");

    const double h = flp.dt;
    const double lambda = params.lambda;
    const double decay = std::exp(-lambda * h);
    const double La = flp.values[static_cast<std::size_t>(ia)];
    SamplePath out{flp.time(static_cast<std::size_t>(lo)), h, {}};
    out.values.reserve(static_cast<std::size_t>(hi - lo + 1));
    double T = 0.0;
    for (long long i = ia; i <= hi; ++i) {
        if (i > ia) {
            const auto k = static_cast<std::size_t>(i);
            T = decay * T + 0.5 * h * (flp.values[k - 1] * decay + flp.values[k]);
        }
        if (i >= lo) {
            const double boundary = std::exp(-lambda * h * static_cast<double>(i - ia)) * La;
            out.values.push_back(flp.values[static_cast<std::size_t>(i)] - boundary - lambda * T);
        }
    }
    return out;
}

SamplePath simulate_floup(const JumpTrain& train, const FlpParams& flp, const FloupParams& params, double t_min,
                          double t_max) {
    params.validate();
    const double h = flp.dt();
    const double start = std::floor(params.past_cutoff / h + 1e-9) * h;
    const SamplePath path = simulate_flp(train, flp, start, t_max);
    return floup_via_ibp(path, params, t_min, t_max);
}

SamplePath euler_langevin(const SamplePath& flp, double lambda, double tau, double x0) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be non-negative");
    flp.validate();
    const std::size_t start = flp.require_node(tau);
    if (start + 1 >= flp.size()) throw GridError("Euler start is the last node of the FLP path");
    SamplePath out{flp.time(start), flp.dt, {}};
    out.values.reserve(flp.size() - start);
    double x = x0;
    out.values.push_back(x);
    const double shrink = lambda * flp.dt;
    for (std::size_t i = start; i + 1 < flp.size(); ++i) {
        x = x - shrink * x + (flp.values[i + 1] - flp.values[i]);
        out.values.push_back(x);
    }
    return out;
}

SamplePath ou_operator(const SamplePath& floup, double lambda, double tau, double z) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be non-negative");
    floup.validate();
    const std::size_t it = floup.require_node(tau);
    const double gap = floup.values[it] - z;
    SamplePath out{floup.t0, floup.dt, floup.values};
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double lag = (static_cast<double>(i) - static_cast<double>(it)) * floup.dt;
        out.values[i] -= std::exp(-lambda * lag) * gap;
    }
    out.values[it] = z;
    return out;
}

LangevinResidual langevin_residual(const SamplePath& path, const SamplePath& flp, double lambda) {
    path.validate();
    flp.validate();
    if (std::abs(path.dt - flp.dt) > 1e-9 * path.dt) throw GridError("Langevin residual needs equal grid steps");
    const std::size_t off = flp.require_node(path.t0);
    if (off + path.size() > flp.size()) throw GridError("FLP path does not cover the residual range");
    LangevinResidual r;
    r.profile = SamplePath{path.t0, path.dt, std::vector<double>(path.size(), 0.0)};
    CompensatedSum integral;
    for (std::size_t i = 1; i < path.size(); ++i) {
        integral += 0.5 * path.dt * (path.values[i - 1] + path.values[i]);
        const double res = path.values[i] - path.values[0] + lambda * integral.value() -
                           (flp.values[off + i] - flp.values[off]);
        r.profile.values[i] = res;
        r.max_residual = std::max(r.max_residual, std::abs(res));
    }
    return r;
}

double rs_covariance_constant(double d, double m2) {
    require_d(d);
    if (!(m2 > 0.0)) throw ConfigError("second moment must be positive");
    return gamma_fn(1.0 - 2.0 * d) * m2 / (gamma_fn(d) * gamma_fn(1.0 - d));
}

double cov_rs_integrals(const std::function<double(double)>& f, const std::function<double(double)>& g,
                        double d, double m2, double quad_tol, double lo, double hi) {
    require_d(d);
    if (!(quad_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
    if (!(lo < hi)) throw ConfigError("integration domain is empty");
    const double c = rs_covariance_constant(d, m2);
    return c * singular_double_integral(f, g, d, quad_tol, lo, hi, lo, hi);
}

double gripenberg_norros(double t, double s, double d) {
    require_d(d);
    if (t == s) throw NumericalError("Gripenberg-Norros kernel diverges at t == s");
    return gamma_fn(d) * gamma_fn(1.0 - 2.0 * d) / gamma_fn(1.0 - d) * std::pow(std::abs(t - s), 2.0 * d - 1.0);
}

double gripenberg_norros_quadrature(double t, double s, double d, double quad_tol) {
    require_d(d);
    if (t == s) throw NumericalError("Gripenberg-Norros integral diverges at t == s");
    const double gap = std::abs(t - s);
    const QuadOptions opts{quad_tol, quad_tol, 20000};
    // u = min(t,s) - r; on [0, gap] substitute r = v^{1/d}.
    auto head = [&](double v) { return std::pow(gap + std::pow(v, 1.0 / d), d - 1.0) / d; };
    auto tail = [&](double r) { return std::pow(r, d - 1.0) * std::pow(gap + r, d - 1.0); };
    return integrate(head, 0.0, std::pow(gap, d), opts).value +
           integrate_algebraic_tail(tail, gap, 2.0 - 2.0 * d, opts).value;
}

double floup_autocov_asymptotic(double s, int N, double d, double lambda, double m2) {
    require_d(d);
    require_lambda(lambda);
    if (!(s > 0.0)) throw ConfigError("lag s must be positive");
    if (N < 1) throw ConfigError("number of expansion terms must be at least 1");
    const double pref = rs_covariance_constant(d, m2) / (2.0 * d * (2.0 * d + 1.0));
    CompensatedSum sum;
    for (int n = 1; n <= N; ++n) {
        double prod = 1.0;
        for (int k = 0; k <= 2 * n - 1; ++k) prod *= 2.0 * d + 1.0 - k;
        sum += prod * std::pow(lambda, -2.0 * n) * std::pow(s, 2.0 * d + 1.0 - 2.0 * n);
    }
    return pref * sum.value();
}

double floup_variance(double d, double lambda, double m2) {
    require_lambda(lambda);
    return rs_covariance_constant(d, m2) * gamma_fn(2.0 * d) / std::pow(lambda, 2.0 * d + 1.0);
}

double floup_autocovariance(double s, double d, double lambda, double m2, double quad_tol) {
    require_lambda(lambda);
    if (s < 0.0) s = -s;
    auto f = [&](double t) { return t <= 0.0 ? std::exp(lambda * t) : 0.0; };
    auto g = [&](double u) { return u <= s ? std::exp(-lambda * (s - u)) : 0.0; };
    const double inf = std::numeric_limits<double>::infinity();
    return rs_covariance_constant(d, m2) * singular_double_integral(f, g, d, quad_tol, -inf, 0.0, -inf, s);
}

FloupObservationKernel::FloupObservationKernel(const FlpParams& flp, double lambda, double span,
                                               std::span<const double> times)
    : flp_(flp), lambda_(lambda) {
    flp_.validate();
    require_lambda(lambda);
    if (!(span > 0.0)) throw ConfigError("FLOUP integration span must be positive");
    if (times.empty()) throw ConfigError("FLOUP observation needs at least one time");
    const double h = flp_.dt();
    for (double t : times) nodes_.push_back(grid_index(t, h));
    window_cells_ = flp_.window_cells();
    const long long K = window_cells_;
    const long long M = std::max<long long>(1, std::llround(span * flp_.n));
    const long long lowest = *std::min_element(nodes_.begin(), nodes_.end());
    const long long highest = *std::max_element(nodes_.begin(), nodes_.end());
    if (lowest - M < -K)
        throw GridError("FLOUP integration span reaches before the FLP past window");
    scale_ = std::pow(static_cast<double>(flp_.n), -flp_.d) / gamma_fn(flp_.d + 1.0);

    // Trapezoid integration-by-parts weights on L_{obs - m}, m = 0..M.
    std::vector<double> w(static_cast<std::size_t>(M) + 1);
    w[0] = 1.0 - 0.5 * lambda * h;
    for (long long m = 1; m < M; ++m) w[static_cast<std::size_t>(m)] = -lambda * h * std::exp(-lambda * h * m);
    w[static_cast<std::size_t>(M)] = -std::exp(-lambda * h * M) * (1.0 + 0.5 * lambda * h);
    CompensatedSum wt;
    for (double x : w) wt += x;
    weight_total_ = wt.value();

    const long long q_max = highest + K;
    powers_.resize(static_cast<std::size_t>(q_max) + 1);
    for (long long m = 0; m <= q_max; ++m) powers_[static_cast<std::size_t>(m)] = std::pow(static_cast<double>(m), flp_.d);
    response_.assign(static_cast<std::size_t>(q_max) + 1, 0.0);
    for (long long q = 1; q <= q_max; ++q) {
        CompensatedSum acc;
        const long long top = std::min(M, q - 1);
        for (long long m = 0; m <= top; ++m)
            acc += w[static_cast<std::size_t>(m)] * powers_[static_cast<std::size_t>(q - m)];
        response_[static_cast<std::size_t>(q)] = acc.value();
    }

    // Compensation: sum over all window cells of the response to a unit increment.
    std::vector<double> prefix(static_cast<std::size_t>(q_max) + 1, 0.0);
    {
        CompensatedSum run;
        for (long long q = 1; q <= q_max; ++q) {
            run += response_[static_cast<std::size_t>(q)];
            prefix[static_cast<std::size_t>(q)] = run.value();
        }
    }
    CompensatedSum past;
    for (long long m = 1; m <= K; ++m) past += powers_[static_cast<std::size_t>(m)];
    for (long long j : nodes_) {
        const double ramp = j + K >= 1 ? prefix[static_cast<std::size_t>(j + K)] : 0.0;
        comp_.push_back(ramp - weight_total_ * past.value());
    }
}

std::vector<double> FloupObservationKernel::evaluate_jumps(const JumpTrain& train) const {
    const long long K = window_cells_;
    const double dt = flp_.dt();
    const long long highest = *std::max_element(nodes_.begin(), nodes_.end());
    if (train.t_min > -static_cast<double>(K) * dt * (1.0 - 1e-9) ||
        train.t_max < static_cast<double>(std::max<long long>(highest, 0)) * dt - 1e-9)
        throw GridError("jump train does not cover the FLP window");
    std::vector<long long> cells;
    std::vector<double> sizes;
    CompensatedSum past;
    for (std::size_t i = 0; i < train.times.size(); ++i) {
        const auto k = static_cast<long long>(std::floor(train.times[i] / dt));
        if (k < -K || k >= highest) continue;
        cells.push_back(k);
        sizes.push_back(train.sizes[i]);
        if (k < 0) past += train.sizes[i] * powers_[static_cast<std::size_t>(-k)];
    }
    const double drift = train.compensation_rate * dt;
    std::vector<double> out(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const long long j = nodes_[i];
        double acc = 0.0, carry = 0.0;
        for (std::size_t m = 0; m < cells.size() && cells[m] < j; ++m) {
            const double y = sizes[m] * response_[static_cast<std::size_t>(j - cells[m])] - carry;
            const double t = acc + y;
            carry = (t - acc) - y;
            acc = t;
        }
        out[i] = scale_ * ((acc - weight_total_ * past.value()) - drift * comp_[i]);
    }
    return out;
}

}  // namespace flevy
