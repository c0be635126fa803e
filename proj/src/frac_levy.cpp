#include "flevy/frac_levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "flevy/errors.hpp"
#include "flevy/special_functions.hpp"

namespace flevy {

namespace {

void require_d(double d) {
    if (!(d > 0.0 && d < 0.5))
        throw ConfigError("fractional parameter d must lie in (0, 1/2), got " + std::to_string(d));
}

long long cell_of(double time, double dt) { return static_cast<long long>(std::floor(time / dt)); }

}  // namespace

void FlpParams::validate() const {
    require_d(d);
    if (n < 2) throw ConfigError("FLP grid resolution n must be at least 2");
    if (!(past_window_exponent >= 1.0) || !std::isfinite(past_window_exponent))
        throw ConfigError("past window exponent must be >= 1");
}

long long FlpParams::window_cells() const {
    return std::llround(std::pow(static_cast<double>(n), past_window_exponent) * n);
}

double flp_kernel(double t, double s, double d) {
    require_d(d);
    const double a = t - s > 0.0 ? std::pow(t - s, d) : 0.0;
    const double b = -s > 0.0 ? std::pow(-s, d) : 0.0;
    return (a - b) / gamma_fn(d + 1.0);
}

std::array<double, 3> flp_error_orders(double d) {
    require_d(d);
    return {d - 0.5, -0.5, (1.0 + 2.0 * d - 2.0 * d * d) / (2.0 * d - 3.0)};
}

FlpGridKernel::FlpGridKernel(const FlpParams& params, double t_min, double t_max) : params_(params) {
    params_.validate();
    if (!(t_min <= t_max)) throw ConfigError("FLP output range is empty");
    const auto lo = static_cast<long long>(std::ceil(t_min * params_.n - 1e-7));
    const auto hi = static_cast<long long>(std::floor(t_max * params_.n + 1e-7));
    if (hi < lo) throw GridError("FLP output range contains no grid node");
    for (long long j = lo; j <= hi; ++j) nodes_.push_back(j);
    contiguous_ = true;
    build();
}

FlpGridKernel::FlpGridKernel(const FlpParams& params, std::span<const double> times) : params_(params) {
    params_.validate();
    if (times.empty()) throw ConfigError("FLP output needs at least one time");
    for (double t : times) nodes_.push_back(grid_index(t, params_.dt()));
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    contiguous_ = nodes_.back() - nodes_.front() + 1 == static_cast<long long>(nodes_.size());
    build();
}

void FlpGridKernel::build() {
    window_cells_ = params_.window_cells();
    const long long K = window_cells_;
    if (nodes_.front() < -K)
        throw GridError("FLP output starts before the past window at " + std::to_string(params_.window_start()));
    scale_ = std::pow(static_cast<double>(params_.n), -params_.d) / gamma_fn(params_.d + 1.0);

    const long long top = std::max<long long>(nodes_.back(), 0) + K;
    powers_.resize(static_cast<std::size_t>(top) + 1);
    for (long long m = 0; m <= top; ++m) powers_[static_cast<std::size_t>(m)] = std::pow(static_cast<double>(m), params_.d);

    // Sum of weights over the whole window: S(j) = sum_{m=K+1}^{K+j} m^d for
    // j >= 0 and -sum_{m=K+j+1}^{K} m^d for j < 0.
    comp_weight_.assign(nodes_.size(), 0.0);
    {
        CompensatedSum up;
        long long j = 0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i] < 0) continue;
            while (j < nodes_[i]) {
                ++j;
                up += powers_[static_cast<std::size_t>(K + j)];
            }
            comp_weight_[i] = up.value();
        }
    }
    {
        CompensatedSum down;
        long long j = 0;
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            if (nodes_[i] >= 0) continue;
            while (j > nodes_[i]) {
                down += powers_[static_cast<std::size_t>(K + j)];
                --j;
            }
            comp_weight_[i] = -down.value();
        }
    }
}

double FlpGridKernel::weight(long long j, long long k) const {
    const double a = j > k ? powers_[static_cast<std::size_t>(j - k)] : 0.0;
    const double b = k < 0 ? powers_[static_cast<std::size_t>(-k)] : 0.0;
    return a - b;
}

SamplePath FlpGridKernel::as_path(std::vector<double> values) const {
    if (!contiguous_) throw ConfigError("FLP output nodes are not contiguous");
    return SamplePath{static_cast<double>(nodes_.front()) / params_.n, params_.dt(), std::move(values)};
}

std::vector<double> FlpGridKernel::evaluate_increments(std::span<const double> increments,
                                                       long long first_cell) const {
    const long long K = window_cells_;
    const long long last_needed = std::max<long long>(nodes_.back(), 0) - 1;
    const long long last_cell = first_cell + static_cast<long long>(increments.size()) - 1;
    if (first_cell > -K || last_cell < last_needed)
        throw GridError("driver does not cover the FLP window [" + std::to_string(params_.window_start()) +
                        ", " + std::to_string(static_cast<double>(nodes_.back()) / params_.n) + "]");
    std::vector<double> out(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const long long j = nodes_[i];
        CompensatedSum acc;
        const long long k_end = std::max<long long>(j, 0);
        for (long long k = -K; k < k_end; ++k)
            acc += weight(j, k) * increments[static_cast<std::size_t>(k - first_cell)];
        out[i] = j == 0 ? 0.0 : scale_ * acc.value();
    }
    return out;
}

std::vector<double> FlpGridKernel::evaluate_jumps(const JumpTrain& train) const {
    const long long K = window_cells_;
    const double dt = params_.dt();
    const long long j_max = nodes_.back();
    if (train.t_min > -static_cast<double>(K) * dt + 1e-9 * static_cast<double>(K) * dt ||
        train.t_max < static_cast<double>(std::max<long long>(j_max, 0)) * dt - 1e-9)
        throw GridError("jump train does not cover the FLP window");
    const long long k_end = std::max<long long>(j_max, 0);

    std::vector<double> out(nodes_.size());
    if (contiguous_) {
        const long long j_lo = nodes_.front();
        const std::size_t G = nodes_.size();
        std::vector<double> sum(G, 0.0), comp(G, 0.0);
        // Constant contributions -J k^... for nodes j <= k < 0, kept as a
        // difference array.
        std::vector<double> step(G + 1, 0.0);
        for (std::size_t i = 0; i < train.times.size(); ++i) {
            const long long k = cell_of(train.times[i], dt);
            if (k < -K || k >= k_end) continue;
            const double J = train.sizes[i];
            const double base = k < 0 ? powers_[static_cast<std::size_t>(-k)] : 0.0;
            if (k < 0 && j_lo <= k) {
                step[0] -= J * base;
                step[static_cast<std::size_t>(std::min(k, j_max) - j_lo + 1)] += J * base;
            }
            const long long from = std::max(k + 1, j_lo);
            if (from > j_max) continue;
            const double* pw = powers_.data() + (from - k);
            double* s = sum.data() + (from - j_lo);
            double* c = comp.data() + (from - j_lo);
            const std::size_t len = static_cast<std::size_t>(j_max - from + 1);
            for (std::size_t m = 0; m < len; ++m) {
                // Kahan update
                const double y = J * (pw[m] - base) - c[m];
                const double t = s[m] + y;
                c[m] = (t - s[m]) - y;
                s[m] = t;
            }
        }
        CompensatedSum run;
        const double drift = train.compensation_rate * dt;
        for (std::size_t i = 0; i < G; ++i) {
            run += step[i];
            const double jumps = (sum[i] - comp[i]) + run.value();
            out[i] = nodes_[i] == 0 ? 0.0 : scale_ * (jumps - drift * comp_weight_[i]);
        }
        return out;
    }

    // Sparse output nodes: gather per node.
    std::vector<long long> cells;
    std::vector<double> sizes;
    for (std::size_t i = 0; i < train.times.size(); ++i) {
        const long long k = cell_of(train.times[i], dt);
        if (k < -K || k >= k_end) continue;
        cells.push_back(k);
        sizes.push_back(train.sizes[i]);
    }
    const double drift = train.compensation_rate * dt;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const long long j = nodes_[i];
        const long long limit = std::max<long long>(j, 0);
        CompensatedSum acc;
        for (std::size_t m = 0; m < cells.size() && cells[m] < limit; ++m)
            acc += sizes[m] * weight(j, cells[m]);
        out[i] = j == 0 ? 0.0 : scale_ * (acc.value() - drift * comp_weight_[i]);
    }
    return out;
}

SamplePath simulate_flp(const SamplePath& driver, const FlpParams& params, double t_min, double t_max) {
    params.validate();
    driver.validate();
    if (std::abs(driver.dt - params.dt()) > 1e-12 * params.dt())
        throw GridError("driver step " + std::to_string(driver.dt) + " does not equal 1/n");
    const long long first_node = grid_index(driver.t0, driver.dt);
    FlpGridKernel kernel(params, t_min, t_max);
    std::vector<double> increments(driver.size() - 1);
    for (std::size_t i = 0; i + 1 < driver.size(); ++i) increments[i] = driver.values[i + 1] - driver.values[i];
    return kernel.as_path(kernel.evaluate_increments(increments, first_node));
}

SamplePath simulate_flp(const JumpTrain& train, const FlpParams& params, double t_min, double t_max) {
    FlpGridKernel kernel(params, t_min, t_max);
    return kernel.as_path(kernel.evaluate_jumps(train));
}

double flp_covariance(double t, double s, double d, double m2) {
    require_d(d);
    if (!(m2 > 0.0)) throw ConfigError("second moment must be positive");
    const double e = 2.0 * d + 1.0;
    const double pref = m2 / (2.0 * gamma_fn(2.0 * d + 2.0) * std::sin(std::numbers::pi * (d + 0.5)));
    return pref * (std::pow(std::abs(t), e) + std::pow(std::abs(s), e) - std::pow(std::abs(t - s), e));
}

double riemann_liouville_minus(const RealFn& f, double alpha, double x, double quad_tol, double support_end) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("Riemann-Liouville order must lie in (0, 1)");
    if (!(quad_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
    const double inv = 1.0 / alpha;
    auto integrand = [&](double u) { return f(x + std::pow(u, inv)); };
    const QuadOptions opts{quad_tol, quad_tol, 20000};
    QuadResult r;
    if (std::isinf(support_end)) {
        r = integrate_to_infinity(integrand, 0.0, opts);
    } else {
        if (support_end <= x) return 0.0;
        r = integrate(integrand, 0.0, std::pow(support_end - x, alpha), opts);
    }
    return r.value / gamma_fn(alpha + 1.0);
}

double floup_kernel(double lag, double d, double lambda, double quad_tol) {
    require_d(d);
    if (!(lambda > 0.0)) throw ConfigError("friction lambda must be positive");
    if (lag <= 0.0) return 0.0;
    // h(w) = 1/Gamma(d) int_0^w e^{-lambda y} (w - y)^{d-1} dy. The part
    // y <= w/2 carries the exponential mass; the part y > w/2 holds the
    // endpoint singularity and is handled by the Riemann-Liouville
    // substitution.
    const double w = lag;
    const double half = 0.5 * w;
    const QuadOptions opts{quad_tol * 1e-3, quad_tol, 20000};
    // Exponential decay makes y beyond this cut negligible at quad_tol.
    const double cut = std::min(half, (40.0 + std::log1p(1.0 / quad_tol)) / lambda);
    auto near = [&](double y) { return std::exp(-lambda * y) * std::pow(w - y, d - 1.0); };
    const double a = integrate(near, 0.0, cut, opts).value / gamma_fn(d);
    double b = 0.0;
    if (lambda * half < 745.0) {
        // int_{w/2}^{w} e^{-lambda y} (w-y)^{d-1} dy in the variable v = w - y
        auto shifted = [&](double v) { return std::exp(-lambda * (w - v)); };
        b = riemann_liouville_minus(shifted, d, 0.0, quad_tol, half);
    }
    return a + b;
}

std::complex<double> floup_characteristic_function(const LevyDriverSpec& spec, double d, double lambda,
                                                   std::span<const double> t_points,
                                                   std::span<const double> u_weights, double quad_tol) {
    require_d(d);
    spec.validate();
    if (!(lambda > 0.0)) throw ConfigError("friction lambda must be positive");
    if (t_points.empty() || t_points.size() != u_weights.size())
        throw ConfigError("characteristic function needs equal-length, non-empty times and weights");
    if (!(quad_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
    if (std::all_of(u_weights.begin(), u_weights.end(), [](double u) { return u == 0.0; })) return {1.0, 0.0};

    const double t_top = *std::max_element(t_points.begin(), t_points.end());
    // Integration variable w = t_top - s >= 0; kinks at w_j = t_top - t_j.
    std::vector<double> breaks{0.0};
    for (double t : t_points) breaks.push_back(t_top - t);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double inner_tol = std::min(1e-12, quad_tol * 1e-3);
    auto argument = [&](double w) {
        double acc = 0.0;
        for (std::size_t j = 0; j < t_points.size(); ++j)
            acc += u_weights[j] * floup_kernel(w - (t_top - t_points[j]), d, lambda, inner_tol);
        return acc;
    };
    auto re = [&](double w) { return psi_L(spec, argument(w)).real(); };
    auto im = [&](double w) { return psi_L(spec, argument(w)).imag(); };

    const QuadOptions opts{quad_tol * 0.1, quad_tol * 0.1, 20000};
    double total_re = 0.0, total_im = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        total_re += integrate(re, breaks[i], breaks[i + 1], opts).value;
        total_im += integrate(im, breaks[i], breaks[i + 1], opts).value;
    }
    // Bulk up to a few relaxation times, then the algebraic tail
    // (h(w) ~ w^{d-1} / (Gamma(d) lambda), so psi_L(u h) ~ w^{2d-2}).
    const double bulk_end = breaks.back() + 20.0 / lambda;
    total_re += integrate(re, breaks.back(), bulk_end, opts).value;
    total_im += integrate(im, breaks.back(), bulk_end, opts).value;
    total_re += integrate_algebraic_tail(re, bulk_end, 2.0 - 2.0 * d, opts).value;
    // The imaginary part of psi_L is cubic in its argument: decay w^{3d-3}.
    total_im += integrate_algebraic_tail(im, bulk_end, 3.0 - 3.0 * d, opts).value;
    return std::exp(std::complex<double>(total_re, total_im));
}

}  // namespace flevy
