#include "flevy/analytics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

#include "flevy/errors.hpp"
#include "flevy/special_functions.hpp"

namespace flevy {

namespace {

constexpr std::size_t kChunk = 128;  // replicates per accumulator; fixed so results ignore the thread count
constexpr std::size_t kPilot = 32;   // replicates used for the shift of the power sums

using Observer = std::function<std::vector<double>(const JumpTrain&)>;

struct Layout {
    std::vector<double> times;            // sorted, unique
    std::vector<std::size_t> origin_idx;  // index of each origin
    std::vector<std::vector<std::size_t>> lag_idx;  // [lag][origin] -> index of origin + lag
    std::vector<double> cf_u;
    std::vector<double> lags;
};

Layout make_layout(const EnsembleConfig& c) {
    Layout L;
    L.times = c.times;
    for (double o : c.origins) {
        L.times.push_back(o);
        for (double l : c.lags) L.times.push_back(o + l);
    }
    std::sort(L.times.begin(), L.times.end());
    const double tol = 1e-9 * c.flp.dt();
    L.times.erase(std::unique(L.times.begin(), L.times.end(), [tol](double a, double b) { return std::abs(a - b) <= tol; }),
                  L.times.end());
    auto find = [&](double t) {
        auto it = std::lower_bound(L.times.begin(), L.times.end(), t - tol);
        return static_cast<std::size_t>(it - L.times.begin());
    };
    for (double o : c.origins) L.origin_idx.push_back(find(o));
    for (double l : c.lags) {
        std::vector<std::size_t> row;
        for (double o : c.origins) row.push_back(find(o + l));
        L.lag_idx.push_back(row);
    }
    L.cf_u = c.cf_u;
    L.lags = c.lags;
    return L;
}

struct Accumulator {
    std::size_t count = 0;
    std::size_t T = 0, U = 0, G = 0;
    std::vector<CompensatedSum> power;  // [t][k], k = 0..5 for exponents 1..6
    std::vector<CompensatedSum> mixed;  // [pair][4]: xy, x^2 y, x y^2, x^2 y^2
    std::vector<CompensatedSum> cf;     // [t][u][4]: cos, sin, cos^2, sin^2
    std::vector<CompensatedSum> lag;    // [lag][2]: p, p^2

    Accumulator(std::size_t t, std::size_t u, std::size_t g)
        : T(t), U(u), G(g), power(t * 6), mixed(t * (t + 1) / 2 * 4), cf(t * u * 4), lag(g * 2) {}

    void add(const std::vector<double>& x, const std::vector<double>& shift, const Layout& L) {
        ++count;
        std::vector<double> y(T);
        for (std::size_t i = 0; i < T; ++i) {
            y[i] = x[i] - shift[i];
            double p = y[i];
            for (std::size_t k = 0; k < 6; ++k, p *= y[i]) power[i * 6 + k] += p;
        }
        std::size_t pair = 0;
        for (std::size_t i = 0; i < T; ++i)
            for (std::size_t j = i; j < T; ++j, ++pair) {
                const double a = y[i], b = y[j];
                mixed[pair * 4 + 0] += a * b;
                mixed[pair * 4 + 1] += a * a * b;
                mixed[pair * 4 + 2] += a * b * b;
                mixed[pair * 4 + 3] += a * a * b * b;
            }
        for (std::size_t i = 0; i < T; ++i)
            for (std::size_t k = 0; k < U; ++k) {
                const double c = std::cos(L.cf_u[k] * x[i]), s = std::sin(L.cf_u[k] * x[i]);
                CompensatedSum* e = &cf[(i * U + k) * 4];
                e[0] += c;
                e[1] += s;
                e[2] += c * c;
                e[3] += s * s;
            }
        for (std::size_t g = 0; g < G; ++g) {
            CompensatedSum p;
            for (std::size_t o = 0; o < L.origin_idx.size(); ++o) p += x[L.origin_idx[o]] * x[L.lag_idx[g][o]];
            const double v = p.value() / static_cast<double>(L.origin_idx.size());
            lag[g * 2] += v;
            lag[g * 2 + 1] += v * v;
        }
    }

    void merge(const Accumulator& o) {
        count += o.count;
        for (std::size_t i = 0; i < power.size(); ++i) power[i].merge(o.power[i]);
        for (std::size_t i = 0; i < mixed.size(); ++i) mixed[i].merge(o.mixed[i]);
        for (std::size_t i = 0; i < cf.size(); ++i) cf[i].merge(o.cf[i]);
        for (std::size_t i = 0; i < lag.size(); ++i) lag[i].merge(o.lag[i]);
    }
};

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t T) {
    if (i > j) std::swap(i, j);
    return i * T - i * (i - 1) / 2 + (j - i);
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

EnsembleStats finish(const Accumulator& A, const std::vector<double>& shift, const Layout& L) {
    EnsembleStats S;
    const double M = static_cast<double>(A.count);
    const std::size_t T = A.T;
    S.replicates = A.count;
    S.times = L.times;
    S.cf_u = L.cf_u;
    S.lags = L.lags;
    std::vector<double> m(T);  // mean of shifted values
    std::vector<std::array<double, 7>> central(T);
    for (std::size_t i = 0; i < T; ++i) {
        double raw[7];
        raw[0] = 1.0;
        for (int k = 1; k <= 6; ++k) raw[k] = A.power[i * 6 + k - 1].value() / M;
        m[i] = raw[1];
        for (int k = 0; k <= 6; ++k) {
            double acc = 0.0;
            for (int j = 0; j <= k; ++j) acc += binom(k, j) * raw[j] * std::pow(-m[i], k - j);
            central[i][k] = acc;
        }
        const double mu2 = std::max(central[i][2], 0.0), mu3 = central[i][3], mu4 = central[i][4],
                     mu6 = central[i][6];
        S.mean.push_back(shift[i] + m[i]);
        S.mean_se.push_back(std::sqrt(mu2 * M / (M - 1.0) / M));
        S.variance.push_back(mu2 * M / (M - 1.0));
        S.variance_se.push_back(std::sqrt(std::max(mu4 - mu2 * mu2, 0.0) / M));
        S.third.push_back(mu3);
        S.third_se.push_back(
            std::sqrt(std::max(mu6 - mu3 * mu3 - 6.0 * mu4 * mu2 + 9.0 * mu2 * mu2 * mu2, 0.0) / M));
    }
    S.covariance.assign(T * T, 0.0);
    S.covariance_se.assign(T * T, 0.0);
    for (std::size_t i = 0; i < T; ++i)
        for (std::size_t j = i; j < T; ++j) {
            const std::size_t p = pair_index(i, j, T);
            const double xy = A.mixed[p * 4].value() / M, x2y = A.mixed[p * 4 + 1].value() / M,
                         xy2 = A.mixed[p * 4 + 2].value() / M, x2y2 = A.mixed[p * 4 + 3].value() / M;
            const double a = m[i], b = m[j];
            const double ex2 = central[i][2] + a * a, ey2 = central[j][2] + b * b;
            const double cv = xy - a * b;
            const double fourth = x2y2 - 2.0 * b * x2y + b * b * ex2 - 2.0 * a * xy2 + 4.0 * a * b * xy -
                                  2.0 * a * b * b * a + a * a * ey2 - 2.0 * a * a * b * b + a * a * b * b;
            const double value = cv * M / (M - 1.0);
            const double se = std::sqrt(std::max(fourth - cv * cv, 0.0) / M);
            S.covariance[i * T + j] = S.covariance[j * T + i] = value;
            S.covariance_se[i * T + j] = S.covariance_se[j * T + i] = se;
        }
    const std::size_t U = A.U;
    for (std::size_t i = 0; i < T; ++i)
        for (std::size_t k = 0; k < U; ++k) {
            const CompensatedSum* e = &A.cf[(i * U + k) * 4];
            const double c = e[0].value() / M, s = e[1].value() / M;
            const double c2 = e[2].value() / M, s2 = e[3].value() / M;
            S.cf.emplace_back(c, s);
            S.cf_se_re.push_back(std::sqrt(std::max(c2 - c * c, 0.0) / (M - 1.0)));
            S.cf_se_im.push_back(std::sqrt(std::max(s2 - s * s, 0.0) / (M - 1.0)));
        }
    for (std::size_t g = 0; g < A.G; ++g) {
        const double p = A.lag[g * 2].value() / M, p2 = A.lag[g * 2 + 1].value() / M;
        double correction = 0.0;
        for (std::size_t o = 0; o < L.origin_idx.size(); ++o)
            correction += S.mean[L.origin_idx[o]] * S.mean[L.lag_idx[g][o]];
        correction /= static_cast<double>(L.origin_idx.size());
        S.lag_autocov.push_back(p - correction);
        S.lag_autocov_se.push_back(std::sqrt(std::max(p2 - p * p, 0.0) / (M - 1.0)));
    }
    return S;
}

struct Plan {
    Layout layout;
    double t_min = 0.0, t_max = 0.0;
    std::vector<Observer> observers;
};

Observer make_observer(const EnsembleConfig& c, const FlpParams& flp, const std::vector<double>& times) {
    if (!c.floup) {
        auto kernel = std::make_shared<FlpGridKernel>(flp, std::span<const double>(times));
        if (kernel->nodes().size() != times.size())
            throw GridError("two observation times share a grid node at resolution n = " + std::to_string(flp.n));
        return [kernel](const JumpTrain& train) { return kernel->evaluate_jumps(train); };
    }
    auto kernel = std::make_shared<FloupObservationKernel>(flp, c.floup->lambda, -c.floup->past_cutoff,
                                                           std::span<const double>(times));
    if (!c.model) return [kernel](const JumpTrain& train) { return kernel->evaluate_jumps(train); };
    auto triple = std::make_shared<ProperTriple>(catalog(*c.model, c.model_params));
    if (std::abs(triple->lambda - c.floup->lambda) > 1e-12 * triple->lambda)
        throw ConfigError("model " + *c.model + " has friction coefficient " + std::to_string(triple->lambda) +
                          " but the FLOUP rate is " + std::to_string(c.floup->lambda));
    return [kernel, triple](const JumpTrain& train) {
        std::vector<double> v = kernel->evaluate_jumps(train);
        for (double& x : v) x = triple->f(x);
        return v;
    };
}

std::vector<EnsembleStats> run_plan(const EnsembleConfig& c, const Plan& plan) {
    const Layout& L = plan.layout;
    const std::size_t T = L.times.size(), U = L.cf_u.size(), G = L.lags.size();
    const std::size_t V = plan.observers.size();
    auto simulate = [&](std::size_t r) {
        LevyDriverSpec spec = c.driver;
        spec.seed = derive_seed(c.seed, r);
        const JumpTrain train = sample_jump_train(spec, plan.t_min, plan.t_max);
        std::vector<std::vector<double>> out;
        for (const auto& obs : plan.observers) out.push_back(obs(train));
        return out;
    };

    // Pilot shift keeps the power sums well conditioned.
    std::vector<std::vector<double>> shift(V, std::vector<double>(T, 0.0));
    const std::size_t pilot = std::min(kPilot, c.replicates);
    for (std::size_t r = 0; r < pilot; ++r) {
        const auto vals = simulate(r);
        for (std::size_t v = 0; v < V; ++v)
            for (std::size_t i = 0; i < T; ++i) shift[v][i] += vals[v][i] / static_cast<double>(pilot);
    }

    const std::size_t chunks = (c.replicates + kChunk - 1) / kChunk;
    std::vector<std::vector<Accumulator>> parts(chunks);
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(chunks);
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= chunks) return;
            try {
                std::vector<Accumulator> acc(V, Accumulator(T, U, G));
                const std::size_t end = std::min(c.replicates, (k + 1) * kChunk);
                for (std::size_t r = k * kChunk; r < end; ++r) {
                    const auto vals = simulate(r);
                    for (std::size_t v = 0; v < V; ++v) {
                        for (double x : vals[v])
                            if (!std::isfinite(x))
                                throw NumericalError("non-finite value in replicate " + std::to_string(r));
                        acc[v].add(vals[v], shift[v], L);
                    }
                }
                parts[k] = std::move(acc);
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        }
    };
    const unsigned nthreads = std::min<unsigned>(worker_threads(c.threads), static_cast<unsigned>(chunks));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw NumericalError(e);

    std::vector<EnsembleStats> out;
    for (std::size_t v = 0; v < V; ++v) {
        Accumulator total(T, U, G);
        for (std::size_t k = 0; k < chunks; ++k) total.merge(parts[k][v]);
        out.push_back(finish(total, shift[v], L));
    }
    return out;
}

Plan make_plan(const EnsembleConfig& c, const std::vector<FlpParams>& resolutions) {
    c.validate();
    Plan plan;
    plan.layout = make_layout(c);
    const double top = std::max(0.0, plan.layout.times.back());
    plan.t_min = 0.0;
    plan.t_max = top;
    for (const auto& flp : resolutions) {
        plan.t_min = std::min(plan.t_min, flp.window_start());
        plan.t_max = std::max(plan.t_max, top + flp.dt());
        plan.observers.push_back(make_observer(c, flp, plan.layout.times));
    }
    return plan;
}

}  // namespace

void EnsembleConfig::validate() const {
    if (replicates < 2) throw ConfigError("ensemble needs at least 2 replicates");
    driver.validate();
    flp.validate();
    if (floup) floup->validate();
    if (model && !floup) throw ConfigError("a model needs a FLOUP rate");
    if (times.empty() && origins.empty()) throw ConfigError("ensemble needs observation times");
    if (origins.empty() != lags.empty()) throw ConfigError("lag table needs both origins and lags");
    for (double t : times)
        if (!std::isfinite(t)) throw ConfigError("observation times must be finite");
}

std::size_t EnsembleStats::index_of(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9 * (1.0 + std::abs(t))) return i;
    throw ConfigError("time " + std::to_string(t) + " was not observed");
}

double EnsembleStats::cov(double t, double s) const { return covariance[index_of(t) * times.size() + index_of(s)]; }

double EnsembleStats::cov_se(double t, double s) const {
    return covariance_se[index_of(t) * times.size() + index_of(s)];
}

unsigned worker_threads(unsigned requested) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FLEVY_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

EnsembleStats run_ensemble(const EnsembleConfig& config) {
    return run_plan(config, make_plan(config, {config.flp})).front();
}

std::pair<EnsembleStats, EnsembleStats> run_refinement_pair(const EnsembleConfig& config, int refine) {
    if (refine < 2) throw ConfigError("refinement factor must be at least 2");
    FlpParams fine = config.flp;
    fine.n = config.flp.n * refine;
    auto out = run_plan(config, make_plan(config, {config.flp, fine}));
    return {out[0], out[1]};
}

CovarianceComparison compare_covariance(const EnsembleStats& stats, const AnalyticReference& ref,
                                        const std::vector<std::pair<double, double>>& pairs,
                                        const EnsembleStats* refined, double bias_rate) {
    if (pairs.empty()) throw ConfigError("no covariance pairs requested");
    if (refined && !(bias_rate > 0.0)) throw ConfigError("bias rate must be positive");
    CovarianceComparison rep;
    rep.all_pass = true;
    for (const auto& [t, s] : pairs) {
        CovarianceRow row;
        row.t = t;
        row.s = s;
        row.empirical = stats.cov(t, s);
        row.se = stats.cov_se(t, s);
        row.analytic = ref.source == AnalyticSource::FlpCovariance
                           ? flp_covariance(t, s, ref.d, ref.m2)
                           : floup_autocovariance(t - s, ref.d, ref.lambda, ref.m2);
        if (refined) row.bias = std::abs(row.empirical - refined->cov(t, s)) / (1.0 - std::pow(2.0, -bias_rate));
        row.z = row.se > 0.0 ? (row.empirical - row.analytic) / row.se : 0.0;
        row.pass = std::abs(row.empirical - row.analytic) <= 3.0 * row.se + row.bias;
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

SlopeFit lrd_slope(const std::vector<double>& lags, const std::vector<double>& autocov, double s_min, double s_max) {
    if (lags.size() != autocov.size()) throw ConfigError("lags and autocovariances differ in length");
    auto fit = [&](double lo, double hi, bool stop_at_floor) -> std::optional<SlopeFit> {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < lags.size(); ++i) {
            if (lags[i] < lo || lags[i] > hi) continue;
            if (!(autocov[i] > 0.0)) {
                if (stop_at_floor) break;
                return std::nullopt;
            }
            x.push_back(std::log(lags[i]));
            y.push_back(std::log(autocov[i]));
        }
        if (x.size() < 5) return std::nullopt;
        const double n = static_cast<double>(x.size());
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
        SlopeFit f;
        f.slope = sxy / sxx;
        f.intercept = my - f.slope * mx;
        double rss = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - f.intercept - f.slope * x[i];
            rss += e * e;
        }
        f.stderr_ = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
        f.points = x.size();
        f.s_min = lo;
        f.s_max = hi;
        return f;
    };
    if (!std::is_sorted(lags.begin(), lags.end())) throw ConfigError("lags must be ascending");
    if (auto f = fit(s_min, s_max, false)) return *f;
    // Noise floor: widen the window towards short lags and stop at the
    // first non-positive estimate.
    if (auto f = fit(0.5 * s_min, s_max, true)) return *f;
    throw NumericalError("autocovariance is non-positive or too sparse in the lag window [" + std::to_string(s_min) +
                         ", " + std::to_string(s_max) + "]");
}

SlopeFit lrd_slope(const EnsembleStats& stats, double s_min, double s_max) {
    return lrd_slope(stats.lags, stats.lag_autocov, s_min, s_max);
}

std::vector<std::pair<double, double>> long_time_ratio(const SamplePath& path, double d, double alpha,
                                                       const std::vector<double>& ladder) {
    if (!(alpha > d + 0.5)) throw ConfigError("long-time ratio needs alpha > d + 1/2");
    path.validate();
    std::vector<std::pair<double, double>> out;
    for (double T : ladder) {
        if (!(T > 0.0)) throw ConfigError("ladder entries must be positive");
        if (path.t0 > -T + 1e-9 * T) throw GridError("path does not reach -" + std::to_string(T));
        double best = 0.0;
        for (std::size_t i = 0; i < path.size(); ++i) {
            const double t = path.time(i);
            if (t < -T - 1e-9 * T || t > -0.5 * T + 1e-9 * T) continue;
            best = std::max(best, std::abs(path.values[i]) / std::pow(std::abs(t), alpha));
        }
        out.emplace_back(T, best);
    }
    return out;
}

SymmetryReport symmetry_test(const EnsembleStats& fwd, const EnsembleStats& bwd) {
    if (fwd.times.size() != bwd.times.size()) throw ConfigError("symmetry test needs matching time sets");
    SymmetryReport rep;
    rep.all_pass = true;
    auto z = [](double a, double b, double sa, double sb) {
        const double se = std::sqrt(sa * sa + sb * sb);
        return se > 0.0 ? (a - b) / se : (a == b ? 0.0 : INFINITY);
    };
    for (std::size_t i = 0; i < fwd.times.size(); ++i) {
        const std::size_t j = bwd.index_of(-fwd.times[i]);
        SymmetryRow row;
        row.t = fwd.times[i];
        row.mean_z = z(fwd.mean[i], -bwd.mean[j], fwd.mean_se[i], bwd.mean_se[j]);
        row.variance_z = z(fwd.variance[i], bwd.variance[j], fwd.variance_se[i], bwd.variance_se[j]);
        row.third_z = z(fwd.third[i], -bwd.third[j], fwd.third_se[i], bwd.third_se[j]);
        row.pass = std::abs(row.mean_z) <= 3.0 && std::abs(row.variance_z) <= 3.0 && std::abs(row.third_z) <= 3.0;
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace flevy
