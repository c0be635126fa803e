#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "flevy/errors.hpp"
#include "flevy/floup.hpp"

using namespace flevy;

namespace {

SamplePath grid_fn(double t0, double t1, double h, double (*fn)(double)) {
    SamplePath p{t0, h, {}};
    const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / h));
    for (std::size_t i = 0; i <= steps; ++i) p.values.push_back(fn(p.time(i)));
    return p;
}

// int_a^t e^{-lambda(t-s)} cos s ds
double ibp_sine(double t, double a, double lambda) {
    return (lambda * std::cos(t) + std::sin(t) - std::exp(-lambda * (t - a)) * (lambda * std::cos(a) + std::sin(a))) /
           (lambda * lambda + 1.0);
}

struct Moments {
    double n = 0, s1 = 0, s2 = 0, s4 = 0;
    void add(double x) {
        n += 1;
        s1 += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    double mean() const { return s1 / n; }
    double var() const { return s2 / n - mean() * mean(); }
    double mean_se() const { return std::sqrt(var() / n); }
    double var_se() const { return std::sqrt((s4 / n - (s2 / n) * (s2 / n)) / n); }
};

}  // namespace

TEST_CASE("parameters and the past cutoff") {
    CHECK_THROWS_AS((FloupParams{0.0, -10.0}.validate()), ConfigError);
    CHECK_THROWS_AS((FloupParams{1.0, 0.0}.validate()), ConfigError);
    CHECK_NOTHROW((FloupParams{1.0, -1.0}.validate()));
    for (double d : {0.1, 0.25, 0.4})
        for (double lambda : {0.5, 1.0, 3.0}) {
            const double a = choose_past_cutoff(d, lambda, 1e-8);
            auto bound = [&](double x) { return std::exp(lambda * x) * std::pow(-x, d + 0.6); };
            CHECK(a < 0.0);
            CHECK(bound(a) <= 1e-8 * (1 + 1e-9));
            CHECK(bound(a * (1 - 1e-6)) > 1e-8 * (1 - 1e-6));
        }
    CHECK(choose_past_cutoff(0.25, 1.0, 1e-12) < choose_past_cutoff(0.25, 1.0, 1e-8));
}

TEST_CASE("integration-by-parts FLOUP against a closed form") {
    const double a = -3.0;
    double prev = 0.0;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const SamplePath L = grid_fn(a, 2.0, h, [](double t) { return std::sin(t); });
        const SamplePath x = floup_via_ibp(L, FloupParams{1.0, a}, -1.0, 2.0);
        CHECK(x.t0 == doctest::Approx(-1.0));
        double err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x.values[i] - ibp_sine(x.time(i), a, 1.0)));
        CHECK(err < h * h);
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
        prev = err;
    }

    SamplePath zero = grid_fn(-5.0, 1.0, 0.01, [](double) { return 0.0; });
    for (double v : floup_via_ibp(zero, FloupParams{2.0, -5.0}, 0.0, 1.0).values) CHECK(v == 0.0);

    const SamplePath L = grid_fn(-2.0, 1.0, 0.01, [](double t) { return t; });
    CHECK_THROWS_AS(floup_via_ibp(L, FloupParams{1.0, -4.0}, 0.0, 1.0), GridError);
}

TEST_CASE("stiff friction: the FLOUP tracks the local slope") {
    const double lambda = 1e3, a = -0.05, h = 1e-5;
    const SamplePath L = grid_fn(a, 1.0, h, [](double t) { return std::sin(t); });
    const SamplePath x = floup_via_ibp(L, FloupParams{lambda, a}, 0.0, 1.0);
    for (std::size_t i = 0; i < x.size(); i += 997) {
        CHECK(std::abs(x.values[i]) <= 1.0 / lambda);
        CHECK(std::abs(x.values[i] - ibp_sine(x.time(i), a, lambda)) < 1e-2 / lambda);
    }
}

TEST_CASE("explicit Euler") {
    const SamplePath L = grid_fn(0.0, 3.0, 0.01, [](double t) { return std::sin(3 * t) + t; });
    const SamplePath free = euler_langevin(L, 0.0, 1.0, 0.4);
    const std::size_t j = L.require_node(1.0);
    for (std::size_t i = 0; i < free.size(); ++i)
        CHECK(free.values[i] == doctest::Approx(0.4 + L.values[j + i] - L.values[j]).epsilon(1e-13));

    const SamplePath zero = grid_fn(0.0, 3.0, 0.01, [](double) { return 0.0; });
    const SamplePath decay = euler_langevin(zero, 2.0, 0.5, 1.5);
    for (std::size_t i = 0; i < decay.size(); ++i)
        CHECK(decay.values[i] == doctest::Approx(1.5 * std::pow(1 - 0.02, static_cast<double>(i))).epsilon(1e-12));
    CHECK(std::abs(decay.values.back() - 1.5 * std::exp(-2.0 * 2.5)) < 5e-3);

    CHECK_THROWS_AS(euler_langevin(L, 1.0, 0.005, 0.0), GridError);
    CHECK_THROWS_AS(euler_langevin(L, -1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("Euler and integration by parts agree at first order") {
    const auto spec = LevyDriverSpec::compensated_poisson(1.0, 4);
    const double lambda = 1.0, tau = 0.0, horizon = 5.0;
    double prev = 0.0;
    for (int n : {25, 50, 100}) {
        const FlpParams fp{0.25, n, 1.5};
        const FloupParams op{lambda, -30.0};
        const JumpTrain train = sample_jump_train(spec, fp.window_start() - 1.0, horizon + 1.0);
        const SamplePath flp = simulate_flp(train, fp, -30.0, horizon);
        const SamplePath ibp = floup_via_ibp(flp, op, tau, horizon);
        const SamplePath eul = euler_langevin(flp, lambda, tau, ibp.values[0]);
        double gap = 0.0;
        for (std::size_t i = 0; i < ibp.size(); ++i) gap = std::max(gap, std::abs(ibp.values[i] - eul.values[i]));
        if (prev > 0.0) CHECK(prev / gap == doctest::Approx(2.0).epsilon(0.2));
        prev = gap;
    }
}

TEST_CASE("Ornstein-Uhlenbeck operator") {
    const SamplePath L = grid_fn(-20.0, 5.0, 0.01, [](double t) { return std::cos(2 * t) * std::exp(0.05 * t); });
    const double lambda = 1.3;
    const SamplePath x = floup_via_ibp(L, FloupParams{lambda, -20.0}, -2.0, 5.0);
    const double tau = 0.5;
    const std::size_t k = x.require_node(tau);
    const SamplePath same = ou_operator(x, lambda, tau, x.values[k]);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(same.values[i] == doctest::Approx(x.values[i]).epsilon(1e-14));

    const SamplePath l1 = ou_operator(x, lambda, tau, 0.7), l2 = ou_operator(x, lambda, tau, -0.3);
    CHECK(l1.values[k] == 0.7);
    CHECK(l2.values[k] == -0.3);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double expect = std::exp(-lambda * (x.time(i) - tau)) * 1.0;
        CHECK(std::abs((l1.values[i] - l2.values[i]) - expect) <= 1e-12 * expect + 1e-15);
    }
    CHECK_THROWS_AS(ou_operator(x, lambda, 0.505, 0.0), GridError);
}

TEST_CASE("Langevin residual of the Euler path is exactly the trapezoid defect") {
    const SamplePath L = grid_fn(0.0, 4.0, 0.02, [](double t) { return std::sin(5 * t) + 0.3 * t * t; });
    const double lambda = 0.8;
    const SamplePath X = euler_langevin(L, lambda, 0.0, 0.25);
    const LangevinResidual r = langevin_residual(X, L, lambda);
    double worst = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double expect = 0.5 * lambda * X.dt * (X.values[i] - X.values[0]);
        CHECK(std::abs(r.profile.values[i] - expect) < 1e-12);
        worst = std::max(worst, std::abs(expect));
    }
    CHECK(r.max_residual == doctest::Approx(worst).epsilon(1e-9));

    // closed-form FLOUP for L = sin solves the equation up to quadrature error
    const double a = -10.0;
    double prev = 0.0;
    for (double h : {0.02, 0.01, 0.005}) {
        const SamplePath S = grid_fn(a, 3.0, h, [](double t) { return std::sin(t); });
        SamplePath exact = S.slice(0.0, 3.0);
        for (std::size_t i = 0; i < exact.size(); ++i) exact.values[i] = ibp_sine(exact.time(i), a, 1.0);
        const double res = langevin_residual(exact, S, 1.0).max_residual;
        if (prev > 0.0) CHECK(prev / res == doctest::Approx(4.0).epsilon(0.1));
        prev = res;
    }
}

TEST_CASE("Gripenberg-Norros identity") {
    CHECK(gripenberg_norros(1.0, 0.0, 0.25) == doctest::Approx(5.2441).epsilon(1e-4));
    CHECK(gripenberg_norros(2.0, 0.0, 0.25) == doctest::Approx(3.7081).epsilon(1e-4));
    const double exact = boost::math::tgamma(0.25) * boost::math::tgamma(0.5) / boost::math::tgamma(0.75);
    CHECK(gripenberg_norros(1.0, 0.0, 0.25) == doctest::Approx(exact).epsilon(1e-13));
    for (double d : {0.1, 0.25, 0.4}) {
        CHECK(gripenberg_norros(0.3, 2.1, d) == gripenberg_norros(2.1, 0.3, d));
        CHECK(gripenberg_norros_quadrature(1.7, -0.4, d) ==
              doctest::Approx(gripenberg_norros(1.7, -0.4, d)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(gripenberg_norros(1.0, 1.0, 0.25), NumericalError);
}

TEST_CASE("large-lag autocovariance expansion") {
    CHECK(floup_autocov_asymptotic(10.0, 1, 0.25, 1.0, 1.0) == doctest::Approx(0.12616).epsilon(1e-4));
    for (double d : {0.1, 0.3})
        for (double s : {3.0, 20.0}) {
            const double c = boost::math::tgamma(1 - 2 * d) * 2.0 /
                             (boost::math::tgamma(d) * boost::math::tgamma(1 - d));
            CHECK(floup_autocov_asymptotic(s, 1, d, 1.5, 2.0) ==
                  doctest::Approx(c / (1.5 * 1.5) * std::pow(s, 2 * d - 1)).epsilon(1e-12));
        }
    auto gap = [](double s) {
        return std::abs(floup_autocov_asymptotic(s, 2, 0.25, 1.0, 1.0) - floup_autocov_asymptotic(s, 1, 0.25, 1.0, 1.0));
    };
    CHECK(gap(50.0) / gap(25.0) == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-10));
    CHECK_THROWS_AS(floup_autocov_asymptotic(0.0, 1, 0.25, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(floup_autocov_asymptotic(1.0, 0, 0.25, 1.0, 1.0), ConfigError);

    // the expansion approaches the exact autocovariance at large lags
    const double exact = floup_autocovariance(40.0, 0.25, 1.0, 1.0);
    CHECK(std::abs(floup_autocov_asymptotic(40.0, 3, 0.25, 1.0, 1.0) / exact - 1.0) < 1e-3);
    CHECK(std::abs(floup_autocov_asymptotic(40.0, 3, 0.25, 1.0, 1.0) - exact) <
          std::abs(floup_autocov_asymptotic(40.0, 1, 0.25, 1.0, 1.0) - exact));
}

TEST_CASE("covariance of integrals against the FLP") {
    auto zero = [](double) { return 0.0; };
    auto ind = [](double t) { return t >= -1.0 ? 1.0 : 0.0; };
    auto wave = [](double t) { return std::exp(t) * std::cos(3 * t); };
    CHECK(cov_rs_integrals(zero, wave, 0.25, 1.0, 1e-10, -3.0, 0.0) == 0.0);
    auto ramp = [](double t) { return std::exp(2 * t) * (1 + t * t); };
    const double fg = cov_rs_integrals(ramp, wave, 0.3, 1.0, 1e-10, -3.0, 0.0);
    const double gf = cov_rs_integrals(wave, ramp, 0.3, 1.0, 1e-10, -3.0, 0.0);
    CHECK(fg == doctest::Approx(gf).epsilon(1e-8));
    CHECK(cov_rs_integrals(wave, wave, 0.3, 1.0, 1e-10, -3.0, 0.0) >= 0.0);

    // indicator of [-1, 0] integrates to L^d_0 - L^d_{-1}, whose variance is Var L^d_1
    for (double d : {0.1, 0.25, 0.4}) {
        const double v = cov_rs_integrals(ind, ind, d, 2.0, 1e-10, -1.0, 0.0);
        CHECK(v == doctest::Approx(rs_covariance_constant(d, 2.0) * 2.0 / (2 * d * (2 * d + 1))).epsilon(1e-7));
        CHECK(v == doctest::Approx(flp_covariance(1.0, 1.0, d, 2.0)).epsilon(1e-7));
    }

    // the FLOUP is the integral of e^{-lambda(t - .)}
    for (double d : {0.1, 0.25, 0.4}) {
        auto k = [](double s) { return std::exp(1.0 * s); };
        const double v = cov_rs_integrals(k, k, d, 1.0, 1e-10);
        CHECK(v == doctest::Approx(floup_variance(d, 1.0, 1.0)).epsilon(1e-6));
        CHECK(floup_autocovariance(0.0, d, 1.0, 1.0) == doctest::Approx(floup_variance(d, 1.0, 1.0)).epsilon(1e-6));
    }
    CHECK(floup_autocovariance(1.0, 0.25, 1.0, 1.0) < floup_variance(0.25, 1.0, 1.0));
}

TEST_CASE("observation kernel reproduces the dense construction") {
    const auto spec = LevyDriverSpec::compensated_poisson(1.0, 21);
    const FlpParams fp{0.25, 20, 1.5};
    const double span = 25.0;
    const std::vector<double> times{0.0, 1.0, 2.5};
    const FloupObservationKernel kern(fp, 1.0, span, times);
    const JumpTrain train = sample_jump_train(spec, fp.window_start() - 1.0, 4.0);
    const auto fast = kern.evaluate_jumps(train);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const SamplePath dense = simulate_floup(train, fp, FloupParams{1.0, times[i] - span}, times[i], times[i]);
        CHECK(fast[i] == doctest::Approx(dense.values[0]).epsilon(1e-10));
    }
    CHECK_THROWS_AS(FloupObservationKernel(fp, 1.0, 200.0, times), GridError);
    CHECK_THROWS_AS(FloupObservationKernel(fp, 1.0, 0.0, times), ConfigError);
}

TEST_CASE("Monte Carlo: stationary moments") {
    const FlpParams fp{0.25, 20, 2.0};
    const double lambda = 1.0, span = -choose_past_cutoff(0.25, lambda);
    const std::vector<double> times{0.0, 1.0, 5.0};
    const FloupObservationKernel kern(fp, lambda, span, times);
    std::vector<Moments> mom(times.size());
    for (std::uint64_t r = 0; r < 10000; ++r) {
        const auto spec = LevyDriverSpec::compensated_poisson(1.0, derive_seed(31, r));
        const auto x = kern.evaluate_jumps(sample_jump_train(spec, fp.window_start() - 1.0, 6.0));
        for (std::size_t i = 0; i < x.size(); ++i) mom[i].add(x[i]);
    }
    const double var = floup_variance(0.25, lambda, 1.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CAPTURE(times[i]);
        CHECK(std::abs(mom[i].mean()) < 3.0 * mom[i].mean_se());
        CHECK(std::abs(mom[i].var() - var) < 3.0 * mom[i].var_se());
        for (std::size_t j = 0; j < i; ++j) {
            const double se = std::hypot(mom[i].var_se(), mom[j].var_se());
            CHECK(std::abs(mom[i].var() - mom[j].var()) < 3.0 * se);
        }
    }
}
