#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "flevy/errors.hpp"
#include "flevy/levy_driver.hpp"

using namespace flevy;

TEST_CASE("driver spec validation") {
    CHECK_THROWS_AS(LevyDriverSpec::compensated_poisson(0.0).validate(), ConfigError);
    CHECK_THROWS_AS(LevyDriverSpec::compensated_poisson(-1.0).validate(), ConfigError);
    CHECK_THROWS_AS(LevyDriverSpec::compound_poisson(1.0, {}).validate(), ConfigError);
    CHECK_THROWS_AS(LevyDriverSpec::compound_poisson(1.0, {{1.0, 0.5}, {2.0, 0.4}}).validate(), ConfigError);
    CHECK_THROWS_AS(LevyDriverSpec::compound_poisson(1.0, {{1.0, 1.5}, {2.0, -0.5}}).validate(), ConfigError);
    // only a zero jump: no second moment
    CHECK_THROWS_AS(LevyDriverSpec::compound_poisson(1.0, {{0.0, 1.0}}).validate(), ConfigError);
    CHECK_NOTHROW(LevyDriverSpec::compound_poisson(2.0, {{2.0, 0.5}, {-1.0, 0.5}}).validate());
}

TEST_CASE("second moment") {
    CHECK(second_moment(LevyDriverSpec::compensated_poisson(1.0)) == 1.0);
    CHECK(second_moment(LevyDriverSpec::compensated_poisson(2.5)) == 2.5);
    CHECK(second_moment(LevyDriverSpec::compound_poisson(1.0, {{2.0, 0.5}, {-2.0, 0.5}})) == doctest::Approx(4.0));
}

TEST_CASE("compensation makes the driver mean zero") {
    const auto spec = LevyDriverSpec::compound_poisson(3.0, {{2.0, 0.25}, {-1.0, 0.75}});
    CHECK(spec.compensation_rate() == doctest::Approx(3.0 * (0.5 - 0.75)));
    const auto unit = LevyDriverSpec::compensated_poisson(1.5);
    CHECK(unit.compensation_rate() == 1.5);
}

TEST_CASE("characteristic exponent") {
    const auto spec = LevyDriverSpec::compensated_poisson(1.0);
    CHECK(psi_L(spec, 0.0) == std::complex<double>(0.0, 0.0));
    const auto at_pi = psi_L(spec, std::numbers::pi);
    CHECK(at_pi.real() == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(at_pi.imag() == doctest::Approx(-std::numbers::pi).epsilon(1e-14));

    const auto mixed = LevyDriverSpec::compound_poisson(2.0, {{1.5, 0.3}, {-0.5, 0.7}});
    for (double u = -10.0; u <= 10.0; u += 0.37) {
        const auto a = psi_L(mixed, u), b = psi_L(mixed, -u);
        CHECK(a.real() == doctest::Approx(b.real()).epsilon(1e-14));
        CHECK(a.imag() == doctest::Approx(-b.imag()).epsilon(1e-14));
        CHECK(a.real() <= 0.0);
        for (double T : {0.0, 0.5, 3.0}) CHECK(std::abs(std::exp(T * a)) <= 1.0);
    }
}

TEST_CASE("two-sided path: zero at the origin, reproducible, validated") {
    const auto spec = LevyDriverSpec::compensated_poisson(1.0, 77);
    const SamplePath p = sample_two_sided_levy(spec, -10.0, 10.0, 0.01);
    CHECK(p.values[p.require_node(0.0)] == 0.0);
    CHECK(p.t0 == doctest::Approx(-10.0));
    CHECK(p.t_end() == doctest::Approx(10.0));
    const SamplePath q = sample_two_sided_levy(spec, -10.0, 10.0, 0.01);
    CHECK(p.values == q.values);
    auto other = spec;
    other.seed = 78;
    CHECK(sample_two_sided_levy(other, -10.0, 10.0, 0.01).values != p.values);

    CHECK_THROWS_AS(sample_two_sided_levy(spec, 0.0, 10.0, 0.01), ConfigError);
    CHECK_THROWS_AS(sample_two_sided_levy(spec, -1.0, 0.0, 0.01), ConfigError);
    CHECK_THROWS_AS(sample_two_sided_levy(spec, -1.0, 1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(sample_two_sided_levy(spec, -1.0, 1.0, 1e-3, 100), SizingError);
}

TEST_CASE("increments: compensated jumps per cell") {
    const auto spec = LevyDriverSpec::compound_poisson(2.0, {{1.0, 0.5}, {-3.0, 0.5}}, 5);
    const JumpTrain train = sample_jump_train(spec, -5.0, 5.0);
    CHECK(std::is_sorted(train.times.begin(), train.times.end()));
    const double dt = 0.1;
    const SamplePath p = bin_jump_train(train, dt);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        double jumps = 0.0;
        for (std::size_t k = 0; k < train.count(); ++k) {
            const double cell = std::floor(train.times[k] / dt);
            if (std::abs(cell * dt - p.time(i)) < 1e-9) jumps += train.sizes[k];
        }
        CHECK(p.values[i + 1] - p.values[i] == doctest::Approx(jumps - train.compensation_rate * dt).epsilon(1e-12));
    }
}

TEST_CASE("Monte Carlo: Var L(1) = theta and the mean vanishes") {
    const std::size_t M = 10000;
    const double theta = 1.0;
    double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
    for (std::size_t r = 0; r < M; ++r) {
        const auto spec = LevyDriverSpec::compensated_poisson(theta, derive_seed(2024, r));
        const SamplePath p = sample_two_sided_levy(spec, -10.0, 10.0, 0.01);
        const double x = p.values[p.require_node(1.0)];
        sum += x;
        sum2 += x * x;
        sum4 += x * x * x * x;
    }
    const double mean = sum / M;
    const double m2 = sum2 / M;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(theta / M));
    const double var = m2 - mean * mean;
    const double se = std::sqrt((sum4 / M - m2 * m2) / M);
    CHECK(std::abs(var - theta) <= 3.0 * se);
}

TEST_CASE("binned counts are Poisson(theta dt) with independent sides") {
    const auto spec = LevyDriverSpec::compensated_poisson(4.0, 3);
    const JumpTrain train = sample_jump_train(spec, -2000.0, 2000.0);
    std::size_t neg = 0, pos = 0;
    for (double t : train.times) (t < 0 ? neg : pos)++;
    // counts on each side ~ Poisson(8000)
    CHECK(std::abs(static_cast<double>(neg) - 8000.0) < 4.0 * std::sqrt(8000.0));
    CHECK(std::abs(static_cast<double>(pos) - 8000.0) < 4.0 * std::sqrt(8000.0));
    // per-cell variance of counts equals the mean for a Poisson law
    const double dt = 0.5;
    std::vector<int> counts(8000, 0);
    for (double t : train.times) {
        const auto k = static_cast<long long>(std::floor(t / dt)) + 4000;
        if (k >= 0 && k < 8000) ++counts[static_cast<std::size_t>(k)];
    }
    double m = 0, v = 0;
    for (int c : counts) m += c;
    m /= counts.size();
    for (int c : counts) v += (c - m) * (c - m);
    v /= counts.size() - 1;
    CHECK(m == doctest::Approx(2.0).epsilon(0.05));
    CHECK(v / m == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("derived seeds are distinct and deterministic") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(9, i));
    CHECK(seen.size() == 10000);
    CHECK(derive_seed(9, 17) == derive_seed(9, 17));
    CHECK(derive_seed(9, 17) != derive_seed(10, 17));
}
