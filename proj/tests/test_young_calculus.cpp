#include <doctest.h>

#include <cmath>
#include <random>

#include "flevy/errors.hpp"
#include "flevy/frac_levy.hpp"
#include "flevy/levy_driver.hpp"
#include "flevy/young_calculus.hpp"

using namespace flevy;

namespace {

SamplePath on_unit(std::size_t steps, double (*fn)(double)) {
    SamplePath p{0.0, 1.0 / static_cast<double>(steps), {}};
    for (std::size_t i = 0; i <= steps; ++i) p.values.push_back(fn(p.time(i)));
    return p;
}

// every subset of interior nodes, endpoints kept
double brute_p_variation(const std::vector<double>& v, double p) {
    const std::size_t m = v.size();
    if (m < 2) return 0.0;
    const std::size_t interior = m - 2;
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << interior); ++mask) {
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 1; i < m; ++i) {
            if (i < m - 1 && !(mask & (std::size_t{1} << (i - 1)))) continue;
            acc += std::pow(std::abs(v[i] - v[last]), p);
            last = i;
        }
        best = std::max(best, acc);
    }
    return best;
}

std::vector<double> random_walk(std::mt19937_64& rng, std::size_t m) {
    std::normal_distribution<double> z;
    std::vector<double> v{0.0};
    for (std::size_t i = 1; i < m; ++i) v.push_back(v.back() + z(rng));
    return v;
}

}  // namespace

TEST_CASE("Riemann-Stieltjes sums") {
    const SamplePath one = on_unit(1000, [](double) { return 1.0; });
    const SamplePath s = on_unit(1000, [](double t) { return t; });
    const SamplePath s2 = on_unit(1000, [](double t) { return t * t; });
    const SamplePath wig = on_unit(1000, [](double t) { return std::sin(7 * t) + t; });
    CHECK(rs_integral(one, wig) == doctest::Approx(wig.values.back() - wig.values.front()).epsilon(1e-14));
    CHECK(std::abs(rs_integral(s, s) - 0.5) < 1e-3);
    CHECK(std::abs(rs_integral(s, s2) - 2.0 / 3.0) < 2e-3);

    SamplePath shifted = s;
    shifted.t0 = 0.5;
    CHECK_THROWS_AS(rs_integral(s, shifted), GridError);
    CHECK_THROWS_AS(rs_integral(s, s.subsample(2)), GridError);

    // linear in each argument, additive over a split at a grid node
    SamplePath comb = s;
    for (std::size_t i = 0; i < comb.size(); ++i) comb.values[i] = 2.0 * s.values[i] - 3.0 * wig.values[i];
    CHECK(rs_integral(comb, s2) ==
          doctest::Approx(2.0 * rs_integral(s, s2) - 3.0 * rs_integral(wig, s2)).epsilon(1e-12));
    const double whole = rs_integral(wig, s2);
    const double left = rs_integral(wig.slice(0.0, 0.3), s2.slice(0.0, 0.3));
    const double right = rs_integral(wig.slice(0.3, 1.0), s2.slice(0.3, 1.0));
    CHECK(left + right == doctest::Approx(whole).epsilon(1e-13));
}

TEST_CASE("p-variation examples") {
    CHECK(p_variation(std::vector<double>{2, 2, 2, 2}, 1.5) == 0.0);
    CHECK(p_variation(std::vector<double>{0, 1, 3}, 1.0) == doctest::Approx(3.0));
    CHECK(p_variation(std::vector<double>{0, 1, 0, 1}, 2.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(p_variation(std::vector<double>{0, 1}, 0.9), ConfigError);
    // p = 1 is total variation
    const std::vector<double> zig{0, 2, -1, 4, 3};
    CHECK(p_variation(zig, 1.0) == doctest::Approx(2 + 3 + 5 + 1));
}

TEST_CASE("p-variation dynamic programme matches exhaustive search") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pu(1.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 11);
        const auto v = random_walk(rng, m);
        const double p = pu(rng);
        CAPTURE(m);
        CAPTURE(p);
        CHECK(p_variation(v, p) == doctest::Approx(brute_p_variation(v, p)).epsilon(1e-12));
    }
}

TEST_CASE("p-variation over intervals: monotone and superadditive") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = random_walk(rng, 60);
        for (double p : {1.0, 1.5, 2.0, 2.5}) {
            const double all = p_variation(v, p);
            for (std::size_t b = 1; b + 1 < v.size(); b += 7) {
                const std::vector<double> lo(v.begin(), v.begin() + b + 1), hi(v.begin() + b, v.end());
                const double vl = p_variation(lo, p), vh = p_variation(hi, p);
                CHECK(vl <= all * (1 + 1e-12));
                CHECK(vh <= all * (1 + 1e-12));
                CHECK(vl + vh <= all * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("cumulative integral and the density formula") {
    const SamplePath g = on_unit(1000, [](double t) { return std::cos(3 * t); });
    SamplePath zero = g, one = g;
    std::fill(zero.values.begin(), zero.values.end(), 0.0);
    std::fill(one.values.begin(), one.values.end(), 1.0);
    for (double x : cumulative_rs_integral(zero, g).values) CHECK(x == 0.0);
    const SamplePath tele = cumulative_rs_integral(one, g);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(tele.values[i] == doctest::Approx(g.values[i] - g.values[0]).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 10; ++trial) {
        SamplePath f{0.0, 1e-3, {}}, h = f, gg = f;
        for (int i = 0; i < 1000; ++i) {
            f.values.push_back(z(rng));
            h.values.push_back(z(rng));
            gg.values.push_back(z(rng));
        }
        const SamplePath phi = cumulative_rs_integral(h, gg);
        SamplePath fh = f;
        for (std::size_t i = 0; i < fh.size(); ++i) fh.values[i] *= h.values[i];
        const double lhs = rs_integral(f, phi), rhs = rs_integral(fh, gg);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
    CHECK_THROWS_AS(cumulative_rs_integral(g, g.subsample(2)), GridError);
}

TEST_CASE("chain rule residual") {
    auto id = [](double x) { return x; };
    auto unit = [](double) { return 1.0; };
    auto sq = [](double x) { return x * x; };
    auto two_x = [](double x) { return 2.0 * x; };
    const SamplePath w = on_unit(500, [](double t) { return std::sin(9 * t) * std::exp(t); });
    CHECK(chain_rule_residual(id, unit, w) < 1e-13);
    for (std::size_t steps : {100u, 200u, 400u}) {
        const SamplePath s = on_unit(steps, [](double t) { return t; });
        CHECK(chain_rule_residual(sq, two_x, s) == doctest::Approx(1.0 / steps).epsilon(1e-10));
    }

    // finite-variation FLP path refined by subsampling a fine simulation
    const auto spec = LevyDriverSpec::compensated_poisson(1.0, 99);
    const FlpParams params{0.25, 1024, 1.0};
    const JumpTrain train = sample_jump_train(spec, params.window_start() - 1.0, 2.0);
    const SamplePath flp = simulate_flp(train, params, 0.0, 1.0);
    double previous = chain_rule_residual(sq, two_x, flp.subsample(64));
    const double coarsest = previous;
    for (std::size_t stride : {16u, 4u, 1u}) {
        const double r = chain_rule_residual(sq, two_x, flp.subsample(stride));
        CHECK(r < previous);
        previous = r;
    }
    CHECK(previous < 0.25 * coarsest);
}

TEST_CASE("integration by parts under mesh halving") {
    double last = 0.0;
    for (std::size_t steps : {50u, 100u, 200u, 400u}) {
        const SamplePath f = on_unit(steps, [](double t) { return std::sin(4 * t); });
        const SamplePath h = on_unit(steps, [](double t) { return std::exp(-t) + t * t; });
        const double gap = std::abs(rs_integral(f, h) + rs_integral(h, f) -
                                    (f.values.back() * h.values.back() - f.values[0] * h.values[0]));
        if (last > 0.0) CHECK(last / gap == doctest::Approx(2.0).epsilon(0.05));
        last = gap;
    }
}
