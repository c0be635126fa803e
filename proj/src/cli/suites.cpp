#include "flevy/cli/suites.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "flevy/analytics.hpp"
#include "flevy/errors.hpp"
#include "flevy/floup.hpp"
#include "flevy/special_functions.hpp"
#include "flevy/young_calculus.hpp"

namespace flevy::cli {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Integer cutoff so that every mesh of a refinement family has a node there.
double integer_cutoff(double d, double lambda, double origin = 0.0) {
    return std::floor(origin + choose_past_cutoff(d, lambda));
}

void require_window(const FlpParams& flp, double cutoff) {
    if (flp.window_start() > cutoff)
        throw ConfigError("FLP window starts at " + fmt(flp.window_start()) + ", after the FLOUP cutoff " +
                          fmt(cutoff) + "; raise flp.past_window_exponent");
}

double max_abs_diff(const SamplePath& a, const SamplePath& b) {
    require_same_grid(a, b, "paths to compare");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

double model_sigma(const ModelCase& m) {
    if (m.params.count("sigma")) return m.params.at("sigma");
    return catalog_defaults().at(m.id).at("sigma");
}

const char* const kHalvingNames[] = {"h/2", "h/4", "h/8"};

}  // namespace

bool SuiteResult::all_pass() const {
    return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

SuiteResult SuiteResult::filter(const std::string& prefix) const {
    SuiteResult out{suite, {}};
    for (const auto& r : rows)
        if (r.name.rfind(prefix, 0) == 0) out.rows.push_back(r);
    return out;
}

void print_table(std::ostream& out, const SuiteResult& result) {
    std::size_t w = 5;
    for (const auto& r : result.rows) w = std::max(w, r.name.size());
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                    const std::string& e) {
        char buf[512];
        std::snprintf(buf, sizeof buf, "%-*s  %-14s  %-14s  %-14s  %s\n", static_cast<int>(w), a.c_str(), b.c_str(),
                      c.c_str(), d.c_str(), e.c_str());
        out << buf;
    };
    out << "suite " << result.suite << "\n";
    line("check", "expected", "observed", "tolerance", "result");
    for (const auto& r : result.rows) line(r.name, r.expected, fmt(r.observed), r.tolerance, r.pass ? "PASS" : "FAIL");
    out << (result.all_pass() ? "all checks passed\n" : "some checks FAILED\n");
}

CheckRow check_close(std::string name, double expected, double observed, double tolerance) {
    return {std::move(name), fmt(expected), observed, fmt(tolerance), std::abs(observed - expected) <= tolerance};
}

CheckRow check_above(std::string name, double bound, double observed) {
    return {std::move(name), "> " + fmt(bound), observed, "-", observed > bound};
}

CheckRow check_at_most(std::string name, double bound, double observed) {
    return {std::move(name), "<= " + fmt(bound), observed, "-", observed <= bound};
}

SuiteResult run_covariance_suite(const CovarianceSuite& p) {
    EnsembleConfig c;
    c.replicates = p.replicates;
    c.driver = p.driver;
    c.flp = p.flp;
    c.seed = p.seed;
    c.threads = p.threads;
    const double d_ref = p.reference_d.value_or(p.flp.d);
    if (!(d_ref > 0.0 && d_ref < 0.5)) throw ConfigError("reference d must lie in (0, 1/2)");
    AnalyticReference ref;
    ref.d = d_ref;
    ref.m2 = second_moment(p.driver);
    std::vector<std::pair<double, double>> pairs;
    if (p.floup_lambda) {
        const double cutoff = integer_cutoff(p.flp.d, *p.floup_lambda);
        require_window(p.flp, cutoff);
        c.floup = FloupParams{*p.floup_lambda, cutoff};
        c.times = {0.0, 1.0, 2.0};
        pairs = {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
        ref.source = AnalyticSource::FloupCovariance;
        ref.lambda = *p.floup_lambda;
    } else {
        c.times = {0.5, 1.0};
        pairs = {{1.0, 1.0}, {1.0, 0.5}};
        ref.source = AnalyticSource::FlpCovariance;
    }
    const auto [coarse, fine] = run_refinement_pair(c);
    const double rate = std::min(1.0, p.flp.past_window_exponent * (1.0 - 2.0 * p.flp.d));
    const auto cmp = compare_covariance(coarse, ref, pairs, &fine, rate);
    SuiteResult out{"covariance", {}};
    const std::string tag = "d=" + fmt_short(p.flp.d) + " ";
    for (const auto& r : cmp.rows) {
        const std::string name = p.floup_lambda ? tag + "floup autocov lag " + fmt_short(r.t - r.s)
                                                : tag + "flp cov(" + fmt_short(r.t) + "," + fmt_short(r.s) + ")";
        out.rows.push_back({name, fmt(r.analytic), r.empirical, fmt(3.0 * r.se + r.bias), r.pass});
    }
    return out;
}

SuiteResult run_lrd_suite(const LrdSuite& p) {
    EnsembleConfig c;
    c.replicates = p.replicates;
    c.driver = p.driver;
    c.flp = p.flp;
    c.seed = p.seed;
    c.threads = p.threads;
    if (p.origins.empty()) throw ConfigError("lrd suite needs origins");
    // The ensemble cutoff is a span before each observation time.
    const double span = integer_cutoff(p.flp.d, p.lambda);
    require_window(p.flp, *std::min_element(p.origins.begin(), p.origins.end()) + span);
    c.floup = FloupParams{p.lambda, span};
    c.origins = p.origins;
    c.lags = p.lags;
    const auto stats = run_ensemble(c);
    const auto fit = lrd_slope(stats, p.s_min, p.s_max);
    const double d_ref = p.reference_d.value_or(p.flp.d);
    SuiteResult out{"lrd", {}};
    out.rows.push_back(check_close("d=" + fmt_short(p.flp.d) + " autocov slope over [" + fmt_short(fit.s_min) + "," +
                                       fmt_short(fit.s_max) + "]",
                                   2.0 * d_ref - 1.0, fit.slope, p.band));
    return out;
}

SuiteResult run_langevin_suite(const LangevinSuite& p) {
    if (p.paths < 1) throw ConfigError("langevin suite needs at least one path");
    if (!(p.horizon > 0.0)) throw ConfigError("horizon must be positive");
    FlpParams fine = p.flp;
    fine.n = p.flp.n * 8;
    fine.validate();
    const double h = 1.0 / p.flp.n;
    const double t_end = std::ceil((p.tau + p.horizon / p.lambda) / h - 1e-9) * h;
    if (std::abs(std::round(p.tau / h) * h - p.tau) > 1e-9 * h) throw GridError("tau must be a node of the coarsest mesh");

    // Catalog models with a zero-free sigma: forgetting in f-inverse coordinates.
    std::vector<ProperTriple> forgetting_models;
    double lambda_min = p.lambda;
    for (const auto& m : default_model_cases()) {
        ProperTriple t = catalog(m.id, m.params);
        if (!t.strongly_proper || !t.sigma_zeros.empty()) continue;
        lambda_min = std::min(lambda_min, t.lambda);
        forgetting_models.push_back(std::move(t));
    }
    const double cutoff = integer_cutoff(p.flp.d, lambda_min, p.tau);
    require_window(fine, cutoff);

    SuiteResult out{"langevin", {}};
    auto rel_contraction = [&](const SamplePath& a, const SamplePath& b, double lambda, double dz) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double expect = std::exp(-lambda * (a.time(i) - p.tau)) * dz;
            worst = std::max(worst, std::abs((a.values[i] - b.values[i]) - expect) / std::abs(expect));
        }
        return worst;
    };
    for (int k = 0; k < p.paths; ++k) {
        LevyDriverSpec spec = p.driver;
        spec.seed = derive_seed(p.seed, static_cast<std::uint64_t>(k));
        const JumpTrain train = sample_jump_train(spec, fine.window_start(), t_end + 1.0);
        const SamplePath L = simulate_flp(train, fine, cutoff, t_end);
        const std::string tag = "path " + std::to_string(k) + " ";

        double prev_disc = 0.0, prev_res = 0.0;
        for (int level = 0; level < 4; ++level) {
            const SamplePath f = L.subsample(std::size_t{8} >> level);
            const SamplePath ibp = floup_via_ibp(f, FloupParams{p.lambda, cutoff}, p.tau, t_end);
            const SamplePath euler = euler_langevin(f, p.lambda, p.tau, ibp.values.front());
            const double disc = max_abs_diff(euler, ibp);
            const SamplePath ou = ou_operator(euler, p.lambda, p.tau, p.z1);
            const double res = langevin_residual(ou, f, p.lambda).max_residual;
            if (level > 0) {
                out.rows.push_back(check_close("euler-ibp " + tag + kHalvingNames[level - 1] + " ratio", 2.0,
                                               prev_disc / disc, 0.4));
                out.rows.push_back(check_close("langevin " + tag + kHalvingNames[level - 1] + " ratio", 2.0,
                                               prev_res / res, 0.4));
            }
            prev_disc = disc;
            prev_res = res;
        }

        const SamplePath floup = floup_via_ibp(L, FloupParams{p.lambda, cutoff}, p.tau, t_end);
        const SamplePath l1 = ou_operator(floup, p.lambda, p.tau, p.z1);
        const SamplePath l2 = ou_operator(floup, p.lambda, p.tau, p.z2);
        out.rows.push_back(check_at_most("forgetting " + tag + "relative error", 1e-12,
                                         rel_contraction(l1, l2, p.lambda, p.z1 - p.z2)));

        for (const auto& model : forgetting_models) {
            const double t_model = std::min(t_end, std::ceil((p.tau + p.horizon / model.lambda) / h - 1e-9) * h);
            const SamplePath base = floup_via_ibp(L, FloupParams{model.lambda, cutoff}, p.tau, t_model);
            const double z1 = model.f(p.z1), z2 = model.f(p.z2);
            const SamplePath x1 = solve_sde(model, base, model.lambda, p.tau, z1);
            const SamplePath x2 = solve_sde(model, base, model.lambda, p.tau, z2);
            SamplePath y1 = x1, y2 = x2;
            for (auto& v : y1.values) v = model.f_inv(v);
            for (auto& v : y2.values) v = model.f_inv(v);
            out.rows.push_back(check_at_most("forgetting " + tag + model.name + " relative error", 1e-12,
                                             rel_contraction(y1, y2, model.lambda, model.f_inv(z1) - model.f_inv(z2))));
        }
    }
    return out;
}

std::string ModelCase::label() const {
    std::string s = id;
    if (!params.empty()) {
        s += "(";
        bool first = true;
        for (const auto& [k, v] : params) {
            if (!first) s += ",";
            s += k + "=" + fmt_short(v);
            first = false;
        }
        s += ")";
    }
    return s;
}

std::vector<ModelCase> default_model_cases() {
    return {{"power", {{"gamma", 0.0}}},
            {"power", {{"gamma", 0.5}}},
            {"power", {{"gamma", 1.0}}},
            {"affine-drift", {{"delta", 0.5}}},
            {"trig", {}},
            {"cir", {}},
            {"log", {}},
            {"squared-floup", {}}};
}

SuiteResult run_sst_residual_suite(const SstResidualSuite& p) {
    if (p.runs < 1) throw ConfigError("sst_residual suite needs at least one run");
    if (!(p.horizon > 0.0)) throw ConfigError("horizon must be positive");
    FlpParams fine = p.flp;
    fine.n = p.flp.n * 8;
    fine.validate();
    const double h = 1.0 / p.flp.n;
    const double t_end = std::ceil(p.horizon / h - 1e-9) * h;
    SuiteResult out{"sst_residual", {}};

    for (const auto& m : p.models) {
        const ProperTriple triple = catalog(m.id, m.params);
        const bool squared = m.id == "squared-floup";
        std::vector<std::pair<std::string, ProperTriple>> forms{{m.label(), triple}};
        if (squared) {
            // Same drift with sigma sqrt|x| on the whole line.
            ProperTriple abs_form = triple;
            const double s = model_sigma(m);
            abs_form.name += "|x|";
            abs_form.interval = Interval{};
            abs_form.sigma = [s](double z) { return s * std::sqrt(std::abs(z)); };
            forms[0].first += " sqrt(x)";
            forms.emplace_back(m.label() + " sqrt|x|", abs_form);
        }
        const double cutoff = integer_cutoff(p.flp.d, triple.lambda);
        require_window(fine, cutoff);

        const std::size_t F = forms.size();
        std::vector<std::array<double, 4>> sums(F, std::array<double, 4>{});
        std::vector<int> decreasing(F, 0);
        std::vector<std::size_t> outside(F, 0);
        for (int r = 0; r < p.runs; ++r) {
            LevyDriverSpec spec = p.driver;
            spec.seed = derive_seed(p.seed, static_cast<std::uint64_t>(r));
            const JumpTrain train = sample_jump_train(spec, fine.window_start(), t_end + 1.0);
            const SamplePath L = simulate_flp(train, fine, cutoff, t_end);
            std::vector<std::array<double, 4>> res(F);
            for (int level = 0; level < 4; ++level) {
                const SamplePath f = L.subsample(std::size_t{8} >> level);
                const SamplePath fl = floup_via_ibp(f, FloupParams{triple.lambda, cutoff}, 0.0, t_end);
                const SamplePath X = squared ? squared_floup(fl, model_sigma(m), triple.lambda, triple.lambda)
                                             : solve_sde_stationary(triple, fl, triple.lambda);
                const SamplePath driver = f.slice(0.0, t_end);
                for (std::size_t q = 0; q < F; ++q) {
                    const auto rep = residual_check(X, forms[q].second, driver);
                    res[q][static_cast<std::size_t>(level)] = rep.max_residual;
                    sums[q][static_cast<std::size_t>(level)] += rep.max_residual;
                    outside[q] += rep.nodes_outside;
                }
            }
            for (std::size_t q = 0; q < F; ++q)
                if (res[q][3] < res[q][0]) ++decreasing[q];
        }
        for (std::size_t q = 0; q < F; ++q) {
            const std::string& name = forms[q].first;
            for (int k = 0; k < 3; ++k)
                out.rows.push_back(check_above(name + " residual ratio " + kHalvingNames[k], 1.0,
                                               sums[q][static_cast<std::size_t>(k)] /
                                                   sums[q][static_cast<std::size_t>(k) + 1]));
            out.rows.push_back(
                check_close(name + " runs with finest < coarsest", p.runs, static_cast<double>(decreasing[q]), 0.0));
            out.rows.push_back(check_at_most(name + " nodes outside I", 0.0, static_cast<double>(outside[q])));
        }
    }
    return out;
}

double p_variation_brute_force(const std::vector<double>& values, double p) {
    const std::size_t m = values.size();
    if (m < 2) return 0.0;
    const std::size_t inner = m - 2;
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << inner); ++mask) {
        double sum = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 1; i < m; ++i) {
            if (i < m - 1 && !(mask >> (i - 1) & 1u)) continue;
            sum += std::pow(std::abs(values[i] - values[last]), p);
            last = i;
        }
        best = std::max(best, sum);
    }
    return best;
}

SuiteResult run_appendix_suite(const AppendixSuite& p) {
    if (p.instances < 1 || p.max_nodes < 2 || p.max_nodes > 20)
        throw ConfigError("appendix suite needs instances >= 1 and max_nodes in [2, 20]");
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> normal;
    SuiteResult out{"appendix_calculus", {}};

    auto random_walk = [&](std::size_t m) {
        SamplePath path{0.0, 1.0 / static_cast<double>(m - 1), std::vector<double>(m)};
        for (std::size_t i = 1; i < m; ++i) path.values[i] = path.values[i - 1] + normal(rng);
        return path;
    };
    FlpParams fine = p.flp;
    fine.n = p.flp.n * 8;
    fine.validate();
    const JumpTrain train = sample_jump_train(LevyDriverSpec::compensated_poisson(1.0, p.seed), fine.window_start(), 2.0);
    const SamplePath flp_path = simulate_flp(train, fine, 0.0, 1.0);

    // Density formula: int f dphi = int f h dg with phi = int h dg.
    double worst = 0.0;
    auto density = [&](const SamplePath& f, const SamplePath& hh, const SamplePath& g) {
        const SamplePath phi = cumulative_rs_integral(hh, g);
        SamplePath fh = f;
        double scale = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            fh.values[i] *= hh.values[i];
            if (i + 1 < f.size()) scale += std::abs(fh.values[i] * (g.values[i + 1] - g.values[i]));
        }
        const double diff = std::abs(rs_integral(f, phi) - rs_integral(fh, g));
        worst = std::max(worst, scale > 0.0 ? diff / scale : diff);
    };
    for (int k = 0; k < 100; ++k) density(random_walk(200), random_walk(200), random_walk(200));
    density(random_walk(flp_path.size()), random_walk(flp_path.size()), flp_path);
    out.rows.push_back(check_at_most("density formula relative error", 1e-12, worst));

    // Chain rule for F(x) = x^2 under refinement.
    auto F = [](double x) { return x * x; };
    auto dF = [](double x) { return 2.0 * x; };
    double prev_det = 0.0, prev_flp = 0.0;
    for (int level = 0; level < 4; ++level) {
        const std::size_t m = (std::size_t{32} << level) + 1;
        SamplePath det{0.0, 1.0 / static_cast<double>(m - 1), std::vector<double>(m)};
        for (std::size_t i = 0; i < m; ++i) det.values[i] = std::sin(3.0 * det.time(i)) + det.time(i) * det.time(i);
        const double r_det = chain_rule_residual(F, dF, det);
        const double r_flp = chain_rule_residual(F, dF, flp_path.subsample(std::size_t{8} >> level));
        if (level > 0) {
            out.rows.push_back(check_above(std::string("chain rule smooth path ") + kHalvingNames[level - 1] + " ratio",
                                           1.0, prev_det / r_det));
            out.rows.push_back(check_above(std::string("chain rule FLP path ") + kHalvingNames[level - 1] + " ratio",
                                           1.0, prev_flp / r_flp));
        }
        prev_det = r_det;
        prev_flp = r_flp;
    }

    // p-variation: dynamic programme against enumeration.
    std::uniform_int_distribution<int> nodes(2, p.max_nodes);
    std::uniform_real_distribution<double> exponent(1.0, 3.0);
    int mismatches = 0;
    double worst_pv = 0.0;
    for (int k = 0; k < p.instances; ++k) {
        std::vector<double> v(static_cast<std::size_t>(nodes(rng)));
        for (double& x : v) x = normal(rng);
        const double pp = exponent(rng);
        const double dp = p_variation(v, pp), brute = p_variation_brute_force(v, pp);
        const double rel = std::abs(dp - brute) / std::max(brute, 1e-300);
        worst_pv = std::max(worst_pv, rel);
        if (rel > 1e-12) ++mismatches;
    }
    out.rows.push_back(check_at_most("p-variation dp vs brute force mismatches", 0.0, mismatches));
    out.rows.push_back(check_at_most("p-variation dp vs brute force relative error", 1e-12, worst_pv));
    return out;
}

SuiteResult run_gamma_suite(const GammaSuite& p) {
    if (p.triples < 1) throw ConfigError("gamma suite needs at least one triple");
    SuiteResult out{"gamma_identities", {}};
    auto rel_row = [&](std::string name, double expected, double observed, double tol) {
        out.rows.push_back(check_close(std::move(name), expected, observed, tol * std::abs(expected)));
    };
    rel_row("gripenberg-norros t=1 s=0 d=0.25", gripenberg_norros_quadrature(1.0, 0.0, 0.25),
            gripenberg_norros(1.0, 0.0, 0.25), 1e-6);
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> time(-5.0, 5.0), dist(0.05, 0.45);
    for (int k = 0; k < p.triples; ++k) {
        double t = time(rng), s = time(rng);
        while (std::abs(t - s) < 0.05) s = time(rng);
        const double d = dist(rng);
        rel_row("gripenberg-norros t=" + fmt(t) + " s=" + fmt(s) + " d=" + fmt(d), gripenberg_norros_quadrature(t, s, d),
                gripenberg_norros(t, s, d), 1e-6);
    }
    out.rows.push_back(check_close("flp variance d=0.25 t=1", 1.06381, flp_covariance(1.0, 1.0, 0.25, 1.0), 5e-5));
    for (double d : {0.1, 0.25, 0.4}) {
        const double lambda = 1.0;
        const double quad = cov_rs_integrals([lambda](double u) { return std::exp(lambda * u); },
                                             [lambda](double u) { return std::exp(lambda * u); }, d, 1.0, 1e-10);
        rel_row("floup variance quadrature d=" + fmt_short(d), quad, floup_variance(d, lambda, 1.0), 1e-6);
    }
    double worst = 0.0;
    for (int k = 1; k < 100; ++k) {
        const double x = k / 100.0;
        const double expect = std::numbers::pi / std::sin(std::numbers::pi * x);
        worst = std::max(worst, std::abs(gamma_fn(x) * gamma_fn(1.0 - x) - expect) / expect);
    }
    out.rows.push_back(check_at_most("gamma reflection relative error", 1e-12, worst));
    return out;
}

SuiteResult run_characteristic_suite(const CharacteristicSuite& p) {
    EnsembleConfig c;
    c.replicates = p.replicates;
    c.driver = p.driver;
    c.flp = p.flp;
    c.seed = p.seed;
    c.threads = p.threads;
    const double cutoff = integer_cutoff(p.flp.d, p.lambda);
    require_window(p.flp, cutoff);
    c.floup = FloupParams{p.lambda, cutoff};
    c.times = {0.0};
    c.cf_u = p.u;
    const auto stats = run_ensemble(c);
    SuiteResult out{"characteristic_function", {}};
    const double t0 = 0.0;
    for (std::size_t k = 0; k < p.u.size(); ++k) {
        const double u = p.u[k];
        const auto exact = floup_characteristic_function(p.driver, p.flp.d, p.lambda, std::span(&t0, 1),
                                                         std::span(&u, 1), 1e-10);
        const auto emp = stats.cf[k];
        const std::string tag = "d=" + fmt_short(p.flp.d) + " u=" + fmt_short(u);
        out.rows.push_back(check_close("cf real " + tag, exact.real(), emp.real(), 3.0 * stats.cf_se_re[k]));
        out.rows.push_back(check_close("cf imag " + tag, exact.imag(), emp.imag(), 3.0 * stats.cf_se_im[k]));
    }
    return out;
}

}  // namespace flevy::cli
