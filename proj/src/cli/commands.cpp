#include "flevy/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <new>

#include "flevy/cli/csv.hpp"
#include "flevy/cli/run_config.hpp"
#include "flevy/cli/suites.hpp"
#include "flevy/errors.hpp"

namespace flevy::cli {

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::bad_alloc&) {
        err << "numerical error: out of memory\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    }
}

RunConfig load_config(const CommandOptions& opts) {
    if (opts.config_path.empty()) return RunConfig{};
    return RunConfig::load(opts.config_path);
}

double snap_down(double t, double h) { return std::floor(t / h + 1e-9) * h; }

struct Horizon {
    double t_min, t_max;
};

Horizon horizon(const RunConfig& cfg) {
    Horizon h{cfg.get_double("output.t_min", 0.0), cfg.get_double("output.t_max", 10.0)};
    if (!(h.t_min < h.t_max)) throw ConfigError("output.t_min must be below output.t_max");
    return h;
}

// FLOUP of rate lambda on [t_min, t_max] from the configured driver.
SamplePath simulate_floup_path(const RunConfig& cfg, const LevyDriverSpec& spec, const FlpParams& flp, double lambda,
                               const Horizon& hz) {
    const double cutoff = cfg.has("floup.past_cutoff")
                              ? cfg.get_double("floup.past_cutoff", 0.0)
                              : snap_down(std::min(hz.t_min, 0.0) + choose_past_cutoff(flp.d, lambda), flp.dt());
    if (cutoff > hz.t_min) throw ConfigError("floup.past_cutoff must not exceed output.t_min");
    if (flp.window_start() > cutoff)
        throw ConfigError("FLP window does not reach the FLOUP cutoff; raise flp.past_window_exponent");
    const JumpTrain train = sample_jump_train(spec, flp.window_start(), hz.t_max + flp.dt());
    return simulate_floup(train, flp, FloupParams{lambda, cutoff}, hz.t_min, hz.t_max);
}

SamplePath simulate_kind(const std::string& kind, const RunConfig& cfg, std::uint64_t seed) {
    LevyDriverSpec spec = cfg.driver();
    spec.seed = seed;
    const FlpParams flp = cfg.flp();
    const Horizon hz = horizon(cfg);
    if (kind == "driver") {
        const double dt = flp.dt();
        const SamplePath path = sample_two_sided_levy(spec, std::min(hz.t_min, -dt), std::max(hz.t_max, dt), dt);
        return path.slice(hz.t_min, hz.t_max);
    }
    if (kind == "flp") {
        const JumpTrain train = sample_jump_train(spec, flp.window_start(), hz.t_max + flp.dt());
        return simulate_flp(train, flp, hz.t_min, hz.t_max);
    }
    const bool anchored = cfg.has("floup.tau") || cfg.has("floup.z");
    if (anchored && !(cfg.has("floup.tau") && cfg.has("floup.z")))
        throw ConfigError("floup.tau and floup.z must be given together");
    const double tau = cfg.get_double("floup.tau", 0.0), z = cfg.get_double("floup.z", 0.0);
    if (kind == "floup") {
        const double lambda = cfg.get_double("floup.lambda", 1.0);
        SamplePath path = simulate_floup_path(cfg, spec, flp, lambda, hz);
        return anchored ? ou_operator(path, lambda, tau, z) : path;
    }
    if (kind == "sde") {
        const auto id = cfg.model_id();
        if (!id) throw ConfigError("simulate sde needs model.id");
        const ProperTriple triple = catalog(*id, cfg.model_params());
        const double lambda = cfg.get_double("floup.lambda", triple.lambda);
        if (*id == "squared-floup") {
            const double sigma = cfg.model_params().count("sigma") ? cfg.model_params().at("sigma") : 1.0;
            SamplePath base = simulate_floup_path(cfg, spec, flp, lambda, hz);
            if (anchored) {
                if (!(z >= 0.0)) throw ConfigError("squared FLOUP needs floup.z >= 0");
                base = ou_operator(base, lambda, tau, triple.f_inv(z));
            }
            return squared_floup(base, sigma, triple.lambda, lambda);
        }
        if (std::abs(lambda - triple.lambda) > 1e-12 * triple.lambda)
            throw ConfigError("floup.lambda differs from the friction coefficient of model " + *id);
        const SamplePath base = simulate_floup_path(cfg, spec, flp, lambda, hz);
        return anchored ? solve_sde(triple, base, lambda, tau, z) : solve_sde_stationary(triple, base, lambda);
    }
    throw ConfigError("unknown simulate kind '" + kind + "' (driver, flp, floup, sde)");
}

std::size_t count_or(const RunConfig& cfg, long long fallback) {
    const long long v = cfg.get_int("ensemble.replicates", fallback);
    if (v < 1) throw ConfigError("ensemble.replicates must be positive");
    return static_cast<std::size_t>(v);
}

unsigned threads_of(const RunConfig& cfg) {
    const long long v = cfg.get_int("ensemble.threads", 0);
    if (v < 0) throw ConfigError("ensemble.threads must be non-negative");
    return static_cast<unsigned>(v);
}

std::optional<double> reference_d(const RunConfig& cfg) {
    if (!cfg.has("ensemble.reference_d")) return std::nullopt;
    return cfg.get_double("ensemble.reference_d", 0.0);
}

SuiteResult run_suite(const std::string& suite, const RunConfig& cfg, std::uint64_t seed) {
    if (suite == "covariance") {
        CovarianceSuite p;
        p.driver = cfg.driver();
        p.flp = cfg.flp();
        if (cfg.has("floup.lambda")) p.floup_lambda = cfg.get_double("floup.lambda", 1.0);
        p.replicates = count_or(cfg, 2000);
        p.seed = seed;
        p.reference_d = reference_d(cfg);
        p.threads = threads_of(cfg);
        return run_covariance_suite(p);
    }
    if (suite == "lrd") {
        LrdSuite p;
        p.driver = cfg.driver();
        p.flp = cfg.flp();
        p.lambda = cfg.get_double("floup.lambda", 1.0);
        p.replicates = count_or(cfg, 2000);
        p.seed = seed;
        p.origins = cfg.get_list("ensemble.origins", p.origins);
        p.lags = cfg.get_list("ensemble.lags", p.lags);
        if (p.lags.empty()) throw ConfigError("ensemble.lags is empty");
        p.s_min = *std::min_element(p.lags.begin(), p.lags.end());
        p.s_max = *std::max_element(p.lags.begin(), p.lags.end());
        p.reference_d = reference_d(cfg);
        p.threads = threads_of(cfg);
        return run_lrd_suite(p);
    }
    if (suite == "langevin") {
        LangevinSuite p;
        p.driver = cfg.driver();
        p.flp = cfg.flp();
        p.lambda = cfg.get_double("floup.lambda", 1.0);
        p.tau = cfg.get_double("floup.tau", 0.0);
        p.z1 = cfg.get_double("floup.z", p.z1);
        p.z2 = p.z1 - 1.0;
        if (cfg.has("output.t_max")) p.horizon = (cfg.get_double("output.t_max", 0.0) - p.tau) * p.lambda;
        p.paths = static_cast<int>(count_or(cfg, 3));
        p.seed = seed;
        return run_langevin_suite(p);
    }
    if (suite == "sst_residual") {
        SstResidualSuite p;
        p.driver = cfg.driver();
        p.flp = cfg.flp();
        if (const auto id = cfg.model_id()) p.models = {ModelCase{*id, cfg.model_params()}};
        p.runs = static_cast<int>(count_or(cfg, 20));
        p.horizon = cfg.get_double("output.t_max", p.horizon);
        p.seed = seed;
        return run_sst_residual_suite(p);
    }
    if (suite == "appendix_calculus") {
        AppendixSuite p;
        if (cfg.has("flp.d") || cfg.has("flp.n") || cfg.has("flp.past_window_exponent")) p.flp = cfg.flp();
        p.instances = static_cast<int>(count_or(cfg, 1000));
        p.seed = seed;
        return run_appendix_suite(p);
    }
    if (suite == "gamma_identities") {
        GammaSuite p;
        p.triples = static_cast<int>(count_or(cfg, 20));
        p.seed = seed;
        return run_gamma_suite(p);
    }
    throw ConfigError("unknown verify suite '" + suite +
                      "' (covariance, lrd, langevin, sst_residual, appendix_calculus, gamma_identities)");
}

void emit(const CommandOptions& opts, std::ostream& out, const std::function<void(std::ostream&)>& write) {
    if (opts.out_path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(opts.out_path, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + opts.out_path);
    write(file);
    if (!file) throw ConfigError("write to " + opts.out_path + " failed");
}

}  // namespace

int cmd_simulate(const std::string& kind, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_config(opts);
        const auto seed = cfg.seed(opts.seed);
        if (!seed) throw ConfigError("simulate needs a seed (ensemble.seed or --seed)");
        const SamplePath path = simulate_kind(kind, cfg, *seed);
        for (double v : path.values)
            if (!std::isfinite(v)) throw NumericalError("simulated path contains a non-finite value");
        emit(opts, out, [&](std::ostream& o) { write_path_csv(o, path); });
        return static_cast<int>(kOk);
    });
}

int cmd_verify(const std::string& suite, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_config(opts);
        const SuiteResult result = run_suite(suite, cfg, cfg.seed(opts.seed).value_or(1));
        emit(opts, out, [&](std::ostream& o) { print_table(o, result); });
        return static_cast<int>(result.all_pass() ? kOk : kVerifyFailed);
    });
}

int cmd_plotdata(const std::vector<std::string>& inputs, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        if (inputs.empty()) throw ConfigError("plotdata needs at least one input file");
        std::vector<Series> series;
        for (const auto& file : inputs) series.push_back(read_series_csv(file));
        CommandOptions opts;
        opts.out_path = out_path;
        emit(opts, out, [&](std::ostream& o) { write_long_csv(o, series); });
        return static_cast<int>(kOk);
    });
}

}  // namespace flevy::cli
