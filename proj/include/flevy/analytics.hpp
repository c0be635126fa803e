#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flevy/floup.hpp"
#include "flevy/frac_levy.hpp"
#include "flevy/levy_driver.hpp"
#include "flevy/sst.hpp"

namespace flevy {

struct EnsembleConfig {
    std::size_t replicates = 2;
    LevyDriverSpec driver;
    FlpParams flp;
    /// When set, the observed process is the FLOUP with this rate; the
    /// integration-by-parts integral starts |past_cutoff| before each time.
    std::optional<FloupParams> floup;
    /// When set (requires floup), the observed process is f(FLOUP) for this catalog model.
    std::optional<std::string> model;
    ModelParams model_params;
    std::vector<double> times;
    /// Arguments u of the empirical characteristic function, evaluated at every time.
    std::vector<double> cf_u;
    /// Lag table: autocovariance at each lag averaged over the origins.
    /// Origins and origin + lag are added to the observation times.
    std::vector<double> origins;
    std::vector<double> lags;
    std::uint64_t seed = 0;
    /// 0: as many as FLEVY_THREADS / the hardware allow.
    unsigned threads = 0;

    void validate() const;
};

struct EnsembleStats {
    std::size_t replicates = 0;
    std::vector<double> times;
    std::vector<double> mean, mean_se;
    std::vector<double> variance, variance_se;
    std::vector<double> third, third_se;  // third central moment
    /// Row-major times x times.
    std::vector<double> covariance, covariance_se;
    /// Row-major times x cf_u.
    std::vector<double> cf_u;
    std::vector<std::complex<double>> cf;
    std::vector<double> cf_se_re, cf_se_im;
    std::vector<double> lags, lag_autocov, lag_autocov_se;

    std::size_t index_of(double t) const;
    double cov(double t, double s) const;
    double cov_se(double t, double s) const;
    bool operator==(const EnsembleStats&) const = default;
};

/// Worker threads to use: `requested` (0 = hardware), capped by FLEVY_THREADS.
unsigned worker_threads(unsigned requested);

EnsembleStats run_ensemble(const EnsembleConfig& config);

/// Two ensembles of the same replicates (common random numbers): at the
/// configured resolution n and at refine * n.
std::pair<EnsembleStats, EnsembleStats> run_refinement_pair(const EnsembleConfig& config, int refine = 2);

enum class AnalyticSource { FlpCovariance, FloupCovariance };

struct CovarianceRow {
    double t = 0.0, s = 0.0;
    double empirical = 0.0, analytic = 0.0, se = 0.0;
    double bias = 0.0;  // discretization allowance
    double z = 0.0;
    bool pass = false;
};

struct CovarianceComparison {
    std::vector<CovarianceRow> rows;
    bool all_pass = false;
};

struct AnalyticReference {
    AnalyticSource source = AnalyticSource::FlpCovariance;
    double d = 0.25;
    double m2 = 1.0;
    double lambda = 1.0;  // FLOUP only
};

/// Compares the requested (t, s) pairs. With `refined` (same replicates at
/// a finer grid) the allowance is |c_n - c_2n| / (1 - 2^-rate).
CovarianceComparison compare_covariance(const EnsembleStats& stats, const AnalyticReference& ref,
                                        const std::vector<std::pair<double, double>>& pairs,
                                        const EnsembleStats* refined = nullptr, double bias_rate = 1.0);

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
    double s_min = 0.0, s_max = 0.0;
};

/// OLS of log|autocov| on log lag over lags in [s_min, s_max].
SlopeFit lrd_slope(const std::vector<double>& lags, const std::vector<double>& autocov, double s_min, double s_max);
SlopeFit lrd_slope(const EnsembleStats& stats, double s_min, double s_max);

/// max over t in [-T, -T/2] of |L_t| / |t|^alpha for each T of the ladder.
std::vector<std::pair<double, double>> long_time_ratio(const SamplePath& path, double d, double alpha,
                                                       const std::vector<double>& ladder);

struct SymmetryRow {
    double t = 0.0;
    double mean_z = 0.0, variance_z = 0.0, third_z = 0.0;
    bool pass = false;
};

struct SymmetryReport {
    std::vector<SymmetryRow> rows;
    bool all_pass = false;
};

/// `forward` observed at times t, `backward` at times -t (same order).
/// Compares L_t against -L_{-t}: means and third moments flip sign,
/// variances agree; each within 3 combined standard errors.
SymmetryReport symmetry_test(const EnsembleStats& forward, const EnsembleStats& backward);

}  // namespace flevy
