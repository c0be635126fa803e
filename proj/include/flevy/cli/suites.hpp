#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "flevy/frac_levy.hpp"
#include "flevy/levy_driver.hpp"
#include "flevy/sst.hpp"

namespace flevy::cli {

/// One line of a verification table. expected and tolerance are text so
/// that one-sided checks ("> 1") print naturally.
struct CheckRow {
    std::string name;
    std::string expected;
    double observed = 0.0;
    std::string tolerance;
    bool pass = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckRow> rows;

    bool all_pass() const;
    /// Rows whose name starts with prefix.
    SuiteResult filter(const std::string& prefix) const;
};

/// Fixed-width table; deterministic for equal inputs.
void print_table(std::ostream& out, const SuiteResult& result);

/// |observed - expected| <= tolerance.
CheckRow check_close(std::string name, double expected, double observed, double tolerance);
/// observed > bound.
CheckRow check_above(std::string name, double bound, double observed);
/// observed <= bound.
CheckRow check_at_most(std::string name, double bound, double observed);

struct CovarianceSuite {
    LevyDriverSpec driver;
    FlpParams flp;
    /// When set, FLOUP autocovariances at lags 0, 1, 2 instead of FLP pairs.
    std::optional<double> floup_lambda;
    std::size_t replicates = 2000;
    std::uint64_t seed = 1;
    /// d used for the analytic reference (equal to flp.d unless testing the test).
    std::optional<double> reference_d;
    unsigned threads = 0;
};
SuiteResult run_covariance_suite(const CovarianceSuite& p);

struct LrdSuite {
    LevyDriverSpec driver;
    FlpParams flp;
    double lambda = 1.0;
    std::size_t replicates = 2000;
    std::uint64_t seed = 1;
    std::vector<double> origins{0.0, -100.0, -200.0, -300.0};
    std::vector<double> lags{5, 6, 8, 10, 13, 16, 20, 25, 32, 40, 50};
    double s_min = 5.0, s_max = 50.0;
    double band = 0.15;
    std::optional<double> reference_d;
    unsigned threads = 0;
};
SuiteResult run_lrd_suite(const LrdSuite& p);

/// Rows: "euler-ibp ..." (discrepancy ratios), "langevin ..." (residual
/// ratios of OU-operator paths), "forgetting ..." (exact contraction).
struct LangevinSuite {
    LevyDriverSpec driver;
    FlpParams flp;  // n is the coarsest mesh; three halvings follow
    double lambda = 1.0;
    double tau = 0.0;
    double z1 = 0.7, z2 = -0.3;
    double horizon = 8.0;  // in units of 1/lambda
    int paths = 3;
    std::uint64_t seed = 1;
};
SuiteResult run_langevin_suite(const LangevinSuite& p);

struct ModelCase {
    std::string id;
    ModelParams params;
    std::string label() const;
};

/// Power gamma 0, 1/2, 1; affine drift; trig; CIR; log; squared FLOUP.
std::vector<ModelCase> default_model_cases();

struct SstResidualSuite {
    LevyDriverSpec driver;
    FlpParams flp;  // n is the coarsest mesh; three halvings follow
    std::vector<ModelCase> models = default_model_cases();
    int runs = 20;
    double horizon = 5.0;
    std::uint64_t seed = 1;
};
SuiteResult run_sst_residual_suite(const SstResidualSuite& p);

struct AppendixSuite {
    FlpParams flp{0.25, 32, 1.0};
    int instances = 1000;
    int max_nodes = 12;
    std::uint64_t seed = 1;
};
SuiteResult run_appendix_suite(const AppendixSuite& p);

struct GammaSuite {
    int triples = 20;
    std::uint64_t seed = 1;
};
SuiteResult run_gamma_suite(const GammaSuite& p);

struct CharacteristicSuite {
    LevyDriverSpec driver;
    FlpParams flp{0.25, 32, 2.0};
    double lambda = 1.0;
    std::vector<double> u{0.25, 0.5, 1.0};
    std::size_t replicates = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};
SuiteResult run_characteristic_suite(const CharacteristicSuite& p);

/// Brute-force p-variation over every subdivision through grid nodes
/// (2^(m-2) subsets); only for small m.
double p_variation_brute_force(const std::vector<double>& values, double p);

}  // namespace flevy::cli
