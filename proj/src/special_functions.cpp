#include "flevy/special_functions.hpp"

#include <array>
#include <limits>
#include <numbers>

namespace flevy {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Lanczos series for Gamma(z + 1), z >= -1/2.
double lanczos_series(double z) {
    double acc = kLanczosCoeffs[0];
    for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i)
        acc += kLanczosCoeffs[i] / (z + static_cast<double>(i));
    return acc;
}

}  // namespace

double gamma_fn(double x) {
    if (std::isnan(x)) return x;
    if (x <= 0.0 && x == std::floor(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x < 0.5) {
        // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    }
    if (x > 171.7) return std::numeric_limits<double>::infinity();
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    // Split the power to delay overflow for large x.
    const double half = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * lanczos_series(z);
}

double log_gamma(double x) {
    if (x < 0.5) return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
           std::log(lanczos_series(z));
}

double beta_fn(double a, double b) {
    return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

}  // namespace flevy
