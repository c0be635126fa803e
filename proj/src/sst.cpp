#include "flevy/sst.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "flevy/errors.hpp"
#include "flevy/floup.hpp"
#include "flevy/special_functions.hpp"

namespace flevy {

namespace {

constexpr double kInfiniteReach = 700.0;  // exp/sinh warp parameter for infinite ends
constexpr double kFiniteReach = 27.0;     // logistic warp: e^-27 ~ 2e-12 of the span
constexpr double kCentralReach = 4.0;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double warp(const Interval& I, double u) {
    const bool lo_inf = std::isinf(I.lo), hi_inf = std::isinf(I.hi);
    if (lo_inf && hi_inf) return std::sinh(u);
    if (hi_inf) return I.lo + std::exp(u);
    if (lo_inf) return I.hi - std::exp(-u);
    return I.lo + (I.hi - I.lo) / (1.0 + std::exp(-u));
}

double reach(const Interval& I) { return std::isinf(I.lo) || std::isinf(I.hi) ? kInfiniteReach : kFiniteReach; }

std::vector<double> central_probes(const Interval& I, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        const double u = -kCentralReach + 2.0 * kCentralReach * i / (count - 1);
        const double x = warp(I, u);
        if (I.interior(x)) out.push_back(x);
    }
    return out;
}

double distance_to_ends(const Interval& I, double x) {
    double dist = std::numeric_limits<double>::infinity();
    if (!std::isinf(I.lo)) dist = std::min(dist, x - I.lo);
    if (!std::isinf(I.hi)) dist = std::min(dist, I.hi - x);
    return dist;
}

double fd_step(const Interval& I, const std::vector<double>& zeros, double x) {
    double h = 1e-6 * (1.0 + std::abs(x));
    h = std::min(h, 1e-4 * distance_to_ends(I, x));
    for (double z : zeros) h = std::min(h, 1e-4 * std::abs(x - z));
    return h;
}

// True when x is so close to a nonzero finite end that the end's rounding
// (about eps |end|) is a visible fraction of the distance.
bool end_unresolved(const Interval& I, double x) {
    auto close = [x](double e) { return !std::isinf(e) && std::abs(x - e) < 1e-6 * std::abs(e); };
    return close(I.lo) || close(I.hi);
}

bool near_zero(const std::vector<double>& zeros, double x) {
    for (double z : zeros)
        if (std::abs(x - z) <= 1e-9 * (1.0 + std::abs(z))) return true;
    return false;
}

double arccot(double z) {
    if (z > 0.0) return std::atan(1.0 / z);
    if (z < 0.0) return std::numbers::pi + std::atan(1.0 / z);
    return 0.5 * std::numbers::pi;
}

class CheckBuilder {
public:
    explicit CheckBuilder(std::string name) { check_.name = std::move(name); }
    // Records a probe; `badness` > 1 means failure, larger is worse.
    void probe(double x, double value, double badness) {
        if (!std::isfinite(badness)) badness = std::numeric_limits<double>::infinity();
        if (badness > worst_) {
            worst_ = badness;
            check_.worst_probe = x;
            check_.worst_value = value;
        }
        if (badness > 1.0) check_.pass = false;
    }
    void fail(double x, double value, std::string detail) {
        check_.pass = false;
        check_.worst_probe = x;
        check_.worst_value = value;
        check_.detail = std::move(detail);
        worst_ = std::numeric_limits<double>::infinity();
    }
    void detail(std::string d) {
        if (check_.detail.empty()) check_.detail = std::move(d);
    }
    PropertyCheck done() { return check_; }

private:
    PropertyCheck check_;
    double worst_ = -1.0;
};

}  // namespace

bool Interval::contains(double x) const {
    if (std::isnan(x)) return false;
    if (lo_closed && x == lo) return true;
    return x > lo && x < hi;
}

std::string Interval::describe() const {
    std::ostringstream os;
    os << (lo_closed ? "[" : "(") << lo << ", " << hi << ")";
    return os.str();
}

const PropertyCheck& ValidationReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw ConfigError("no validation check named " + name);
}

std::vector<double> interval_probes(const Interval& I, int probe_count) {
    if (probe_count < 16) throw ConfigError("probe count must be at least 16");
    if (!(I.lo < I.hi)) throw ConfigError("state space interval is empty");
    const int wide = probe_count / 2;
    const int close = probe_count - wide;
    const double U = reach(I);
    std::vector<double> out;
    for (int i = 0; i < wide; ++i) out.push_back(warp(I, -U + 2.0 * U * i / (wide - 1)));
    for (int i = 0; i < close; ++i) out.push_back(warp(I, -kCentralReach + 2.0 * kCentralReach * i / (close - 1)));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (double x : out)
        if (!I.interior(x)) throw NumericalError("probe " + std::to_string(x) + " escapes " + I.describe());
    return out;
}

ValidationReport validate_strongly_proper(const ProperTriple& T, int probe_count) {
    if (!T.mu || !T.sigma || !T.psi || !T.f || !T.f_inv) throw ConfigError("triple " + T.name + " is incomplete");
    if (!(T.lambda > 0.0)) throw ConfigError("friction coefficient must be positive");
    const Interval& I = T.interval;
    const std::vector<double> ys = interval_probes(I, probe_count);
    ValidationReport rep;

    {  // (P1): finite coefficients at probes and their neighbours
        CheckBuilder c("P1");
        for (double y : ys) {
            const double h = fd_step(I, {}, y);
            for (double x : {y - h, y, y + h}) {
                const double m = T.mu(x), s = T.sigma(x);
                if (!std::isfinite(m) || !std::isfinite(s)) c.fail(x, std::isfinite(m) ? s : m, "non-finite coefficient");
            }
        }
        rep.checks.push_back(c.done());
    }
    {
        CheckBuilder c("sigma_nonnegative");
        for (double y : ys) {
            const double s = T.sigma(y);
            c.probe(y, s, s < 0.0 ? 2.0 : 0.0);
        }
        rep.checks.push_back(c.done());
    }
    std::vector<double> psi_vals;
    for (double y : ys) psi_vals.push_back(T.psi(y));
    {  // (P2) monotonicity
        CheckBuilder c("P2_decreasing");
        for (std::size_t i = 0; i + 1 < ys.size(); ++i)
            if (!(psi_vals[i + 1] < psi_vals[i])) c.fail(ys[i + 1], psi_vals[i + 1], "psi not strictly decreasing");
        rep.checks.push_back(c.done());
    }
    {  // (P2) divergence at both ends
        CheckBuilder c("P2_limits");
        const double centre = T.psi(warp(I, 0.0));
        const double bound = 100.0 * (1.0 + std::abs(centre));
        if (!(psi_vals.front() >= bound)) c.fail(ys.front(), psi_vals.front(), "psi does not tend to +inf at the lower end");
        if (!(psi_vals.back() <= -bound)) c.fail(ys.back(), psi_vals.back(), "psi does not tend to -inf at the upper end");
        rep.checks.push_back(c.done());
    }
    {  // (P3) sigma psi' = -lambda
        CheckBuilder c("P3");
        std::vector<double> rates;
        for (double y : ys) {
            const double s = T.sigma(y);
            if (!(s > 0.0) || near_zero(T.sigma_zeros, y) || end_unresolved(I, y)) continue;
            const double h = fd_step(I, T.sigma_zeros, y);
            const double dpsi = (T.psi(y + h) - T.psi(y - h)) / (2.0 * h);
            const double rate = -s * dpsi;
            if (!std::isfinite(rate)) continue;
            rates.push_back(rate);
            c.probe(y, rate, std::abs(rate - T.lambda) / (1e-5 * T.lambda));
        }
        if (rates.empty()) {
            c.fail(0.0, 0.0, "sigma vanishes on every probe");
        } else {
            std::nth_element(rates.begin(), rates.begin() + rates.size() / 2, rates.end());
            rep.lambda_recovered = rates[rates.size() / 2];
        }
        rep.checks.push_back(c.done());
        CheckBuilder l("P3_lambda");
        l.probe(0.0, rep.lambda_recovered, std::abs(rep.lambda_recovered - T.lambda) / (1e-6 * T.lambda));
        rep.checks.push_back(l.done());
    }

    const bool zero_inside = I.interior(0.0);
    auto round_tol = [&](double v) { return 1e-10 * std::max(std::abs(v), zero_inside ? 1e-8 : 0.0); };
    std::vector<double> xs;
    {
        CheckBuilder c("transform_roundtrip");
        for (double y : ys) {
            const double x = T.f_inv(y);
            const double back = T.f(x);
            const double tol = round_tol(y);
            c.probe(y, back, tol > 0.0 ? std::abs(back - y) / tol : (back == y ? 0.0 : 2.0));
            if (std::isfinite(x)) xs.push_back(x);
        }
        for (double x : xs) {
            const double back = T.f_inv(T.f(x));
            const double tol = 1e-10 * std::max(std::abs(x), 1e-8);
            c.probe(x, back, std::abs(back - x) / tol);
        }
        rep.checks.push_back(c.done());
    }
    std::sort(xs.begin(), xs.end());
    {
        CheckBuilder c("sst_monotone");
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            const double a = T.f(xs[i]), b = T.f(xs[i + 1]);
            if (b < a || (xs[i + 1] > xs[i] && b == a && I.interior(a) && I.interior(b) && std::abs(a) > 0.0 &&
                          std::abs(xs[i + 1] - xs[i]) > 1e-6 * std::abs(xs[i])))
                c.fail(xs[i + 1], b, "state space transform not increasing");
        }
        rep.checks.push_back(c.done());
    }

    std::vector<double> zero_pre;
    for (double z : T.sigma_zeros) zero_pre.push_back(T.f_inv(z));
    std::vector<double> central;
    for (double y : central_probes(I, std::max(16, probe_count / 2))) central.push_back(T.f_inv(y));
    auto fprime = [&](double x) { return T.sigma(T.f(x)); };
    {  // derivative of the transform is sigma o f
        CheckBuilder c("sst_derivative");
        for (double x : central) {
            double h = 1e-6 * (1.0 + std::abs(x));
            bool skip = false;
            for (double xz : zero_pre) {
                if (std::abs(x - xz) <= 1e-9 * (1.0 + std::abs(xz))) skip = true;
                h = std::min(h, 1e-3 * std::abs(x - xz));
            }
            if (skip) continue;
            const double num = (T.f(x + h) - T.f(x - h)) / (2.0 * h);
            const double ana = fprime(x);
            if (!std::isfinite(num) || !std::isfinite(ana)) continue;
            c.probe(x, num, std::abs(num - ana) / (1e-6 * std::max(std::abs(ana), 1e-300)));
        }
        rep.checks.push_back(c.done());
    }
    {  // (P4): difference quotients of f' must stay bounded as the step shrinks
        CheckBuilder c("P4_lipschitz");
        std::vector<double> pts = central;
        pts.insert(pts.end(), zero_pre.begin(), zero_pre.end());
        for (double x : pts) {
            double q[4];
            bool finite = true;
            for (int k = 1; k <= 4; ++k) {
                const double delta = std::pow(10.0, -2.0 * k) * (1.0 + std::abs(x));
                const double base = fprime(x);
                const double up = std::abs(fprime(x + delta) - base) / delta;
                const double down = std::abs(base - fprime(x - delta)) / delta;
                q[k - 1] = std::max(up, down);
                finite = finite && std::isfinite(q[k - 1]);
            }
            if (!finite) continue;
            c.probe(x, q[3], q[3] / (10.0 * q[0] + 1e-12));
        }
        c.detail("difference quotients of f' grow as the step shrinks");
        PropertyCheck done = c.done();
        if (done.pass) done.detail.clear();
        rep.checks.push_back(done);
    }

    rep.proper = true;
    for (const auto& c : rep.checks)
        if (c.name != "P4_lipschitz") rep.proper = rep.proper && c.pass;
    rep.strongly_proper = rep.proper && rep.check("P4_lipschitz").pass;
    return rep;
}

RealMap sst_from_psi(RealMap psi, double lambda, const Interval& I) {
    if (!(lambda > 0.0)) throw ConfigError("friction coefficient must be positive");
    if (!(I.lo < I.hi)) throw ConfigError("state space interval is empty");
    return [psi = std::move(psi), lambda, I](double x) {
        const double target = -lambda * x;
        const double centre = warp(I, 0.0);
        double below = centre, above = centre;  // psi(below) > target >= psi(above)
        const double pc = psi(centre);
        if (pc == target) return centre;
        bool found = false;
        if (pc > target) {
            for (int k = 1; k <= 1100 && !found; ++k) {
                above = std::isinf(I.hi) ? centre + std::ldexp(1.0, k) : I.hi - (I.hi - centre) * std::ldexp(1.0, -k);
                if (!I.interior(above)) break;
                if (psi(above) <= target) found = true;
                else below = above;
            }
        } else {
            for (int k = 1; k <= 1100 && !found; ++k) {
                below = std::isinf(I.lo) ? centre - std::ldexp(1.0, k) : I.lo + (centre - I.lo) * std::ldexp(1.0, -k);
                if (!I.interior(below)) break;
                if (psi(below) > target) found = true;
                else above = below;
            }
        }
        if (!found)
            throw NumericalError("psi does not reach " + std::to_string(target) + " inside " + I.describe() +
                                 " (P2 violated)");
        for (int it = 0; it < 5000; ++it) {
            double mid;
            if (below > 0.0 && above > 4.0 * below)
                mid = std::sqrt(below) * std::sqrt(above);
            else if (above < 0.0 && below < 4.0 * above)
                mid = -std::sqrt(-below) * std::sqrt(-above);
            else
                mid = below + 0.5 * (above - below);
            if (mid <= below || mid >= above) break;
            (psi(mid) > target ? below : above) = mid;
        }
        return std::abs(psi(below) - target) < std::abs(psi(above) - target) ? below : above;
    };
}

SamplePath solve_sde(const ProperTriple& T, const SamplePath& floup, double lambda_check, double tau, double z) {
    if (!T.strongly_proper)
        throw ConfigError("model " + T.name + " is not strongly proper: " + T.reason);
    if (std::abs(lambda_check - T.lambda) > 1e-12 * T.lambda)
        throw ConfigError("FLOUP rate " + std::to_string(lambda_check) + " does not match the friction coefficient " +
                          std::to_string(T.lambda));
    if (!T.interval.interior(z)) throw ConfigError("start value must lie strictly inside " + T.interval.describe());
    const SamplePath l = ou_operator(floup, T.lambda, tau, T.f_inv(z));
    const std::size_t it = floup.require_node(tau);
    SamplePath X{l.t0, l.dt, std::vector<double>(l.size())};
    for (std::size_t i = 0; i < l.size(); ++i) {
        X.values[i] = T.f(l.values[i]);
        if (i != it && !T.interval.contains(X.values[i]))
            throw NumericalError("solution leaves " + T.interval.describe() + " at t = " + std::to_string(X.time(i)));
    }
    X.values[it] = z;
    return X;
}

SamplePath solve_sde_stationary(const ProperTriple& T, const SamplePath& floup, double lambda_check) {
    if (!T.strongly_proper)
        throw ConfigError("model " + T.name + " is not strongly proper: " + T.reason);
    if (std::abs(lambda_check - T.lambda) > 1e-12 * T.lambda)
        throw ConfigError("FLOUP rate does not match the friction coefficient");
    SamplePath X{floup.t0, floup.dt, std::vector<double>(floup.size())};
    for (std::size_t i = 0; i < floup.size(); ++i) {
        X.values[i] = T.f(floup.values[i]);
        if (!T.interval.contains(X.values[i]))
            throw NumericalError("solution leaves " + T.interval.describe() + " at t = " + std::to_string(X.time(i)));
    }
    return X;
}

SolutionReport residual_check(const SamplePath& X, const ProperTriple& T, const SamplePath& flp, double tolerance) {
    if (X.size() < 2) throw ConfigError("residual check needs at least two nodes");
    if (std::abs(X.dt - flp.dt) > 1e-9 * X.dt) throw GridError("solution and FLP grids differ");
    const std::size_t off = flp.require_node(X.t0);
    if (off + X.size() > flp.size()) throw GridError("FLP path does not cover the solution");
    SolutionReport rep;
    rep.mesh = X.dt;
    rep.residual_profile = SamplePath{X.t0, X.dt, std::vector<double>(X.size(), 0.0)};
    std::vector<double> mu(X.size()), sig(X.size());
    bool finite = true;
    std::size_t first_bad = X.size();
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (!T.interval.contains(X.values[i])) {
            ++rep.nodes_outside;
            first_bad = std::min(first_bad, i);
        }
        mu[i] = T.mu(X.values[i]);
        sig[i] = T.sigma(X.values[i]);
        finite = finite && std::isfinite(mu[i]) && std::isfinite(sig[i]);
    }
    if (!finite) {
        rep.max_residual = std::numeric_limits<double>::infinity();
        rep.message = "coefficients undefined along the path";
        return rep;
    }
    CompensatedSum drift, noise;
    for (std::size_t i = 1; i < X.size(); ++i) {
        drift += 0.5 * X.dt * (mu[i - 1] + mu[i]);
        noise += sig[i - 1] * (flp.values[off + i] - flp.values[off + i - 1]);
        const double r = X.values[i] - X.values[0] - drift.value() - noise.value();
        rep.residual_profile.values[i] = r;
        rep.max_residual = std::max(rep.max_residual, std::abs(r));
    }
    if (rep.nodes_outside > 0) {
        rep.message = std::to_string(rep.nodes_outside) + " nodes outside " + T.interval.describe() +
                      ", first at t = " + std::to_string(X.time(first_bad));
    } else if (rep.max_residual > tolerance) {
        rep.message = "max residual above tolerance";
    } else {
        rep.contract = SolutionReport::Contract::S1_S2_pass;
    }
    return rep;
}

const std::map<std::string, ModelParams>& catalog_defaults() {
    static const std::map<std::string, ModelParams> table{
        {"power", {{"gamma", 0.5}, {"alpha", 0.0}, {"beta", -1.0}, {"sigma0", 1.0}, {"side", 1.0}}},
        {"affine-drift", {{"alpha", 0.0}, {"beta", -1.0}, {"delta", 0.5}, {"sigma1", 1.0}, {"sigma2", 1.0}}},
        {"trig", {{"sigma1", 1.0}, {"sigma2", 1.0}}},
        {"cir", {{"gamma", 1.0}, {"sigma", 1.0}}},
        {"log", {{"lambda", 1.0}, {"sigma", 1.0}}},
        {"squared-floup", {{"lambda", 1.0}, {"sigma", 1.0}}},
    };
    return table;
}

namespace {

void require_positive(const ModelParams& p, const char* key, const std::string& model) {
    if (!(p.at(key) > 0.0) || !std::isfinite(p.at(key)))
        throw ConfigError("model " + model + " requires " + key + " > 0");
}

ProperTriple power_model(const ModelParams& p) {
    const double g = p.at("gamma"), a = p.at("alpha"), b = p.at("beta"), s0 = p.at("sigma0");
    if (!(g >= 0.0 && g <= 1.0)) throw ConfigError("model power: only gamma in [0, 1] admits proper triples");
    if (!(b < 0.0)) throw ConfigError("model power requires beta < 0");
    require_positive(p, "sigma0", "power");
    ProperTriple T;
    T.strongly_proper = true;
    if (g == 0.0) {
        T.name = "power(gamma=0)";
        T.interval = Interval{};
        T.lambda = -b;
        T.mu = [a, b](double x) { return a + b * x; };
        T.sigma = [s0](double) { return s0; };
        T.psi = [a, b, s0](double x) { return (a + b * x) / s0; };
        T.f = [a, b, s0](double x) { return s0 * x - a / b; };
        T.f_inv = [a, b, s0](double y) { return (y + a / b) / s0; };
        return T;
    }
    if (g == 1.0) {
        const double side = p.at("side");
        T.lambda = -b;
        if (side == 1.0) {
            T.name = "power(gamma=1, positive)";
            T.interval = Interval{0.0, std::numeric_limits<double>::infinity()};
            T.mu = [a, b](double x) { return a * x + b * x * std::log(x); };
            T.sigma = [s0](double x) { return s0 * x; };
            T.psi = [a, b, s0](double x) { return (a + b * std::log(x)) / s0; };
            T.f = [a, b, s0](double x) { return std::exp(s0 * x - a / b); };
            T.f_inv = [a, b, s0](double y) { return (std::log(y) + a / b) / s0; };
        } else if (side == -1.0) {
            T.name = "power(gamma=1, negative)";
            T.interval = Interval{-std::numeric_limits<double>::infinity(), 0.0};
            T.mu = [a, b](double x) { return a * std::abs(x) + b * x * std::log(std::abs(x)); };
            T.sigma = [s0](double x) { return s0 * std::abs(x); };
            T.psi = [a, b, s0](double x) { return (a - b * std::log(std::abs(x))) / s0; };
            T.f = [a, b, s0](double x) { return -std::exp(a / b - s0 * x); };
            T.f_inv = [a, b, s0](double y) { return (a / b - std::log(std::abs(y))) / s0; };
        } else {
            throw ConfigError("model power with gamma = 1 needs side = 1 or side = -1");
        }
        return T;
    }
    T.name = "power(gamma=" + std::to_string(g) + ")";
    T.interval = Interval{};
    T.lambda = (1.0 - g) * (-b);
    T.sigma_zeros = {0.0};
    T.mu = [a, b, g](double x) { return a * std::pow(std::abs(x), g) + b * x; };
    T.sigma = [s0, g](double x) { return s0 * std::pow(std::abs(x), g); };
    T.psi = [a, b, g, s0](double x) { return a / s0 + b * sgn(x) * std::pow(std::abs(x), 1.0 - g) / s0; };
    T.f = [a, b, g, s0](double x) {
        const double w = (1.0 - g) * s0 * x - a / b;
        return sgn(w) * std::pow(std::abs(w), 1.0 / (1.0 - g));
    };
    const double lam = T.lambda;
    const RealMap psi = T.psi;
    T.f_inv = [psi, lam](double y) { return -psi(y) / lam; };
    if (g < 0.5) {
        T.strongly_proper = false;
        T.reason = "(P4) fails: only gamma in [1/2, 1) gives a Lipschitz derivative of the transform";
    }
    return T;
}

ProperTriple affine_drift_model(const ModelParams& p) {
    const double a = p.at("alpha"), b = p.at("beta"), dl = p.at("delta"), s1 = p.at("sigma1"), s2 = p.at("sigma2");
    if (!(b < 0.0)) throw ConfigError("model affine-drift requires beta < 0");
    if (!(dl > 0.0 && dl < 1.0)) throw ConfigError("model affine-drift requires delta in (0, 1)");
    require_positive(p, "sigma1", "affine-drift");
    require_positive(p, "sigma2", "affine-drift");
    ProperTriple T;
    T.name = "affine-drift(delta=" + std::to_string(dl) + ")";
    T.interval = Interval{};
    T.lambda = (1.0 - dl) * (-b);
    const double c = -a / b;
    T.sigma_zeros = {c};
    T.mu = [a, b](double x) { return a + b * x; };
    T.sigma = [a, b, c, dl, s1, s2](double x) { return (x <= c ? s1 : s2) * std::pow(std::abs(a + b * x), dl); };
    T.psi = [a, b, c, dl, s1, s2](double x) {
        const double m = std::pow(std::abs(a + b * x), 1.0 - dl);
        return x <= c ? m / s1 : -m / s2;
    };
    const double pw = 1.0 / (1.0 - dl);
    const double f1 = std::pow(-b, dl * pw) * std::pow(s1 * (1.0 - dl), pw);
    const double f2 = std::pow(-b, dl * pw) * std::pow(s2 * (1.0 - dl), pw);
    T.f = [c, f1, f2, pw](double x) {
        return x <= 0.0 ? c - f1 * std::pow(-x, pw) : c + f2 * std::pow(x, pw);
    };
    const double lam = T.lambda;
    const RealMap psi = T.psi;
    T.f_inv = [psi, lam](double y) { return -psi(y) / lam; };
    T.strongly_proper = dl >= 0.5;
    if (!T.strongly_proper) T.reason = "(P4) fails: only delta in [1/2, 1) gives a Lipschitz derivative of the transform";
    return T;
}

ProperTriple trig_model(const ModelParams& p) {
    require_positive(p, "sigma1", "trig");
    require_positive(p, "sigma2", "trig");
    const double s1 = p.at("sigma1"), s2 = p.at("sigma2");
    ProperTriple T;
    T.name = "trig";
    T.interval = Interval{0.0, std::numbers::pi / s2};
    T.lambda = s1 * s2;
    T.mu = [s1, s2](double x) { return s1 * std::sin(s2 * x) * std::cos(s2 * x); };
    T.sigma = [s2](double x) {
        const double s = std::sin(s2 * x);
        return s * s;
    };
    T.psi = [s1, s2](double x) { return s1 * std::cos(s2 * x) / std::sin(s2 * x); };
    T.f = [s2](double x) { return arccot(-s2 * x) / s2; };
    T.f_inv = [s2](double y) { return -std::cos(s2 * y) / std::sin(s2 * y) / s2; };
    T.strongly_proper = true;
    return T;
}

ProperTriple cir_model(const ModelParams& p) {
    require_positive(p, "gamma", "cir");
    require_positive(p, "sigma", "cir");
    const double g = p.at("gamma"), s = p.at("sigma");
    ProperTriple T;
    T.name = "cir";
    T.interval = Interval{};
    T.lambda = 0.5 * g;
    T.sigma_zeros = {0.0};
    T.mu = [g](double x) { return -g * x; };
    T.sigma = [s](double x) { return s * std::sqrt(std::abs(x)); };
    T.psi = [g, s](double x) { return -g * sgn(x) * std::sqrt(std::abs(x)) / s; };
    T.f = [s](double x) { return sgn(x) * s * s * x * x / 4.0; };
    T.f_inv = [s](double y) { return 2.0 * sgn(y) * std::sqrt(std::abs(y)) / s; };
    T.strongly_proper = true;
    return T;
}

ProperTriple log_model(const ModelParams& p) {
    require_positive(p, "lambda", "log");
    require_positive(p, "sigma", "log");
    const double l = p.at("lambda"), s = p.at("sigma");
    ProperTriple T;
    T.name = "log";
    T.interval = Interval{0.0, std::numeric_limits<double>::infinity()};
    T.lambda = l;
    T.mu = [l](double y) { return -l * y * std::log(y); };
    T.sigma = [s](double y) { return s * std::abs(y); };
    T.psi = [l, s](double y) { return -l * std::log(y) / s; };
    T.f = [s](double x) { return std::exp(s * x); };
    T.f_inv = [s](double y) { return std::log(y) / s; };
    T.strongly_proper = true;
    return T;
}

ProperTriple squared_floup_model(const ModelParams& p) {
    require_positive(p, "lambda", "squared-floup");
    require_positive(p, "sigma", "squared-floup");
    const double l = p.at("lambda"), s = p.at("sigma");
    ProperTriple T;
    T.name = "squared-floup";
    T.interval = Interval{0.0, std::numeric_limits<double>::infinity(), true};
    T.lambda = 0.5 * l;
    T.mu = [l](double z) { return -l * z; };
    T.sigma = [s](double z) { return s * std::sqrt(z); };
    T.psi = [l, s](double z) { return -l * std::sqrt(z) / s; };
    // psi^{-1}(-lambda x) exists only for x >= 0.
    T.f = [s](double x) { return x >= 0.0 ? s * s * x * x / 4.0 : std::numeric_limits<double>::quiet_NaN(); };
    T.f_inv = [s](double y) { return 2.0 * std::sqrt(y) / s; };
    T.strongly_proper = false;
    T.reason = "(P2) fails: psi tends to 0, not +inf, at the lower end of (0, inf)";
    return T;
}

}  // namespace

ProperTriple catalog(const std::string& model_id, const ModelParams& params) {
    const auto& defaults = catalog_defaults();
    const auto entry = defaults.find(model_id);
    if (entry == defaults.end()) throw ConfigError("unknown model '" + model_id + "'");
    ModelParams p = entry->second;
    for (const auto& [k, v] : params) {
        if (!p.count(k)) throw ConfigError("model " + model_id + " has no parameter '" + k + "'");
        if (!std::isfinite(v)) throw ConfigError("model parameter " + k + " must be finite");
        p[k] = v;
    }
    if (model_id == "power") return power_model(p);
    if (model_id == "affine-drift") return affine_drift_model(p);
    if (model_id == "trig") return trig_model(p);
    if (model_id == "cir") return cir_model(p);
    if (model_id == "log") return log_model(p);
    return squared_floup_model(p);
}

SamplePath squared_floup(const SamplePath& floup, double sigma, double lambda_half, double floup_rate) {
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (std::abs(floup_rate - lambda_half) > 1e-12 * std::abs(lambda_half))
        throw ConfigError("squared FLOUP needs a FLOUP built with rate lambda/2");
    SamplePath out{floup.t0, floup.dt, floup.values};
    for (double& v : out.values) {
        const double r = 0.5 * sigma * v;
        v = r * r;
    }
    return out;
}

}  // namespace flevy
