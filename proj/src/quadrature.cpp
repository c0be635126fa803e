#include "flevy/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "flevy/errors.hpp"

namespace flevy {

namespace {

// Kronrod abscissae (positive half, descending) and weights; Gauss weights
// belong to the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod_15(const RealFn& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double value = resk * half;
    const double err = std::abs((resk - resg) * half);
    if (!std::isfinite(value))
        throw NumericalError("quadrature integrand produced a non-finite value on [" +
                             std::to_string(a) + ", " + std::to_string(b) + "]");
    return {a, b, value, err};
}

}  // namespace

QuadResult integrate(const RealFn& f, double a, double b, const QuadOptions& opts) {
    if (a == b) return {};
    if (b < a) {
        QuadResult r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod_15(f, a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int intervals = 1;
    auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
    while (total_err > tolerance()) {
        if (intervals >= opts.max_intervals) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not converge on [" << a << ", " << b << "]: estimate "
                << total << ", error " << total_err << " > tolerance " << tolerance() << " after "
                << intervals << " intervals";
            throw NumericalError(msg.str());
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval cannot be split further in double precision.
            total_err -= worst.error;
            worst.error = 0.0;
            heap.push(worst);
            if (heap.top().error == 0.0) break;
            continue;
        }
        Segment left = gauss_kronrod_15(f, worst.a, mid);
        Segment right = gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum to shed drift from the incremental updates.
    double sum = 0.0, err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sum, err, intervals};
}

QuadResult integrate_to_infinity(const RealFn& f, double a, const QuadOptions& opts) {
    auto mapped = [&](double u) {
        const double x = a + (1.0 - u) / u;
        return f(x) / (u * u);
    };
    return integrate(mapped, 0.0, 1.0, opts);
}

QuadResult integrate_from_minus_infinity(const RealFn& f, double b, const QuadOptions& opts) {
    auto mapped = [&](double u) {
        const double x = b - (1.0 - u) / u;
        return f(x) / (u * u);
    };
    return integrate(mapped, 0.0, 1.0, opts);
}

QuadResult integrate_algebraic_tail(const RealFn& f, double a, double p, const QuadOptions& opts) {
    if (!(a > 0.0) || !(p > 1.0))
        throw ConfigError("algebraic tail quadrature needs a > 0 and decay exponent p > 1");
    const double q = 1.0 / (p - 1.0);
    auto mapped = [&](double r) {
        const double x = a * std::pow(r, -q);
        return f(x) * a * q * std::pow(r, -q - 1.0);
    };
    return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace flevy
