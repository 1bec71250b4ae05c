// Adaptive Gauss-Kronrod (7,15) quadrature with helpers for endpoint power
// singularities and decaying tails on [a, inf). Globally adaptive: the worst
// segment (largest error estimate) is bisected until the summed estimate meets
// tolerance or the interval budget runs out.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace qakit::quad {

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    std::size_t max_intervals = 4096;
};

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
    bool converged = false;
};

namespace detail {

// Nodes and weights of the 15-point Kronrod extension of 7-point Gauss.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
};

struct WorseError {
    bool operator()(const Segment& p, const Segment& q) const {
        if (p.error != q.error) return p.error < q.error;
        return p.a > q.a;  // deterministic tie break
    }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    double resabs = kWgk[7] * std::fabs(fv[7]);
    for (int i = 0; i < 7; ++i) {
        const double pair = fv[i] + fv[14 - i];
        resk += kWgk[i] * pair;
        resabs += kWgk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
        if (i % 2 == 1) resg += kWg[i / 2] * pair;
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::fabs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::fabs(fv[i] - reskh) + std::fabs(fv[14 - i] - reskh));
    resasc *= std::fabs(h);
    resabs *= std::fabs(h);
    double err = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    if (resabs > uflow / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
    return {a, b, resk * h, err};
}

}  // namespace detail

template <class F>
Result integrate(const F& f, double a, double b, const Options& opts = {}) {
    Result res;
    if (a == b) {
        res.converged = true;
        return res;
    }
    std::priority_queue<detail::Segment, std::vector<detail::Segment>, detail::WorseError> heap;
    auto seed = detail::gk15(f, a, b);
    res.evaluations = 15;
    double total = seed.value;
    double total_err = seed.error;
    heap.push(seed);
    while (heap.size() < opts.max_intervals) {
        if (total_err <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))) break;
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // cannot split further
        heap.pop();
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        res.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    res.value = total;
    res.error_estimate = total_err;
    res.intervals = heap.size();
    res.converged = total_err <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(total));
    return res;
}

// Integrates across a list of interior breakpoints (discontinuities, support
// edges, cutoff radii). Points outside (a, b) are ignored.
template <class F>
Result integrate_with_breaks(const F& f, double a, double b, std::vector<double> points,
                             const Options& opts = {}) {
    if (b < a) throw std::invalid_argument("integrate_with_breaks: b < a");
    points.push_back(a);
    points.push_back(b);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    Result total;
    total.converged = true;
    bool inside = false;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i] == a) inside = true;
        if (!inside) continue;
        if (points[i] == b) break;
        const auto piece = integrate(f, points[i], points[i + 1], opts);
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
        total.intervals += piece.intervals;
        total.converged = total.converged && piece.converged;
    }
    return total;
}

// Integrand behaves like (x - a)^exponent near a with exponent > -1. The map
// x = a + t^p turns the edge into t^(p(1+exponent)-1), smooth for large p.
template <class F>
Result integrate_left_singular(const F& f, double a, double b, double exponent,
                               const Options& opts = {}) {
    if (!(exponent > -1.0))
        throw std::invalid_argument("integrate_left_singular: exponent must exceed -1");
    if (b < a) throw std::invalid_argument("integrate_left_singular: b < a");
    if (exponent >= 0.0) return integrate(f, a, b, opts);
    const double p = std::max(2.0, std::ceil(5.0 / (1.0 + exponent)));
    const double tmax = std::pow(b - a, 1.0 / p);
    auto mapped = [&](double t) {
        const double dx = std::pow(t, p);
        const double x = a + dx;
        if (dx == 0.0 || x == a) return 0.0;
        return f(x) * p * std::pow(t, p - 1.0);
    };
    auto res = integrate(mapped, 0.0, tmax, opts);
    return res;
}

// Same map at the right endpoint: integrand ~ (b - x)^exponent near b. The
// offset b - t^p is formed directly, so an endpoint at 0 is hit exactly.
template <class F>
Result integrate_right_singular(const F& f, double a, double b, double exponent,
                                const Options& opts = {}) {
    if (!(exponent > -1.0))
        throw std::invalid_argument("integrate_right_singular: exponent must exceed -1");
    if (b < a) throw std::invalid_argument("integrate_right_singular: b < a");
    if (exponent >= 0.0) return integrate(f, a, b, opts);
    const double p = std::max(2.0, std::ceil(5.0 / (1.0 + exponent)));
    const double tmax = std::pow(b - a, 1.0 / p);
    auto mapped = [&](double t) {
        const double dx = std::pow(t, p);
        const double x = b - dx;
        if (dx == 0.0 || x == b) return 0.0;
        return f(x) * p * std::pow(t, p - 1.0);
    };
    return integrate(mapped, 0.0, tmax, opts);
}

// Tail integral over [a, inf) of an integrand decaying like x^decay_exponent
// with decay_exponent < -1; substitutes u = 1/x and treats the induced edge
// u^(-decay_exponent - 2) at u = 0.
template <class F>
Result integrate_to_infinity(const F& f, double a, double decay_exponent,
                             const Options& opts = {}) {
    if (!(a > 0.0)) throw std::invalid_argument("integrate_to_infinity: a must be positive");
    if (!(decay_exponent < -1.0))
        throw std::invalid_argument("integrate_to_infinity: tail must decay faster than 1/x");
    auto mapped = [&](double u) { return f(1.0 / u) / (u * u); };
    const double edge = -decay_exponent - 2.0;
    return integrate_left_singular(mapped, 0.0, 1.0 / a, edge, opts);
}

}  // namespace qakit::quad
