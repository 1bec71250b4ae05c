// Pairings <f, phi> for the model distributions (homogeneous powers, deltas,
// Hadamard finite parts), structured sums f = sum_m f_m^{(m)} built from a
// closed family of coefficient functions, dilation pairings <f(s x), phi>,
// and Z-space norms.
//
// Finite-part convention (fixed, not configurable): the unit-interval split
//   <Pf(H(x)/x^k), phi> = int_0^1 x^{-k}[phi - T_{k-1}phi] dx
//                       + int_1^inf x^{-k} phi dx
//                       - sum_{j=0}^{k-2} phi^{(j)}(0) / (j! (k-1-j)),
// where T_{k-1} is the Taylor polynomial of order k-1 at 0. Any other
// normalization differs from this one by a delta combination.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qakit/quadrature.hpp"
#include "qakit/svf.hpp"
#include "qakit/test_function.hpp"
#include "qakit/weights.hpp"

namespace qakit::gfun {

using svf::Locus;
using svf::SlowlyVaryingFn;

// Smooth transition 0 -> 1 on [0, 1]: exp(-1/v)/(exp(-1/v) + exp(-1/(1-v))).
inline double smooth_step(double v) {
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return 1.0;
    const double b0 = std::exp(-1.0 / v);
    const double b1 = std::exp(-1.0 / (1.0 - v));
    return b0 / (b0 + b1);
}

// ---------------------------------------------------------------------------
// Model distributions
// ---------------------------------------------------------------------------
struct ModelDistribution {
    enum class Kind { HomogeneousPlus, HomogeneousMinus, Delta, FinitePartPlus, FinitePartMinus };

    Kind kind;
    double alpha = 0.0;  // Homogeneous kinds
    unsigned n = 0;      // Delta order
    unsigned k = 1;      // FinitePart power

    static ModelDistribution homogeneous_plus(double alpha) {
        return {Kind::HomogeneousPlus, alpha, 0, 1};
    }
    static ModelDistribution homogeneous_minus(double alpha) {
        return {Kind::HomogeneousMinus, alpha, 0, 1};
    }
    static ModelDistribution delta(unsigned n) { return {Kind::Delta, 0.0, n, 1}; }
    static ModelDistribution finite_part_plus(unsigned k) {
        return {Kind::FinitePartPlus, 0.0, 0, k};
    }
    static ModelDistribution finite_part_minus(unsigned k) {
        return {Kind::FinitePartMinus, 0.0, 0, k};
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::HomogeneousPlus: os << "x_+^" << alpha; break;
            case Kind::HomogeneousMinus: os << "x_-^" << alpha; break;
            case Kind::Delta: os << "delta^(" << n << ")"; break;
            case Kind::FinitePartPlus: os << "Pf(H(x)/x^" << k << ")"; break;
            case Kind::FinitePartMinus: os << "Pf(H(x)/x^" << k << ") reflected"; break;
        }
        return os.str();
    }
};

namespace detail {

inline quad::Options pair_options(double tol) {
    quad::Options opts;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    opts.max_intervals = 8192;
    return opts;
}

inline void require_converged(const quad::Result& r, const char* what) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << ": quadrature failed to reach tolerance (error estimate " << r.error_estimate
           << " after " << r.intervals << " intervals)";
        throw std::runtime_error(os.str());
    }
}

// Canonical <x_+^alpha, phi> for noninteger alpha in (-N-1, -N): subtract the
// Taylor polynomial of order N-1 on [0,1] and add back sum phi^(j)(0)/(j!(alpha+j+1)).
inline double homogeneous_plus_subtracted(double alpha, const TestFunction& phi, double tol) {
    const auto n_sub = static_cast<unsigned>(std::floor(-alpha));
    if (phi.max_order() < n_sub + 4)
        throw std::out_of_range("pair_model: homogeneous pairing needs more derivatives of phi");
    auto [lo, hi] = phi.support();
    (void)lo;
    const auto opts = pair_options(0.25 * tol);

    double taylor[64];
    const unsigned j_hi = std::min(phi.max_order(), n_sub + 16u);
    double fact = 1.0;
    for (unsigned j = 0; j <= j_hi; ++j) {
        if (j > 0) fact *= j;
        taylor[j] = phi.derivative(j, 0.0) / fact;
    }

    double rho = phi.analytic_radius_at0();
    if (!std::isfinite(rho)) rho = 1.0;
    const double dh = std::min(0.125, 0.125 * rho);

    double head = 0.0;
    for (unsigned j = j_hi; j >= n_sub && j < 64; --j)
        head += taylor[j] * std::pow(dh, alpha + j + 1.0) / (alpha + j + 1.0);

    auto subtracted = [&](double x) {
        double t = 0.0;
        for (unsigned j = n_sub; j-- > 0;) t = t * x + taylor[j];
        return (phi(x) - t) * std::pow(x, alpha);
    };
    std::vector<double> mid_breaks;
    if (hi > dh && hi < 1.0) mid_breaks.push_back(hi);
    const auto mid = quad::integrate_with_breaks(subtracted, dh, 1.0, mid_breaks, opts);
    require_converged(mid, "pair_model(homogeneous subtracted mid)");

    double tail = 0.0;
    if (hi > 1.0) {
        auto g = [&](double x) { return phi(x) * std::pow(x, alpha); };
        const auto r = quad::integrate(g, 1.0, hi, opts);
        require_converged(r, "pair_model(homogeneous subtracted tail)");
        tail = r.value;
    }

    double correction = 0.0;
    for (unsigned j = 0; j < n_sub; ++j) correction += taylor[j] / (alpha + j + 1.0);

    return head + mid.value + tail + correction;
}

inline double homogeneous_plus_pair(double alpha, const TestFunction& phi, double tol) {
    if (!(alpha > -1.0)) {
        if (alpha == std::rint(alpha))
            throw std::invalid_argument(
                "pair_model: integer alpha <= -1 needs the finite part kinds");
        return homogeneous_plus_subtracted(alpha, phi, tol);
    }
    auto [lo, hi] = phi.support();
    if (hi <= 0.0) return 0.0;
    const auto opts = pair_options(0.25 * tol);
    auto g = [&](double x) { return std::pow(x, alpha) * phi(x); };
    double value = 0.0;
    const double start = std::max(lo, 0.0);
    if (start > 0.0) {
        const auto r = quad::integrate(g, start, hi, opts);
        require_converged(r, "pair_model(homogeneous)");
        value = r.value;
    } else {
        const double split = std::min(1.0, hi);
        const auto head = quad::integrate_left_singular(g, 0.0, split, alpha, opts);
        require_converged(head, "pair_model(homogeneous head)");
        value = head.value;
        if (hi > split) {
            const auto tail = quad::integrate(g, split, hi, opts);
            require_converged(tail, "pair_model(homogeneous tail)");
            value += tail.value;
        }
    }
    return value;
}

inline double finite_part_plus_pair(unsigned k, const TestFunction& phi, double tol) {
    if (k < 1) throw std::invalid_argument("pair_model: finite part needs k >= 1");
    if (phi.max_order() < k)
        throw std::out_of_range("pair_model: finite part needs k derivatives of phi");
    auto [lo, hi] = phi.support();
    (void)lo;
    const auto opts = pair_options(0.25 * tol);

    if (k > 40) throw std::invalid_argument("pair_model: finite part power too large");
    double taylor[64];
    const unsigned j_hi = std::min(phi.max_order(), k + 16u);
    double fact = 1.0;
    for (unsigned j = 0; j <= j_hi; ++j) {
        if (j > 0) fact *= j;
        taylor[j] = phi.derivative(j, 0.0) / fact;
    }

    double rho = phi.analytic_radius_at0();
    if (!std::isfinite(rho)) rho = 1.0;
    const double dh = std::min(0.125, 0.125 * rho);

    // [0, dh]: series for x^{-k} (phi - T_{k-1}) using the Taylor tail.
    double head = 0.0;
    for (unsigned j = j_hi; j >= k; --j)
        head += taylor[j] * std::pow(dh, static_cast<double>(j - k + 1)) / (j - k + 1);

    // [dh, 1]: direct integration of the subtracted integrand.
    auto subtracted = [&](double x) {
        double t = 0.0;
        for (unsigned j = k; j-- > 0;) t = t * x + taylor[j];
        return (phi(x) - t) * std::pow(x, -static_cast<double>(k));
    };
    std::vector<double> mid_breaks;
    if (hi > dh && hi < 1.0) mid_breaks.push_back(hi);
    const auto mid = quad::integrate_with_breaks(subtracted, dh, 1.0, mid_breaks, opts);
    require_converged(mid, "pair_model(finite part mid)");

    // [1, inf): plain x^{-k} phi over the remaining support.
    double tail = 0.0;
    if (hi > 1.0) {
        auto g = [&](double x) { return phi(x) * std::pow(x, -static_cast<double>(k)); };
        const auto r = quad::integrate(g, 1.0, hi, opts);
        require_converged(r, "pair_model(finite part tail)");
        tail = r.value;
    }

    double correction = 0.0;
    for (unsigned j = 0; j + 1 < k; ++j) correction -= taylor[j] / (k - 1 - j);

    return head + mid.value + tail + correction;
}

}  // namespace detail

inline double pair_model(const ModelDistribution& d, const TestFunction& phi, double tol) {
    switch (d.kind) {
        case ModelDistribution::Kind::HomogeneousPlus:
            return detail::homogeneous_plus_pair(d.alpha, phi, tol);
        case ModelDistribution::Kind::HomogeneousMinus:
            return detail::homogeneous_plus_pair(d.alpha, phi.reflected(), tol);
        case ModelDistribution::Kind::Delta: {
            const double v = phi.derivative(d.n, 0.0);
            return (d.n % 2 == 0) ? v : -v;
        }
        case ModelDistribution::Kind::FinitePartPlus:
            return detail::finite_part_plus_pair(d.k, phi, tol);
        case ModelDistribution::Kind::FinitePartMinus:
            return detail::finite_part_plus_pair(d.k, phi.reflected(), tol);
    }
    throw std::logic_error("pair_model: unreachable");
}

// Canonical homogeneous x^{-k} on the line: Pf(H(x)/x^k) + (-1)^k Pf(H(-x)/x^k),
// i.e. FinitePartPlus + (-1)^k FinitePartMinus under the fixed convention.
inline double pair_inverse_power(unsigned k, const TestFunction& phi, double tol) {
    const double plus = pair_model(ModelDistribution::finite_part_plus(k), phi, tol);
    const double minus = pair_model(ModelDistribution::finite_part_minus(k), phi, tol);
    return (k % 2 == 0) ? plus + minus : plus - minus;
}

// ---------------------------------------------------------------------------
// Coefficient functions: the closed family the scenarios draw from.
// ---------------------------------------------------------------------------
enum class Window { None, Sharp, Smooth };

class CoefficientFn {
  public:
    double operator()(double x) const { return eval_(x); }
    const std::vector<double>& breakpoints() const { return breaks_; }
    double support_lo() const { return support_lo_; }
    double support_hi() const { return support_hi_; }
    double edge_exponent_at0() const { return edge_exp_; }
    const std::string& describe() const { return label_; }

    // Envelope c_pm * sgn(x)^parity * |x|^exponent * L(|x|) * window. At the
    // Infinity locus the window vanishes inside cutoff_radius (sharp: jump at
    // r; smooth: rises r -> 2r); at the Origin locus it vanishes outside.
    static CoefficientFn power_law(double c_plus, double c_minus, int sign_parity, double exponent,
                                   SlowlyVaryingFn L, double cutoff_radius, Window window,
                                   Locus locus) {
        if (window != Window::None && !(cutoff_radius > 0.0))
            throw std::invalid_argument("power_law: cutoff radius must be positive");
        CoefficientFn c;
        const double r = cutoff_radius;
        const bool odd = (sign_parity % 2) != 0;
        c.eval_ = [=](double x) {
            if (x == 0.0) return 0.0;
            const double ax = std::fabs(x);
            double w = 1.0;
            if (window == Window::Sharp) {
                const bool outside = ax >= r;
                w = (locus == Locus::Infinity) == outside ? 1.0 : 0.0;
            } else if (window == Window::Smooth) {
                const double rise = smooth_step((ax - r) / r);
                w = (locus == Locus::Infinity) ? rise : 1.0 - rise;
            }
            if (w == 0.0) return 0.0;
            double v = (x > 0.0 ? c_plus : c_minus) * std::pow(ax, exponent) * L(ax) * w;
            if (x < 0.0 && odd) v = -v;
            return v;
        };
        if (window != Window::None) {
            c.breaks_ = {-2.0 * r, -r, r, 2.0 * r};
            if (locus == Locus::Origin) {
                c.support_lo_ = (window == Window::Sharp) ? -r : -2.0 * r;
                c.support_hi_ = -c.support_lo_;
            }
        }
        if (exponent < 0.0 && locus == Locus::Origin) c.edge_exp_ = exponent;
        std::ostringstream os;
        os << "power_law(c+=" << c_plus << ",c-=" << c_minus << ",parity=" << (odd ? 1 : 0)
           << ",exp=" << exponent << ",L=" << L.spec() << ",r=" << r << ")";
        c.label_ = os.str();
        return c;
    }

    static CoefficientFn poly(std::vector<double> coeffs) {
        CoefficientFn c;
        c.eval_ = [coeffs](double x) {
            double v = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
            return v;
        };
        c.label_ = "poly(deg=" + std::to_string(coeffs.empty() ? 0 : coeffs.size() - 1) + ")";
        return c;
    }

    static CoefficientFn bump_like(const TestFunction& g, double scale = 1.0) {
        CoefficientFn c;
        c.eval_ = [g, scale](double x) { return scale * g(x); };
        auto s = g.support();
        c.support_lo_ = s.first;
        c.support_hi_ = s.second;
        c.breaks_ = {s.first, s.second};
        c.label_ = "bump_like(" + g.describe() + ")";
        return c;
    }

    // F(x) = [a2 log^2|x| + a1(sign) log|x| + a0(sign)] * plateau window,
    // full closed form inside |x| <= inner, zero outside |x| >= outer.
    static CoefficientFn log_singular(double a2, double a1_plus, double a1_minus, double a0_plus,
                                      double a0_minus, double inner, double outer) {
        if (!(inner > 0.0) || !(outer > inner))
            throw std::invalid_argument("log_singular: need 0 < inner < outer");
        CoefficientFn c;
        c.eval_ = [=](double x) {
            if (x == 0.0) return 0.0;
            const double ax = std::fabs(x);
            if (ax >= outer) return 0.0;
            const double lg = std::log(ax);
            double v = a2 * lg * lg + (x > 0.0 ? a1_plus : a1_minus) * lg +
                       (x > 0.0 ? a0_plus : a0_minus);
            if (ax > inner) v *= smooth_step((outer - ax) / (outer - inner));
            return v;
        };
        c.support_lo_ = -outer;
        c.support_hi_ = outer;
        c.breaks_ = {-outer, -inner, 0.0, inner, outer};
        c.edge_exp_ = -0.5;  // log singularity is dominated by x^{-1/2}
        std::ostringstream os;
        os << "log_singular(a2=" << a2 << ",a1+=" << a1_plus << ",a1-=" << a1_minus
           << ",a0+=" << a0_plus << ",a0-=" << a0_minus << ")";
        c.label_ = os.str();
        return c;
    }

    static CoefficientFn explicit_fn(std::function<double(double)> f, std::vector<double> breaks,
                                     double edge_exponent, std::string label) {
        CoefficientFn c;
        c.eval_ = std::move(f);
        c.breaks_ = std::move(breaks);
        c.edge_exp_ = edge_exponent;
        c.label_ = std::move(label);
        return c;
    }

  private:
    std::function<double(double)> eval_;
    std::vector<double> breaks_;
    double support_lo_ = -std::numeric_limits<double>::infinity();
    double support_hi_ = std::numeric_limits<double>::infinity();
    double edge_exp_ = 0.0;
    std::string label_;
};

// ---------------------------------------------------------------------------
// Structured sums f = sum_m f_m^{(m)}
// ---------------------------------------------------------------------------
struct StructuredTerm {
    unsigned order;
    CoefficientFn fn;
};

struct StructuredUD {
    Locus locus = Locus::Infinity;
    std::vector<StructuredTerm> terms;
};

namespace detail {

// Integral of fn(x) * weight(x) over [lo, hi] with the coefficient's
// breakpoints and (if flagged) an integrable edge at x = 0 handled by the
// power map on the two segments adjacent to 0.
template <class W>
double integrate_against(const CoefficientFn& fn, const W& weight, double lo, double hi,
                         std::vector<double> extra_breaks, const quad::Options& opts,
                         const char* what) {
    lo = std::max(lo, fn.support_lo());
    hi = std::min(hi, fn.support_hi());
    if (!(lo < hi)) return 0.0;
    auto g = [&](double x) { return fn(x) * weight(x); };

    std::vector<double> pts = fn.breakpoints();
    pts.insert(pts.end(), extra_breaks.begin(), extra_breaks.end());
    // A slowly varying factor can leave a kink at 0 even when the power edge
    // is integrable without a map; always split there.
    pts.push_back(0.0);
    const double edge = fn.edge_exponent_at0();
    double value = 0.0;
    if (edge < 0.0 && lo < 0.0 && hi > 0.0) {
        double below = lo, above = hi;
        for (double p : pts) {
            if (p < 0.0) below = std::max(below, p);
            if (p > 0.0) above = std::min(above, p);
        }
        const auto left = quad::integrate_right_singular(g, below, 0.0, edge, opts);
        require_converged(left, what);
        const auto right = quad::integrate_left_singular(g, 0.0, above, edge, opts);
        require_converged(right, what);
        value = left.value + right.value;
        std::vector<double> outer_pts;
        for (double p : pts)
            if (p < below || p > above) outer_pts.push_back(p);
        if (lo < below) {
            const auto r = quad::integrate_with_breaks(g, lo, below, outer_pts, opts);
            require_converged(r, what);
            value += r.value;
        }
        if (above < hi) {
            const auto r = quad::integrate_with_breaks(g, above, hi, outer_pts, opts);
            require_converged(r, what);
            value += r.value;
        }
        return value;
    }
    if (edge < 0.0 && lo == 0.0) {
        double above = hi;
        for (double p : pts)
            if (p > 0.0) above = std::min(above, p);
        const auto r0 = quad::integrate_left_singular(g, 0.0, above, edge, opts);
        require_converged(r0, what);
        value = r0.value;
        if (above < hi) {
            const auto r = quad::integrate_with_breaks(g, above, hi, pts, opts);
            require_converged(r, what);
            value += r.value;
        }
        return value;
    }
    const auto r = quad::integrate_with_breaks(g, lo, hi, pts, opts);
    require_converged(r, what);
    return r.value;
}

}  // namespace detail

// <f, phi> = sum_m (-1)^m int f_m(x) phi^{(m)}(x) dx.
inline double pair_structured(const StructuredUD& f, const TestFunction& phi, double tol) {
    if (f.terms.empty()) return 0.0;
    for (const auto& t : f.terms)
        if (t.order > phi.max_order())
            throw std::out_of_range("pair_structured: term order exceeds phi.max_order");
    const auto opts = detail::pair_options(tol / static_cast<double>(f.terms.size()));
    auto [plo, phi_hi] = phi.support();
    double total = 0.0;
    for (const auto& t : f.terms) {
        auto weight = [&](double x) { return phi.derivative(t.order, x); };
        double v = detail::integrate_against(t.fn, weight, plo, phi_hi, {plo, phi_hi}, opts,
                                             "pair_structured");
        if (t.order % 2 == 1) v = -v;
        total += v;
    }
    return total;
}

// <f(s x), phi> = sum_m (-1)^m s^{-1-m} int f_m(y) phi^{(m)}(y/s) dy.
inline double dilate_pair(const StructuredUD& f, double scale, const TestFunction& phi,
                          double tol) {
    if (!(scale > 0.0)) throw std::invalid_argument("dilate_pair: scale must be positive");
    if (f.terms.empty()) return 0.0;
    for (const auto& t : f.terms)
        if (t.order > phi.max_order())
            throw std::out_of_range("dilate_pair: term order exceeds phi.max_order");
    const double term_tol = tol / static_cast<double>(f.terms.size());
    auto [plo, phi_hi] = phi.support();
    const double ylo = plo * scale, yhi = phi_hi * scale;
    double total = 0.0;
    for (const auto& t : f.terms) {
        // The s^{-1-m} factor below amplifies quadrature error when s < 1, so
        // the absolute stopping tolerance is tightened by the same factor.
        // The relative tolerance is scale-free and stays put.
        const double damp = std::min(1.0, std::pow(scale, 1.0 + static_cast<double>(t.order)));
        auto opts = detail::pair_options(term_tol);
        opts.abs_tol = term_tol * damp;
        auto weight = [&](double y) { return phi.derivative(t.order, y / scale); };
        double v =
            detail::integrate_against(t.fn, weight, ylo, yhi, {ylo, yhi}, opts, "dilate_pair");
        if (t.order % 2 == 1) v = -v;
        total += v * std::pow(scale, -1.0 - static_cast<double>(t.order));
    }
    return total;
}

// ---------------------------------------------------------------------------
// Z-space norms: sup over the grid and m <= m_cap of
//   (1+|x|)^{n+m} |phi^{(m)}(x)| / (h^m M_m)   (a truncated lower bound).
// ---------------------------------------------------------------------------
struct ZNormResult {
    int n = 0;
    double h = 1.0;
    unsigned m_cap = 0;
    double value = 0.0;
    double argmax_x = 0.0;
    unsigned argmax_m = 0;
};

inline ZNormResult zspace_norm(const TestFunction& phi, const weights::WeightSequence& M, int n,
                               double h, unsigned m_cap, const std::vector<double>& x_grid) {
    if (m_cap > phi.max_order())
        throw std::out_of_range("zspace_norm: m_cap exceeds phi.max_order");
    if (!(h > 0.0)) throw std::invalid_argument("zspace_norm: h must be positive");
    ZNormResult res{n, h, m_cap, 0.0, 0.0, 0};
    double best_log = -std::numeric_limits<double>::infinity();
    for (unsigned m = 0; m <= m_cap; ++m) {
        const double penalty = m * std::log(h) + M.log_M(m);
        for (double x : x_grid) {
            const double v = std::fabs(phi.derivative(m, x));
            if (v == 0.0) continue;
            const double lg = (n + static_cast<double>(m)) * std::log1p(std::fabs(x)) +
                              std::log(v) - penalty;
            if (lg > best_log) {
                best_log = lg;
                res.argmax_x = x;
                res.argmax_m = m;
            }
        }
    }
    res.value = std::isfinite(best_log) ? std::exp(best_log) : 0.0;
    return res;
}

// ---------------------------------------------------------------------------
// Growth-bound certificate on a sample grid:
//   |f_m(x)| <= C (ell^m / M_m) (1+|x|)^{alpha+m} L(|x|)   (Infinity locus)
//   |f_m(x)| <= C (ell^m / M_m) |x|^{alpha+m} L(|x|)       (Origin, 0<|x|<=1)
// ---------------------------------------------------------------------------
struct EnvelopeReport {
    double max_ratio = 0.0;
    unsigned argmax_order = 0;
    double argmax_x = 0.0;
    bool ok = false;
};

inline EnvelopeReport check_growth_bound(const StructuredUD& f, const weights::WeightSequence& M,
                                         double C, double ell, double alpha,
                                         const SlowlyVaryingFn& L,
                                         const std::vector<double>& x_grid) {
    if (!(C > 0.0) || !(ell > 0.0))
        throw std::invalid_argument("check_growth_bound: C and ell must be positive");
    EnvelopeReport rep;
    for (const auto& t : f.terms) {
        const unsigned m = t.order;
        const double scale = C * std::exp(m * std::log(ell) - M.log_M(m));
        for (double x : x_grid) {
            if (x == 0.0) continue;
            if (f.locus == Locus::Origin && std::fabs(x) > 1.0) continue;
            const double base =
                (f.locus == Locus::Infinity) ? 1.0 + std::fabs(x) : std::fabs(x);
            const double envelope = scale * std::pow(base, alpha + m) * L(std::fabs(x));
            const double ratio = std::fabs(t.fn(x)) / envelope;
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.argmax_order = m;
                rep.argmax_x = x;
            }
        }
    }
    rep.ok = rep.max_ratio <= 1.0 + 1e-9;
    return rep;
}

}  // namespace qakit::gfun
