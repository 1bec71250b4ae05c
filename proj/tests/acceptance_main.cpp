// Acceptance gate: every guarantee the library advertises, checked end to end
// against independent oracles. Prints one pass/fail line per criterion and
// exits nonzero if any of them fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qakit/scenario.hpp"

using namespace qakit;
using gfun::CoefficientFn;
using gfun::ModelDistribution;
using gfun::StructuredUD;
using gfun::TestFunction;
using gfun::Window;
using svf::Locus;
using svf::SlowlyVaryingFn;

namespace {

const double kE = std::exp(1.0);

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double rel_err(double got, double want) {
    return want != 0.0 ? std::fabs(got - want) / std::fabs(want) : std::fabs(got);
}

quad::Options tight_opts() {
    quad::Options o;
    o.abs_tol = o.rel_tol = 1e-13;
    return o;
}

std::string scenario_path(const char* name) {
    const char* dir = std::getenv("QAKIT_SCENARIO_DIR");
    require(dir != nullptr && *dir != '\0', "QAKIT_SCENARIO_DIR is not set");
    return std::string(dir) + "/" + name;
}

StructuredUD single_term(unsigned order, CoefficientFn fn, Locus locus = Locus::Infinity) {
    StructuredUD f;
    f.locus = locus;
    f.terms.push_back({order, std::move(fn)});
    return f;
}

// B_{k,j}(1!, 2!, ...) from the truncated series (t/(1-t))^j / j!, exact.
ExactInt bell_series_oracle(unsigned k, unsigned j) {
    std::vector<ExactRat> base(k + 1, ExactRat(1));
    base[0] = 0;
    std::vector<ExactRat> pw(k + 1, ExactRat(0));
    pw[0] = 1;
    for (unsigned rep = 0; rep < j; ++rep) {
        std::vector<ExactRat> next(k + 1, ExactRat(0));
        for (unsigned a = 0; a <= k; ++a) {
            if (pw[a] == 0) continue;
            for (unsigned b = 1; a + b <= k; ++b) next[a + b] += pw[a] * base[b];
        }
        pw = std::move(next);
    }
    const ExactRat val = pw[k] * ExactRat(factorial_exact(k), factorial_exact(j));
    require(denominator(val) == 1, "bell series oracle: non-integral coefficient");
    return numerator(val);
}

// <x_+^alpha, phi> by direct quadrature, handling a left support end at 0.
double plus_power_pairing(double alpha, const TestFunction& phi) {
    const auto [lo, hi] = phi.support();
    const auto opts = tight_opts();
    auto f = [&](double x) { return std::pow(x, alpha) * phi(x); };
    quad::Result r;
    if (lo > 0.0) r = quad::integrate(f, lo, hi, opts);
    else r = quad::integrate_left_singular(f, 0.0, hi, alpha, opts);
    require(r.converged, "plus-power oracle quadrature failed");
    return r.value;
}

double minus_power_pairing(double alpha, const TestFunction& phi) {
    const auto [lo, hi] = phi.support();
    if (lo >= 0.0) return 0.0;
    const auto opts = tight_opts();
    auto f = [&](double x) { return std::pow(x, alpha) * phi(-x); };
    quad::Result r;
    if (hi < 0.0) r = quad::integrate(f, -hi, -lo, opts);
    else r = quad::integrate_left_singular(f, 0.0, -lo, alpha, opts);
    require(r.converged, "minus-power oracle quadrature failed");
    return r.value;
}

// PV <1/x, phi> = int_0^inf (phi(x) - phi(-x))/x dx by direct quadrature.
double pv_pairing(const TestFunction& phi) {
    const auto [lo, hi] = phi.support();
    const double top = std::max(std::fabs(lo), std::fabs(hi));
    const auto r = quad::integrate(
        [&](double x) { return x == 0.0 ? 0.0 : (phi(x) - phi(-x)) / x; }, 0.0, top,
        tight_opts());
    require(r.converged, "principal-value oracle quadrature failed");
    return r.value;
}

// ---------------------------------------------------------------------------
// 1. Exact combinatorics against independent oracles.
// ---------------------------------------------------------------------------
std::string combinatorics() {
    for (unsigned m = 0; m <= 12; ++m)
        for (unsigned j0 = 0; j0 <= 8; ++j0) {
            const auto pair = comb::recip_derivative_oracle(m, j0);
            require(pair.lhs == pair.rhs, "reciprocal identity broke at m=" + std::to_string(m) +
                                              ", j0=" + std::to_string(j0));
        }
    for (unsigned m = 0; m <= 20; ++m)
        for (unsigned j = 0; j <= m; ++j) {
            ExactInt bound = pow_exact(4, m);
            for (unsigned i = j + 1; i <= m; ++i) bound *= i;
            require(abs(comb::recip_coeff(m, j)) <= bound,
                    "coefficient bound broke at m=" + std::to_string(m));
        }
    for (unsigned k = 1; k <= 15; ++k)
        for (unsigned j = 1; j <= k; ++j)
            require(comb::bell_factorial(k, j) == bell_series_oracle(k, j),
                    "bell factorial mismatch at k=" + std::to_string(k));
    require(comb::stirling2_bound_check(30), "stirling2 bound check failed");
    require(comb::exp_chain_check(10, 4), "exponential chain identity failed");
    return "recip ids m<=12, |c_{m,j}| bound m<=20, bell GF k<=15, stirling2(30), exp_chain(10,4)";
}

// ---------------------------------------------------------------------------
// 2. Weight-sequence tail envelopes with certified truncation.
// ---------------------------------------------------------------------------
std::string weight_envelopes() {
    double worst_tail = 0.0;
    for (double s : {1.5, 2.0, 3.0}) {
        const auto M = weights::WeightSequence::gevrey(s, 64);
        for (double ell : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            const auto rep = weights::estimate_tail_constants(M, ell, 50, 1e-12);
            require(rep.satisfied, "tail constants not finite at s=" + fmt(s) + ", l=" + fmt(ell));
            require(rep.max_tail_bound < 1e-12, "tail certification too loose at l=" + fmt(ell));
            for (std::size_t p = 0; p <= rep.p_hi; ++p) {
                const double slack = 1.0 + 1e-12;
                require(rep.lhs_factorial[p] <= rep.C_factorial * rep.rhs_factorial[p] * slack,
                        "factorial envelope broke at p=" + std::to_string(p));
                require(rep.lhs_stirling[p] <= rep.C_stirling * rep.rhs_stirling[p] * slack,
                        "stirling envelope broke at p=" + std::to_string(p));
            }
            worst_tail = std::max(worst_tail, rep.max_tail_bound);
        }
    }
    const auto probe = weights::estimate_tail_constants(weights::WeightSequence::gevrey(2.0, 64),
                                                        1.0, 0, 1e-12);
    const double err = std::fabs(probe.lhs_factorial[0] - kE);
    require(err <= 1e-12, "p=0 factorial sum is off e by " + fmt(err));
    return "s in {1.5,2,3} x l in {0.25..4}, p<=50, worst tail " + fmt(worst_tail) +
           ", |sum-e| " + fmt(err);
}

// ---------------------------------------------------------------------------
// 3. Dilation homogeneity and the finite-part closed form.
// ---------------------------------------------------------------------------
std::string homogeneity_and_finite_part() {
    const auto L = SlowlyVaryingFn::one();
    const auto phi = TestFunction::bump(2.0, 1.0);
    double worst = 0.0;
    for (double alpha : {-0.5, 0.0, 0.5, 2.0}) {
        const auto f =
            single_term(0, CoefficientFn::power_law(1.0, 0.0, 0, alpha, L, 1.0, Window::None,
                                                    Locus::Infinity));
        const double base = gfun::dilate_pair(f, 1.0, phi, 1e-11);
        for (double s : {2.0, 10.0, 100.0}) {
            const double got = gfun::dilate_pair(f, s, phi, 1e-11);
            const double e = rel_err(got / base, std::pow(s, alpha));
            worst = std::max(worst, e);
            require(e <= 1e-8, "dilation scaling off by " + fmt(e) + " at alpha=" + fmt(alpha) +
                                   ", s=" + fmt(s));
        }
    }

    const auto phi0 = TestFunction::bump(0.0, 1.0);
    const double v = gfun::pair_model(ModelDistribution::finite_part_plus(1), phi0, 1e-10);
    const auto oracle = quad::integrate(
        [](double x) {
            const double w = 1.0 - x * x;
            return std::exp(-1.0) * std::expm1(-x * x / w) / x;
        },
        1e-30, 1.0, tight_opts());
    require(oracle.converged, "finite-part oracle quadrature failed");
    const double pf_err = std::fabs(v - oracle.value);
    require(pf_err <= 1e-9, "finite part off the closed form by " + fmt(pf_err));
    return "scaling rel err " + fmt(worst) + ", finite-part closed form abs err " + fmt(pf_err);
}

// ---------------------------------------------------------------------------
// 4. Noninteger ladder constants from the cookbook scenarios.
// ---------------------------------------------------------------------------
std::string run_limit_scenario(const char* file, double tol,
                               const std::function<double(const qa::StructuralData&,
                                                          const TestFunction&)>& predict) {
    const auto s = scenario::parse_scenario(scenario_path(file));
    const auto L = SlowlyVaryingFn::parse(s.L, s.locus);
    const auto f = scenario::build_structured(s, L);
    const auto data = scenario::build_structural(s);
    double worst = 0.0;
    for (const auto& tf : s.test_functions) {
        const auto phi = scenario::build_test_function(tf);
        const auto est =
            qa::quasi_limit(f, L, s.alpha, phi, data, s.ladder, s.method, s.tol.quadrature);
        require(est.settled, std::string(file) + ": ladder did not settle");
        const double e = rel_err(est.extrapolated, predict(data, phi));
        worst = std::max(worst, e);
        require(e <= tol, std::string(file) + ": rel err " + fmt(e) + " above " + fmt(tol));
    }
    return fmt(worst);
}

std::string noninteger_constants() {
    const auto predict = [](const qa::StructuralData& data, const TestFunction& phi) {
        double c_plus = 0.0;
        for (const auto& row : data.c_table) {
            double ratio = 1.0;
            for (unsigned i = 1; i <= row.m; ++i) ratio *= data.alpha + static_cast<double>(i);
            c_plus += row.c_plus * ratio;
        }
        require(std::fabs(c_plus - 6.25) <= 1e-12, "combined constant is not 1 + 1.5 + 3.75");
        return c_plus * plus_power_pairing(data.alpha, phi);
    };
    const auto plain = run_limit_scenario("quasi-limit-alpha-half.json", 1e-3, predict);
    const auto logged = run_limit_scenario("quasi-limit-alpha-half-log.json", 5e-2, predict);
    return "plain rel err " + plain + " (tol 1e-3), log rel err " + logged + " (tol 5e-2)";
}

// ---------------------------------------------------------------------------
// 5. Degree -1 expansion against the integral oracle.
// ---------------------------------------------------------------------------
std::string degree_minus_one() {
    const auto L = SlowlyVaryingFn::one();
    const auto f0 =
        CoefficientFn::power_law(1.0, 0.0, 0, -1.0, L, kE, Window::Sharp, Locus::Infinity);
    const auto phi = TestFunction::bump(0.5, 1.0);
    const qa::Ladder lad{100.0, 10.0, 5};

    const auto f = single_term(0, f0);
    const double hi = phi.support().second;
    double worst = 0.0;
    for (double s : qa::make_scales(lad, Locus::Infinity)) {
        const double mine = s * gfun::dilate_pair(f, s, phi, 1e-10);
        const auto oracle =
            quad::integrate([&](double u) { return phi(u) / u; }, kE / s, hi, tight_opts());
        require(oracle.converged, "tail-integral oracle failed at s=" + fmt(s));
        const double diff = std::fabs(mine - oracle.value);
        worst = std::max(worst, diff);
        require(diff < 1e-6, "pairing off the integral oracle by " + fmt(diff));
    }

    const auto rep = qa::negint_expansion_check(f0, 1.0, 0.0, L, phi, lad, 1e-5);
    require(rep.converged, "expansion residuals did not converge");
    const double decay_err = std::fabs(rep.fitted_decay - 1.0);
    require(decay_err <= 0.2, "fitted decay " + fmt(rep.fitted_decay) + " not within 20% of 1");
    return "oracle abs err " + fmt(worst) + ", residual " +
           fmt(std::fabs(rep.residuals.back().ratio)) + ", decay " + fmt(rep.fitted_decay);
}

// ---------------------------------------------------------------------------
// 6. Degree -1 extension: primitive drift and the de Haan residuals.
// ---------------------------------------------------------------------------
std::string extension_drift() {
    const auto L = SlowlyVaryingFn::one();
    const auto f0 =
        CoefficientFn::power_law(1.0, 0.0, 0, -1.0, L, kE, Window::Sharp, Locus::Infinity);
    qa::ExtensionData data;
    data.kind = qa::ExtensionKind::NegIntOrder;
    data.k = 1;
    data.c = 1.0;
    data.a = {0.0};
    const std::vector<TestFunction> phis{TestFunction::plateau(1.0, 2.0),
                                         TestFunction::bump(0.5, 1.0)};
    const auto rep =
        qa::extension_expansion(single_term(0, f0), {}, data, L, phis, {100.0, 10.0, 5}, 1e-3);

    double worst_b = 0.0;
    for (const auto& row : rep.b_values) {
        const double err = std::fabs(row.ratio - (std::log(row.scale) - 1.0));
        worst_b = std::max(worst_b, err);
        require(err <= 1e-8, "primitive b(s) off log(s)-1 by " + fmt(err));
    }
    require(rep.has_dehaan && rep.dehaan.converged, "de Haan residuals did not converge");
    double worst_dehaan = 0.0;
    for (const auto& rs : rep.dehaan.residuals) {
        worst_dehaan = std::max(worst_dehaan, std::fabs(rs.back()));
        require(std::fabs(rs.back()) <= 1e-3, "de Haan residual stuck at " + fmt(rs.back()));
    }
    double worst_last = 0.0;
    for (const auto& rows : rep.residuals) {
        worst_last = std::max(worst_last, std::fabs(rows.back().residual));
        require(std::fabs(rows.back().residual) < 1e-3,
                "extension residual at the last rung is " + fmt(rows.back().residual));
    }
    require(rep.converged, "extension report did not converge");
    return "b err " + fmt(worst_b) + ", last-rung residual " + fmt(worst_last) +
           ", dehaan residual " + fmt(worst_dehaan);
}

// ---------------------------------------------------------------------------
// 7. Origin constants from the mirrored scenarios: noninteger two-sided powers
//    and the degree -1 delta/principal-value pair.
// ---------------------------------------------------------------------------
std::string origin_constants() {
    const auto predict_mirror = [](const qa::StructuralData& data, const TestFunction& phi) {
        double c_plus = 0.0, c_minus = 0.0;
        for (const auto& row : data.c_table) {
            double ratio = 1.0;
            for (unsigned i = 1; i <= row.m; ++i) ratio *= data.alpha + static_cast<double>(i);
            c_plus += row.c_plus * ratio;
            c_minus += row.c_minus * ratio;
        }
        return c_plus * plus_power_pairing(data.alpha, phi) +
               c_minus * minus_power_pairing(data.alpha, phi);
    };
    const auto predict_delta = [](const qa::StructuralData& data, const TestFunction& phi) {
        const auto gb = qa::predicted_constants_origin(data);
        return gb.gamma * phi(0.0) + gb.beta * pv_pairing(phi);
    };
    const auto mirror = run_limit_scenario("origin-mirror.json", 1e-3, predict_mirror);
    const auto mirror_log = run_limit_scenario("origin-mirror-log.json", 5e-2, predict_mirror);
    const auto delta = run_limit_scenario("origin-delta.json", 1e-3, predict_delta);
    const auto delta_log = run_limit_scenario("origin-delta-log.json", 5e-2, predict_delta);
    return "mirror rel err " + mirror + "/" + mirror_log + ", delta rel err " + delta + "/" +
           delta_log + " (tols 1e-3/5e-2)";
}

// ---------------------------------------------------------------------------
// 8. Locality of the limit under perturbations away from the active locus.
// ---------------------------------------------------------------------------
std::string locality() {
    const auto L = SlowlyVaryingFn::one();
    StructuredUD f;
    for (unsigned m = 0; m <= 2; ++m)
        f.terms.push_back({m, CoefficientFn::power_law(1.0, 0.0, 0, 0.5 + m, L, 1.0,
                                                       Window::Smooth, Locus::Infinity)});
    const auto g = single_term(0, CoefficientFn::bump_like(TestFunction::bump(2.0, 1.0), 10.0));
    const auto data = qa::StructuralData::noninteger(0.5, {{0, 1.0, 0.0}, {1, 1.0, 0.0},
                                                           {2, 1.0, 0.0}});
    const auto phi = TestFunction::bump(0.0, 1.5);
    const auto rep = qa::locality_check(f, g, L, 0.5, phi, data, {100.0, 10.0, 5},
                                        qa::Method::PlainLast, 1e-3);
    require(rep.within_tol, "compact perturbation moved the limit by " + fmt(rep.difference));

    const auto Lo = SlowlyVaryingFn::one(Locus::Origin);
    const auto fo = single_term(
        0, CoefficientFn::power_law(1.0, 0.0, 0, -0.5, Lo, 1.0, Window::Smooth, Locus::Origin),
        Locus::Origin);
    const auto go = single_term(0, CoefficientFn::bump_like(TestFunction::bump(2.0, 1.0)),
                                Locus::Origin);
    const auto data_o = qa::StructuralData::noninteger(-0.5, {{0, 1.0, 0.0}});
    const auto psi = TestFunction::bump(0.0, 2.0);  // sup |supp psi| = 2, threshold 1/6
    require(gfun::dilate_pair(go, 1.0, psi, 1e-10) != 0.0,
            "origin perturbation is trivially zero at scale 1");
    const auto rep_o = qa::locality_check(fo, go, Lo, -0.5, psi, data_o, {0.16, 0.1, 3},
                                          qa::Method::PlainLast, 1e-3);
    require(rep_o.exact_zero, "origin perturbation leaked below the support threshold");
    return "compact shift " + fmt(rep.difference) + " (tol 1e-3), origin leak exactly 0 below 1/6";
}

// ---------------------------------------------------------------------------
// 9. Pairings with functions vanishing near 0 die faster than any power.
// ---------------------------------------------------------------------------
std::string zspace_decay() {
    const auto f = single_term(0, CoefficientFn::bump_like(TestFunction::bump(2.0, 0.5)),
                               Locus::Origin);
    const auto M = weights::WeightSequence::gevrey(2.0, 64);
    const auto psi = TestFunction::gaussian(1.0);
    const auto rep = qa::zspace_locality_check(f, M, psi, 3, {0.1, 0.1, 3}, 1e-6);
    require(std::isfinite(rep.psi_norm.value), "gaussian z-norm is not finite");
    double worst = 0.0;
    for (unsigned n = 0; n < rep.scaled.size(); ++n) {
        const double last = std::fabs(rep.scaled[n].back());
        worst = std::max(worst, last);
        require(last < 1e-6, "eps^-" + std::to_string(n) + " pairing stuck at " + fmt(last));
    }
    require(rep.converged, "z-space report did not converge");
    return "worst scaled pairing " + fmt(worst) + " at eps=1e-3, N<=3";
}

struct Criterion {
    const char* label;
    std::function<std::string()> run;
    double budget_s;  // 0 = no explicit budget
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"exact combinatorics", combinatorics, 10.0},
        {"weight tail envelopes", weight_envelopes, 30.0},
        {"homogeneity and finite part", homogeneity_and_finite_part, 30.0},
        {"noninteger ladder constants", noninteger_constants, 120.0},
        {"degree -1 expansion oracle", degree_minus_one, 0.0},
        {"degree -1 extension and de Haan", extension_drift, 0.0},
        {"origin ladder constants", origin_constants, 0.0},
        {"perturbation locality", locality, 0.0},
        {"z-space decay", zspace_decay, 0.0},
    };

    bool all_pass = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        std::string note;
        bool pass = true;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            note = c.run();
        } catch (const std::exception& e) {
            pass = false;
            note = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
        if (pass && c.budget_s > 0.0 && secs > c.budget_s) {
            pass = false;
            note += " [exceeded " + fmt(c.budget_s) + "s budget]";
        }
        all_pass = all_pass && pass;
        std::printf("[%s] %zu. %s: %s (%.2fs)\n", pass ? "PASS" : "FAIL", i + 1, c.label,
                    note.c_str(), secs);
    }
    return all_pass ? 0 : 1;
}
