// Weight sequences M_p (stored as log M_p), the classical conditions on them
// (log-convexity, stability under sums of indices, strong non-quasianalyticity)
// and certified tail sums of factorial- and Stirling-weighted series
//   sum_{k>=p} k! l^k / M_k      and      sum_{k>=p} S(k+1, p+1) l^k / M_k,
// each truncated with an explicit remainder bound (ratio domination), never a
// silent cut-off.
#pragma once

#include "qakit/comb.hpp"
#include "qakit/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qakit::weights {

enum class Generator { Gevrey, ExplicitTable };

class WeightSequence {
  public:
    static WeightSequence gevrey(double s, std::size_t p_max) {
        if (!(s > 1.0)) throw std::invalid_argument("WeightSequence: Gevrey order s must exceed 1");
        if (p_max < 2) throw std::invalid_argument("WeightSequence: p_max must be at least 2");
        WeightSequence w;
        w.generator_ = Generator::Gevrey;
        w.s_ = s;
        w.p_max_ = p_max;
        const std::size_t ext = std::max<std::size_t>(p_max, 4096);
        w.log_values_.resize(ext + 1);
        double logfact = 0.0;  // log p!, accumulated so the table is reproducible term by term
        w.log_values_[0] = 0.0;
        for (std::size_t p = 1; p <= ext; ++p) {
            logfact += std::log(static_cast<double>(p));
            w.log_values_[p] = s * logfact;
        }
        return w;
    }

    static WeightSequence explicit_table(const std::vector<double>& values) {
        if (values.size() < 3)
            throw std::invalid_argument("WeightSequence: explicit table needs at least 3 entries");
        if (values[0] != 1.0)
            throw std::invalid_argument("WeightSequence: M_0 must equal 1");
        WeightSequence w;
        w.generator_ = Generator::ExplicitTable;
        w.p_max_ = values.size() - 1;
        w.log_values_.reserve(values.size());
        for (double v : values) {
            if (!(v > 0.0)) throw std::invalid_argument("WeightSequence: entries must be positive");
            w.log_values_.push_back(std::log(v));
        }
        return w;
    }

    Generator generator() const { return generator_; }
    double gevrey_s() const { return s_; }
    std::size_t p_max() const { return p_max_; }

    // log M_p. Gevrey sequences extend analytically beyond the stored table
    // (the generator is part of the sequence's definition); explicit tables
    // cannot, and asking past the end is an error rather than a guess.
    double log_M(std::size_t p) const {
        if (p < log_values_.size()) return log_values_[p];
        if (generator_ == Generator::Gevrey) return s_ * std::lgamma(static_cast<double>(p) + 1.0);
        throw std::out_of_range("WeightSequence: table exhausted at p = " + std::to_string(p));
    }

    bool extendable() const { return generator_ == Generator::Gevrey; }

  private:
    WeightSequence() = default;
    Generator generator_ = Generator::Gevrey;
    double s_ = 0.0;
    std::size_t p_max_ = 0;
    std::vector<double> log_values_;
};

// ---------------------------------------------------------------------------
// Condition report.
// ---------------------------------------------------------------------------
struct ConditionReport {
    bool m1 = false;                    // log-convexity on the table
    bool m2 = false;                    // M_{p+q} <= A H^{p+q} M_p M_q for some grid (A, H)
    double m2_A = std::numeric_limits<double>::quiet_NaN();
    double m2_H = std::numeric_limits<double>::quiet_NaN();
    bool m3 = false;                    // sum_{q>p} M_{q-1}/M_q <= A p M_p/M_{p+1}
    double m3_A = std::numeric_limits<double>::quiet_NaN();
    std::size_t p_scanned = 0;
    std::string notes;
};

namespace detail {

// Certified upper bound on sum of t_q = M_{q-1}/M_q for q in (p, infinity).
// Gevrey: t_q = q^{-s} exactly; partial sum plus the integral remainder
// Q^{1-s}/(s-1), which dominates the true tail. Explicit tables: partial sum
// over the table plus a geometric trailing bound, valid only when the
// trailing term ratios are < 1 and non-increasing; otherwise the table is
// too short to decide and that is an error, not a pass.
inline double m3_series_upper(const WeightSequence& M, std::size_t p, std::string& note) {
    if (M.generator() == Generator::Gevrey) {
        const double s = M.gevrey_s();
        double sum = 0.0;
        std::size_t q = p + 1;
        for (;; ++q) {
            const double remainder = std::pow(static_cast<double>(q), 1.0 - s) / (s - 1.0);
            if (remainder < 1e-3 * sum || q > p + 4096) return sum + remainder;
            sum += std::pow(static_cast<double>(q), -s);
        }
    }
    // explicit table
    const std::size_t Q = M.p_max();
    if (p + 3 > Q)
        throw std::runtime_error("WeightSequence: table too short to bound the (M.3) tail at p = " +
                                 std::to_string(p));
    double sum = 0.0;
    std::vector<double> t(Q + 1, 0.0);
    for (std::size_t q = p + 1; q <= Q; ++q) {
        t[q] = std::exp(M.log_M(q - 1) - M.log_M(q));
        sum += t[q];
    }
    const double r1 = t[Q] / t[Q - 1], r0 = t[Q - 1] / t[Q - 2];
    if (r1 >= 1.0 || r0 >= 1.0) {
        note = "trailing terms M_{q-1}/M_q do not decay; series diverges on the available evidence";
        return std::numeric_limits<double>::infinity();
    }
    if (r1 > r0 + 1e-12)
        throw std::runtime_error(
            "WeightSequence: table too short to bound the (M.3) tail (term ratios still growing)");
    return sum + t[Q] * r1 / (1.0 - r1);
}

}  // namespace detail

inline ConditionReport check_conditions(const WeightSequence& M,
                                        const std::vector<double>& A_search,
                                        const std::vector<double>& H_search) {
    if (A_search.empty() || H_search.empty())
        throw std::invalid_argument("check_conditions: empty search grid");
    ConditionReport rep;
    const std::size_t P = M.p_max();
    rep.p_scanned = P;

    // (M.1): M_p^2 <= M_{p-1} M_{p+1}, scanned directly on the table in logs.
    rep.m1 = true;
    for (std::size_t p = 1; p + 1 <= P; ++p) {
        const double slack = 1e-12 * std::max(1.0, std::fabs(M.log_M(p)));
        if (M.log_M(p - 1) + M.log_M(p + 1) < 2.0 * M.log_M(p) - slack) {
            rep.m1 = false;
            rep.notes += "(M.1) fails at p = " + std::to_string(p) + "; ";
            break;
        }
    }

    // (M.2): existence of grid (A, H) with log M_{p+q} <= log A + (p+q) log H
    //        + log M_p + log M_q for all p + q <= p_max.
    const double logA_max = std::log(*std::max_element(A_search.begin(), A_search.end()));
    for (double H : H_search) {
        double need = -std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p <= P; ++p)
            for (std::size_t q = 0; p + q <= P; ++q) {
                const double g = M.log_M(p + q) - M.log_M(p) - M.log_M(q) -
                                 static_cast<double>(p + q) * std::log(H);
                need = std::max(need, g);
            }
        if (need <= logA_max + 1e-12) {
            rep.m2 = true;
            rep.m2_H = H;
            for (double A : A_search)
                if (std::log(A) >= need - 1e-12) { rep.m2_A = A; break; }
            break;
        }
    }
    if (!rep.m2) rep.notes += "(M.2) witness not found on the search grid; ";

    // (M.3): sup over p of [sum_{q>p} M_{q-1}/M_q] / (p M_p / M_{p+1}),
    // with the series replaced by its certified upper bound. An uncertifiable
    // tail is reported as undetermined in the notes, never as a pass.
    double worst = 0.0;
    bool decided = true;
    for (std::size_t p = 1; p + 1 <= P; ++p) {
        std::string note;
        double series;
        try {
            series = detail::m3_series_upper(M, p, note);
        } catch (const std::runtime_error& e) {
            rep.notes += std::string("(M.3) undetermined: ") + e.what() + "; ";
            decided = false;
            break;
        }
        if (!note.empty()) {
            rep.notes += "(M.3): " + note + "; ";
            worst = std::numeric_limits<double>::infinity();
            break;
        }
        const double envelope = static_cast<double>(p) * std::exp(M.log_M(p) - M.log_M(p + 1));
        worst = std::max(worst, series / envelope);
    }
    rep.m3_A = worst;
    rep.m3 = decided && std::isfinite(worst);
    return rep;
}

// ---------------------------------------------------------------------------
// Certified tail sums.
// ---------------------------------------------------------------------------
struct TailSum {
    double value = 0.0;        // partial sum through k_stop
    double tail_bound = 0.0;   // certified bound on the omitted remainder
    std::size_t k_stop = 0;    // last index included
};

namespace detail {

// Shared driver: sums exp(log_term(k)) for k >= p, stopping once the term
// ratio r(k) = term(k+1)/term(k) has dropped below 1 and the geometric bound
// term(k) * r/(1-r) certifies the remainder below tol. Certification needs
// r to be trustworthy beyond the horizon: analytic for Gevrey sequences,
// observed non-increasing for explicit tables (else "table exhausted").
template <class LogTerm, class Ratio>
TailSum sum_with_ratio_domination(const WeightSequence& M, std::size_t p, double tol,
                                  LogTerm log_term, Ratio ratio) {
    TailSum out;
    double prev_ratio = std::numeric_limits<double>::infinity();
    std::size_t window = 0;  // consecutive indices with non-increasing ratio
    for (std::size_t k = p;; ++k) {
        if (!M.extendable() && k + 1 > M.p_max())  // ratio(k) looks at M_{k+1}
            throw std::runtime_error("tail sum: table exhausted before certification (k = " +
                                     std::to_string(k) + ")");
        out.value += std::exp(log_term(k));
        out.k_stop = k;
        const double r = ratio(k);
        window = (r <= prev_ratio + 1e-15) ? window + 1 : 0;
        prev_ratio = r;
        if (r < 1.0) {
            const bool ratio_trusted = M.extendable() || window >= 3;
            const double bound = std::exp(log_term(k)) * r / (1.0 - r);
            if (ratio_trusted && bound < tol) {
                out.tail_bound = bound;
                return out;
            }
        }
        if (k > p + 500000) throw std::runtime_error("tail sum: no certification after 5e5 terms");
    }
}

}  // namespace detail

// sum_{k>=p} k! l^k / M_k with certified truncation error below tol.
inline TailSum tail_factorial_sum(const WeightSequence& M, double ell, std::size_t p, double tol) {
    if (!(ell > 0.0)) throw std::invalid_argument("tail_factorial_sum: l must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tail_factorial_sum: tol must be positive");
    const double log_ell = std::log(ell);
    auto log_term = [&](std::size_t k) {
        return std::lgamma(static_cast<double>(k) + 1.0) + static_cast<double>(k) * log_ell - M.log_M(k);
    };
    auto ratio = [&](std::size_t k) {
        return static_cast<double>(k + 1) * ell * std::exp(M.log_M(k) - M.log_M(k + 1));
    };
    return detail::sum_with_ratio_domination(M, p, tol, log_term, ratio);
}

// sum_{k>=p} S(k+1, p+1) l^k / M_k. Terms use exact Stirling numbers; the
// remainder is certified through the domination chain
//   S(k+1, p+1) <= 2^{k+1} (p+1)^{k-p} <= 2^{k+1} k!/p!,
// i.e. by the factorial series at 2l scaled with 2/p!.
inline TailSum tail_stirling_sum(const WeightSequence& M, double ell, std::size_t p, double tol) {
    if (!(ell > 0.0)) throw std::invalid_argument("tail_stirling_sum: l must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tail_stirling_sum: tol must be positive");
    const double log_ell = std::log(ell);
    const double log_2ell = std::log(2.0 * ell);
    const double log_fac_p = std::lgamma(static_cast<double>(p) + 1.0);

    TailSum out;
    double prev_ratio = std::numeric_limits<double>::infinity();
    std::size_t window = 0;
    for (std::size_t k = p;; ++k) {
        if (!M.extendable() && k + 1 > M.p_max())
            throw std::runtime_error("tail sum: table exhausted before certification (k = " +
                                     std::to_string(k) + ")");
        const double log_term = log_exact(comb::stirling2(static_cast<unsigned>(k + 1),
                                                          static_cast<unsigned>(p + 1))) +
                                static_cast<double>(k) * log_ell - M.log_M(k);
        out.value += std::exp(log_term);
        out.k_stop = k;
        // dominating factorial term v_k = k! (2l)^k / M_k and its ratio
        const double log_dom = std::lgamma(static_cast<double>(k) + 1.0) +
                               static_cast<double>(k) * log_2ell - M.log_M(k) +
                               std::log(2.0) - log_fac_p;
        const double r = static_cast<double>(k + 1) * 2.0 * ell * std::exp(M.log_M(k) - M.log_M(k + 1));
        window = (r <= prev_ratio + 1e-15) ? window + 1 : 0;
        prev_ratio = r;
        if (r < 1.0) {
            const bool ratio_trusted = M.extendable() || window >= 3;
            const double bound = std::exp(log_dom) * r / (1.0 - r);
            if (ratio_trusted && bound < tol) {
                out.tail_bound = bound;
                return out;
            }
        }
        if (k > p + 500000) throw std::runtime_error("tail sum: no certification after 5e5 terms");
    }
}

// ---------------------------------------------------------------------------
// Empirical envelope constants: C = max_p lhs(p)/rhs(p) for
//   sum_{k>=p} k! l^k/M_k        vs  p! l^p / M_p      (factorial form)
//   sum_{k>=p} S(k+1,p+1) l^k/M_k vs  (2l)^p / M_p     (Stirling form)
// over 0 <= p <= p_hi.
// ---------------------------------------------------------------------------
struct TailBoundReport {
    double ell = 0.0;
    std::size_t p_hi = 0;
    std::vector<double> lhs_factorial, rhs_factorial;
    std::vector<double> lhs_stirling, rhs_stirling;
    double C_factorial = 0.0;
    double C_stirling = 0.0;
    double max_tail_bound = 0.0;  // worst certified truncation remainder
    bool satisfied = false;       // both constants finite, all sums certified
};

inline TailBoundReport estimate_tail_constants(const WeightSequence& M, double ell,
                                               std::size_t p_hi, double tol = 1e-12) {
    TailBoundReport rep;
    rep.ell = ell;
    rep.p_hi = p_hi;
    const double log_ell = std::log(ell);
    for (std::size_t p = 0; p <= p_hi; ++p) {
        const TailSum f = tail_factorial_sum(M, ell, p, tol);
        const TailSum s = tail_stirling_sum(M, ell, p, tol);
        const double rf = std::exp(std::lgamma(static_cast<double>(p) + 1.0) +
                                   static_cast<double>(p) * log_ell - M.log_M(p));
        const double rs = std::exp(static_cast<double>(p) * std::log(2.0 * ell) - M.log_M(p));
        rep.lhs_factorial.push_back(f.value);
        rep.rhs_factorial.push_back(rf);
        rep.lhs_stirling.push_back(s.value);
        rep.rhs_stirling.push_back(rs);
        rep.C_factorial = std::max(rep.C_factorial, f.value / rf);
        rep.C_stirling = std::max(rep.C_stirling, s.value / rs);
        rep.max_tail_bound = std::max({rep.max_tail_bound, f.tail_bound, s.tail_bound});
    }
    rep.satisfied = std::isfinite(rep.C_factorial) && std::isfinite(rep.C_stirling);
    return rep;
}

}  // namespace qakit::weights
