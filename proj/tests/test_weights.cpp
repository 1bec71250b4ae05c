#include <catch2/catch_amalgamated.hpp>

#include "qakit/weights.hpp"

#include <cmath>
#include <vector>

namespace weights = qakit::weights;
using weights::WeightSequence;

namespace {

const std::vector<double> kAGrid = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
const std::vector<double> kHGrid = {1.2, 1.5, 2.0, 2.83, 4.0, 5.66, 8.0, 16.0};

// Brute-force oracle for sum_{k=p}^{K} k! l^k / M_k with a huge fixed horizon;
// fine for the small (s, l) cases it is used on.
double factorial_sum_oracle(double s, double ell, unsigned p, unsigned K = 400) {
    double sum = 0.0;
    for (unsigned k = p; k <= K; ++k)
        sum += std::exp(std::lgamma(k + 1.0) + k * std::log(ell) - s * std::lgamma(k + 1.0));
    return sum;
}

std::vector<double> gevrey_values(double s, unsigned p_max) {
    std::vector<double> v(p_max + 1);
    for (unsigned p = 0; p <= p_max; ++p) v[p] = std::exp(s * std::lgamma(p + 1.0));
    return v;
}

}  // namespace

TEST_CASE("gevrey table stores s * log p! term by term", "[weights]") {
    const double s = 2.0;
    auto M = WeightSequence::gevrey(s, 64);
    double logfact = 0.0;
    for (std::size_t p = 0; p <= 64; ++p) {
        if (p > 0) logfact += std::log(static_cast<double>(p));
        REQUIRE(M.log_M(p) == s * logfact);  // same accumulation, bitwise
    }
    REQUIRE(M.log_M(0) == 0.0);  // M_0 = 1
    // analytic extension beyond the stored range stays consistent
    REQUIRE(M.log_M(5000) == Catch::Approx(s * std::lgamma(5001.0)).epsilon(1e-12));
    REQUIRE_THROWS_AS(WeightSequence::gevrey(1.0, 64), std::invalid_argument);
    REQUIRE_THROWS_AS(WeightSequence::gevrey(2.0, 1), std::invalid_argument);
}

TEST_CASE("explicit tables validate their input", "[weights]") {
    REQUIRE_THROWS_AS(WeightSequence::explicit_table({2.0, 1.0, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(WeightSequence::explicit_table({1.0, -1.0, 1.0}), std::invalid_argument);
    auto M = WeightSequence::explicit_table({1.0, 1.0, 2.0, 6.0});
    REQUIRE(M.p_max() == 3);
    REQUIRE_THROWS_AS(M.log_M(4), std::out_of_range);
}

TEST_CASE("gevrey sequences satisfy all three conditions", "[weights]") {
    for (double s : {1.5, 2.0, 3.0}) {
        auto M = WeightSequence::gevrey(s, 64);
        auto rep = weights::check_conditions(M, kAGrid, kHGrid);
        INFO("s = " << s << " notes: " << rep.notes);
        REQUIRE(rep.m1);
        REQUIRE(rep.m2);
        REQUIRE(rep.m2_H >= std::pow(2.0, s) - 1e-9);  // H = 2^s is the sharp stability base
        REQUIRE(rep.m3);
        REQUIRE(std::isfinite(rep.m3_A));
        REQUIRE(rep.m3_A > 0.0);
    }
}

TEST_CASE("corrupted table is flagged at the exact index", "[weights]") {
    auto v = gevrey_values(2.0, 20);
    v[7] *= 10.0;  // break log-convexity at p = 7
    auto M = WeightSequence::explicit_table(v);
    auto rep = weights::check_conditions(M, kAGrid, kHGrid);
    REQUIRE_FALSE(rep.m1);
    REQUIRE(rep.notes.find("(M.1) fails at p = 7") != std::string::npos);
}

TEST_CASE("all-ones table fails strong non-quasianalyticity as divergent", "[weights]") {
    std::vector<double> ones(40, 1.0);
    auto M = WeightSequence::explicit_table(ones);
    auto rep = weights::check_conditions(M, kAGrid, kHGrid);
    REQUIRE(rep.m1);   // constant sequence is log-convex
    REQUIRE(rep.m2);   // with A = H = 1
    REQUIRE_FALSE(rep.m3);
    REQUIRE(rep.notes.find("do not decay") != std::string::npos);
}

TEST_CASE("factorial tail sum: pinned values for s = 2, l = 1", "[weights]") {
    auto M = WeightSequence::gevrey(2.0, 64);
    const auto t0 = weights::tail_factorial_sum(M, 1.0, 0, 1e-13);
    REQUIRE(t0.value == Catch::Approx(std::exp(1.0)).margin(1e-12));  // sum 1/k! = e
    const auto t3 = weights::tail_factorial_sum(M, 1.0, 3, 1e-13);
    REQUIRE(t3.value == Catch::Approx(std::exp(1.0) - 2.5).margin(1e-12));
    REQUIRE(t0.tail_bound < 1e-13);
    REQUIRE(t3.tail_bound < 1e-13);
}

TEST_CASE("factorial tail sum matches the brute-force oracle off the pinned points", "[weights]") {
    for (double s : {1.5, 2.0}) {
        auto M = WeightSequence::gevrey(s, 64);
        for (double ell : {0.25, 1.0, 4.0})
            for (unsigned p : {0u, 2u, 7u}) {
                const auto t = weights::tail_factorial_sum(M, ell, p, 1e-12);
                INFO("s=" << s << " l=" << ell << " p=" << p);
                // tol is absolute, so compare with an absolute margin
                REQUIRE(t.value == Catch::Approx(factorial_sum_oracle(s, ell, p)).margin(5e-12));
            }
    }
}

TEST_CASE("stirling tail sum: p = 0 reduces to sum 1/(k!)^2", "[weights]") {
    auto M = WeightSequence::gevrey(2.0, 64);
    const auto t = weights::tail_stirling_sum(M, 1.0, 0, 1e-13);
    double oracle = 0.0;  // S(k+1,1) = 1, so the series is sum 1/(k!)^2
    for (unsigned k = 0; k <= 40; ++k) oracle += std::exp(-std::lgamma(k + 1.0) * 2.0 + 0.0);
    REQUIRE(t.value == Catch::Approx(oracle).margin(1e-12));
    REQUIRE(t.value == Catch::Approx(2.2795853023360673).margin(1e-12));
}

TEST_CASE("telescoping: tail(p) - first term = tail(p+1)", "[weights]") {
    const double tol = 1e-12;
    for (double s : {1.5, 2.0, 3.0}) {
        auto M = WeightSequence::gevrey(s, 64);
        for (double ell : {0.5, 1.0, 2.0})
            for (unsigned p : {0u, 1u, 5u, 20u}) {
                const double lhs = weights::tail_factorial_sum(M, ell, p, tol).value -
                                   std::exp(std::lgamma(p + 1.0) + p * std::log(ell) - M.log_M(p));
                const double rhs = weights::tail_factorial_sum(M, ell, p + 1, tol).value;
                INFO("s=" << s << " l=" << ell << " p=" << p);
                REQUIRE(lhs == Catch::Approx(rhs).margin(2 * tol + 1e-13 * std::fabs(rhs)));
            }
    }
}

TEST_CASE("envelope constants are finite and certified over the full grid", "[weights]") {
    for (double s : {1.5, 2.0, 3.0}) {
        auto M = WeightSequence::gevrey(s, 64);
        for (double ell : {0.25, 0.5, 1.0, 2.0, 4.0}) {
            auto rep = weights::estimate_tail_constants(M, ell, 50, 1e-12);
            INFO("s=" << s << " l=" << ell);
            REQUIRE(rep.satisfied);
            REQUIRE(rep.max_tail_bound < 1e-12);
            REQUIRE(rep.C_factorial >= 1.0);  // lhs(p) includes the rhs as its first term
            REQUIRE(rep.C_stirling > 0.0);
            for (std::size_t p = 0; p <= 50; ++p) {
                REQUIRE(rep.lhs_factorial[p] <= rep.C_factorial * rep.rhs_factorial[p] * (1 + 1e-12));
                REQUIRE(rep.lhs_stirling[p] <= rep.C_stirling * rep.rhs_stirling[p] * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("factorial-series left side decreases in p for small l", "[weights]") {
    auto M = WeightSequence::gevrey(2.0, 64);
    for (double ell : {0.25, 1.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (unsigned p = 0; p <= 30; ++p) {
            const double v = weights::tail_factorial_sum(M, ell, p, 1e-12).value;
            REQUIRE(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("short explicit table errors out instead of silently truncating", "[weights]") {
    auto M = WeightSequence::explicit_table(gevrey_values(2.0, 10));
    REQUIRE_THROWS_WITH(weights::tail_factorial_sum(M, 4.0, 0, 1e-12),
                        Catch::Matchers::ContainsSubstring("table exhausted"));
    // A long enough explicit table certifies fine.
    auto M2 = WeightSequence::explicit_table(gevrey_values(2.0, 64));
    const auto t = weights::tail_factorial_sum(M2, 1.0, 0, 1e-12);
    REQUIRE(t.value == Catch::Approx(std::exp(1.0)).margin(1e-11));
}
