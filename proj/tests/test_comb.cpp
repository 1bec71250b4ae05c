#include <catch2/catch_amalgamated.hpp>

#include "qakit/comb.hpp"

#include <vector>

using qakit::ExactInt;
using qakit::ExactRat;
namespace comb = qakit::comb;

namespace {

// Oracle 1: count partitions of {1..n} into exactly k nonempty blocks by
// exhaustive enumeration (each element joins an existing block or opens the
// next one). Independent of the recurrence used by the implementation.
void enumerate_partitions(unsigned i, unsigned n, unsigned used, unsigned k, long long& count) {
    if (i == n) {
        if (used == k) ++count;
        return;
    }
    if (used > k) return;
    for (unsigned b = 0; b <= used; ++b)
        enumerate_partitions(i + 1, n, b == used ? used + 1 : used, k, count);
}

long long count_set_partitions(unsigned n, unsigned k) {
    if (n == 0) return k == 0 ? 1 : 0;
    long long count = 0;
    enumerate_partitions(0, n, 0, k, count);
    return count;
}

// Oracle 2: B_{k,j}(1!, 2!, ...) via the generating function
// (t/(1-t))^j / j!: expand the truncated power series with exact rationals
// and return k! times the coefficient of t^k.
ExactInt bell_series_oracle(unsigned k, unsigned j) {
    // series of t/(1-t) = t + t^2 + ... up to t^k
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
    ExactRat val = pw[k] * ExactRat(qakit::factorial_exact(k), qakit::factorial_exact(j));
    ExactInt num = numerator(val), den = denominator(val);
    REQUIRE(den == 1);
    return num;
}

}  // namespace

TEST_CASE("stirling numbers match exhaustive set-partition enumeration", "[comb]") {
    for (unsigned n = 0; n <= 10; ++n)
        for (unsigned k = 0; k <= n; ++k)
            REQUIRE(comb::stirling2(n, k) == ExactInt(count_set_partitions(n, k)));
    REQUIRE(comb::stirling2(4, 2) == 7);
    REQUIRE(comb::stirling2(6, 3) == 90);
    REQUIRE(comb::stirling2(3, 5) == 0);
}

TEST_CASE("stirling bound chain holds exactly", "[comb]") {
    REQUIRE(comb::stirling2_bound_check(30));
}

TEST_CASE("bell factorial values match the generating-function oracle", "[comb]") {
    for (unsigned k = 1; k <= 15; ++k)
        for (unsigned j = 1; j <= k; ++j)
            REQUIRE(comb::bell_factorial(k, j) == bell_series_oracle(k, j));
    REQUIRE(comb::bell_factorial(3, 2) == 6);
    REQUIRE(comb::bell_factorial(5, 2) == 240);
    REQUIRE_THROWS_AS(comb::bell_factorial(3, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(comb::bell_factorial(3, 4), std::invalid_argument);
}

TEST_CASE("reciprocal-substitution coefficients: pinned values and bound", "[comb]") {
    REQUIRE(comb::recip_coeff(0, 0) == 1);
    REQUIRE(comb::recip_coeff(1, 0) == -2);
    REQUIRE(comb::recip_coeff(1, 1) == -1);
    REQUIRE(comb::recip_coeff(2, 0) == 6);
    for (unsigned m = 0; m <= 20; ++m) {
        const ExactInt diag = comb::recip_coeff(m, m);
        REQUIRE(diag == (m % 2 == 0 ? ExactInt(1) : ExactInt(-1)));
        // the bound assertion inside recip_coeff runs for every (m, j)
        for (unsigned j = 0; j <= m; ++j) (void)comb::recip_coeff(m, j);
    }
    REQUIRE_THROWS_AS(comb::recip_coeff(3, 4), std::invalid_argument);
}

TEST_CASE("reciprocal derivative identity against Laurent differentiation", "[comb]") {
    for (unsigned m = 0; m <= 12; ++m)
        for (unsigned j0 = 0; j0 <= 8; ++j0) {
            const auto pair = comb::recip_derivative_oracle(m, j0);
            INFO("m=" << m << " j0=" << j0);
            REQUIRE(pair.lhs == pair.rhs);
        }
}

TEST_CASE("monomial contraction of reciprocal coefficients", "[comb]") {
    // sum_{j=0}^{min(m,j0)} c_{m,j} j0!/(j0-j)! = (-1)^m (m+1+j0)!/(j0+1)!
    for (unsigned j0 = 0; j0 <= 12; ++j0)
        for (unsigned m = 0; m <= 12; ++m) {
            ExactInt lhs = 0;
            for (unsigned j = 0; j <= m && j <= j0; ++j) {
                ExactInt fall = 1;
                for (unsigned i = 0; i < j; ++i) fall *= (j0 - i);
                lhs += comb::recip_coeff(m, j) * fall;
            }
            ExactInt rhs = 1;
            for (unsigned i = j0 + 2; i <= m + 1 + j0; ++i) rhs *= i;
            if (m % 2 == 1) rhs = -rhs;
            INFO("m=" << m << " j0=" << j0);
            REQUIRE(lhs == rhs);
        }
}

TEST_CASE("exponential chain identity expands formally", "[comb]") {
    REQUIRE(comb::exp_chain_check(10, 4));
    REQUIRE(comb::exp_chain_check(6, 0));
}

TEST_CASE("laurent polynomial arithmetic basics", "[comb]") {
    auto p = comb::LaurentPoly::monomial(ExactRat(3), -2);
    auto d = p.derivative();
    REQUIRE(d == comb::LaurentPoly::monomial(ExactRat(-6), -3));
    auto z = comb::LaurentPoly::monomial(ExactRat(1), 0).derivative();
    REQUIRE(z.terms().empty());
    auto s = p + comb::LaurentPoly::monomial(ExactRat(-3), -2);
    REQUIRE(s.terms().empty());
}
