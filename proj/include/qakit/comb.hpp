// Exact combinatorics backing the symbolic differentiation identities:
// Stirling numbers of the second kind, the factorial-ratio Bell polynomial
// values, and the coefficient family for m-th derivatives of x^{-2} phi(1/x).
// Everything in this header is exact integer/rational arithmetic; floating
// point is deliberately absent.
#pragma once

#include "qakit/exact.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace qakit::comb {

// ---------------------------------------------------------------------------
// Stirling numbers of the second kind, S(n, k).
// Triangular table grown on demand via S(n,k) = k S(n-1,k) + S(n-1,k-1),
// built once under a lock and then shared read-only.
// ---------------------------------------------------------------------------
class StirlingTable {
  public:
    const ExactInt& operator()(unsigned n, unsigned k) {
        if (k > n) return zero_;
        ensure(n);
        return rows_[n][k];
    }

  private:
    void ensure(unsigned n) {
        std::lock_guard<std::mutex> lock(mu_);
        while (rows_.size() <= n) {
            const unsigned r = static_cast<unsigned>(rows_.size());
            std::vector<ExactInt> row(r + 1);
            if (r == 0) {
                row[0] = 1;
            } else {
                row[0] = 0;
                for (unsigned k = 1; k <= r; ++k) {
                    ExactInt v = rows_[r - 1][k - 1];
                    if (k <= r - 1) v += ExactInt(k) * rows_[r - 1][k];
                    row[k] = std::move(v);
                }
            }
            rows_.push_back(std::move(row));
        }
    }

    std::mutex mu_;
    std::vector<std::vector<ExactInt>> rows_{};
    ExactInt zero_{0};
};

inline ExactInt stirling2(unsigned n, unsigned k) {
    static StirlingTable table;
    return table(n, k);
}

// Checks, exactly, the two bounds used to dominate Stirling-weighted tails:
//   S(k+1, p+1) <= 2^{k+1} (p+1)^{k-p}   and   S(k+1, p+1) <= 2^{k+1} k!/p!
// together with the chaining inequality (p+1)^{k-p} <= k!/p!, for all
// 0 <= p <= k <= k_max.
inline bool stirling2_bound_check(unsigned k_max) {
    for (unsigned k = 0; k <= k_max; ++k) {
        const ExactInt two_pow = pow_exact(2, k + 1);
        for (unsigned p = 0; p <= k; ++p) {
            const ExactInt s = stirling2(k + 1, p + 1);
            const ExactInt mid = two_pow * pow_exact(p + 1, k - p);
            ExactInt fac_ratio = 1;  // k!/p!
            for (unsigned i = p + 1; i <= k; ++i) fac_ratio *= i;
            if (s > mid) return false;
            if (pow_exact(p + 1, k - p) > fac_ratio) return false;
            if (s > two_pow * fac_ratio) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Partial Bell polynomial values B_{k,j}(1!, 2!, ..., (k-j+1)!), in the
// closed factorial-ratio form k! (k-1)! / (j! (j-1)! (k-j)!).
// ---------------------------------------------------------------------------
inline ExactInt bell_factorial(unsigned k, unsigned j) {
    if (j == 0 || j > k)
        throw std::invalid_argument("bell_factorial: requires 1 <= j <= k");
    ExactInt num = factorial_exact(k) * factorial_exact(k - 1);
    ExactInt den = factorial_exact(j) * factorial_exact(j - 1) * factorial_exact(k - j);
    if (num % den != 0)
        throw std::logic_error("bell_factorial: ratio not integral");
    return num / den;
}

// ---------------------------------------------------------------------------
// Coefficients c_{m,j} of the reciprocal-substitution derivative identity
//   d^m/dx^m [ x^{-2} phi(1/x) ] = sum_{j=0}^m c_{m,j} phi^{(j)}(1/x) x^{-(m+j+2)},
// with
//   c_{m,0} = (-1)^m (m+1)!,
//   c_{m,j} = (-1)^m (m!/j!) sum_{k=j}^m (m-k+1) C(k-1, j-1),  1 <= j <= m.
// The magnitude bound |c_{m,j}| <= (m!/j!) 4^m is asserted before returning.
// ---------------------------------------------------------------------------
inline ExactInt recip_coeff(unsigned m, unsigned j) {
    if (j > m) throw std::invalid_argument("recip_coeff: requires 0 <= j <= m");
    ExactInt c;
    if (j == 0) {
        c = factorial_exact(m + 1);
        if (m % 2 == 1) c = -c;
    } else {
        ExactInt sum = 0;
        for (unsigned k = j; k <= m; ++k)
            sum += ExactInt(m - k + 1) * binomial_exact(static_cast<long long>(k) - 1,
                                                        static_cast<long long>(j) - 1);
        ExactInt fac_ratio = 1;  // m!/j!
        for (unsigned i = j + 1; i <= m; ++i) fac_ratio *= i;
        c = fac_ratio * sum;
        if (m % 2 == 1) c = -c;
    }
    ExactInt bound = pow_exact(4, m);
    for (unsigned i = j + 1; i <= m; ++i) bound *= i;  // (m!/j!) 4^m
    if (abs(c) > bound) {
        std::ostringstream os;
        os << "recip_coeff: |c_{" << m << "," << j << "}| exceeds (m!/j!) 4^m";
        throw std::logic_error(os.str());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Laurent polynomials with exact rational coefficients: finitely many terms
// q_e x^e with integer exponent e of either sign. Normalized (no zero terms).
// ---------------------------------------------------------------------------
class LaurentPoly {
  public:
    LaurentPoly() = default;

    static LaurentPoly monomial(const ExactRat& coeff, int exponent) {
        LaurentPoly p;
        p.add_term(coeff, exponent);
        return p;
    }

    void add_term(const ExactRat& coeff, int exponent) {
        if (coeff == 0) return;
        auto it = terms_.find(exponent);
        if (it == terms_.end()) {
            terms_.emplace(exponent, coeff);
        } else {
            it->second += coeff;
            if (it->second == 0) terms_.erase(it);
        }
    }

    LaurentPoly derivative() const {
        LaurentPoly d;
        for (const auto& [e, q] : terms_)
            d.add_term(q * e, e - 1);
        return d;
    }

    LaurentPoly operator+(const LaurentPoly& o) const {
        LaurentPoly r = *this;
        for (const auto& [e, q] : o.terms_) r.add_term(q, e);
        return r;
    }

    bool operator==(const LaurentPoly& o) const { return terms_ == o.terms_; }

    const std::map<int, ExactRat>& terms() const { return terms_; }

  private:
    std::map<int, ExactRat> terms_;
};

// Both sides of the reciprocal-substitution identity specialized to the
// monomial phi(y) = y^{j0}: the left side differentiates x^{-2-j0} directly
// (falling factors on the Laurent exponent), the right side assembles
// sum_j c_{m,j} (j0!/(j0-j)!) x^{-(m+j0+2)}. Returned as a pair for tests.
struct LaurentPair {
    LaurentPoly lhs;
    LaurentPoly rhs;
};

inline LaurentPair recip_derivative_oracle(unsigned m, unsigned j0) {
    LaurentPoly lhs = LaurentPoly::monomial(1, -2 - static_cast<int>(j0));
    for (unsigned i = 0; i < m; ++i) lhs = lhs.derivative();

    LaurentPoly rhs;
    const int e = -static_cast<int>(m + j0 + 2);
    for (unsigned j = 0; j <= m && j <= j0; ++j) {
        ExactInt fall = 1;  // j0!/(j0-j)!
        for (unsigned i = 0; i < j; ++i) fall *= (j0 - i);
        rhs.add_term(ExactRat(recip_coeff(m, j) * fall), e);
    }
    return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Formal check of the exponential chain identity: with psi(x) = e^x phi(e^x),
//   psi^{(n)}(x) = e^x sum_{m=0}^n S(n+1, m+1) e^{mx} phi^{(m)}(e^x).
// Both sides are expanded as polynomials in E = e^x (so d/dx E^k = k E^k)
// with exact rational coefficients. phi is a polynomial given by its
// coefficient vector; the check runs every monomial of degree <= d plus one
// dense polynomial with distinct rational coefficients, for all n <= n_max.
// ---------------------------------------------------------------------------
namespace detail {

// Coefficient map of a polynomial in E, exponent -> rational coefficient.
using EPoly = std::map<unsigned, ExactRat>;

inline bool exp_chain_check_one(unsigned n_max, const std::vector<ExactRat>& phi) {
    for (unsigned n = 0; n <= n_max; ++n) {
        // Left side: psi = sum_k a_k E^{k+1}, differentiated n times formally.
        EPoly lhs;
        for (unsigned k = 0; k < phi.size(); ++k) {
            if (phi[k] == 0) continue;
            lhs[k + 1] += phi[k] * ExactRat(pow_exact(k + 1, n));
        }
        // Right side: E * sum_m S(n+1, m+1) E^m phi^{(m)}(E), with
        // phi^{(m)}(y) = sum_k a_k (k)_m y^{k-m}.
        EPoly rhs;
        for (unsigned m = 0; m <= n; ++m) {
            const ExactInt s = stirling2(n + 1, m + 1);
            if (s == 0) continue;
            for (unsigned k = m; k < phi.size(); ++k) {
                if (phi[k] == 0) continue;
                ExactInt fall = 1;  // falling factorial (k)_m = k!/(k-m)!
                for (unsigned i = 0; i < m; ++i) fall *= (k - i);
                rhs[k + 1] += phi[k] * ExactRat(s * fall);
            }
        }
        for (auto it = lhs.begin(); it != lhs.end();)
            it = (it->second == 0) ? lhs.erase(it) : std::next(it);
        for (auto it = rhs.begin(); it != rhs.end();)
            it = (it->second == 0) ? rhs.erase(it) : std::next(it);
        if (lhs != rhs) return false;
    }
    return true;
}

}  // namespace detail

inline bool exp_chain_check(unsigned n_max, unsigned d) {
    for (unsigned deg = 0; deg <= d; ++deg) {
        std::vector<ExactRat> mono(deg + 1, ExactRat(0));
        mono[deg] = 1;
        if (!detail::exp_chain_check_one(n_max, mono)) return false;
    }
    std::vector<ExactRat> dense(d + 1);
    for (unsigned k = 0; k <= d; ++k) dense[k] = ExactRat(ExactInt(1), ExactInt(k + 1));
    return detail::exp_chain_check_one(n_max, dense);
}

}  // namespace qakit::comb
