// Exact integer/rational arithmetic used by the combinatorial layer.
// Thin aliases over Boost.Multiprecision plus a few helpers that the
// rest of the library needs (factorials, binomials, log of a big int).
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>

namespace qakit {

using ExactInt = boost::multiprecision::cpp_int;
using ExactRat = boost::multiprecision::cpp_rational;

inline ExactInt factorial_exact(unsigned n) {
    ExactInt r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

// C(n, k) with the usual convention C(n, k) = 0 for k < 0 or k > n.
inline ExactInt binomial_exact(long long n, long long k) {
    if (k < 0 || k > n || n < 0) return 0;
    if (k > n - k) k = n - k;
    ExactInt r = 1;
    for (long long i = 1; i <= k; ++i) {
        r *= (n - k + i);
        r /= i;
    }
    return r;
}

inline ExactInt pow_exact(const ExactInt& base, unsigned e) {
    ExactInt r = 1, b = base;
    while (e) {
        if (e & 1u) r *= b;
        b *= b;
        e >>= 1u;
    }
    return r;
}

// Natural log of a positive big integer, accurate to double precision even
// when the value itself overflows double range.
inline double log_exact(const ExactInt& v) {
    if (v <= 0) throw std::domain_error("log_exact: argument must be positive");
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(v)) + 1u;
    if (bits <= 1000) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 64u;
    const ExactInt top = v >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

inline double to_double(const ExactRat& q) {
    return q.convert_to<double>();
}

}  // namespace qakit
