#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace psea {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// (t;t)_n = prod_{i=1..n} (1 - t^i). Exact; n = 0 gives 1, n < 0 rejected.
inline Rational pow_rat(const Rational& t, std::int64_t e) {
    Rational acc = 1;
    Rational base = t;
    bool inv = e < 0;
    std::uint64_t n = inv ? (std::uint64_t)(-e) : (std::uint64_t)e;
    while (n) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    if (inv) acc = Rational(1) / acc;
    return acc;
}

Rational pochhammer(const Rational& t, std::int64_t n);

// (t;t)_infinity, truncated when the next factor differs from 1 by < 1e-15
// (cap 1e4 factors).
double pochhammer_inf(double t);

// Gaussian binomial [n choose k]_t; 0 outside 0 <= k <= n.
Rational qbinom(std::int64_t n, std::int64_t k, const Rational& t);

// #{n x k matrices over F_q of rank r}.
BigInt rank_count_rect(std::int64_t n, std::int64_t k, std::int64_t r, std::int64_t q);

// pmf over ranks r of the lower n x k submatrix of a uniform full-rank
// (n+d) x k matrix over F_q. Requires n >= k.
std::map<std::int64_t, Rational> corner_corank_pmf(std::int64_t n, std::int64_t d,
                                                   std::int64_t k, std::int64_t q);

// Pr(SN(A') = (1,0,...,0)) for an n x m submatrix of Haar GL_N, n <= m <= N.
Rational coker_single_box_prob(std::int64_t N, std::int64_t n, std::int64_t m,
                               const Rational& t);

// E[#ker(A mod p)] for the corner ensemble (finite D) or uniform matrices
// (D = infinity, flagged by D < 0).
Rational expected_kernel(std::int64_t N, std::int64_t D, std::int64_t q);
inline constexpr std::int64_t kDInfinity = -1;

// Corank pmf of the named ensembles mod p: index c -> probability.
std::map<std::int64_t, Rational> corank_pmf_iid_haar(std::int64_t N, std::int64_t q);
std::map<std::int64_t, Rational> corank_pmf_corner(std::int64_t N, std::int64_t D,
                                                   std::int64_t q);

enum class CNMode { Exact, Asymptotic };

// Time-scaling constant t^{-r_N} / E[1(X <= r_N)(t^{-X} - 1)] for corank pmf X.
// use_indicator=false drops the indicator (the two agree up to o(1)).
Rational c_N_exact(const std::map<std::int64_t, Rational>& corank_pmf,
                   std::int64_t r_N, const Rational& t, bool use_indicator = true);
double c_N_asymptotic_haar(double t, std::int64_t r_N);
double c_N_asymptotic_corner(double t, std::int64_t r_N, std::int64_t D);

// Pr(nu_j = mu_j for all j >= r) in the one-step product chain, equality case.
Rational stay_prob(std::int64_t r, std::int64_t N, std::int64_t len_lambda,
                   const Rational& t);

// Bounds (lower, upper) on the single-box transition probability.
std::pair<Rational, Rational> single_box_bounds(std::int64_t r, std::int64_t N,
                                                std::int64_t m, std::int64_t len_lambda,
                                                const Rational& t);

// Upper bound on Pr(two or more boxes added at indices >= r).
Rational two_jump_bound(std::int64_t r, std::int64_t N, std::int64_t len_lambda,
                        const Rational& t);

// Pr(X = n) for X the index of the lowest path above 0 at time T, flat start.
double lowest_positive_pmf(std::int64_t n, double t, double T);

} // namespace psea
