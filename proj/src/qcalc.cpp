#include "psea/qcalc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psea {

namespace {

void check_t(const Rational& t) {
    if (!(t > 0 && t < 1)) throw std::domain_error("t must lie in (0,1)");
}

} // namespace

Rational pochhammer(const Rational& t, std::int64_t n) {
    if (n < 0) throw std::domain_error("pochhammer: negative order " + std::to_string(n));
    Rational acc = 1;
    Rational tp = 1;
    for (std::int64_t i = 1; i <= n; ++i) {
        tp *= t;
        acc *= (Rational(1) - tp);
    }
    return acc;
}

double pochhammer_inf(double t) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("pochhammer_inf: t outside (0,1)");
    double acc = 1.0;
    double tp = 1.0;
    for (int i = 1; i <= 10000; ++i) {
        tp *= t;
        if (tp < 1e-15) break;
        acc *= (1.0 - tp);
    }
    return acc;
}

Rational qbinom(std::int64_t n, std::int64_t k, const Rational& t) {
    if (k < 0 || k > n || n < 0) return 0;
    return pochhammer(t, n) / (pochhammer(t, k) * pochhammer(t, n - k));
}

BigInt rank_count_rect(std::int64_t n, std::int64_t k, std::int64_t r, std::int64_t q) {
    if (n < 0 || k < 0) throw std::domain_error("rank_count_rect: negative dimension");
    if (r < 0 || r > std::min(n, k)) return 0;
    Rational t = Rational(1, q);
    Rational count = pow_rat(Rational(q), r * n + r * k - r * r) * pochhammer(t, n) *
                     pochhammer(t, k) /
                     (pochhammer(t, r) * pochhammer(t, n - r) * pochhammer(t, k - r));
    if (denominator(count) != 1)
        throw std::logic_error("rank_count_rect: non-integer count");
    return numerator(count);
}

std::map<std::int64_t, Rational> corner_corank_pmf(std::int64_t n, std::int64_t d,
                                                   std::int64_t k, std::int64_t q) {
    if (n < k || k < 0 || d < 0) throw std::domain_error("corner_corank_pmf: need n >= k >= 0, d >= 0");
    Rational t = Rational(1, q);
    std::map<std::int64_t, Rational> pmf;
    Rational total = 0;
    for (std::int64_t r = std::max<std::int64_t>(0, k - d); r <= k; ++r) {
        Rational pr = pow_rat(t, (n - r) * (k - r)) * qbinom(d, k - r, t) * qbinom(n, r, t) /
                      qbinom(n + d, k, t);
        if (pr != 0) pmf[r] = pr;
        total += pr;
    }
    if (total != 1) throw std::logic_error("corner_corank_pmf: pmf does not sum to 1");
    return pmf;
}

Rational coker_single_box_prob(std::int64_t N, std::int64_t n, std::int64_t m,
                               const Rational& t) {
    check_t(t);
    if (!(n <= m && m <= N && n >= 1))
        throw std::domain_error("coker_single_box_prob: need 1 <= n <= m <= N");
    // N = m makes a denominator factor (t;t)_{-1}, whose reciprocal vanishes:
    // a square Haar corner of full width is never singular mod p.
    if (N - m - 1 < 0) return 0;
    auto need = [](std::int64_t idx, const char* name) {
        if (idx < 0)
            throw std::domain_error(std::string("coker_single_box_prob: negative Pochhammer index ") + name);
    };
    need(n - 1, "n-1");
    need(m - n + 1, "m-n+1");
    return pow_rat(t, m - n + 1) * pochhammer(t, N - m) * pochhammer(t, m) *
           pochhammer(t, n) * pochhammer(t, N - n) /
           (pochhammer(t, 1) * pochhammer(t, N - m - 1) * pochhammer(t, n - 1) *
            pochhammer(t, m - n + 1) * pochhammer(t, N));
}

Rational expected_kernel(std::int64_t N, std::int64_t D, std::int64_t q) {
    if (N < 1) throw std::domain_error("expected_kernel: N >= 1 required");
    Rational qi = Rational(1, q);
    if (D == kDInfinity) return Rational(2) - pow_rat(qi, N);
    if (D < 1) throw std::domain_error("expected_kernel: D >= 1 or infinity required");
    return (Rational(1) - pow_rat(qi, D) + Rational(1) - pow_rat(qi, N)) /
           (Rational(1) - pow_rat(qi, N + D));
}

std::map<std::int64_t, Rational> corank_pmf_iid_haar(std::int64_t N, std::int64_t q) {
    std::map<std::int64_t, Rational> pmf;
    Rational total_mat = pow_rat(Rational(q), N * N);
    for (std::int64_t c = 0; c <= N; ++c) {
        Rational pr = Rational(rank_count_rect(N, N, N - c, q)) / total_mat;
        if (pr != 0) pmf[c] = pr;
    }
    return pmf;
}

std::map<std::int64_t, Rational> corank_pmf_corner(std::int64_t N, std::int64_t D,
                                                   std::int64_t q) {
    auto rank_pmf = corner_corank_pmf(N, D, N, q);
    std::map<std::int64_t, Rational> pmf;
    for (const auto& [r, pr] : rank_pmf) pmf[N - r] = pr;
    return pmf;
}

Rational c_N_exact(const std::map<std::int64_t, Rational>& corank_pmf,
                   std::int64_t r_N, const Rational& t, bool use_indicator) {
    check_t(t);
    if (r_N < 1) throw std::domain_error("c_N_exact: r_N >= 1 required");
    Rational denom = 0;
    bool nondegenerate = false;
    for (const auto& [c, pr] : corank_pmf) {
        if (c > 0 && pr > 0) nondegenerate = true;
        if (use_indicator && c > r_N) continue;
        denom += pr * (pow_rat(t, -c) - 1);
    }
    if (!nondegenerate || denom == 0)
        throw std::domain_error("c_N_exact: degenerate ensemble (corank 0 a.s.)");
    return pow_rat(t, -r_N) / denom;
}

double c_N_asymptotic_haar(double t, std::int64_t r_N) {
    return std::pow(t, (double)-r_N);
}

double c_N_asymptotic_corner(double t, std::int64_t r_N, std::int64_t D) {
    return std::pow(t, (double)-r_N) / (1.0 - std::pow(t, (double)D));
}

Rational stay_prob(std::int64_t r, std::int64_t N, std::int64_t len_lambda,
                   const Rational& t) {
    check_t(t);
    if (!(1 <= r && r <= N)) throw std::domain_error("stay_prob: need 1 <= r <= N");
    if (r <= len_lambda) return 0;
    Rational acc = 1;
    for (std::int64_t j = r; j <= N; ++j)
        acc *= (Rational(1) - pow_rat(t, j - len_lambda)) / (Rational(1) - pow_rat(t, j));
    return acc;
}

std::pair<Rational, Rational> single_box_bounds(std::int64_t r, std::int64_t N,
                                                std::int64_t m, std::int64_t len_lambda,
                                                const Rational& t) {
    check_t(t);
    if (!(len_lambda + 1 <= r && r <= N && m >= 1))
        throw std::domain_error("single_box_bounds: range violation");
    Rational C = (pow_rat(t, r - len_lambda) - pow_rat(t, r)) *
                 (Rational(1) - pow_rat(t, m)) / (Rational(1) - t) *
                 pochhammer(t, r - 1) * pochhammer(t, N - len_lambda) /
                 (pochhammer(t, N) * pochhammer(t, r - len_lambda));
    Rational lower = (Rational(1) - pow_rat(t, r - len_lambda)) * C;
    return {lower, C};
}

Rational two_jump_bound(std::int64_t r, std::int64_t N, std::int64_t len_lambda,
                        const Rational& t) {
    check_t(t);
    if (!(len_lambda + 1 <= r && r <= N))
        throw std::domain_error("two_jump_bound: range violation");
    Rational quot = pochhammer(t, r - 1) * pochhammer(t, N - len_lambda) /
                    (pochhammer(t, N) * pochhammer(t, r - len_lambda));
    Rational bracket = Rational(1) - pow_rat(t, r - len_lambda) +
                       pow_rat(t, r - len_lambda) * (Rational(1) - pow_rat(t, N - r + 1)) *
                           (Rational(1) - pow_rat(t, len_lambda)) / (Rational(1) - t);
    return Rational(1) - quot * bracket;
}

double lowest_positive_pmf(std::int64_t n, double t, double T) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("lowest_positive_pmf: t outside (0,1)");
    if (!(T > 0.0)) throw std::domain_error("lowest_positive_pmf: T must be positive");
    double poch_inf = pochhammer_inf(t);
    double sum = 0.0;
    double tpoch = 1.0;  // (t;t)_m
    double tp = 1.0;     // t^m
    double tbin = 1.0;   // t^{m(m-1)/2}
    double sign = 1.0;
    // Terms decay doubly fast: the exponential factor is exp(-c t^{-m}) and the
    // q-factor decays like t^{m^2/2}.
    for (int m = 0; m < 10000; ++m) {
        double expo = std::exp(-(T / (1.0 - t)) * std::pow(t, (double)(n - m + 1)));
        double term = sign * expo * tbin / tpoch;
        sum += term;
        if (m > 0 && std::abs(term) < 1e-18) break;
        sign = -sign;
        tbin *= tp;       // t^{binom(m+1,2)} = t^{binom(m,2)} * t^m
        tp *= t;
        tpoch *= (1.0 - tp);
    }
    return sum / poch_inf;
}

} // namespace psea
