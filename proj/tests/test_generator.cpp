#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psea/generator.hpp"

using namespace psea;

namespace {

const Rational half(1, 2);

// flat-zero tail state with the frozen boundary at `anchor`
WindowSignature flat_tail(std::int64_t d, std::int64_t anchor) {
    WindowSignature w;
    w.offset = anchor;
    w.left_fill = ExtInt(d);
    w.right_fill = ExtInt(0);
    return w;
}

WindowSignature single_walker(std::int64_t d, std::int64_t index, std::int64_t value) {
    WindowSignature w;
    w.offset = index - 1;
    w.window = {ExtInt(value)};
    w.left_fill = ExtInt(d);
    w.right_fill = ExtInt::neg_inf();
    w.canonicalize();
    return w;
}

Rational rate_between(const GeneratorMatrix& G, const WindowSignature& a,
                      const WindowSignature& b) {
    auto i = G.find_state(a);
    auto j = G.find_state(b);
    REQUIRE(i >= 0);
    REQUIRE(j >= 0);
    return G.rates[(std::size_t)i][(std::size_t)j];
}

} // namespace

TEST_CASE("rows sum to zero including the escape column") {
    auto G = build_Q(flat_tail(2, 0), flat_tail(2, 2), 2, half);
    for (const auto& row : G.rates) {
        Rational sum = 0;
        for (const auto& r : row) sum += r;
        CHECK(sum == Rational(0));
        CHECK(row.back() >= Rational(0));
    }
}

TEST_CASE("flat tail is a pure-birth chain with pooled rates") {
    std::int64_t k = 1;
    auto G = build_Q(flat_tail(1, k), flat_tail(1, k + 3), 1, half);
    REQUIRE(G.states.size() == 4);
    for (std::int64_t j = 0; j < 3; ++j) {
        // the whole tail behind anchor k+j pools to t^{k+j+1}/(1-t)
        Rational expect = pow_rat(half, k + j + 1) / (Rational(1) - half);
        CHECK(rate_between(G, flat_tail(1, k + j), flat_tail(1, k + j + 1)) == expect);
    }
    // every other off-diagonal entry vanishes
    for (std::size_t i = 0; i < G.states.size(); ++i)
        for (std::size_t j = 0; j < G.states.size(); ++j) {
            if (i == j || j == i + 1) continue;
            CHECK(G.rates[i][j] == Rational(0));
        }
}

TEST_CASE("a lone walker rings at the rate of its index") {
    auto G = build_Q(single_walker(3, -2, 0), single_walker(3, -2, 3), 3, half, 1);
    REQUIRE(G.states.size() == 4);
    for (std::int64_t v = 0; v < 3; ++v)
        CHECK(rate_between(G, single_walker(3, -2, v), single_walker(3, -2, v + 1)) ==
              pow_rat(half, -2));
}

TEST_CASE("transitions only add a single box upward") {
    auto G = build_Q(flat_tail(2, 0), flat_tail(2, 3), 2, half);
    for (std::size_t i = 0; i < G.states.size(); ++i)
        for (std::size_t j = 0; j < G.states.size(); ++j) {
            if (i == j || G.rates[i][j] == Rational(0)) continue;
            CHECK(skew_contains(G.states[i], G.states[j]));
            auto sz = skew_size(G.states[i], G.states[j]);
            REQUIRE(sz.has_value());
            CHECK(*sz == 1);
        }
}

TEST_CASE("two-state birth chain has the closed-form law") {
    std::int64_t k = 2;
    auto G = build_Q(flat_tail(1, k), flat_tail(1, k + 1), 1, half);
    REQUIRE(G.states.size() == 2);
    auto from = G.find_state(flat_tail(1, k));
    auto to = G.find_state(flat_tail(1, k + 1));
    // the upper state still escapes upward, so its occupancy is hypoexponential
    double r1 = std::pow(0.5, (double)(k + 1)) / 0.5;
    double r2 = std::pow(0.5, (double)(k + 2)) / 0.5;
    for (double T : {0.1, 0.7, 2.0, 9.0}) {
        std::int64_t terms = 0;
        double got = transient_prob(G, T, from, to, 1e-14, &terms);
        double expect = r1 / (r1 - r2) * (std::exp(-r2 * T) - std::exp(-r1 * T));
        CHECK(got == doctest::Approx(expect).epsilon(1e-12));
        CHECK(terms > 0);
        CHECK(transient_prob(G, T, from, from, 1e-14) ==
              doctest::Approx(std::exp(-r1 * T)).epsilon(1e-12));
    }
}

TEST_CASE("four-state birth chain matches the hypoexponential law") {
    auto G = build_Q(flat_tail(1, 0), flat_tail(1, 3), 1, half);
    REQUIRE(G.states.size() == 4);
    // rates r_j = t^j/(1-t) = 2^{1-j}, all distinct
    std::vector<double> r{1.0, 0.5, 0.25, 0.125};
    auto cdf = [&](std::size_t k, double T) {
        // P(sum of the first k holding times <= T)
        double out = 1.0;
        for (std::size_t j = 0; j < k; ++j) {
            double prod = 1.0;
            for (std::size_t l = 0; l < k; ++l) {
                if (l == j) continue;
                prod *= r[l] / (r[l] - r[j]);
            }
            out -= std::exp(-r[j] * T) * prod;
        }
        return out;
    };
    auto from = G.find_state(flat_tail(1, 0));
    for (double T : {0.3, 1.0, 4.0}) {
        for (std::size_t j = 0; j < 4; ++j) {
            double expect = cdf(j, T) - cdf(j + 1, T);
            if (j == 3) expect = cdf(3, T) - cdf(4, T);
            auto to = G.find_state(flat_tail(1, (std::int64_t)j));
            CHECK(transient_prob(G, T, from, to, 1e-12) ==
                  doctest::Approx(expect).epsilon(1e-9));
        }
    }
}

TEST_CASE("zero time is the indicator") {
    auto G = build_Q(flat_tail(2, 0), flat_tail(2, 2), 2, half);
    for (std::size_t i = 0; i < G.states.size(); ++i)
        for (std::size_t j = 0; j < G.states.size(); ++j)
            CHECK(transient_prob(G, 0.0, (std::int64_t)i, (std::int64_t)j, 1e-14) ==
                  doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
}

TEST_CASE("restriction to a sub-interval preserves transient probabilities") {
    auto nu = flat_tail(2, 0);
    auto small = build_Q(nu, flat_tail(2, 2), 2, half);
    auto big = build_Q(nu, flat_tail(2, 4), 2, half);
    double eps = 1e-12;
    for (double T : {0.4, 1.3}) {
        for (std::size_t j = 0; j < small.states.size(); ++j) {
            double a = transient_prob(small, T, small.find_state(nu), (std::int64_t)j, eps);
            double b = transient_prob(big, T, big.find_state(nu),
                                      big.find_state(small.states[j]), eps);
            CHECK(std::abs(a - b) <= 2.0 * eps);
        }
    }
}

TEST_CASE("multi-time probabilities chain through intermediate states") {
    auto nu = flat_tail(1, 0);
    auto ka = flat_tail(1, 3);
    auto G = build_Q(nu, ka, 1, half);
    auto from = G.find_state(nu);
    auto to = G.find_state(ka);
    double T1 = 0.8, T2 = 2.1, eps = 1e-12;

    CHECK(multi_time_prob(G, from, {T2}, {to}, eps) ==
          doctest::Approx(transient_prob(G, T2, from, to, eps)).epsilon(1e-10));

    double total = 0.0;
    for (std::size_t mid = 0; mid < G.states.size(); ++mid)
        total += multi_time_prob(G, from, {T1, T2}, {(std::int64_t)mid, to}, eps);
    CHECK(total == doctest::Approx(transient_prob(G, T2, from, to, eps)).epsilon(1e-9));
}

TEST_CASE("invalid intervals are rejected") {
    WindowSignature bad = flat_tail(2, 0);
    bad.left_fill = ExtInt(1);
    CHECK_THROWS(build_Q(bad, flat_tail(2, 2), 2, half));
    CHECK_THROWS(build_Q(flat_tail(2, 2), flat_tail(2, 0), 2, half));
}
