#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "psea/ensembles.hpp"
#include "psea/qcalc.hpp"

using namespace psea;

namespace {

std::vector<std::int64_t> parts_of(const Signature& s) {
    std::vector<std::int64_t> out;
    for (const auto& e : s.parts) out.push_back(e.value());
    return out;
}

} // namespace

TEST_CASE("reproducibility of seeded streams") {
    EnsembleSpec spec;
    spec.kind = EnsembleSpec::Kind::IidHaar;
    spec.N = 3;
    spec.p = 2;
    spec.d = 4;
    RngHandle a(42, 7), b(42, 7), c(42, 8);
    auto A = sample_ensemble(spec, a);
    auto B = sample_ensemble(spec, b);
    auto C = sample_ensemble(spec, c);
    CHECK(A.entries == B.entries);
    CHECK(A.entries != C.entries);
}

TEST_CASE("additive Haar uniformity") {
    std::int64_t n = 10000;
    std::int64_t zeros = 0;
    double mean = 0.0;
    for (std::int64_t s = 0; s < n; ++s) {
        RngHandle rng(5, (std::uint64_t)s);
        auto A = sample_additive_haar(1, 2, 1, rng);
        zeros += A.at(0, 0) == 0;
        RngHandle rng2(6, (std::uint64_t)s);
        auto B = sample_additive_haar(1, 2, 4, rng2);
        mean += (double)B.at(0, 0);
    }
    double phat = (double)zeros / (double)n;
    CHECK(std::abs(phat - 0.5) < 3.0 * std::sqrt(0.25 / (double)n));
    mean /= (double)n;
    double expect = 7.5;
    double sd = std::sqrt((16.0 * 16.0 - 1.0) / 12.0);
    CHECK(std::abs(mean - expect) < 3.0 * sd / std::sqrt((double)n));
}

TEST_CASE("additive Haar corank law matches the rank counts") {
    std::int64_t n = 10000;
    std::map<std::int64_t, std::int64_t> hist;
    for (std::int64_t s = 0; s < n; ++s) {
        RngHandle rng(9, (std::uint64_t)s);
        hist[corank_mod_p(sample_additive_haar(2, 2, 1, rng))] += 1;
    }
    auto pmf = corank_pmf_iid_haar(2, 2);
    for (const auto& [c, pr] : pmf) {
        double p = pr.convert_to<double>();
        double phat = (double)hist[c] / (double)n;
        CHECK(std::abs(phat - p) < 3.0 * std::sqrt(p * (1.0 - p) / (double)n));
    }
}

TEST_CASE("Haar units") {
    RngHandle rng(3, 0);
    auto A = sample_haar_gl(1, 2, 1, rng);
    CHECK(A.at(0, 0) == 1);
    for (int trial = 0; trial < 200; ++trial) {
        RngHandle r2(4, (std::uint64_t)trial);
        auto U = sample_haar_gl(3, 2, 2, r2);
        CHECK(parts_of(smith_sn(U)) == std::vector<std::int64_t>{0, 0, 0});
    }
}

TEST_CASE("Haar pushforward is uniform on the finite group") {
    // 6 elements of the invertible 2x2 matrices over F_2
    std::int64_t n = 60000;
    std::map<std::vector<std::uint64_t>, std::int64_t> hist;
    for (std::int64_t s = 0; s < n; ++s) {
        RngHandle rng(21, (std::uint64_t)s);
        hist[sample_haar_gl(2, 2, 1, rng).entries] += 1;
    }
    CHECK(hist.size() == 6);
    double chi2 = 0.0;
    double expect = (double)n / 6.0;
    for (const auto& [k, c] : hist) chi2 += ((double)c - expect) * ((double)c - expect) / expect;
    CHECK(chi2 < 20.515);  // chi-square(5) at significance 1e-3
}

TEST_CASE("fixed singular numbers are reproduced exactly") {
    EnsembleSpec spec;
    spec.kind = EnsembleSpec::Kind::FixedSn;
    spec.N = 3;
    spec.p = 2;
    spec.d = 3;
    spec.lambda = {2, 1, 0};
    for (int trial = 0; trial < 100; ++trial) {
        RngHandle rng(33, (std::uint64_t)trial);
        CHECK(parts_of(smith_sn(sample_ensemble(spec, rng))) == spec.lambda);
    }
}

TEST_CASE("corner kernel expectation") {
    std::int64_t n = 20000;
    EnsembleSpec spec;
    spec.kind = EnsembleSpec::Kind::Corner;
    spec.N = 1;
    spec.D = 1;
    spec.p = 2;
    spec.d = 1;
    double mean = 0.0;
    for (std::int64_t s = 0; s < n; ++s) {
        RngHandle rng(37, (std::uint64_t)s);
        auto A = sample_ensemble(spec, rng);
        mean += std::pow(2.0, (double)corank_mod_p(A));
    }
    mean /= (double)n;
    double expect = expected_kernel(1, 1, 2).convert_to<double>();  // 4/3
    // #ker is 1 or 2, variance = p(2-...)
    double var = (2.0 - expect) * (expect - 1.0);
    CHECK(std::abs(mean - expect) < 3.0 * std::sqrt(var / (double)n) + 1e-9);
}

TEST_CASE("chain step with invertible factors is the identity in law") {
    EnsembleSpec spec;
    spec.kind = EnsembleSpec::Kind::FixedSn;
    spec.N = 3;
    spec.p = 2;
    spec.d = 3;
    spec.lambda = {0, 0, 0};
    Signature nu({2, 1, 0});
    for (int trial = 0; trial < 50; ++trial) {
        RngHandle rng(41, (std::uint64_t)trial);
        CHECK(parts_of(chain_step(nu, spec, rng)) == std::vector<std::int64_t>{2, 1, 0});
    }
}

TEST_CASE("chain stay probability from the flat state") {
    EnsembleSpec spec;
    spec.kind = EnsembleSpec::Kind::IidHaar;
    spec.N = 2;
    spec.p = 2;
    spec.d = 1;
    Signature zero({0, 0});
    std::int64_t n = 10000, stay = 0;
    for (std::int64_t s = 0; s < n; ++s) {
        RngHandle rng(43, (std::uint64_t)s);
        auto out = chain_step(zero, spec, rng);
        stay += parts_of(out) == std::vector<std::int64_t>{0, 0};
    }
    double p = 6.0 / 16.0;
    double phat = (double)stay / (double)n;
    CHECK(std::abs(phat - p) < 3.0 * std::sqrt(p * (1.0 - p) / (double)n));
}

TEST_CASE("chain step law ignores which matrix realized the state") {
    // multiplying the diagonal by a fresh Haar factor on the left must not
    // change the outcome law
    EnsembleSpec spec;
    spec.kind = EnsembleSpec::Kind::IidHaar;
    spec.N = 2;
    spec.p = 2;
    spec.d = 2;
    Signature nu({1, 0});
    std::int64_t n = 20000;
    std::map<std::vector<std::int64_t>, std::int64_t> ha, hb;
    for (std::int64_t s = 0; s < n; ++s) {
        RngHandle rng(47, (std::uint64_t)s);
        ha[parts_of(chain_step(nu, spec, rng))] += 1;
        // re-randomized variant: conjugate the state by an extra Haar W
        RngHandle rng2(48, (std::uint64_t)s);
        MatModPd W = sample_haar_gl(2, 2, 2, rng2);
        MatModPd diag(2, 2, 2, 2);
        diag.at(0, 0) = 2;
        diag.at(1, 1) = 1;
        MatModPd A = sample_ensemble(spec, rng2);
        MatModPd U = sample_haar_gl(2, 2, 2, rng2);
        hb[parts_of(smith_sn(matmul(matmul(A, U), matmul(W, diag))))] += 1;
    }
    for (const auto& [k, c] : ha) {
        double pa = (double)c / (double)n;
        double pb = (double)hb[k] / (double)n;
        double pooled = 0.5 * (pa + pb);
        if (pooled <= 0.0 || pooled >= 1.0) continue;
        double z = (pa - pb) / std::sqrt(pooled * (1.0 - pooled) * 2.0 / (double)n);
        CHECK(std::abs(z) < 4.0);
    }
}

TEST_CASE("trajectories are monotone and snapshots line up") {
    EnsembleSpec spec;
    spec.kind = EnsembleSpec::Kind::IidHaar;
    spec.N = 3;
    spec.p = 2;
    spec.d = 2;
    Signature zero({0, 0, 0});
    RngHandle rng(53, 0);
    auto snaps = run_chain(zero, spec, 6, {0, 1, 2, 3, 4, 5, 6}, rng);
    REQUIRE(snaps.size() == 7);
    CHECK(parts_of(snaps[0]) == std::vector<std::int64_t>{0, 0, 0});
    for (std::size_t i = 1; i < snaps.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(snaps[i].parts[j] >= snaps[i - 1].parts[j]);

    RngHandle rng2(53, 1);
    auto only = run_chain(zero, spec, 0, {0}, rng2);
    REQUIRE(only.size() == 1);
    CHECK(parts_of(only[0]) == std::vector<std::int64_t>{0, 0, 0});
}

TEST_CASE("ensemble spec JSON") {
    EnsembleSpec spec;
    spec.kind = EnsembleSpec::Kind::Corner;
    spec.N = 8;
    spec.D = 2;
    spec.p = 2;
    spec.d = 2;
    auto back = EnsembleSpec::from_json(spec.to_json());
    CHECK(back.kind == EnsembleSpec::Kind::Corner);
    CHECK(back.D == 2);
    CHECK(back.N == 8);
    CHECK_THROWS(EnsembleSpec::from_json("{\"kind\":\"weird\",\"N\":1,\"p\":2,\"d\":1}"));
}
