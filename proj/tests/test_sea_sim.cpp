#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "psea/qcalc.hpp"
#include "psea/sea_sim.hpp"

using namespace psea;

namespace {

// Kolmogorov-Smirnov one-sample statistic against an exponential cdf.
double ks_vs_exponential(std::vector<double> samples, double rate) {
    std::sort(samples.begin(), samples.end());
    double n = (double)samples.size();
    double stat = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double F = 1.0 - std::exp(-rate * samples[i]);
        stat = std::max(stat, std::abs(F - (double)i / n));
        stat = std::max(stat, std::abs(F - (double)(i + 1) / n));
    }
    return stat;
}

const double kKs1em3 = 1.949;  // sqrt(n)-scaled critical value at 1e-3

} // namespace

TEST_CASE("single walker is a Poisson counter") {
    double t = 0.5, T = 4.0;
    std::int64_t n = 10000;
    double mean = 0.0;
    for (std::int64_t s = 0; s < n; ++s) {
        ClockStreams clocks(101, (std::uint64_t)s, t);
        auto res = simulate_finite({0}, t, T, clocks);
        mean += (double)res.values[0];
    }
    mean /= (double)n;
    double lam = t * T;
    CHECK(std::abs(mean - lam) < 3.0 * std::sqrt(lam / (double)n));
}

TEST_CASE("first jump of the bottom walker pools both clocks") {
    double t = 0.5;
    std::int64_t n = 4000;
    std::vector<double> first_times;
    for (std::int64_t s = 0; s < n; ++s) {
        ClockStreams clocks(103, (std::uint64_t)s, t);
        auto res = simulate_finite({0, 0}, t, 30.0, clocks);
        for (const auto& e : res.traj.events)
            if (e.index == 1) {
                first_times.push_back(e.time);
                break;
            }
    }
    REQUIRE((double)first_times.size() > 0.99 * (double)n);
    double stat = ks_vs_exponential(first_times, t + t * t);
    CHECK(stat * std::sqrt((double)first_times.size()) < kKs1em3);
}

TEST_CASE("blocked walker donates to the top of its block") {
    // with values (3,3,2,...) a ring of the second walker moves the first
    std::vector<std::int64_t> nu{3, 3, 2, -1, -3};
    for (std::int64_t s = 0; s < 50; ++s) {
        ClockStreams clocks(107, (std::uint64_t)s, 0.5);
        auto res = simulate_finite(nu, 0.5, 1.0, clocks);
        std::vector<std::int64_t> cur = nu;
        for (const auto& e : res.traj.events) {
            std::int64_t i = e.index;
            if (i > 1) CHECK(cur[(std::size_t)(i - 2)] > cur[(std::size_t)(i - 1)]);
            cur[(std::size_t)(i - 1)] += 1;
            CHECK(cur[(std::size_t)(i - 1)] == e.new_value);
            for (std::size_t j = 0; j + 1 < cur.size(); ++j) CHECK(cur[j] >= cur[j + 1]);
        }
    }
}

TEST_CASE("conjugate state bookkeeping") {
    TruncState s;
    s.d = 2;
    s.anchor = -5;
    s.base = 0;
    s.counts = {3, 0};  // values 1,1,1 then flat zeros
    s.validate();
    CHECK(s.value_at_offset(1) == 1);
    CHECK(s.value_at_offset(3) == 1);
    CHECK(s.value_at_offset(4) == 0);

    auto [idx, nv] = s.apply_jump(0);  // top of the infinite zero block
    CHECK(idx == -1);                  // anchor -5, three walkers above zero
    CHECK(nv == 1);
    CHECK(s.counts[0] == 4);

    auto [idx2, nv2] = s.apply_jump(1);  // top of the ones block reaches d
    CHECK(idx2 == -4);
    CHECK(nv2 == 2);
    CHECK(s.anchor == -4);  // frozen
    CHECK(s.counts == std::vector<std::int64_t>{3, 0});
}

TEST_CASE("no event can raise a coordinate above the cap") {
    TruncState init;
    init.d = 1;
    init.anchor = 0;
    init.base = 0;
    init.counts = {0};
    RngHandle rng(109, 0);
    auto res = simulate_truncated(init, 0.5, 50.0, rng);
    for (const auto& e : res.traj.events) CHECK(e.new_value <= 1);
    CHECK(res.state.anchor >= init.anchor);
}

TEST_CASE("pure-birth holding time at depth-1 cap") {
    // d=1 flat-zero tail behind anchor k: first event is exponential with the
    // whole tail's pooled rate t^{k+1}/(1-t)
    double t = 0.5;
    std::int64_t k = 0;
    std::vector<double> holds;
    for (std::int64_t s = 0; s < 4000; ++s) {
        RngHandle rng(113, (std::uint64_t)s);
        TruncState init;
        init.d = 1;
        init.anchor = k;
        init.base = 0;
        init.counts = {0};
        auto res = simulate_truncated(init, t, 40.0, rng);
        if (!res.traj.events.empty()) holds.push_back(res.traj.events[0].time);
    }
    double rate = std::pow(t, (double)(k + 1)) / (1.0 - t);
    double stat = ks_vs_exponential(holds, rate);
    CHECK(stat * std::sqrt((double)holds.size()) < kKs1em3);
}

TEST_CASE("clocked and Gillespie engines agree in law") {
    double t = 0.5, T = 2.0;
    std::int64_t n = 6000;
    std::map<std::int64_t, std::int64_t> ha, hb;
    TruncState init;
    init.d = 1;
    init.anchor = 0;
    init.base = 0;
    init.counts = {0};
    for (std::int64_t s = 0; s < n; ++s) {
        RngHandle rng(127, (std::uint64_t)s);
        ha[simulate_truncated(init, t, T, rng).state.anchor] += 1;
        ClockStreams clocks(131, (std::uint64_t)s, t);
        hb[simulate_truncated_clocked(init, 1, t, T, clocks).state.anchor] += 1;
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

TEST_CASE("monotone coupling in depth") {
    double t = 0.5, T = 1.0;
    WindowSignature flat;
    flat.left_fill = ExtInt(0);
    flat.right_fill = ExtInt(0);
    for (std::int64_t s = 0; s < 300; ++s) {
        ClockStreams ca(137, (std::uint64_t)s, t);
        ClockStreams cb(137, (std::uint64_t)s, t);
        auto shallow = approx_2inf(flat, 1, 4, t, T, ca);
        auto deep = approx_2inf(flat, 1, 5, t, T, cb);
        for (std::int64_t i = -4; i <= 10; ++i) {
            auto ws = shallow.state.window(i, i)[0];
            auto wd = deep.state.window(i, i)[0];
            CHECK(wd <= ws);
        }
    }
}

TEST_CASE("pinned-start depth approximation matches the direct engine") {
    // a start with a value-d part: the truncated engine applies directly and
    // the depth approximation must reproduce its law
    double t = 0.5, T = 1.0;
    std::int64_t d = 2, n = 6000;
    WindowSignature mu;
    mu.offset = -1;
    mu.window = {ExtInt(1)};
    mu.left_fill = ExtInt::pos_inf();
    mu.right_fill = ExtInt(0);
    std::map<std::string, std::int64_t> ha, hb;
    TruncState direct = TruncState::from_window(mu, d);
    for (std::int64_t s = 0; s < n; ++s) {
        ClockStreams clocks(139, (std::uint64_t)s, t);
        auto res = approx_2inf(mu, d, 8, t, T, clocks);
        auto win = res.state.window(-1, 3);
        std::string ka;
        for (auto v : win) ka += std::to_string(v) + ",";
        ha[ka] += 1;

        RngHandle rng(149, (std::uint64_t)s);
        auto res2 = simulate_truncated(direct, t, T, rng);
        auto win2 = res2.state.window(-1, 3);
        std::string kb;
        for (auto v : win2) kb += std::to_string(v) + ",";
        hb[kb] += 1;
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

TEST_CASE("cap consistency under shared clocks") {
    double t = 0.5, T = 1.5;
    WindowSignature flat;
    flat.left_fill = ExtInt(0);
    flat.right_fill = ExtInt(0);
    for (std::int64_t s = 0; s < 200; ++s) {
        ClockStreams ca(151, (std::uint64_t)s, t);
        ClockStreams cb(151, (std::uint64_t)s, t);
        auto low = approx_2inf(flat, 1, 5, t, T, ca);
        auto high = approx_2inf(flat, 3, 5, t, T, cb);
        for (std::int64_t i = -5; i <= 10; ++i) {
            std::int64_t vh = high.state.window(i, i)[0];
            std::int64_t vl = low.state.window(i, i)[0];
            CHECK(std::min<std::int64_t>(vh, 1) == vl);
        }
    }
}

TEST_CASE("flat-start observable approaches the series pmf") {
    double t = 0.5, T = 1.0;
    std::int64_t n = 4000, depth = 9;
    std::map<std::int64_t, std::int64_t> hist;
    WindowSignature flat;
    flat.left_fill = ExtInt(0);
    flat.right_fill = ExtInt(0);
    for (std::int64_t s = 0; s < n; ++s) {
        ClockStreams clocks(157, (std::uint64_t)s, t);
        auto res = approx_2inf(flat, 1, depth, t, T, clocks);
        hist[lowest_positive_index(res.state)] += 1;
    }
    for (std::int64_t x = -4; x <= 4; ++x) {
        double ref = lowest_positive_pmf(x, t, T);
        if (ref < 0.05) continue;
        double phat = (double)hist[x] / (double)n;
        CHECK(std::abs(phat - ref) < 0.03);
    }
}

TEST_CASE("state replay reconstructs intermediate states") {
    TruncState init;
    init.d = 2;
    init.anchor = 0;
    init.base = 0;
    init.counts = {0, 0};
    RngHandle rng(163, 5);
    auto res = simulate_truncated(init, 0.5, 3.0, rng);
    auto end = state_at(init, res.traj.events, 3.0);
    CHECK(end.anchor == res.state.anchor);
    CHECK(end.counts == res.state.counts);
    auto start = state_at(init, res.traj.events, 0.0);
    CHECK(start.counts == init.counts);
}

TEST_CASE("edge walkers stay ordered and capped") {
    RngHandle rng(167, 2);
    auto res = simulate_edge({2, 2, 1, 1, 0, 0}, 2, 0.5, 2.0, rng);
    auto win = res.state.window(-5, 0);
    for (std::size_t i = 0; i + 1 < win.size(); ++i) CHECK(win[i] >= win[i + 1]);
    for (auto v : win) {
        CHECK(v >= 0);
        CHECK(v <= 2);
    }
    CHECK_THROWS(simulate_edge({}, 1, 0.5, 1.0, rng));
}

TEST_CASE("shift stationarity of the flat sea") {
    auto rep = shift_stationarity_check(0.5, 1.0, 1, 10, 4000, 173);
    CHECK(rep.tv < 0.05);
    CHECK(rep.max_abs_z < 4.0);
}

TEST_CASE("untruncatable flat window is rejected by the direct engine") {
    WindowSignature flat;
    flat.left_fill = ExtInt(0);
    flat.right_fill = ExtInt(0);
    CHECK_THROWS_WITH_AS(TruncState::from_window(flat, 1).validate(),
                         doctest::Contains("untruncatable"), std::invalid_argument);
}

TEST_CASE("trajectory CSV shape") {
    TruncState init;
    init.d = 1;
    init.anchor = 0;
    init.base = 0;
    init.counts = {0};
    RngHandle rng(179, 0);
    auto res = simulate_truncated(init, 0.5, 2.0, rng);
    auto csv = res.traj.to_csv();
    CHECK(csv.rfind("# {", 0) == 0);
    CHECK(csv.find("time,index,new_value") != std::string::npos);
}
