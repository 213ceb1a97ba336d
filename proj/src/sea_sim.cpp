#include "psea/sea_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace psea {

namespace {

std::uint64_t stream_hash(std::uint64_t sample_id, std::int64_t index) {
    return splitmix64(splitmix64(sample_id) ^ (std::uint64_t)index);
}

// Smallest cutoff index I with expected rings above I on [0,T] below 1e-9.
std::int64_t cutoff_index(double t, double T) {
    std::int64_t i = 0;
    double mass = t / (1.0 - t) * std::max(T, 1e-300);
    while (mass > 1e-9) {
        ++i;
        mass *= t;
    }
    return i;
}

} // namespace

ClockStreams::ClockStreams(std::uint64_t seed, std::uint64_t sample_id, double t)
    : seed_(seed), sample_id_(sample_id), t_(t) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("ClockStreams: t outside (0,1)");
}

ClockStreams::Stream& ClockStreams::stream(std::int64_t index) {
    auto it = streams_.find(index);
    if (it == streams_.end()) {
        Stream s{RngHandle(seed_, stream_hash(sample_id_, index)), 0.0, 0.0};
        s.next = s.rng.exponential(std::pow(t_, (double)index));
        it = streams_.emplace(index, std::move(s)).first;
    }
    return it->second;
}

double ClockStreams::peek(std::int64_t index) { return stream(index).next; }

void ClockStreams::consume(std::int64_t index) {
    Stream& s = stream(index);
    s.next += s.rng.exponential(std::pow(t_, (double)index));
}

void TruncState::validate() const {
    if (d < 1) throw std::invalid_argument("TruncState: d >= 1 required");
    if (base < -1 || base >= d) throw std::invalid_argument("TruncState: base outside [-1, d)");
    if ((std::int64_t)counts.size() != d - base)
        throw std::invalid_argument("TruncState: counts length must be d - base");
    std::int64_t prev = INT64_MAX;
    for (auto c : counts) {
        if (c < 0 || c > prev) throw std::invalid_argument("TruncState: counts must decrease");
        prev = c;
    }
    if (!counts.empty() && counts.back() != 0)
        throw std::invalid_argument("TruncState: active walker at value d must be frozen");
}

std::int64_t TruncState::n_active() const {
    if (!finite_mode()) throw std::logic_error("TruncState: n_active on infinite tail");
    return counts[0];
}

std::int64_t TruncState::count_at_level(std::int64_t v) const {
    if (v <= base) throw std::logic_error("TruncState: level at or below tail");
    if (v > d) return 0;
    return counts[(std::size_t)(v - base - 1)];
}

std::int64_t TruncState::value_at_offset(std::int64_t offset) const {
    std::int64_t v = base;
    for (auto c : counts) {
        if (c >= offset)
            ++v;
        else
            break;
    }
    return v;
}

std::pair<std::int64_t, std::int64_t> TruncState::apply_jump(std::int64_t v) {
    if (v < base || v >= d) throw std::logic_error("TruncState: jump value out of range");
    if (v > base && count_at_level(v) <= count_at_level(v + 1))
        throw std::logic_error("TruncState: no walker at jump value");
    std::int64_t offset = count_at_level(v + 1) + 1;
    std::int64_t index = anchor + offset;
    counts[(std::size_t)(v - base)] += 1;
    if (v + 1 == d) {
        // a walker only ever reaches d directly beside the frozen region
        if (offset != 1) throw std::logic_error("TruncState: freeze away from anchor");
        anchor += 1;
        for (auto& c : counts) c -= 1;
    }
    return {index, v + 1};
}

std::vector<std::int64_t> TruncState::window(std::int64_t lo, std::int64_t hi) const {
    std::vector<std::int64_t> out;
    out.reserve((std::size_t)std::max<std::int64_t>(0, hi - lo + 1));
    for (std::int64_t i = lo; i <= hi; ++i) {
        if (i <= anchor) {
            out.push_back(d);
        } else if (finite_mode() && i - anchor > counts[0]) {
            out.push_back(-1);
        } else {
            out.push_back(value_at_offset(i - anchor));
        }
    }
    return out;
}

TruncState TruncState::from_window(const WindowSignature& mu, std::int64_t d) {
    if (d < 1) throw std::invalid_argument("from_window: d >= 1 required");
    WindowSignature w = truncate_Fd(mu, d);
    TruncState s;
    s.d = d;
    if (!(w.left_fill == ExtInt(d)))
        throw std::invalid_argument("untruncatable state: no coordinate pinned at >= d");
    if (w.right_fill.is_neg_inf()) {
        s.base = -1;
    } else {
        std::int64_t rv = w.right_fill.value();
        if (rv < 0) throw std::invalid_argument("from_window: negative tail value");
        if (rv >= d) {
            // everything is pinned; empty active region behind an arbitrary anchor
            s.base = -1;
            s.anchor = w.offset;
            s.counts.assign((std::size_t)(d + 1), 0);
            return s;
        }
        s.base = rv;
    }
    s.anchor = w.offset;  // canonical window starts strictly below d
    s.counts.assign((std::size_t)(s.d - s.base), 0);
    for (const auto& e : w.window) {
        if (!e.is_finite() || e.value() < 0)
            throw std::invalid_argument("from_window: walker values must be finite and >= 0");
        for (std::int64_t v = s.base + 1; v <= std::min(e.value(), s.d); ++v)
            s.counts[(std::size_t)(v - s.base - 1)] += 1;
    }
    s.validate();
    return s;
}

std::string TruncState::to_json() const {
    nlohmann::json j;
    j["d"] = d;
    j["anchor"] = anchor;
    j["base"] = base;
    j["counts"] = counts;
    return j.dump();
}

TruncState TruncState::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    TruncState s;
    s.d = j.at("d").get<std::int64_t>();
    s.anchor = j.at("anchor").get<std::int64_t>();
    s.base = j.at("base").get<std::int64_t>();
    s.counts = j.at("counts").get<std::vector<std::int64_t>>();
    s.validate();
    return s;
}

std::string Trajectory::to_csv() const {
    std::ostringstream os;
    os << "# " << initial_json << "\n";
    os << "time,index,new_value\n";
    os.precision(17);
    for (const auto& e : events)
        os << e.time << "," << e.index << "," << e.new_value << "\n";
    return os.str();
}

FiniteResult simulate_finite(const std::vector<std::int64_t>& nu, double t, double T,
                             ClockStreams& clocks) {
    for (std::size_t i = 0; i + 1 < nu.size(); ++i)
        if (nu[i] < nu[i + 1]) throw std::invalid_argument("simulate_finite: not decreasing");
    FiniteResult res;
    res.values = nu;
    std::int64_t n = (std::int64_t)nu.size();
    nlohmann::json init;
    init["kind"] = "finite";
    init["values"] = nu;
    res.traj.initial_json = init.dump();
    if (n == 0) return res;

    for (;;) {
        double best = T;
        std::int64_t bi = -1;
        for (std::int64_t i = 1; i <= n; ++i) {
            double nt = clocks.peek(i);
            if (nt <= best) {
                best = nt;
                bi = i;
            }
        }
        if (bi < 0) break;
        clocks.consume(bi);
        // the top of bi's block takes the jump
        std::int64_t j = bi;
        while (j > 1 && res.values[(std::size_t)(j - 2)] == res.values[(std::size_t)(j - 1)]) --j;
        res.values[(std::size_t)(j - 1)] += 1;
        res.traj.events.push_back({best, j, res.values[(std::size_t)(j - 1)]});
    }
    return res;
}

namespace {

double total_rate(const TruncState& s, double t) {
    double head = std::pow(t, (double)(s.anchor + 1));
    if (s.finite_mode()) return (head - head * std::pow(t, (double)s.counts[0])) / (1.0 - t);
    return head / (1.0 - t);
}

// Recompute the rate walker by walker (tail in closed form) for bookkeeping.
double total_rate_check(const TruncState& s, double t) {
    double acc = 0.0;
    std::int64_t above = s.finite_mode() ? s.counts[0] : s.count_at_level(s.base + 1);
    for (std::int64_t j = 1; j <= above; ++j) acc += std::pow(t, (double)(s.anchor + j));
    if (!s.finite_mode()) acc += std::pow(t, (double)(s.anchor + above + 1)) / (1.0 - t);
    return acc;
}

void bookkeeping_assert(const TruncState& s, double t) {
    double a = total_rate(s, t);
    double b = total_rate_check(s, t);
    if (std::abs(a - b) > 1e-12 * std::max(a, b))
        throw std::logic_error("sea rate bookkeeping drifted");
}

void assert_ordered(const TruncState& s) {
    std::int64_t prev = INT64_MAX;
    for (auto c : s.counts) {
        if (c > prev || c < 0) throw std::logic_error("sea state lost monotonicity");
        prev = c;
    }
}

} // namespace

TruncResult simulate_truncated(const TruncState& init, double t, double T, RngHandle& rng) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("simulate_truncated: t outside (0,1)");
    init.validate();
    TruncResult res;
    res.state = init;
    res.traj.initial_json = init.to_json();
    double now = 0.0;
    for (;;) {
        double R = total_rate(res.state, t);
        if (R <= 0.0) break;
        now += rng.exponential(R);
        if (now > T) break;
        double u = rng.uniform01();
        std::int64_t j;
        if (res.state.finite_mode()) {
            std::int64_t n = res.state.counts[0];
            double span = 1.0 - std::pow(t, (double)n);
            j = (std::int64_t)std::floor(std::log1p(-u * span) / std::log(t));
            j = std::clamp<std::int64_t>(j, 0, n - 1);
        } else {
            j = (std::int64_t)std::floor(std::log(u) / std::log(t));
            if (j < 0) j = 0;
        }
        std::int64_t v = res.state.value_at_offset(1 + j);
        auto [idx, nv] = res.state.apply_jump(v);
        res.traj.events.push_back({now, idx, nv});
        ++res.n_events;
        if (res.n_events % 1000 == 0) {
            bookkeeping_assert(res.state, t);
            assert_ordered(res.state);
        }
    }
    return res;
}

TruncResult simulate_truncated_clocked(const TruncState& init, std::int64_t lowest_index,
                                       double t, double T, ClockStreams& clocks) {
    if (!(t > 0.0 && t < 1.0)) throw std::domain_error("simulate_truncated_clocked: t outside (0,1)");
    init.validate();
    TruncResult res;
    res.state = init;
    res.traj.initial_json = init.to_json();
    std::int64_t hi = cutoff_index(t, T);
    for (;;) {
        double best = T;
        std::int64_t bi = lowest_index - 1;
        for (std::int64_t i = lowest_index; i <= hi; ++i) {
            double nt = clocks.peek(i);
            if (nt <= best) {
                best = nt;
                bi = i;
            }
        }
        if (bi < lowest_index) break;
        clocks.consume(bi);
        const TruncState& s = res.state;
        if (bi <= s.anchor) continue;  // frozen (or absent) walker's ring is a no-op
        if (s.finite_mode() && bi - s.anchor > s.counts[0]) continue;
        std::int64_t v = s.value_at_offset(bi - s.anchor);
        auto [idx, nv] = res.state.apply_jump(v);
        res.traj.events.push_back({best, idx, nv});
        ++res.n_events;
        if (res.n_events % 1000 == 0) {
            bookkeeping_assert(res.state, t);
            assert_ordered(res.state);
        }
    }
    return res;
}

TruncResult approx_2inf(const WindowSignature& mu, std::int64_t d, std::int64_t depth_n,
                        double t, double T, ClockStreams& clocks, std::int64_t max_events) {
    if (depth_n < 1) throw std::invalid_argument("approx_2inf: depth_n >= 1 required");
    TruncState s;
    s.d = d;
    s.anchor = -depth_n - 1;
    if (mu.right_fill.is_neg_inf()) {
        s.base = -1;
    } else {
        std::int64_t rv = std::min(mu.right_fill.value(), d);
        if (rv < 0 || rv >= d)
            throw std::invalid_argument("approx_2inf: tail value must lie in [0, d)");
        s.base = rv;
    }
    s.counts.assign((std::size_t)(s.d - s.base), 0);
    for (std::int64_t i = -depth_n; i <= std::max(mu.hi(), -depth_n); ++i) {
        ExtInt e = mu.value(i);
        std::int64_t ev = e.is_finite() ? std::min(e.value(), d) : (e.is_pos_inf() ? d : -1);
        if (ev < 0) break;  // absent walkers above (finite mode)
        if (ev < s.base) throw std::invalid_argument("approx_2inf: value below tail");
        for (std::int64_t v = s.base + 1; v <= ev; ++v) s.counts[(std::size_t)(v - s.base - 1)] += 1;
    }
    // fold walkers already at d into the frozen region
    std::int64_t leading = s.count_at_level(d);
    if (leading > 0) {
        s.anchor += leading;
        for (auto& c : s.counts) c -= leading;
    }
    s.validate();
    TruncResult res = simulate_truncated_clocked(s, -depth_n, t, T, clocks);
    if (res.n_events > max_events)
        throw std::runtime_error("approx_2inf: event budget exceeded (" +
                                 std::to_string(res.n_events) + " events)");
    return res;
}

TruncResult simulate_edge(const std::vector<std::int64_t>& mu_values, std::int64_t d,
                          double t, double T, RngHandle& rng) {
    std::int64_t len = (std::int64_t)mu_values.size();
    if (len == 0) throw std::invalid_argument("simulate_edge: empty configuration");
    TruncState s;
    s.d = d;
    s.anchor = -len;  // walkers occupy indices -len+1 .. 0, nothing above
    s.base = -1;
    s.counts.assign((std::size_t)(d + 1), 0);
    std::int64_t prev = INT64_MAX;
    for (auto raw : mu_values) {
        if (raw < 0 || raw > prev) throw std::invalid_argument("simulate_edge: invalid values");
        prev = raw;
        std::int64_t v = std::min(raw, d);
        for (std::int64_t lvl = 1; lvl <= v; ++lvl) s.counts[(std::size_t)lvl] += 1;
        s.counts[0] += 1;
    }
    std::int64_t leading = s.count_at_level(d);
    if (leading > 0) {
        s.anchor += leading;
        for (auto& c : s.counts) c -= leading;
    }
    s.validate();
    return simulate_truncated(s, t, T, rng);
}

TruncState state_at(const TruncState& init, const std::vector<Event>& events, double T) {
    TruncState s = init;
    for (const auto& e : events) {
        if (e.time > T) break;
        s.apply_jump(e.new_value - 1);
    }
    return s;
}

std::int64_t lowest_positive_index(const TruncState& s) {
    if (s.base >= 1) throw std::domain_error("lowest_positive_index: tail already positive");
    return s.anchor + s.count_at_level(1);
}

ShiftStationarityReport shift_stationarity_check(double t, double T, std::int64_t d,
                                                 std::int64_t depth_n, std::int64_t samples,
                                                 std::uint64_t seed) {
    WindowSignature flat;
    flat.left_fill = ExtInt(0);
    flat.right_fill = ExtInt(0);
    std::map<std::int64_t, std::int64_t> ca, cb;
    for (std::int64_t sidx = 0; sidx < samples; ++sidx) {
        ClockStreams c1(seed, 2 * (std::uint64_t)sidx, t);
        ClockStreams c2(seed, 2 * (std::uint64_t)sidx + 1, t);
        auto ra = approx_2inf(flat, d, depth_n, t, T, c1);
        auto rb = approx_2inf(flat, d, depth_n, t, T / t, c2);
        ca[lowest_positive_index(ra.state)] += 1;
        cb[lowest_positive_index(rb.state) - 1] += 1;
    }
    ShiftStationarityReport rep;
    rep.samples = samples;
    double n = (double)samples;
    std::map<std::int64_t, std::pair<double, double>> cells;
    for (auto& [k, c] : ca) cells[k].first = (double)c / n;
    for (auto& [k, c] : cb) cells[k].second = (double)c / n;
    for (auto& [k, pq] : cells) {
        rep.pmf_unshifted[k] = pq.first;
        rep.pmf_shifted[k] = pq.second;
        rep.tv += 0.5 * std::abs(pq.first - pq.second);
        double pooled = 0.5 * (pq.first + pq.second);
        if (pooled > 0.0 && pooled < 1.0) {
            double z = (pq.first - pq.second) / std::sqrt(pooled * (1.0 - pooled) * 2.0 / n);
            rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
        }
    }
    return rep;
}

} // namespace psea
