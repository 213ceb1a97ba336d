#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "psea/rng.hpp"
#include "psea/signatures.hpp"

namespace psea {

// Per-index exponential ring-time streams with rate t^i. Stream (sample, i) is
// a deterministic function of (seed, sample, i), so runs that share a sample id
// are driven by the same clocks regardless of which indices they consume.
class ClockStreams {
public:
    ClockStreams(std::uint64_t seed, std::uint64_t sample_id, double t);

    // Absolute time of the next unconsumed ring of clock i; peek then consume.
    double peek(std::int64_t index);
    void consume(std::int64_t index);

private:
    struct Stream {
        RngHandle rng;
        double clock_time;
        double next;
    };
    Stream& stream(std::int64_t index);

    std::uint64_t seed_;
    std::uint64_t sample_id_;
    double t_;
    std::unordered_map<std::int64_t, Stream> streams_;
};

// F_d-truncated sea state in conjugate form. Indices <= anchor are frozen at
// value d (equivalently, absent for depth approximations). Active walkers sit
// at indices anchor+1, anchor+2, ...; their values live in [max(base,0), d].
//
// base >= 0: infinite flat tail at value base; counts[j] = #{active walkers
// with value >= base+1+j}, j = 0..d-base-1 (all finite).
// base = -1: finitely many walkers; counts[0] is the total active count
// (level 0) and counts[v] = #{active walkers with value >= v}.
struct TruncState {
    std::int64_t d = 1;
    std::int64_t anchor = 0;
    std::int64_t base = 0;
    std::vector<std::int64_t> counts;

    void validate() const;
    bool finite_mode() const { return base < 0; }
    std::int64_t n_active() const;
    // Value of the walker at index (anchor + offset), offset >= 1.
    std::int64_t value_at_offset(std::int64_t offset) const;
    // Count of active walkers with value >= v (v > base).
    std::int64_t count_at_level(std::int64_t v) const;

    // Apply one ring of a walker whose value is v: the top of its block jumps.
    // Returns (index, new_value) of the walker that moved.
    std::pair<std::int64_t, std::int64_t> apply_jump(std::int64_t v);

    // Window of values at indices [lo, hi] (frozen -> d; absent -> -1).
    std::vector<std::int64_t> window(std::int64_t lo, std::int64_t hi) const;

    static TruncState from_window(const WindowSignature& mu, std::int64_t d);
    std::string to_json() const;
    static TruncState from_json(const std::string& text);
};

struct Event {
    double time;
    std::int64_t index;
    std::int64_t new_value;
};

struct Trajectory {
    std::string initial_json;
    std::vector<Event> events;

    std::string to_csv() const;
};

// Raw finite walker system S^{nu,n} on [0,T]: values unrestricted integers,
// clock i has rate t^i, block tops take donated jumps. Returns final values
// and the event list.
struct FiniteResult {
    std::vector<std::int64_t> values;
    Trajectory traj;
};
FiniteResult simulate_finite(const std::vector<std::int64_t>& nu, double t, double T,
                             ClockStreams& clocks);

// Gillespie loop on TruncState: waiting times from the closed-form total rate,
// ringing index by truncated-geometric inverse CDF, O(1) conjugate jumps.
struct TruncResult {
    TruncState state;
    Trajectory traj;
    std::int64_t n_events = 0;
};
TruncResult simulate_truncated(const TruncState& init, double t, double T, RngHandle& rng);

// Same dynamics driven by per-index ClockStreams, for pathwise coupling across
// depths. lowest_index bounds the active indices from below; rings of clocks
// above the negligibility cutoff index are ignored (expected count < 1e-9).
TruncResult simulate_truncated_clocked(const TruncState& init, std::int64_t lowest_index,
                                       double t, double T, ClockStreams& clocks);

// Depth-n approximation of the bi-infinite process started from mu: walkers at
// indices >= -depth_n carrying mu's values, run for time T under F_d
// truncation. Deeper runs sharing ClockStreams are coordinatewise <= shallower.
TruncResult approx_2inf(const WindowSignature& mu, std::int64_t d, std::int64_t depth_n,
                        double t, double T, ClockStreams& clocks,
                        std::int64_t max_events = 50'000'000);

// Edge process: finitely many walkers ending at index 0 (absent above), same
// truncated engine in finite mode.
TruncResult simulate_edge(const std::vector<std::int64_t>& mu_values, std::int64_t d,
                          double t, double T, RngHandle& rng);

// Replay the first events of a trajectory (those with time <= T) on top of
// init; gives the state at any intermediate time of a finished run.
TruncState state_at(const TruncState& init, const std::vector<Event>& events, double T);

// Index of the lowest walker at a value >= 1 (the d=1 observable); for flat
// starts this is the statistic with the explicit series pmf.
std::int64_t lowest_positive_index(const TruncState& s);

struct ShiftStationarityReport {
    std::map<std::int64_t, double> pmf_shifted;   // law of X(T/t) - 1
    std::map<std::int64_t, double> pmf_unshifted; // law of X(T)
    double tv = 0.0;
    double max_abs_z = 0.0;
    std::int64_t samples = 0;
};

ShiftStationarityReport shift_stationarity_check(double t, double T, std::int64_t d,
                                                 std::int64_t depth_n, std::int64_t samples,
                                                 std::uint64_t seed);

} // namespace psea
