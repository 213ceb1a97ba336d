#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psea/extint.hpp"

namespace psea {

// Weakly decreasing tuple of extended integers.
struct Signature {
    std::vector<ExtInt> parts;

    Signature() = default;
    explicit Signature(std::vector<ExtInt> p);
    Signature(std::initializer_list<std::int64_t> vals);

    std::size_t size() const { return parts.size(); }
    bool valid() const;
};

// Bi-infinite signature stored as (offset, finite window, two fills):
//   value(i) = left_fill            for i <= offset
//            = window[i - offset-1] for offset < i <= offset + window.size()
//            = right_fill           for i > offset + window.size()
struct WindowSignature {
    std::int64_t offset = 0;
    std::vector<ExtInt> window;
    ExtInt left_fill = ExtInt::pos_inf();
    ExtInt right_fill = ExtInt::neg_inf();

    ExtInt value(std::int64_t i) const;
    std::int64_t lo() const { return offset + 1; }                      // first window index
    std::int64_t hi() const { return offset + (std::int64_t)window.size(); } // last window index

    bool valid() const;

    // Trim window entries equal to the adjacent fill so equal bi-infinite
    // signatures compare equal.
    void canonicalize();
    friend bool operator==(const WindowSignature& a, const WindowSignature& b);

    // Shift map s^k: value'(i) = value(i+k).
    WindowSignature shifted(std::int64_t k) const;
};

// Embedding iota of a length-N signature: +inf below index 1, -inf above N.
WindowSignature embed(const Signature& sig);

// Conjugate counts nu'_v = #{i : parts[i] >= v} for v = 1..d.
// Requires nonnegative parts (+inf counts at every level).
std::vector<std::int64_t> conjugate(const Signature& sig, int d);

// Reconstruct F_d(sig) from conjugate counts (inverse of conjugate up to capping).
Signature from_conjugate(const std::vector<std::int64_t>& counts, std::size_t n, int d);

Signature truncate_Fd(const Signature& sig, std::int64_t d);
WindowSignature truncate_Fd(const WindowSignature& sig, std::int64_t d);

bool skew_contains(const WindowSignature& nu, const WindowSignature& kappa);

// |kappa / nu| under the Def-5.4 conventions; nullopt means infinite.
// Throws if kappa does not contain nu.
std::optional<std::int64_t> skew_size(const WindowSignature& nu, const WindowSignature& kappa);

// All eta with nu subset eta subset kappa; requires finite skew size.
std::vector<WindowSignature> interval_states(const WindowSignature& nu,
                                             const WindowSignature& kappa);

// JSON forms: signatures as arrays of integers or "inf"/"-inf"; windows as
// {"offset": k, "window": [...], "left": ..., "right": ...}.
std::string to_json(const Signature& sig);
Signature signature_from_json(const std::string& text);
std::string to_json(const WindowSignature& w);
WindowSignature window_from_json(const std::string& text);

} // namespace psea
