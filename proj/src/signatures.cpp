#include "psea/signatures.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace psea {

namespace {

nlohmann::json part_to_json(const ExtInt& e) {
    if (e.is_pos_inf()) return "inf";
    if (e.is_neg_inf()) return "-inf";
    return e.value();
}

ExtInt part_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "inf") return ExtInt::pos_inf();
        if (s == "-inf") return ExtInt::neg_inf();
        throw std::invalid_argument("signature part: unknown string " + s);
    }
    return ExtInt(j.get<std::int64_t>());
}

} // namespace

Signature::Signature(std::vector<ExtInt> p) : parts(std::move(p)) {
    if (!valid()) throw std::invalid_argument("Signature: parts not weakly decreasing");
}

Signature::Signature(std::initializer_list<std::int64_t> vals) {
    for (auto v : vals) parts.emplace_back(v);
    if (!valid()) throw std::invalid_argument("Signature: parts not weakly decreasing");
}

bool Signature::valid() const {
    for (std::size_t i = 0; i + 1 < parts.size(); ++i)
        if (parts[i] < parts[i + 1]) return false;
    return true;
}

ExtInt WindowSignature::value(std::int64_t i) const {
    if (i <= offset) return left_fill;
    if (i > hi()) return right_fill;
    return window[(std::size_t)(i - offset - 1)];
}

bool WindowSignature::valid() const {
    ExtInt prev = left_fill;
    for (const auto& w : window) {
        if (w > prev) return false;
        prev = w;
    }
    return right_fill <= prev;
}

void WindowSignature::canonicalize() {
    std::size_t lo_trim = 0;
    while (lo_trim < window.size() && window[lo_trim] == left_fill) ++lo_trim;
    std::size_t hi_end = window.size();
    while (hi_end > lo_trim && window[hi_end - 1] == right_fill) --hi_end;
    window.assign(window.begin() + (std::ptrdiff_t)lo_trim,
                  window.begin() + (std::ptrdiff_t)hi_end);
    offset += (std::int64_t)lo_trim;
    // with an empty window the offset still marks where left_fill ends, unless
    // the two fills agree and the boundary is meaningless
    if (window.empty() && left_fill == right_fill) offset = 0;
}

bool operator==(const WindowSignature& a, const WindowSignature& b) {
    WindowSignature ca = a, cb = b;
    ca.canonicalize();
    cb.canonicalize();
    return ca.offset == cb.offset && ca.window == cb.window &&
           ca.left_fill == cb.left_fill && ca.right_fill == cb.right_fill;
}

WindowSignature WindowSignature::shifted(std::int64_t k) const {
    WindowSignature out = *this;
    out.offset -= k;
    return out;
}

WindowSignature embed(const Signature& sig) {
    WindowSignature w;
    w.offset = 0;
    w.window = sig.parts;
    w.left_fill = ExtInt::pos_inf();
    w.right_fill = ExtInt::neg_inf();
    return w;
}

std::vector<std::int64_t> conjugate(const Signature& sig, int d) {
    if (d < 1) throw std::invalid_argument("conjugate: d must be >= 1");
    for (const auto& p : sig.parts)
        if (p < ExtInt(0)) throw std::invalid_argument("conjugate: negative part");
    std::vector<std::int64_t> counts((std::size_t)d, 0);
    for (int v = 1; v <= d; ++v) {
        std::int64_t c = 0;
        for (const auto& p : sig.parts)
            if (p >= ExtInt(v)) ++c;
        counts[(std::size_t)(v - 1)] = c;
    }
    return counts;
}

Signature from_conjugate(const std::vector<std::int64_t>& counts, std::size_t n, int d) {
    std::vector<ExtInt> parts;
    parts.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        std::int64_t val = 0;
        for (int v = 1; v <= d; ++v)
            if (counts[(std::size_t)(v - 1)] >= (std::int64_t)i) val = v;
        parts.emplace_back(val);
    }
    return Signature(std::move(parts));
}

Signature truncate_Fd(const Signature& sig, std::int64_t d) {
    Signature out;
    out.parts.reserve(sig.parts.size());
    for (const auto& p : sig.parts) out.parts.push_back(min(p, ExtInt(d)));
    return out;
}

WindowSignature truncate_Fd(const WindowSignature& sig, std::int64_t d) {
    WindowSignature out = sig;
    out.left_fill = min(out.left_fill, ExtInt(d));
    out.right_fill = min(out.right_fill, ExtInt(d));
    for (auto& w : out.window) w = min(w, ExtInt(d));
    out.canonicalize();
    return out;
}

bool skew_contains(const WindowSignature& nu, const WindowSignature& kappa) {
    if (!(nu.left_fill <= kappa.left_fill)) return false;
    if (!(nu.right_fill <= kappa.right_fill)) return false;
    std::int64_t lo = std::min(nu.lo(), kappa.lo());
    std::int64_t hi = std::max(nu.hi(), kappa.hi());
    for (std::int64_t i = lo; i <= hi; ++i)
        if (!(nu.value(i) <= kappa.value(i))) return false;
    return true;
}

std::optional<std::int64_t> skew_size(const WindowSignature& nu, const WindowSignature& kappa) {
    if (!skew_contains(nu, kappa))
        throw std::invalid_argument("skew_size: kappa does not contain nu");
    // Fill regions contribute 0 iff the fills agree (conventions of the
    // extended arithmetic); otherwise infinitely many positive differences.
    if (nu.left_fill != kappa.left_fill || nu.right_fill != kappa.right_fill)
        return std::nullopt;
    std::int64_t lo = std::min(nu.lo(), kappa.lo());
    std::int64_t hi = std::max(nu.hi(), kappa.hi());
    std::int64_t total = 0;
    for (std::int64_t i = lo; i <= hi; ++i) {
        ExtInt dlt = skew_diff(kappa.value(i), nu.value(i));
        if (!dlt.is_finite()) return std::nullopt;
        total += dlt.value();
    }
    return total;
}

std::vector<WindowSignature> interval_states(const WindowSignature& nu,
                                             const WindowSignature& kappa) {
    auto sz = skew_size(nu, kappa);
    if (!sz) throw std::invalid_argument("interval_states: infinite skew size");

    std::int64_t lo = std::min(nu.lo(), kappa.lo());
    std::int64_t hi = std::max(nu.hi(), kappa.hi());

    std::vector<WindowSignature> out;
    std::vector<ExtInt> cur((std::size_t)(hi - lo + 1));

    // Choose values from the highest index down; each value is bounded below
    // by nu and by the next coordinate, above by kappa and the coordinate cap.
    auto rec = [&](auto&& self, std::int64_t i, ExtInt below_floor) -> void {
        if (i < lo) {
            WindowSignature eta;
            eta.offset = lo - 1;
            eta.window = cur;
            eta.left_fill = nu.left_fill;
            eta.right_fill = nu.right_fill;
            if (eta.valid()) {
                eta.canonicalize();
                out.push_back(std::move(eta));
            }
            return;
        }
        ExtInt lo_v = max(nu.value(i), below_floor);
        ExtInt hi_v = kappa.value(i);
        if (lo_v > hi_v) return;
        if (!lo_v.is_finite() || !hi_v.is_finite()) {
            // Infinite coordinates cannot vary when the skew size is finite.
            ExtInt pinned = nu.value(i);
            if (below_floor > pinned) return;
            cur[(std::size_t)(i - lo)] = pinned;
            self(self, i - 1, pinned);
            return;
        }
        for (std::int64_t v = lo_v.value(); v <= hi_v.value(); ++v) {
            cur[(std::size_t)(i - lo)] = ExtInt(v);
            self(self, i - 1, ExtInt(v));
        }
    };
    rec(rec, hi, ExtInt::neg_inf());
    return out;
}

std::string to_json(const Signature& sig) {
    auto arr = nlohmann::json::array();
    for (const auto& p : sig.parts) arr.push_back(part_to_json(p));
    return arr.dump();
}

Signature signature_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    Signature out;
    for (const auto& e : j) out.parts.push_back(part_from_json(e));
    if (!out.valid()) throw std::invalid_argument("signature: parts not weakly decreasing");
    return out;
}

std::string to_json(const WindowSignature& w) {
    nlohmann::json j;
    j["offset"] = w.offset;
    auto arr = nlohmann::json::array();
    for (const auto& p : w.window) arr.push_back(part_to_json(p));
    j["window"] = std::move(arr);
    j["left"] = part_to_json(w.left_fill);
    j["right"] = part_to_json(w.right_fill);
    return j.dump();
}

WindowSignature window_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    WindowSignature w;
    w.offset = j.value("offset", (std::int64_t)0);
    if (j.contains("window"))
        for (const auto& e : j.at("window")) w.window.push_back(part_from_json(e));
    if (j.contains("left")) w.left_fill = part_from_json(j.at("left"));
    if (j.contains("right")) w.right_fill = part_from_json(j.at("right"));
    if (!w.valid()) throw std::invalid_argument("window signature: not weakly decreasing");
    return w;
}

} // namespace psea
