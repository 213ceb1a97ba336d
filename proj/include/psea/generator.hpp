#pragma once

#include <cstdint>
#include <vector>

#include "psea/qcalc.hpp"
#include "psea/signatures.hpp"

namespace psea {

inline constexpr std::int64_t kNInfinity = -1;

// Exact generator of the truncated sea restricted to the poset interval
// [nu, kappa]. rates is S x (S+1): column S collects transitions that leave
// the interval, so every full row sums to zero exactly.
struct GeneratorMatrix {
    std::vector<WindowSignature> states;
    std::vector<std::vector<Rational>> rates;
    Rational t;
    std::int64_t d = 1;
    std::int64_t N = kNInfinity;

    std::int64_t find_state(const WindowSignature& s) const;
};

// Requires nu with left fill pinned at d and finite skew size to kappa.
GeneratorMatrix build_Q(const WindowSignature& nu, const WindowSignature& kappa,
                        std::int64_t d, const Rational& t, std::int64_t N = kNInfinity);

// (e^{TQ})(from, to) by uniformization, absolute error <= eps; terms_out, if
// given, receives the truncated series length.
double transient_prob(const GeneratorMatrix& G, double T, std::int64_t from,
                      std::int64_t to, double eps, std::int64_t* terms_out = nullptr);

// Joint probability of hitting states[i] at times[i], starting at `from` at
// time 0; product of per-gap transient probabilities (exact by monotonicity of
// the dynamics: paths between interval states never leave the interval).
double multi_time_prob(const GeneratorMatrix& G, std::int64_t from,
                       const std::vector<double>& times,
                       const std::vector<std::int64_t>& states, double eps);

} // namespace psea
