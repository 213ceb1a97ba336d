#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psea/padic_linalg.hpp"
#include "psea/rng.hpp"
#include "psea/signatures.hpp"

namespace psea {

// A GL_N(Z_p)-invariant matrix law: iid additive-Haar entries, the top-left
// N x N corner of Haar GL_{N+D}, or U diag(p^lambda) V with Haar U, V.
struct EnsembleSpec {
    enum class Kind { IidHaar, Corner, FixedSn };
    Kind kind = Kind::IidHaar;
    std::int64_t N = 1;
    std::int64_t p = 2;
    std::int64_t d = 1;
    std::int64_t D = 1;                  // corner only
    std::vector<std::int64_t> lambda;    // fixed_sn only, parts in [0, d]

    void validate() const;
    std::string to_json() const;
    static EnsembleSpec from_json(const std::string& text);
};

MatModPd sample_additive_haar(std::int64_t N, std::int64_t p, std::int64_t d, RngHandle& rng);

// Haar measure on GL_N(Z_p) reduced mod p^d: columns drawn right to left, each
// resampled until its mod-p reduction leaves the span of the later columns.
MatModPd sample_haar_gl(std::int64_t N, std::int64_t p, std::int64_t d, RngHandle& rng);

MatModPd sample_ensemble(const EnsembleSpec& spec, RngHandle& rng);

// One step of the singular-number chain: smith_sn(A * U * diag(p^nu)) with
// A ~ spec and fresh Haar U. The output law depends only on nu.
Signature chain_step(const Signature& nu, const EnsembleSpec& spec, RngHandle& rng);

// Same step but carrying the accumulated product matrix; used to validate the
// O(N)-state form above.
MatModPd chain_step_full(const MatModPd& prod, const EnsembleSpec& spec, RngHandle& rng);

// Snapshots of repeated chain_step at the listed step indices (sorted,
// within [0, steps]); index 0 records init.
std::vector<Signature> run_chain(const Signature& init, const EnsembleSpec& spec,
                                 std::int64_t steps, const std::vector<std::int64_t>& record_at,
                                 RngHandle& rng);

} // namespace psea
