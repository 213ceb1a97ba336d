#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psea/signatures.hpp"

namespace psea {

// N x M matrix with entries in Z/p^d, row-major 64-bit words. Requires
// p^d < 2^63 so products of residues fit in unsigned 128-bit intermediates.
struct MatModPd {
    std::int64_t p = 2;
    std::int64_t d = 1;
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<std::uint64_t> entries;

    MatModPd() = default;
    MatModPd(std::int64_t p, std::int64_t d, std::int64_t rows, std::int64_t cols);

    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t& at(std::int64_t r, std::int64_t c) {
        return entries[(std::size_t)(r * cols + c)];
    }
    std::uint64_t at(std::int64_t r, std::int64_t c) const {
        return entries[(std::size_t)(r * cols + c)];
    }

    static MatModPd identity(std::int64_t p, std::int64_t d, std::int64_t n);

    std::string to_json() const;
    static MatModPd from_json(const std::string& text);

private:
    std::uint64_t modulus_ = 2;
};

// p^d with overflow check against 2^63.
std::uint64_t pow_checked(std::int64_t p, std::int64_t d);

MatModPd matmul(const MatModPd& A, const MatModPd& B);

// Capped singular numbers: weakly decreasing parts in {0..d}, part d meaning
// ">= d, possibly infinite"; length min(rows, cols).
Signature smith_sn(const MatModPd& A);

// Valuation of det, capped at d.
std::int64_t det_valuation(const MatModPd& A);

// Min valuation over all k x k minors, capped at d. Exhaustive; rows, cols <= 6.
std::int64_t minor_valuation_oracle(const MatModPd& A, std::int64_t k);

std::int64_t corank_mod_p(const MatModPd& A);

} // namespace psea
