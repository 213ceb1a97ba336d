#include "psea/padic_linalg.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace psea {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return (std::uint64_t)((unsigned __int128)a * b % m);
}

std::uint64_t submod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return a >= b ? a - b : a + (m - b);
}

// Valuation of x, capped at d (x == 0 mod p^d reads as >= d).
std::int64_t val_capped(std::uint64_t x, std::int64_t p, std::int64_t d) {
    if (x == 0) return d;
    std::int64_t v = 0;
    while (x % (std::uint64_t)p == 0) {
        x /= (std::uint64_t)p;
        ++v;
    }
    return std::min(v, d);
}

// Inverse of a unit mod m by extended Euclid.
std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, newt = 1;
    std::int64_t r = (std::int64_t)m, newr = (std::int64_t)(a % m);
    while (newr != 0) {
        std::int64_t q = r / newr;
        std::int64_t tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1) throw std::domain_error("invmod: not a unit");
    if (t < 0) t += (std::int64_t)m;
    return (std::uint64_t)t;
}

std::uint64_t det_laplace(const MatModPd& A, const std::vector<std::int64_t>& rows,
                          const std::vector<std::int64_t>& cols) {
    std::uint64_t m = A.modulus();
    std::size_t k = rows.size();
    if (k == 1) return A.at(rows[0], cols[0]);
    std::uint64_t acc = 0;
    std::vector<std::int64_t> sub_rows(rows.begin() + 1, rows.end());
    std::vector<std::int64_t> sub_cols(k - 1);
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t idx = 0;
        for (std::size_t c = 0; c < k; ++c)
            if (c != j) sub_cols[idx++] = cols[c];
        std::uint64_t term = mulmod(A.at(rows[0], cols[j]), det_laplace(A, sub_rows, sub_cols), m);
        acc = (j % 2 == 0) ? (acc + term) % m : submod(acc, term, m);
    }
    return acc;
}

} // namespace

std::uint64_t pow_checked(std::int64_t p, std::int64_t d) {
    if (p < 2 || d < 1) throw std::domain_error("modulus: need p >= 2, d >= 1");
    std::uint64_t m = 1;
    for (std::int64_t i = 0; i < d; ++i) {
        if (m > (1ULL << 62) / (std::uint64_t)p)
            throw std::domain_error("modulus: p^d must be < 2^63");
        m *= (std::uint64_t)p;
    }
    return m;
}

MatModPd::MatModPd(std::int64_t p_, std::int64_t d_, std::int64_t rows_, std::int64_t cols_)
    : p(p_), d(d_), rows(rows_), cols(cols_),
      entries((std::size_t)(rows_ * cols_), 0), modulus_(pow_checked(p_, d_)) {
    if (rows_ < 0 || cols_ < 0) throw std::domain_error("MatModPd: negative dimension");
}

MatModPd MatModPd::identity(std::int64_t p, std::int64_t d, std::int64_t n) {
    MatModPd I(p, d, n, n);
    for (std::int64_t i = 0; i < n; ++i) I.at(i, i) = 1;
    return I;
}

std::string MatModPd::to_json() const {
    nlohmann::json j;
    j["p"] = p;
    j["d"] = d;
    j["rows"] = rows;
    j["cols"] = cols;
    auto rows_arr = nlohmann::json::array();
    for (std::int64_t r = 0; r < rows; ++r) {
        auto row = nlohmann::json::array();
        for (std::int64_t c = 0; c < cols; ++c) row.push_back(at(r, c));
        rows_arr.push_back(std::move(row));
    }
    j["entries"] = std::move(rows_arr);
    return j.dump();
}

MatModPd MatModPd::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    MatModPd A(j.at("p").get<std::int64_t>(), j.at("d").get<std::int64_t>(),
               j.at("rows").get<std::int64_t>(), j.at("cols").get<std::int64_t>());
    const auto& rows_arr = j.at("entries");
    if ((std::int64_t)rows_arr.size() != A.rows)
        throw std::invalid_argument("MatModPd: row count mismatch");
    for (std::int64_t r = 0; r < A.rows; ++r) {
        const auto& row = rows_arr[(std::size_t)r];
        if ((std::int64_t)row.size() != A.cols)
            throw std::invalid_argument("MatModPd: column count mismatch");
        for (std::int64_t c = 0; c < A.cols; ++c)
            A.at(r, c) = row[(std::size_t)c].get<std::uint64_t>() % A.modulus();
    }
    return A;
}

MatModPd matmul(const MatModPd& A, const MatModPd& B) {
    if (A.p != B.p || A.d != B.d) throw std::invalid_argument("matmul: modulus mismatch");
    if (A.cols != B.rows) throw std::invalid_argument("matmul: dimension mismatch");
    MatModPd C(A.p, A.d, A.rows, B.cols);
    std::uint64_t m = A.modulus();
    for (std::int64_t i = 0; i < A.rows; ++i)
        for (std::int64_t k = 0; k < A.cols; ++k) {
            std::uint64_t a = A.at(i, k);
            if (a == 0) continue;
            for (std::int64_t j = 0; j < B.cols; ++j)
                C.at(i, j) = (C.at(i, j) + mulmod(a, B.at(k, j), m)) % m;
        }
    return C;
}

Signature smith_sn(const MatModPd& A) {
    MatModPd W = A;
    std::uint64_t m = W.modulus();
    std::int64_t n = std::min(W.rows, W.cols);
    std::vector<std::int64_t> parts;
    parts.reserve((std::size_t)n);

    std::vector<bool> row_done((std::size_t)W.rows, false), col_done((std::size_t)W.cols, false);
    for (std::int64_t step = 0; step < n; ++step) {
        std::int64_t best_v = W.d, br = -1, bc = -1;
        for (std::int64_t r = 0; r < W.rows && best_v > 0; ++r) {
            if (row_done[(std::size_t)r]) continue;
            for (std::int64_t c = 0; c < W.cols; ++c) {
                if (col_done[(std::size_t)c]) continue;
                std::int64_t v = val_capped(W.at(r, c), W.p, W.d);
                if (v < best_v) {
                    best_v = v;
                    br = r;
                    bc = c;
                    if (v == 0) break;
                }
            }
        }
        if (br < 0) {
            // remaining block vanishes mod p^d
            for (std::int64_t k = step; k < n; ++k) parts.push_back(W.d);
            break;
        }
        parts.push_back(best_v);
        // normalize the pivot's unit part, then clear its row and column
        std::uint64_t pv = (std::uint64_t)1;
        for (std::int64_t i = 0; i < best_v; ++i) pv *= (std::uint64_t)W.p;
        std::uint64_t unit = W.at(br, bc) / pv;
        std::uint64_t uinv = invmod(unit, m);
        for (std::int64_t c = 0; c < W.cols; ++c)
            if (!col_done[(std::size_t)c]) W.at(br, c) = mulmod(W.at(br, c), uinv, m);
        for (std::int64_t r = 0; r < W.rows; ++r) {
            if (row_done[(std::size_t)r] || r == br) continue;
            std::uint64_t factor = W.at(r, bc) / pv;
            if (factor == 0) continue;
            for (std::int64_t c = 0; c < W.cols; ++c)
                if (!col_done[(std::size_t)c])
                    W.at(r, c) = submod(W.at(r, c), mulmod(factor, W.at(br, c), m), m);
        }
        row_done[(std::size_t)br] = true;
        col_done[(std::size_t)bc] = true;
    }
    std::sort(parts.begin(), parts.end(), std::greater<>());
    Signature out;
    for (auto v : parts) out.parts.emplace_back(v);
    return out;
}

std::int64_t det_valuation(const MatModPd& A) {
    if (A.rows != A.cols) throw std::invalid_argument("det_valuation: matrix not square");
    // val(det) is the sum of the singular numbers; if the capped sum reaches d
    // the true valuation is >= d either way.
    std::int64_t total = 0;
    for (const auto& part : smith_sn(A).parts) {
        total += part.value();
        if (total >= A.d) return A.d;
    }
    return total;
}

std::int64_t minor_valuation_oracle(const MatModPd& A, std::int64_t k) {
    if (A.rows > 6 || A.cols > 6)
        throw std::invalid_argument("minor_valuation_oracle: dimensions capped at 6");
    if (k < 1 || k > std::min(A.rows, A.cols))
        throw std::invalid_argument("minor_valuation_oracle: k out of range");

    std::vector<std::vector<std::int64_t>> row_sets, col_sets;
    auto subsets = [](std::int64_t n, std::int64_t k) {
        std::vector<std::vector<std::int64_t>> out;
        std::vector<std::int64_t> cur;
        auto rec = [&](auto&& self, std::int64_t start) -> void {
            if ((std::int64_t)cur.size() == k) {
                out.push_back(cur);
                return;
            }
            for (std::int64_t i = start; i < n; ++i) {
                cur.push_back(i);
                self(self, i + 1);
                cur.pop_back();
            }
        };
        rec(rec, 0);
        return out;
    };
    row_sets = subsets(A.rows, k);
    col_sets = subsets(A.cols, k);

    std::int64_t best = A.d;
    for (const auto& rs : row_sets)
        for (const auto& cs : col_sets) {
            std::int64_t v = val_capped(det_laplace(A, rs, cs), A.p, A.d);
            best = std::min(best, v);
            if (best == 0) return 0;
        }
    return best;
}

std::int64_t corank_mod_p(const MatModPd& A) {
    std::uint64_t p = (std::uint64_t)A.p;
    std::vector<std::uint64_t> W(A.entries.size());
    for (std::size_t i = 0; i < W.size(); ++i) W[i] = A.entries[i] % p;
    auto at = [&](std::int64_t r, std::int64_t c) -> std::uint64_t& {
        return W[(std::size_t)(r * A.cols + c)];
    };
    std::int64_t rank = 0;
    std::int64_t row = 0;
    for (std::int64_t col = 0; col < A.cols && row < A.rows; ++col) {
        std::int64_t pivot = -1;
        for (std::int64_t r = row; r < A.rows; ++r)
            if (at(r, col) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        for (std::int64_t c = col; c < A.cols; ++c) std::swap(at(row, c), at(pivot, c));
        std::uint64_t inv = invmod(at(row, col), p);
        for (std::int64_t c = col; c < A.cols; ++c) at(row, c) = mulmod(at(row, c), inv, p);
        for (std::int64_t r = 0; r < A.rows; ++r) {
            if (r == row || at(r, col) == 0) continue;
            std::uint64_t f = at(r, col);
            for (std::int64_t c = col; c < A.cols; ++c)
                at(r, c) = submod(at(r, c), mulmod(f, at(row, c), p), p);
        }
        ++row;
        ++rank;
    }
    return A.cols - rank;
}

} // namespace psea
