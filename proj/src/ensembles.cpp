#include "psea/ensembles.hpp"

#include <stdexcept>

#include <json.hpp>

namespace psea {

namespace {

// Basis rows are kept in reduced echelon form (pivot entries 1, pivot columns
// cleared everywhere else), so one elimination pass fully reduces v.
void reduce_against(const std::vector<std::vector<std::uint64_t>>& basis,
                    std::vector<std::uint64_t>& v, std::uint64_t p) {
    for (const auto& b : basis) {
        std::size_t piv = 0;
        while (b[piv] == 0) ++piv;
        std::uint64_t f = v[piv];
        if (f == 0) continue;
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = (v[i] + p * p - f * b[i] % p) % p;
    }
}

bool in_span_mod_p(const std::vector<std::vector<std::uint64_t>>& basis,
                   std::vector<std::uint64_t> v, std::uint64_t p) {
    reduce_against(basis, v, p);
    for (auto x : v)
        if (x != 0) return false;
    return true;
}

void echelon_insert(std::vector<std::vector<std::uint64_t>>& basis,
                    std::vector<std::uint64_t> v, std::uint64_t p) {
    reduce_against(basis, v, p);
    std::size_t piv = 0;
    while (piv < v.size() && v[piv] == 0) ++piv;
    if (piv == v.size()) throw std::logic_error("echelon_insert: dependent column");
    std::uint64_t inv = 1;
    for (std::uint64_t x = 1; x < p; ++x)
        if (v[piv] * x % p == 1) {
            inv = x;
            break;
        }
    for (auto& e : v) e = e * inv % p;
    for (auto& b : basis) {
        std::uint64_t f = b[piv];
        if (f == 0) continue;
        for (std::size_t i = 0; i < b.size(); ++i)
            b[i] = (b[i] + p * p - f * v[i] % p) % p;
    }
    basis.push_back(std::move(v));
}

MatModPd diag_p_pow(const std::vector<std::int64_t>& lambda, std::int64_t N,
                    std::int64_t p, std::int64_t d) {
    MatModPd M(p, d, N, N);
    for (std::int64_t i = 0; i < N; ++i) {
        std::int64_t e = i < (std::int64_t)lambda.size() ? lambda[(std::size_t)i] : 0;
        if (e >= d) continue;  // p^e vanishes mod p^d only when e >= d
        std::uint64_t v = 1;
        for (std::int64_t j = 0; j < e; ++j) v *= (std::uint64_t)p;
        M.at(i, i) = v;
    }
    return M;
}

} // namespace

void EnsembleSpec::validate() const {
    if (N < 1 || p < 2 || d < 1) throw std::invalid_argument("EnsembleSpec: need N,d >= 1, p >= 2");
    if (kind == Kind::Corner && D < 1) throw std::invalid_argument("EnsembleSpec: corner D >= 1");
    if (kind == Kind::FixedSn) {
        if ((std::int64_t)lambda.size() > N)
            throw std::invalid_argument("EnsembleSpec: fixed_sn length > N");
        std::int64_t prev = d;
        for (auto v : lambda) {
            if (v < 0 || v > d || v > prev)
                throw std::invalid_argument("EnsembleSpec: fixed_sn parts must be decreasing in [0,d]");
            prev = v;
        }
    }
}

std::string EnsembleSpec::to_json() const {
    nlohmann::json j;
    switch (kind) {
        case Kind::IidHaar: j["kind"] = "iid_haar"; break;
        case Kind::Corner: j["kind"] = "corner"; j["D"] = D; break;
        case Kind::FixedSn: j["kind"] = "fixed_sn"; j["lambda"] = lambda; break;
    }
    j["N"] = N;
    j["p"] = p;
    j["d"] = d;
    return j.dump();
}

EnsembleSpec EnsembleSpec::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    EnsembleSpec spec;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "iid_haar") {
        spec.kind = Kind::IidHaar;
    } else if (kind == "corner") {
        spec.kind = Kind::Corner;
        spec.D = j.at("D").get<std::int64_t>();
    } else if (kind == "fixed_sn") {
        spec.kind = Kind::FixedSn;
        spec.lambda = j.at("lambda").get<std::vector<std::int64_t>>();
    } else {
        throw std::invalid_argument("EnsembleSpec: unknown kind " + kind);
    }
    spec.N = j.at("N").get<std::int64_t>();
    spec.p = j.at("p").get<std::int64_t>();
    spec.d = j.at("d").get<std::int64_t>();
    spec.validate();
    return spec;
}

MatModPd sample_additive_haar(std::int64_t N, std::int64_t p, std::int64_t d, RngHandle& rng) {
    MatModPd A(p, d, N, N);
    for (auto& e : A.entries) e = rng.uniform_below(A.modulus());
    return A;
}

MatModPd sample_haar_gl(std::int64_t N, std::int64_t p, std::int64_t d, RngHandle& rng) {
    MatModPd A(p, d, N, N);
    std::vector<std::vector<std::uint64_t>> basis;  // mod-p columns drawn so far
    for (std::int64_t c = N - 1; c >= 0; --c) {
        std::vector<std::uint64_t> col((std::size_t)N), colp((std::size_t)N);
        for (;;) {
            for (std::int64_t r = 0; r < N; ++r) {
                col[(std::size_t)r] = rng.uniform_below(A.modulus());
                colp[(std::size_t)r] = col[(std::size_t)r] % (std::uint64_t)p;
            }
            if (!in_span_mod_p(basis, colp, (std::uint64_t)p)) break;
        }
        echelon_insert(basis, colp, (std::uint64_t)p);
        for (std::int64_t r = 0; r < N; ++r) A.at(r, c) = col[(std::size_t)r];
    }
    return A;
}

MatModPd sample_ensemble(const EnsembleSpec& spec, RngHandle& rng) {
    spec.validate();
    switch (spec.kind) {
        case EnsembleSpec::Kind::IidHaar:
            return sample_additive_haar(spec.N, spec.p, spec.d, rng);
        case EnsembleSpec::Kind::Corner: {
            MatModPd full = sample_haar_gl(spec.N + spec.D, spec.p, spec.d, rng);
            MatModPd A(spec.p, spec.d, spec.N, spec.N);
            for (std::int64_t r = 0; r < spec.N; ++r)
                for (std::int64_t c = 0; c < spec.N; ++c) A.at(r, c) = full.at(r, c);
            return A;
        }
        case EnsembleSpec::Kind::FixedSn: {
            MatModPd U = sample_haar_gl(spec.N, spec.p, spec.d, rng);
            MatModPd V = sample_haar_gl(spec.N, spec.p, spec.d, rng);
            return matmul(matmul(U, diag_p_pow(spec.lambda, spec.N, spec.p, spec.d)), V);
        }
    }
    throw std::logic_error("sample_ensemble: unreachable");
}

Signature chain_step(const Signature& nu, const EnsembleSpec& spec, RngHandle& rng) {
    if ((std::int64_t)nu.size() != spec.N)
        throw std::invalid_argument("chain_step: signature length must equal N");
    std::vector<std::int64_t> parts;
    parts.reserve(nu.size());
    for (const auto& v : nu.parts) parts.push_back(std::min(v.is_finite() ? v.value() : spec.d, spec.d));
    MatModPd A = sample_ensemble(spec, rng);
    MatModPd U = sample_haar_gl(spec.N, spec.p, spec.d, rng);
    return smith_sn(matmul(matmul(A, U), diag_p_pow(parts, spec.N, spec.p, spec.d)));
}

MatModPd chain_step_full(const MatModPd& prod, const EnsembleSpec& spec, RngHandle& rng) {
    MatModPd A = sample_ensemble(spec, rng);
    return matmul(A, prod);
}

std::vector<Signature> run_chain(const Signature& init, const EnsembleSpec& spec,
                                 std::int64_t steps, const std::vector<std::int64_t>& record_at,
                                 RngHandle& rng) {
    for (std::size_t i = 0; i + 1 < record_at.size(); ++i)
        if (record_at[i] > record_at[i + 1])
            throw std::invalid_argument("run_chain: record_at must be sorted");
    if (!record_at.empty() && (record_at.front() < 0 || record_at.back() > steps))
        throw std::invalid_argument("run_chain: record_at outside [0, steps]");
    std::vector<Signature> out;
    Signature cur = init;
    std::size_t next = 0;
    for (std::int64_t tau = 0; tau <= steps; ++tau) {
        while (next < record_at.size() && record_at[next] == tau) {
            out.push_back(cur);
            ++next;
        }
        if (tau < steps) cur = chain_step(cur, spec, rng);
    }
    return out;
}

} // namespace psea
