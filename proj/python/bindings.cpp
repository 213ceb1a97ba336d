#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>

#include "psea/generator.hpp"
#include "psea/harness.hpp"
#include "psea/qcalc.hpp"
#include "psea/sea_sim.hpp"

namespace py = pybind11;
using namespace psea;

namespace {

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(BigInt(text));
    return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
}

std::string rational_str(const Rational& r) {
    return r.str();
}

MatModPd mat_from_py(std::int64_t p, std::int64_t d,
                     const std::vector<std::vector<std::uint64_t>>& rows) {
    if (rows.empty() || rows[0].empty()) throw std::invalid_argument("empty matrix");
    MatModPd A(p, d, (std::int64_t)rows.size(), (std::int64_t)rows[0].size());
    for (std::int64_t r = 0; r < A.rows; ++r) {
        if ((std::int64_t)rows[(std::size_t)r].size() != A.cols)
            throw std::invalid_argument("ragged matrix");
        for (std::int64_t c = 0; c < A.cols; ++c)
            A.at(r, c) = rows[(std::size_t)r][(std::size_t)c] % A.modulus();
    }
    return A;
}

std::vector<std::vector<std::uint64_t>> mat_to_py(const MatModPd& A) {
    std::vector<std::vector<std::uint64_t>> out((std::size_t)A.rows);
    for (std::int64_t r = 0; r < A.rows; ++r)
        for (std::int64_t c = 0; c < A.cols; ++c)
            out[(std::size_t)r].push_back(A.at(r, c));
    return out;
}

std::vector<std::int64_t> parts_of(const Signature& s) {
    std::vector<std::int64_t> out;
    for (const auto& e : s.parts) out.push_back(e.value());
    return out;
}

} // namespace

PYBIND11_MODULE(_psea, m) {
    m.doc() = "p-adic matrix products and the reflecting Poisson sea";

    m.def(
        "smith_sn",
        [](std::int64_t p, std::int64_t d, const std::vector<std::vector<std::uint64_t>>& rows) {
            return parts_of(smith_sn(mat_from_py(p, d, rows)));
        },
        py::arg("p"), py::arg("d"), py::arg("rows"),
        "Singular numbers mod p^d, weakly decreasing, capped at d.");

    m.def(
        "det_valuation",
        [](std::int64_t p, std::int64_t d, const std::vector<std::vector<std::uint64_t>>& rows) {
            return det_valuation(mat_from_py(p, d, rows));
        },
        py::arg("p"), py::arg("d"), py::arg("rows"));

    m.def(
        "corank",
        [](std::int64_t p, const std::vector<std::vector<std::uint64_t>>& rows) {
            return corank_mod_p(mat_from_py(p, 1, rows));
        },
        py::arg("p"), py::arg("rows"), "Kernel dimension over the residue field.");

    m.def(
        "sample_matrix",
        [](const std::string& ensemble_json, std::uint64_t seed, std::uint64_t stream) {
            auto spec = EnsembleSpec::from_json(ensemble_json);
            RngHandle rng(seed, stream);
            return mat_to_py(sample_ensemble(spec, rng));
        },
        py::arg("ensemble_json"), py::arg("seed"), py::arg("stream") = 0);

    m.def(
        "run_chain",
        [](const std::vector<std::int64_t>& init, const std::string& ensemble_json,
           std::int64_t steps, const std::vector<std::int64_t>& record_at, std::uint64_t seed,
           std::uint64_t stream) {
            auto spec = EnsembleSpec::from_json(ensemble_json);
            Signature sig;
            for (auto v : init) sig.parts.emplace_back(v);
            RngHandle rng(seed, stream);
            std::vector<std::vector<std::int64_t>> out;
            for (const auto& s : run_chain(sig, spec, steps, record_at, rng))
                out.push_back(parts_of(s));
            return out;
        },
        py::arg("init"), py::arg("ensemble_json"), py::arg("steps"), py::arg("record_at"),
        py::arg("seed"), py::arg("stream") = 0,
        "Snapshots of the singular-number Markov chain at the requested steps.");

    m.def(
        "sea_simulate",
        [](const std::string& initial_window_json, std::int64_t d, std::int64_t depth, double t,
           double T, std::uint64_t seed, std::int64_t lo, std::int64_t hi) {
            auto mu = window_from_json(initial_window_json);
            ClockStreams clocks(seed, 0, t);
            auto res = approx_2inf(mu, d, depth, t, T, clocks);
            return res.state.window(lo, hi);
        },
        py::arg("initial_window_json"), py::arg("d"), py::arg("depth"), py::arg("t"),
        py::arg("T"), py::arg("seed"), py::arg("lo"), py::arg("hi"),
        "Depth-approximated sea run from a window initial condition; returns the "
        "final capped values on [lo, hi] (-1 marks indices above every walker).");

    m.def("lowest_positive_pmf", &lowest_positive_pmf, py::arg("n"), py::arg("t"),
          py::arg("T"));

    m.def(
        "stay_prob",
        [](std::int64_t r, std::int64_t N, std::int64_t len_lambda, const std::string& t) {
            return rational_str(stay_prob(r, N, len_lambda, parse_rational(t)));
        },
        py::arg("r"), py::arg("N"), py::arg("len_lambda"), py::arg("t"));

    m.def(
        "single_box_bounds",
        [](std::int64_t r, std::int64_t N, std::int64_t m, std::int64_t len_lambda,
           const std::string& t) {
            auto [lo, hi] = single_box_bounds(r, N, m, len_lambda, parse_rational(t));
            return py::make_tuple(rational_str(lo), rational_str(hi));
        },
        py::arg("r"), py::arg("N"), py::arg("m"), py::arg("len_lambda"), py::arg("t"));

    m.def(
        "two_jump_bound",
        [](std::int64_t r, std::int64_t N, std::int64_t len_lambda, const std::string& t) {
            return rational_str(two_jump_bound(r, N, len_lambda, parse_rational(t)));
        },
        py::arg("r"), py::arg("N"), py::arg("len_lambda"), py::arg("t"));

    m.def(
        "expected_kernel",
        [](std::int64_t N, std::int64_t D, std::int64_t q) {
            return rational_str(expected_kernel(N, D, q));
        },
        py::arg("N"), py::arg("D"), py::arg("q"),
        "Pass D=-1 for the square-matrix limit.");

    m.def(
        "c_N",
        [](const std::string& ensemble_json, std::int64_t r_N, const std::string& t) {
            auto spec = EnsembleSpec::from_json(ensemble_json);
            auto pmf = spec.kind == EnsembleSpec::Kind::Corner
                           ? corank_pmf_corner(spec.N, spec.D, spec.p)
                           : corank_pmf_iid_haar(spec.N, spec.p);
            return rational_str(c_N_exact(pmf, r_N, parse_rational(t)));
        },
        py::arg("ensemble_json"), py::arg("r_N"), py::arg("t"));

    m.def(
        "gen_prob",
        [](const std::string& nu_json, const std::string& kappa_json, std::int64_t d,
           const std::string& t, std::int64_t N, const std::string& from_json,
           const std::vector<double>& times, const std::vector<std::string>& to_jsons,
           double eps) {
            auto G = build_Q(window_from_json(nu_json), window_from_json(kappa_json), d,
                             parse_rational(t), N);
            auto from = G.find_state(window_from_json(from_json));
            if (from < 0) throw std::invalid_argument("from-state outside the interval");
            std::vector<std::int64_t> to;
            for (const auto& j : to_jsons) {
                auto idx = G.find_state(window_from_json(j));
                if (idx < 0) throw std::invalid_argument("to-state outside the interval");
                to.push_back(idx);
            }
            return multi_time_prob(G, from, times, to, eps);
        },
        py::arg("nu_json"), py::arg("kappa_json"), py::arg("d"), py::arg("t"), py::arg("N"),
        py::arg("from_json"), py::arg("times"), py::arg("to_jsons"), py::arg("eps") = 1e-10,
        "Exact joint transition probability on a poset interval; N=-1 for the "
        "half-infinite tail.");

    m.def(
        "bulk_converge",
        [](const std::string& config_json) {
            return run_bulk_convergence(ExperimentConfig::from_json(config_json)).to_json();
        },
        py::arg("config_json"));

    m.def(
        "edge_converge",
        [](const std::string& config_json) {
            return run_edge_convergence(EdgeConfig::from_json(config_json)).to_json();
        },
        py::arg("config_json"));
}
