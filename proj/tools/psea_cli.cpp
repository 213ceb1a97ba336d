#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "psea/ensembles.hpp"
#include "psea/generator.hpp"
#include "psea/harness.hpp"
#include "psea/padic_linalg.hpp"
#include "psea/qcalc.hpp"
#include "psea/sea_sim.hpp"

namespace {

using namespace psea;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_out(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << text;
}

std::map<std::string, std::string> parse_params(const std::string& s) {
    std::map<std::string, std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::runtime_error("bad param " + item);
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

std::int64_t geti(const std::map<std::string, std::string>& p, const std::string& k) {
    auto it = p.find(k);
    if (it == p.end()) throw std::runtime_error("missing param " + k);
    return std::stoll(it->second);
}

Rational getr(const std::map<std::string, std::string>& p, const std::string& k) {
    auto it = p.find(k);
    if (it == p.end()) throw std::runtime_error("missing param " + k);
    return parse_rational(it->second);
}

double getd(const std::map<std::string, std::string>& p, const std::string& k) {
    auto it = p.find(k);
    if (it == p.end()) throw std::runtime_error("missing param " + k);
    return std::stod(it->second);
}

std::string rat_str(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

nlohmann::json rational_json(const Rational& r) {
    nlohmann::json j;
    j["exact"] = rat_str(r);
    j["value"] = r.convert_to<double>();
    return j;
}

int cmd_formulas(const std::string& name, const std::string& params_str,
                 const std::string& out_path) {
    auto p = parse_params(params_str);
    nlohmann::json j;
    j["name"] = name;
    if (name == "pochhammer") {
        j["result"] = rational_json(pochhammer(getr(p, "t"), geti(p, "n")));
    } else if (name == "qbinom") {
        j["result"] = rational_json(qbinom(geti(p, "n"), geti(p, "k"), getr(p, "t")));
    } else if (name == "rank_count") {
        j["result"] = rank_count_rect(geti(p, "n"), geti(p, "k"), geti(p, "r"), geti(p, "q"))
                          .str();
    } else if (name == "corner_corank_pmf") {
        auto pmf = corner_corank_pmf(geti(p, "n"), geti(p, "d"), geti(p, "k"), geti(p, "q"));
        auto obj = nlohmann::json::object();
        for (const auto& [r, pr] : pmf) obj[std::to_string(r)] = rational_json(pr);
        j["result"] = obj;
    } else if (name == "coker_single_box") {
        j["result"] =
            rational_json(coker_single_box_prob(geti(p, "N"), geti(p, "n"), geti(p, "m"),
                                                getr(p, "t")));
    } else if (name == "expected_kernel") {
        j["result"] = rational_json(expected_kernel(geti(p, "N"), geti(p, "D"), geti(p, "q")));
    } else if (name == "stay_prob") {
        j["result"] =
            rational_json(stay_prob(geti(p, "r"), geti(p, "N"), geti(p, "len"), getr(p, "t")));
    } else if (name == "single_box") {
        auto [lo, hi] = single_box_bounds(geti(p, "r"), geti(p, "N"), geti(p, "m"),
                                          geti(p, "len"), getr(p, "t"));
        j["result"]["lower"] = rational_json(lo);
        j["result"]["upper"] = rational_json(hi);
    } else if (name == "two_jump") {
        j["result"] =
            rational_json(two_jump_bound(geti(p, "r"), geti(p, "N"), geti(p, "len"), getr(p, "t")));
    } else if (name == "c_N") {
        EnsembleSpec spec = EnsembleSpec::from_json(p.at("ensemble"));
        std::map<std::int64_t, Rational> pmf;
        if (spec.kind == EnsembleSpec::Kind::IidHaar)
            pmf = corank_pmf_iid_haar(spec.N, spec.p);
        else if (spec.kind == EnsembleSpec::Kind::Corner)
            pmf = corank_pmf_corner(spec.N, spec.D, spec.p);
        else
            throw std::runtime_error("c_N: iid_haar or corner ensemble required");
        std::int64_t r_N = geti(p, "r_N");
        Rational t(1, spec.p);
        std::string mode = p.count("mode") ? p.at("mode") : "exact";
        if (mode == "exact") {
            j["result"] = rational_json(c_N_exact(pmf, r_N, t));
        } else {
            j["result"] = spec.kind == EnsembleSpec::Kind::IidHaar
                              ? c_N_asymptotic_haar(1.0 / (double)spec.p, r_N)
                              : c_N_asymptotic_corner(1.0 / (double)spec.p, r_N, spec.D);
        }
    } else if (name == "lowest_positive_pmf") {
        j["result"] = lowest_positive_pmf(geti(p, "n"), getd(p, "t"), getd(p, "T"));
    } else {
        throw std::runtime_error("unknown formula " + name);
    }
    write_out(out_path, j.dump(2));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic matrix product and reflecting-sea toolkit"};
    app.require_subcommand(1);

    // snf
    auto* snf = app.add_subcommand("snf", "singular numbers of a matrix mod p^d");
    std::string snf_matrix, snf_file, snf_out;
    snf->add_option("--matrix", snf_matrix, "matrix JSON");
    snf->add_option("--file", snf_file, "path to matrix JSON");
    snf->add_option("--out", snf_out, "output path (default stdout)");

    // formulas
    auto* formulas = app.add_subcommand("formulas", "evaluate a closed-form expression");
    std::string f_name, f_params, f_out;
    formulas->add_option("--name", f_name)->required();
    formulas->add_option("--params", f_params, "k=v,... (rationals as a/b; JSON allowed)");
    formulas->add_option("--out", f_out);

    // sample
    auto* sample = app.add_subcommand("sample", "draw matrices from an ensemble");
    std::string sm_spec, sm_out;
    std::int64_t sm_samples = 1;
    std::uint64_t sm_seed = 0;
    bool sm_sn = false;
    sample->add_option("--ensemble", sm_spec, "EnsembleSpec JSON")->required();
    sample->add_option("--samples", sm_samples);
    sample->add_option("--seed", sm_seed)->required();
    sample->add_flag("--sn", sm_sn, "print singular numbers instead of matrices");
    sample->add_option("--out", sm_out);

    // sea
    auto* sea = app.add_subcommand("sea", "simulate the reflecting walkers");
    std::string sea_mode, sea_init, sea_out;
    double sea_t = 0.5, sea_T = 1.0;
    std::int64_t sea_d = 1, sea_depth = 10, sea_samples = 1;
    std::uint64_t sea_seed = 0;
    sea->add_option("--mode", sea_mode, "finite|trunc|approx2inf|edge")->required();
    sea->add_option("--t", sea_t)->required();
    sea->add_option("--T", sea_T)->required();
    sea->add_option("--d", sea_d);
    sea->add_option("--depth", sea_depth);
    sea->add_option("--init", sea_init, "initial state JSON")->required();
    sea->add_option("--samples", sea_samples);
    sea->add_option("--seed", sea_seed)->required();
    sea->add_option("--out", sea_out);

    // chain
    auto* chain = app.add_subcommand("chain", "singular-number product chain");
    std::string ch_init, ch_spec, ch_record, ch_out;
    std::int64_t ch_steps = 1;
    std::uint64_t ch_seed = 0;
    chain->add_option("--init", ch_init, "signature JSON")->required();
    chain->add_option("--ensemble", ch_spec)->required();
    chain->add_option("--steps", ch_steps);
    chain->add_option("--record", ch_record, "comma-separated step indices");
    chain->add_option("--seed", ch_seed)->required();
    chain->add_option("--out", ch_out);

    // gen-prob
    auto* gen = app.add_subcommand("gen-prob", "exact transient probability");
    std::string g_from, g_to, g_t = "1/2", g_out;
    std::int64_t g_d = 1, g_N = -1;
    double g_T = 1.0, g_eps = 1e-12;
    gen->add_option("--d", g_d)->required();
    gen->add_option("--t", g_t, "rational, e.g. 1/2")->required();
    gen->add_option("--N", g_N, "-1 for infinite");
    gen->add_option("--from", g_from, "window signature JSON")->required();
    gen->add_option("--to", g_to, "window signature JSON")->required();
    gen->add_option("--T", g_T)->required();
    gen->add_option("--eps", g_eps);
    gen->add_option("--out", g_out);

    // bulk-converge / edge-converge
    auto* bulk = app.add_subcommand("bulk-converge", "matrix chain vs sea, bulk window");
    std::string bk_config, bk_out;
    bulk->add_option("--config", bk_config, "ExperimentConfig JSON file")->required();
    bulk->add_option("--out", bk_out);

    auto* edge = app.add_subcommand("edge-converge", "matrix chain vs generator, edge window");
    std::string ed_config, ed_out;
    edge->add_option("--config", ed_config, "EdgeConfig JSON file")->required();
    edge->add_option("--out", ed_out);

    // compare
    auto* cmp = app.add_subcommand("compare", "empirical histogram vs reference pmf");
    std::string cp_ref, cp_counts, cp_out;
    std::int64_t cp_n = 0;
    cmp->add_option("--ref", cp_ref, "JSON file: cell -> probability")->required();
    cmp->add_option("--counts", cp_counts, "JSON file: cell -> count")->required();
    cmp->add_option("--n", cp_n, "sample count")->required();
    cmp->add_option("--out", cp_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*snf) {
            std::string text = snf_matrix.empty() ? read_file(snf_file) : snf_matrix;
            MatModPd A = MatModPd::from_json(text);
            Signature sn = smith_sn(A);
            write_out(snf_out, to_json(sn));
        } else if (*formulas) {
            return cmd_formulas(f_name, f_params, f_out);
        } else if (*sample) {
            EnsembleSpec spec = EnsembleSpec::from_json(sm_spec);
            std::ostringstream os;
            for (std::int64_t s = 0; s < sm_samples; ++s) {
                RngHandle rng(sm_seed, (std::uint64_t)s);
                MatModPd A = sample_ensemble(spec, rng);
                os << (sm_sn ? to_json(smith_sn(A)) : A.to_json()) << "\n";
            }
            write_out(sm_out, os.str());
        } else if (*sea) {
            std::ostringstream os;
            if (sea_mode == "finite") {
                auto init = nlohmann::json::parse(sea_init).get<std::vector<std::int64_t>>();
                for (std::int64_t s = 0; s < sea_samples; ++s) {
                    ClockStreams clocks(sea_seed, (std::uint64_t)s, sea_t);
                    auto res = simulate_finite(init, sea_t, sea_T, clocks);
                    os << res.traj.to_csv();
                }
            } else if (sea_mode == "trunc") {
                TruncState init = TruncState::from_json(sea_init);
                for (std::int64_t s = 0; s < sea_samples; ++s) {
                    RngHandle rng(sea_seed, (std::uint64_t)s);
                    os << simulate_truncated(init, sea_t, sea_T, rng).traj.to_csv();
                }
            } else if (sea_mode == "approx2inf") {
                WindowSignature mu = window_from_json(sea_init);
                for (std::int64_t s = 0; s < sea_samples; ++s) {
                    ClockStreams clocks(sea_seed, (std::uint64_t)s, sea_t);
                    auto res = approx_2inf(mu, sea_d, sea_depth, sea_t, sea_T, clocks);
                    os << res.traj.to_csv();
                }
            } else if (sea_mode == "edge") {
                auto init = nlohmann::json::parse(sea_init).get<std::vector<std::int64_t>>();
                for (std::int64_t s = 0; s < sea_samples; ++s) {
                    RngHandle rng(sea_seed, (std::uint64_t)s);
                    os << simulate_edge(init, sea_d, sea_t, sea_T, rng).traj.to_csv();
                }
            } else {
                throw std::runtime_error("unknown sea mode " + sea_mode);
            }
            write_out(sea_out, os.str());
        } else if (*chain) {
            Signature init = signature_from_json(ch_init);
            EnsembleSpec spec = EnsembleSpec::from_json(ch_spec);
            std::vector<std::int64_t> record;
            if (ch_record.empty()) {
                record.push_back(ch_steps);
            } else {
                std::stringstream ss(ch_record);
                std::string item;
                while (std::getline(ss, item, ',')) record.push_back(std::stoll(item));
            }
            RngHandle rng(ch_seed, 0);
            auto snaps = run_chain(init, spec, ch_steps, record, rng);
            std::ostringstream os;
            for (const auto& s : snaps) os << to_json(s) << "\n";
            write_out(ch_out, os.str());
        } else if (*gen) {
            WindowSignature from = window_from_json(g_from);
            WindowSignature to = window_from_json(g_to);
            GeneratorMatrix G = build_Q(from, to, g_d, parse_rational(g_t),
                                        g_N < 0 ? kNInfinity : g_N);
            std::int64_t fid = G.find_state(truncate_Fd(from, g_d));
            std::int64_t tid = G.find_state(truncate_Fd(to, g_d));
            std::int64_t terms = 0;
            double prob = transient_prob(G, g_T, fid, tid, g_eps, &terms);
            nlohmann::json j;
            j["probability"] = prob;
            j["series_terms"] = terms;
            j["states"] = G.states.size();
            write_out(g_out, j.dump(2));
        } else if (*bulk) {
            auto cfg = ExperimentConfig::from_json(read_file(bk_config));
            auto rep = run_bulk_convergence(cfg);
            write_out(bk_out, rep.to_json());
            if (!rep.warnings.empty()) return 2;
        } else if (*edge) {
            auto cfg = EdgeConfig::from_json(read_file(ed_config));
            auto rep = run_edge_convergence(cfg);
            write_out(ed_out, rep.to_json());
            if (!rep.warnings.empty()) return 2;
        } else if (*cmp) {
            auto ref_j = nlohmann::json::parse(read_file(cp_ref));
            auto cnt_j = nlohmann::json::parse(read_file(cp_counts));
            std::map<std::string, double> ref;
            std::map<std::string, std::int64_t> counts;
            for (auto it = ref_j.begin(); it != ref_j.end(); ++it)
                ref[it.key()] = it.value().get<double>();
            for (auto it = cnt_j.begin(); it != cnt_j.end(); ++it)
                counts[it.key()] = it.value().get<std::int64_t>();
            auto rep = compare_pmf(ref, counts, cp_n);
            write_out(cp_out, rep.to_json());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
