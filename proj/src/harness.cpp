#include "psea/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include "psea/generator.hpp"
#include "psea/qcalc.hpp"

namespace psea {

namespace {

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::string join_values(const std::vector<std::int64_t>& vals) {
    std::string out;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(vals[i]);
    }
    return out;
}

std::map<std::int64_t, Rational> ensemble_corank_pmf(const EnsembleSpec& spec) {
    switch (spec.kind) {
        case EnsembleSpec::Kind::IidHaar:
            return corank_pmf_iid_haar(spec.N, spec.p);
        case EnsembleSpec::Kind::Corner:
            return corank_pmf_corner(spec.N, spec.D, spec.p);
        case EnsembleSpec::Kind::FixedSn: {
            std::int64_t c = 0;
            for (auto v : spec.lambda)
                if (v >= 1) ++c;
            return {{c, Rational(1)}};
        }
    }
    throw std::logic_error("ensemble_corank_pmf: unreachable");
}

double tv_distance(const std::map<std::string, double>& a,
                   const std::map<std::string, double>& b) {
    double tv = 0.0;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        tv += std::abs(v - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : b)
        if (!a.count(k)) tv += v;
    return 0.5 * tv;
}

} // namespace

void ExperimentConfig::validate() const {
    ensemble.validate();
    if (r_N < 1 || r_N > ensemble.N)
        throw std::invalid_argument("ExperimentConfig: need 1 <= r_N <= N");
    if (samples < 1) throw std::invalid_argument("ExperimentConfig: samples >= 1");
    if (depth < 1) throw std::invalid_argument("ExperimentConfig: depth >= 1");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (times[i] >= times[i + 1])
            throw std::invalid_argument("ExperimentConfig: times must increase");
    if (times.empty() || times.front() < 0.0)
        throw std::invalid_argument("ExperimentConfig: need nonnegative times");
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["ensemble"] = nlohmann::json::parse(ensemble.to_json());
    j["r_N"] = r_N;
    j["times"] = times;
    j["samples"] = samples;
    j["depth"] = depth;
    j["window_halfwidth"] = window_halfwidth;
    j["seed"] = seed;
    return j.dump();
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    cfg.experiment = j.value("experiment", std::string{});
    cfg.ensemble = EnsembleSpec::from_json(j.at("ensemble").dump());
    cfg.r_N = j.at("r_N").get<std::int64_t>();
    cfg.times = j.at("times").get<std::vector<double>>();
    cfg.samples = j.at("samples").get<std::int64_t>();
    cfg.depth = j.value("depth", (std::int64_t)10);
    cfg.window_halfwidth = j.value("window_halfwidth", (std::int64_t)5);
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

std::string ExperimentConfig::content_hash() const { return fnv1a_hex(to_json()); }

std::string ComparisonReport::to_json() const {
    nlohmann::json j;
    j["reference"] = reference;
    j["empirical"] = empirical;
    j["z_scores"] = z_scores;
    j["tv"] = tv;
    j["chi2"] = chi2;
    j["chi2_dof"] = chi2_dof;
    j["chi2_critical"] = chi2_critical;
    j["chi2_pass"] = chi2_pass;
    j["max_abs_z"] = max_abs_z;
    j["samples"] = samples;
    j["depth_gap_tv"] = depth_gap_tv;
    j["wall_seconds"] = wall_seconds;
    if (!config_json.empty()) j["config"] = nlohmann::json::parse(config_json);
    if (!config_hash.empty()) j["config_hash"] = config_hash;
    j["warnings"] = warnings;
    return j.dump(2);
}

ComparisonReport compare_pmf(const std::map<std::string, double>& reference,
                             const std::map<std::string, std::int64_t>& counts,
                             std::int64_t n_samples) {
    if (reference.empty()) throw std::invalid_argument("compare_pmf: empty reference support");
    if (n_samples < 1) throw std::invalid_argument("compare_pmf: need samples");
    ComparisonReport rep;
    rep.samples = n_samples;
    rep.reference = reference;
    double n = (double)n_samples;

    std::map<std::string, double> emp;
    for (const auto& [k, c] : counts) emp[k] = (double)c / n;
    rep.empirical = emp;
    rep.tv = tv_distance(reference, emp);

    for (const auto& [k, p] : reference) {
        if (p <= 0.0 || p >= 1.0) continue;
        auto it = emp.find(k);
        double ph = it == emp.end() ? 0.0 : it->second;
        double z = (ph - p) / std::sqrt(p * (1.0 - p) / n);
        rep.z_scores[k] = z;
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
    }

    // chi-square with pooling of low-expectation cells; mass and counts not in
    // the reference support join the pooled cell too
    double pooled_exp = 0.0, pooled_obs = 0.0;
    double ref_total = 0.0;
    rep.chi2 = 0.0;
    std::int64_t cells = 0;
    for (const auto& [k, p] : reference) {
        ref_total += p;
        double expd = p * n;
        auto it = counts.find(k);
        double obs = it == counts.end() ? 0.0 : (double)it->second;
        if (expd < 10.0) {
            pooled_exp += expd;
            pooled_obs += obs;
        } else {
            rep.chi2 += (obs - expd) * (obs - expd) / expd;
            ++cells;
        }
    }
    for (const auto& [k, c] : counts)
        if (!reference.count(k)) pooled_obs += (double)c;
    pooled_exp += std::max(0.0, 1.0 - ref_total) * n;
    if (pooled_exp > 0.0) {
        rep.chi2 += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++cells;
    } else if (pooled_obs > 0.0) {
        // observed mass where the reference has none
        rep.chi2 = std::numeric_limits<double>::infinity();
    }
    rep.chi2_dof = std::max<std::int64_t>(0, cells - 1);
    if (rep.chi2_dof > 0) {
        boost::math::chi_squared dist((double)rep.chi2_dof);
        rep.chi2_critical = boost::math::quantile(dist, 1.0 - 1e-3);
        rep.chi2_pass = rep.chi2 <= rep.chi2_critical;
    } else {
        rep.chi2_pass = rep.chi2 == 0.0;
    }
    return rep;
}

ComparisonReport run_bulk_convergence(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const auto& ens = cfg.ensemble;
    Rational t(1, ens.p);
    double td = 1.0 / (double)ens.p;

    auto corank = ensemble_corank_pmf(ens);
    {
        auto it = corank.find(0);
        if (it != corank.end() && it->second == 1)
            throw std::domain_error("run_bulk_convergence: degenerate ensemble (corank 0 a.s.)");
    }
    double cN = c_N_exact(corank, cfg.r_N, t).convert_to<double>();

    ComparisonReport rep;
    // hypothesis check: corank mass near the observation point should vanish
    Rational near_mass = 0;
    for (const auto& [c, pr] : corank)
        if (c >= cfg.r_N) near_mass += pr;
    if (near_mass > Rational(1, 100))
        rep.warnings.push_back("corank mass at or above r_N is " +
                               std::to_string(near_mass.convert_to<double>()) +
                               "; bulk-separation hypothesis is doubtful at this N");

    std::vector<std::int64_t> record_at;
    for (double T : cfg.times) record_at.push_back((std::int64_t)std::floor(cN * T));
    std::vector<double> sea_times;
    for (auto tau : record_at) sea_times.push_back((double)tau / cN);
    double T_max = sea_times.back();

    std::int64_t w = cfg.window_halfwidth;
    // matrix-side empirical law of the F_d window around r_N
    std::map<std::string, std::int64_t> mat_counts;
    for (std::int64_t s = 0; s < cfg.samples; ++s) {
        RngHandle rng(cfg.seed, (std::uint64_t)s);
        Signature init;
        for (std::int64_t i = 0; i < ens.N; ++i) init.parts.emplace_back(0);
        std::vector<std::int64_t> sorted_rec = record_at;
        std::sort(sorted_rec.begin(), sorted_rec.end());
        auto snaps = run_chain(init, ens, sorted_rec.back(), sorted_rec, rng);
        // snapshots come back in sorted step order; match them to cfg.times
        std::string label;
        for (std::size_t ti = 0; ti < record_at.size(); ++ti) {
            std::size_t pos = (std::size_t)(std::find(sorted_rec.begin(), sorted_rec.end(),
                                                      record_at[ti]) -
                                            sorted_rec.begin());
            const Signature& sig = snaps[pos];
            std::vector<std::int64_t> win;
            for (std::int64_t i = -w; i <= w; ++i) {
                std::int64_t j = cfg.r_N + i;
                if (j < 1)
                    win.push_back(ens.d);
                else if (j > ens.N)
                    win.push_back(-1);
                else
                    win.push_back(std::min(sig.parts[(std::size_t)(j - 1)].value(), ens.d));
            }
            if (ti) label += "|";
            label += join_values(win);
        }
        mat_counts[label] += 1;
    }

    // sea reference: depth-approximated flat start, coupled depth gap reported
    WindowSignature flat;
    flat.left_fill = ExtInt(0);
    flat.right_fill = ExtInt(0);
    auto sea_pmf = [&](std::int64_t depth) {
        std::map<std::string, double> pmf;
        for (std::int64_t s = 0; s < cfg.samples; ++s) {
            ClockStreams clocks(cfg.seed, 0x5eaULL * 0x100000000ULL + (std::uint64_t)s, td);
            auto run = approx_2inf(flat, ens.d, depth, td, T_max, clocks);
            std::string label;
            for (std::size_t ti = 0; ti < sea_times.size(); ++ti) {
                TruncState st = state_at(
                    TruncState::from_json(run.traj.initial_json), run.traj.events, sea_times[ti]);
                if (ti) label += "|";
                label += join_values(st.window(-w, w));
            }
            pmf[label] += 1.0 / (double)cfg.samples;
        }
        return pmf;
    };
    auto ref = sea_pmf(cfg.depth);
    auto ref_shallow = sea_pmf(cfg.depth - 1);

    auto base = compare_pmf(ref, mat_counts, cfg.samples);
    base.warnings.insert(base.warnings.begin(), rep.warnings.begin(), rep.warnings.end());
    base.depth_gap_tv = tv_distance(ref, ref_shallow);
    base.config_json = cfg.to_json();
    base.config_hash = cfg.content_hash();
    base.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return base;
}

std::string EdgeConfig::to_json() const {
    nlohmann::json j;
    j["step_ensemble"] = nlohmann::json::parse(step_ensemble.to_json());
    j["initial_sn"] = initial_sn;
    j["times"] = times;
    j["samples"] = samples;
    j["seed"] = seed;
    return j.dump();
}

EdgeConfig EdgeConfig::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    EdgeConfig cfg;
    cfg.step_ensemble = EnsembleSpec::from_json(j.at("step_ensemble").dump());
    cfg.initial_sn = j.at("initial_sn").get<std::vector<std::int64_t>>();
    cfg.times = j.at("times").get<std::vector<double>>();
    cfg.samples = j.at("samples").get<std::int64_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

ComparisonReport run_edge_convergence(const EdgeConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    const auto& ens = cfg.step_ensemble;
    ens.validate();
    std::int64_t N = (std::int64_t)cfg.initial_sn.size();
    if (N != ens.N) throw std::invalid_argument("run_edge_convergence: initial_sn length != N");
    std::int64_t d = ens.d;
    Rational t(1, ens.p);
    double td = 1.0 / (double)ens.p;

    auto corank = ensemble_corank_pmf(ens);
    {
        auto it = corank.find(0);
        if (it != corank.end() && it->second == 1)
            throw std::domain_error("run_edge_convergence: degenerate ensemble (corank 0 a.s.)");
    }
    double cN = c_N_exact(corank, N, t).convert_to<double>();
    std::vector<double> sea_times;
    for (double T : cfg.times)
        sea_times.push_back((double)(std::int64_t)std::floor(cN * T) / cN);

    // initial window: singular numbers of B at sea indices 1-N .. 0
    WindowSignature nu0;
    nu0.offset = -N;
    nu0.left_fill = ExtInt(d);
    nu0.right_fill = ExtInt::neg_inf();
    for (auto v : cfg.initial_sn) {
        if (v < 0) throw std::invalid_argument("run_edge_convergence: negative singular number");
        nu0.window.emplace_back(std::min(v, d));
    }
    nu0.canonicalize();
    // everything-frozen state: value d up to index 0, nothing above
    WindowSignature top;
    top.offset = 0;
    top.left_fill = ExtInt(d);
    top.right_fill = ExtInt::neg_inf();

    GeneratorMatrix G = build_Q(nu0, top, d, t);
    std::int64_t from = G.find_state(nu0);

    auto label_of_ws = [&](const WindowSignature& s) {
        std::vector<std::int64_t> vals;
        for (std::int64_t i = -N + 1; i <= 0; ++i) vals.push_back(s.value(i).value());
        return join_values(vals);
    };

    // exact multi-time reference over every state tuple with visible mass
    std::map<std::string, double> ref;
    std::size_t S = G.states.size();
    std::vector<std::size_t> tuple(sea_times.size(), 0);
    for (;;) {
        std::vector<std::int64_t> ids(tuple.begin(), tuple.end());
        double pr = multi_time_prob(G, from, sea_times, ids, 1e-12);
        if (pr > 1e-12) {
            std::string label;
            for (std::size_t ti = 0; ti < tuple.size(); ++ti) {
                if (ti) label += "|";
                label += label_of_ws(G.states[tuple[ti]]);
            }
            ref[label] += pr;
        }
        std::size_t pos = 0;
        while (pos < tuple.size() && ++tuple[pos] == S) {
            tuple[pos] = 0;
            ++pos;
        }
        if (pos == tuple.size()) break;
    }

    std::map<std::string, std::int64_t> counts;
    double T_max = sea_times.back();
    for (std::int64_t s = 0; s < cfg.samples; ++s) {
        RngHandle rng(cfg.seed, (std::uint64_t)s);
        auto run = simulate_edge(cfg.initial_sn, d, td, T_max, rng);
        TruncState init = TruncState::from_json(run.traj.initial_json);
        std::string label;
        for (std::size_t ti = 0; ti < sea_times.size(); ++ti) {
            TruncState st = state_at(init, run.traj.events, sea_times[ti]);
            if (ti) label += "|";
            label += join_values(st.window(-N + 1, 0));
        }
        counts[label] += 1;
    }

    auto rep = compare_pmf(ref, counts, cfg.samples);
    rep.config_json = cfg.to_json();
    rep.config_hash = fnv1a_hex(cfg.to_json());
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace psea
