#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "psea/ensembles.hpp"
#include "psea/sea_sim.hpp"

namespace psea {

struct ExperimentConfig {
    std::string experiment;
    EnsembleSpec ensemble;
    std::int64_t r_N = 1;
    std::vector<double> times{1.0};
    std::int64_t samples = 1000;
    std::int64_t depth = 10;
    std::int64_t window_halfwidth = 5;
    std::uint64_t seed = 1;

    void validate() const;
    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    std::string content_hash() const;
};

// Statistical comparison of an empirical histogram against a reference pmf.
// Cells with reference expected count < 10 are pooled for the chi-square
// statistic; z-scores are per unpooled cell.
struct ComparisonReport {
    std::map<std::string, double> reference;
    std::map<std::string, double> empirical;
    std::map<std::string, double> z_scores;
    double tv = 0.0;
    double chi2 = 0.0;
    std::int64_t chi2_dof = 0;
    double chi2_critical = 0.0;  // significance 1e-3
    bool chi2_pass = true;
    double max_abs_z = 0.0;
    std::int64_t samples = 0;
    double depth_gap_tv = -1.0;  // reference-side bias proxy; -1 when exact
    double wall_seconds = 0.0;
    std::string config_json;
    std::string config_hash;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

ComparisonReport compare_pmf(const std::map<std::string, double>& reference,
                             const std::map<std::string, std::int64_t>& counts,
                             std::int64_t n_samples);

// Matrix-product chain around observation point r_N vs the sea reference
// (depth-approximated for flat starts).
ComparisonReport run_bulk_convergence(const ExperimentConfig& cfg);

// Same pipeline at the edge (r_N = N, pinned start with fixed initial
// singular numbers); reference probabilities are exact via the generator.
struct EdgeConfig {
    EnsembleSpec step_ensemble;               // law of each factor
    std::vector<std::int64_t> initial_sn;     // singular numbers of B, length N
    std::vector<double> times{1.0};
    std::int64_t samples = 1000;
    std::uint64_t seed = 1;
    std::string to_json() const;
    static EdgeConfig from_json(const std::string& text);
};
ComparisonReport run_edge_convergence(const EdgeConfig& cfg);

} // namespace psea
