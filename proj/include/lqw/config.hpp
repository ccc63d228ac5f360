#pragma once

#include <map>
#include <string>
#include <vector>

#include "lqw/curve.hpp"

namespace lqw::config {

/// Parsed run configuration.  The text format is an INI-style file with
/// sections [curve], [physics], [numerics], [pipelines], [output];
/// see docs/config.md for the full key list.
struct RunConfig {
    // [curve]
    curve::BendingProfile profile;

    // [physics]
    double alpha = 1.0;

    // [numerics]
    double truncation = 30.0;  // grid half-window L
    int grid_n = 480;          // Nystrom nodes (rounded to panels)
    int order = 8;             // Gauss nodes per panel
    double kappa_tol = 1e-10;  // eigenvalue bisection width
    std::vector<double> eps_ladder = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    double lambda_min = -0.20, lambda_max = -0.05;
    int lambda_cells = 60;
    std::vector<double> betas = {0.10, 0.15, 0.20};
    // quasi-mode window and momenta
    double qm_s0 = 2.0, qm_l1 = 8.0, qm_l2 = 4.0;
    std::vector<double> qm_ks = {0.1, 0.3, 0.6};
    // scattering diagnostics
    double wave_kappa = 4.0;
    double decay_eps1 = 0.1, decay_a = 0.4;
    std::vector<double> decay_times = {1, 2, 5, 10, 20, 50, 100};

    // [pipelines]  subset of {curve-check, spectrum, asymptotics,
    // lap-scan, quasimode, scatter-checks}, kept in canonical order
    std::vector<std::string> pipelines;

    // [output]
    std::string out_dir = "out";

    bool has_pipeline(const std::string& name) const;

    /// Throws std::invalid_argument with a "section.key: message"
    /// diagnostic on any violated invariant.
    void validate() const;
};

/// Canonical pipeline execution order.
const std::vector<std::string>& pipeline_order();

/// Parse the INI text.  Unknown sections/keys and malformed values
/// throw std::invalid_argument with the offending line.
RunConfig parse_config_text(const std::string& text);

/// Read and parse a config file; throws std::runtime_error when the
/// file cannot be read.
RunConfig parse_config_file(const std::string& path);

}  // namespace lqw::config
