#ifndef MVFLOW_CONFIG_HPP
#define MVFLOW_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "mvflow/mesh.hpp"
#include "mvflow/relative_energy.hpp"
#include "mvflow/solver.hpp"
#include "mvflow/toml.hpp"

namespace mvflow {

// Parsed and validated run configuration. Unknown keys are hard errors and
// all violations are reported together rather than one at a time.
struct RunConfig {
    // grid
    int dim = 1;
    int cells = 256;
    double extent = 1.0;
    std::string bc = "noslip";
    // pressure
    double a = 1.0;
    double gamma = 2.0;
    // model
    double mu = 0.1;
    double eta = 0.0;
    double K = 0.0;
    double delta = 0.0;
    double Gamma = 2.0;
    // time
    double T = 0.5;
    double safety = 0.4;
    int snapshot_count = 17;                      // uniform, when no explicit list
    std::vector<double> snapshot_times;           // wins over snapshot_count
    // initial data
    std::string profile = "smooth-bump";  // rest | smooth-bump | acoustic | compress | manufactured
    double rho0 = 1.0;
    double drho = 0.2;
    double u0 = 0.1;
    // forcing
    std::string forcing = "none";  // none | manufactured | limit
    // output
    std::string out_dir;

    Grid make_grid() const;
    ModelParams make_params() const;
    RunSpec make_run_spec() const;
    InitialDataSpec make_initial() const;
    toml::Table to_toml() const;
};

RunConfig parse_run_config(const toml::Table& root);
RunConfig parse_run_config_file(const std::string& path);

struct WsuFileConfig {
    WsuConfig wsu;
    std::string out_dir;
};
WsuFileConfig parse_wsu_config_file(const std::string& path, bool perturbed);

std::string format_g17(double v);

} // namespace mvflow

#endif
