#ifndef MVFLOW_ORCHESTRATE_HPP
#define MVFLOW_ORCHESTRATE_HPP

#include <functional>
#include <string>
#include <vector>

#include "mvflow/config.hpp"
#include "mvflow/manifest.hpp"
#include "mvflow/parallel.hpp"
#include "mvflow/relative_energy.hpp"
#include "mvflow/solver.hpp"
#include "mvflow/young_measure.hpp"

namespace mvflow {

// Executes the run and persists config.toml, snapshots.csv (t,x,rho,u),
// faces.csv, series.csv and manifest.json under dir. Returns the manifest;
// a failed run still writes its partial trajectory with the failure marker.
RunManifest run_to_dir(const RunConfig& cfg, const std::string& dir);

Trajectory load_run_dir(const std::string& dir, RunConfig* cfg_out = nullptr);

struct FamilyManifest {
    std::string param;                  // K | delta | cells
    std::vector<double> values;
    std::vector<std::string> member_dirs;  // relative to the family dir
    std::vector<bool> member_failed;
    RunConfig base;
    int lattice = 0;

    void write(const std::string& dir) const;
    static FamilyManifest read(const std::string& dir);
};

// Runs one member per ladder value (concurrently) and writes the family
// manifest consumable by the measure and stability tools.
FamilyManifest cmd_sweep(const RunConfig& base, const std::string& param,
                         const std::vector<double>& values, const std::string& dir);

// family.json present -> family diagnostics (per-member audits + rates.csv),
// else single-run diagnostics (budget.csv, apriori.csv, weak_residuals.csv).
void cmd_diagnose(const std::string& dir);

struct FamilyData {
    SolutionFamily family;
    RunConfig base;
};
FamilyData load_family(const std::string& dir, int lattice_override = 0);

void cmd_ym_build(const std::string& family_dir, int lattice, int sub_samples);
// returns true when all four checks pass
bool cmd_ym_validate(const std::string& family_dir, int lattice, int sub_samples,
                     const DD1Tolerances& tol, bool adversarial_expected = false);

// wsu matched|perturbed: writes relener.csv and lambda.json into out_dir;
// returns the report for assertion by callers
RelativeEnergyReport cmd_wsu(const WsuConfig& cfg, const std::string& out_dir);

// merges whatever diagnostics/ym/wsu outputs exist under dir into
// dir/report (data files only); missing stages are listed, not fatal
std::vector<std::string> cmd_report(const std::string& dir);

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows);

} // namespace mvflow

#endif
