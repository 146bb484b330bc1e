// mvflow: desk-scale barotropic flow laboratory.
//
// Subcommands: run, sweep, diagnose, ym build, ym validate, wsu matched,
// wsu perturbed, report. Exit codes: 0 success, 1 config/validation
// failure, 2 runtime failure, 3 assertion failure.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvflow/config.hpp"
#include "mvflow/errors.hpp"
#include "mvflow/orchestrate.hpp"

using namespace mvflow;

namespace {

std::string pick_out_dir(const std::string& flag, const std::string& cfg_dir,
                         const std::string& fallback) {
    if (!flag.empty()) return flag;
    if (!cfg_dir.empty()) return cfg_dir;
    return fallback;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mvflow: barotropic flow runs, measure construction, and stability audits"};
    app.require_subcommand(1);

    // run
    std::string run_config, run_out;
    auto* cmd_run = app.add_subcommand("run", "integrate one configuration");
    cmd_run->add_option("config", run_config, "run config (TOML)")->required();
    cmd_run->add_option("-o,--out", run_out, "output directory");

    // sweep
    std::string sweep_config, sweep_param, sweep_out;
    std::vector<double> sweep_values;
    auto* cmd_sw = app.add_subcommand("sweep", "run a parameter ladder");
    cmd_sw->add_option("config", sweep_config, "base run config (TOML)")->required();
    cmd_sw->add_option("--param", sweep_param, "K, delta, or cells")->required();
    cmd_sw->add_option("--values", sweep_values, "ladder values, coarse to fine")
        ->required()
        ->delimiter(',');
    cmd_sw->add_option("-o,--out", sweep_out, "family directory");

    // diagnose
    std::string diag_dir;
    auto* cmd_diag = app.add_subcommand("diagnose", "audit a run or family directory");
    cmd_diag->add_option("dir", diag_dir, "run or family directory")->required();

    // ym build | validate
    auto* cmd_ym = app.add_subcommand("ym", "empirical measure tools");
    cmd_ym->require_subcommand(1);
    std::string ymb_dir;
    int ymb_lattice = 0, ymb_sub = 16;
    auto* cmd_ymb = cmd_ym->add_subcommand("build", "build atoms.bin and defects.csv");
    cmd_ymb->add_option("family", ymb_dir, "family directory")->required();
    cmd_ymb->add_option("--lattice", ymb_lattice, "lattice cells (default: family manifest)");
    cmd_ymb->add_option("--sub", ymb_sub, "sub-samples per lattice cell");
    std::string ymv_dir;
    int ymv_lattice = 0, ymv_sub = 16;
    double ymv_rtol = 5e-3, ymv_etol = 5e-3, ymv_ktol = 1e-4, ymv_cap = 100.0;
    bool ymv_expect_fail = false;
    auto* cmd_ymv = cmd_ym->add_subcommand("validate", "run the four dissipative-solution checks");
    cmd_ymv->add_option("family", ymv_dir, "family directory")->required();
    cmd_ymv->add_option("--lattice", ymv_lattice, "lattice cells");
    cmd_ymv->add_option("--sub", ymv_sub, "sub-samples per lattice cell");
    cmd_ymv->add_option("--residual-tol", ymv_rtol, "additive residual tolerance");
    cmd_ymv->add_option("--energy-tol", ymv_etol, "energy inequality tolerance");
    cmd_ymv->add_option("--kopo-tol", ymv_ktol, "Poincare check tolerance");
    cmd_ymv->add_option("--chi-cap", ymv_cap, "largest admissible fitted chi/xi");
    cmd_ymv->add_flag("--expect-fail", ymv_expect_fail,
                      "negative control: exit 0 when checks fail");

    // wsu matched | perturbed
    auto* cmd_wsu_app = app.add_subcommand("wsu", "weak-strong stability experiments");
    cmd_wsu_app->require_subcommand(1);
    std::string wsum_config, wsum_out;
    auto* cmd_wsum = cmd_wsu_app->add_subcommand("matched", "matched initial data");
    cmd_wsum->add_option("config", wsum_config, "wsu config (TOML)")->required();
    cmd_wsum->add_option("-o,--out", wsum_out, "output directory");
    std::string wsup_config, wsup_out;
    auto* cmd_wsup = cmd_wsu_app->add_subcommand("perturbed", "perturbed initial data");
    cmd_wsup->add_option("config", wsup_config, "wsu config (TOML)")->required();
    cmd_wsup->add_option("-o,--out", wsup_out, "output directory");

    // report
    std::string report_dir;
    auto* cmd_rep = app.add_subcommand("report", "consolidate outputs into report/");
    cmd_rep->add_option("dir", report_dir, "pipeline directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            RunConfig cfg = parse_run_config_file(run_config);
            std::string dir = pick_out_dir(run_out, cfg.out_dir, "run_out");
            auto manifest = run_to_dir(cfg, dir);
            if (manifest.failed) {
                std::fprintf(stderr, "run failed: %s\n", manifest.failure.c_str());
                return 2;
            }
            std::printf("run complete: %s\n", dir.c_str());
        } else if (*cmd_sw) {
            RunConfig cfg = parse_run_config_file(sweep_config);
            std::string dir = pick_out_dir(sweep_out, cfg.out_dir, "sweep_out");
            auto fam = cmd_sweep(cfg, sweep_param, sweep_values, dir);
            size_t failed = 0;
            for (bool f : fam.member_failed) failed += f ? 1 : 0;
            if (failed)
                std::fprintf(stderr, "warning: %zu member(s) failed; family marks them\n",
                             failed);
            std::printf("sweep complete: %s (%zu members)\n", dir.c_str(),
                        fam.member_dirs.size());
        } else if (*cmd_diag) {
            cmd_diagnose(diag_dir);
            std::printf("diagnostics written under %s\n", diag_dir.c_str());
        } else if (*cmd_ymb) {
            cmd_ym_build(ymb_dir, ymb_lattice, ymb_sub);
            std::printf("measure written under %s/ym\n", ymb_dir.c_str());
        } else if (*cmd_ymv) {
            DD1Tolerances tol;
            tol.residual_tol = ymv_rtol;
            tol.energy_tol = ymv_etol;
            tol.kopo_tol = ymv_ktol;
            tol.chi_cap = ymv_cap;
            bool ok = cmd_ym_validate(ymv_dir, ymv_lattice, ymv_sub, tol);
            if (ymv_expect_fail) return ok ? 3 : 0;
            return ok ? 0 : 3;
        } else if (*cmd_wsum || *cmd_wsup) {
            bool perturbed = static_cast<bool>(*cmd_wsup);
            auto file_cfg = parse_wsu_config_file(perturbed ? wsup_config : wsum_config,
                                                  perturbed);
            std::string dir = pick_out_dir(perturbed ? wsup_out : wsum_out, file_cfg.out_dir,
                                           "wsu_out");
            auto rep = cmd_wsu(file_cfg.wsu, dir);
            std::printf("wsu %s: E_mv(0) = %s", rep.matched_mode ? "matched" : "perturbed",
                        format_g17(rep.E_mv0).c_str());
            if (!rep.matched_mode) std::printf(", lambda = %s", format_g17(rep.lambda).c_str());
            std::printf("\nladder coarse/fine = %s, monotone = %s\n",
                        format_g17(rep.coarse_over_fine).c_str(),
                        rep.monotone ? "yes" : "no");
            if (rep.matched_mode && !rep.monotone) {
                std::fprintf(stderr, "matched-data assertion failed: ladder is not monotone\n");
                return 3;
            }
        } else if (*cmd_rep) {
            auto missing = cmd_report(report_dir);
            for (const auto& m : missing)
                std::printf("missing stage: %s\n", m.c_str());
            std::printf("report written under %s/report\n", report_dir.c_str());
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const RuntimeFailure& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected failure: %s\n", e.what());
        return 2;
    }
    return 0;
}
