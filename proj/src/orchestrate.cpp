#include "mvflow/orchestrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mvflow/diagnostics.hpp"
#include "mvflow/errors.hpp"
#include "mvflow/parallel.hpp"

namespace fs = std::filesystem;

namespace mvflow {

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::string out = header + "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += format_g17(row[c]);
        }
        out += "\n";
    }
    write_file_atomic(path, out);
}

namespace {

std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;  // header
            continue;
        }
        if (line.empty()) continue;
        std::vector<double> row;
        size_t pos = 0;
        while (pos <= line.size()) {
            size_t comma = line.find(',', pos);
            std::string tok = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
            row.push_back(std::strtod(tok.c_str(), nullptr));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string checksum_of(const fs::path& dir, const std::string& name) {
    return checksum_file((dir / name).string());
}

} // namespace

RunManifest run_to_dir(const RunConfig& cfg, const std::string& dir) {
    auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(dir);
    fs::path root(dir);

    std::string config_text = toml::serialize(cfg.to_toml());
    write_file_atomic((root / "config.toml").string(), config_text);

    RunManifest manifest;
    manifest.config_hash = fnv1a_hex(config_text);

    RunSpec spec = cfg.make_run_spec();
    Trajectory traj = run(spec);
    manifest.failed = traj.failed;
    manifest.failure = traj.failure;

    const Grid& g = spec.grid;
    {
        std::string out = "t,x,rho,u\n";
        for (const auto& s : traj.snaps) {
            auto uc = cell_velocity(s.u, g);
            for (int i = 0; i < g.n[0]; ++i)
                out += format_g17(s.t) + "," + format_g17(g.cell_x(i)) + "," +
                       format_g17(s.rho[i]) + "," + format_g17(uc[i]) + "\n";
        }
        write_file_atomic((root / "snapshots.csv").string(), out);
    }
    {
        std::string out = "t,x,u\n";
        for (const auto& s : traj.snaps)
            for (int j = 0; j < g.face_count(0); ++j)
                out += format_g17(s.t) + "," + format_g17(g.face_x(j)) + "," +
                       format_g17(s.u.x()[j]) + "\n";
        write_file_atomic((root / "faces.csv").string(), out);
    }
    {
        std::vector<std::vector<double>> rows;
        for (const auto& s : traj.snaps)
            rows.push_back({s.t, s.dissipation_integral, s.brenner_integral, s.work_integral,
                            s.mass});
        write_csv((root / "series.csv").string(),
                  "t,dissipation_integral,brenner_integral,work_integral,mass", rows);
    }
    for (const char* name : {"config.toml", "snapshots.csv", "faces.csv", "series.csv"})
        manifest.files[name] = checksum_of(root, name);
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.write(dir);
    return manifest;
}

Trajectory load_run_dir(const std::string& dir, RunConfig* cfg_out) {
    fs::path root(dir);
    RunConfig cfg = parse_run_config_file((root / "config.toml").string());
    if (cfg_out) *cfg_out = cfg;
    Grid g = cfg.make_grid();
    Trajectory traj;
    traj.grid = g;
    traj.params = cfg.make_params();

    auto series = read_csv((root / "series.csv").string());
    auto faces = read_csv((root / "faces.csv").string());
    auto cells = read_csv((root / "snapshots.csv").string());
    size_t snaps = series.size();
    size_t nf = static_cast<size_t>(g.face_count(0));
    size_t nc = static_cast<size_t>(g.n[0]);
    if (faces.size() != snaps * nf || cells.size() != snaps * nc)
        throw RuntimeFailure("run dir " + dir + " has inconsistent snapshot files");
    for (size_t k = 0; k < snaps; ++k) {
        Snapshot s;
        s.t = series[k][0];
        s.dissipation_integral = series[k][1];
        s.brenner_integral = series[k][2];
        s.work_integral = series[k][3];
        s.mass = series[k][4];
        s.rho = CellField(g);
        s.u = FaceField(g);
        for (size_t i = 0; i < nc; ++i) s.rho[i] = cells[k * nc + i][2];
        for (size_t j = 0; j < nf; ++j) s.u.x()[j] = faces[k * nf + j][2];
        traj.snaps.push_back(std::move(s));
    }
    auto man_path = root / "manifest.json";
    if (fs::exists(man_path)) {
        auto man = RunManifest::from_json_file(man_path.string());
        traj.failed = man.failed;
        traj.failure = man.failure;
    }
    return traj;
}

void FamilyManifest::write(const std::string& dir) const {
    nlohmann::ordered_json j;
    j["param"] = param;
    j["values"] = values;
    j["members"] = member_dirs;
    j["member_failed"] = member_failed;
    j["lattice"] = lattice;
    j["base_config"] = toml::serialize(base.to_toml());
    write_file_atomic(dir + "/family.json", j.dump(2) + "\n");
}

FamilyManifest FamilyManifest::read(const std::string& dir) {
    std::ifstream in(dir + "/family.json");
    if (!in) throw ConfigError("no family.json under " + dir);
    nlohmann::json j = nlohmann::json::parse(in);
    FamilyManifest m;
    m.param = j.at("param").get<std::string>();
    m.values = j.at("values").get<std::vector<double>>();
    m.member_dirs = j.at("members").get<std::vector<std::string>>();
    m.member_failed = j.at("member_failed").get<std::vector<bool>>();
    m.lattice = j.value("lattice", 0);
    m.base = parse_run_config(toml::parse(j.at("base_config").get<std::string>()));
    return m;
}

FamilyManifest cmd_sweep(const RunConfig& base, const std::string& param,
                         const std::vector<double>& values, const std::string& dir) {
    if (param != "K" && param != "delta" && param != "cells")
        throw ConfigError("sweep parameter must be K, delta, or cells");
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    for (size_t i = 1; i < values.size(); ++i) {
        bool ok = param == "cells" ? values[i] > values[i - 1] : values[i] < values[i - 1];
        if (!ok)
            throw ConfigError(param == "cells"
                                  ? "cells ladder must ascend (coarse to fine)"
                                  : "parameter ladder must descend (coarse to fine)");
    }
    fs::create_directories(dir);

    FamilyManifest fam;
    fam.param = param;
    fam.values = values;
    fam.base = base;
    fam.member_failed.assign(values.size(), false);
    int min_cells = base.cells;
    for (size_t i = 0; i < values.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "member_%03zu", i);
        fam.member_dirs.push_back(buf);
        if (param == "cells") min_cells = std::min(min_cells, static_cast<int>(values[i]));
    }
    fam.lattice = min_cells;

    parallel_for(values.size(), [&](size_t i) {
        RunConfig cfg = base;
        if (param == "K")
            cfg.K = values[i];
        else if (param == "delta")
            cfg.delta = values[i];
        else
            cfg.cells = static_cast<int>(values[i]);
        auto manifest = run_to_dir(cfg, dir + "/" + fam.member_dirs[i]);
        if (manifest.failed) fam.member_failed[i] = true;
    });
    fam.write(dir);
    return fam;
}

FamilyData load_family(const std::string& dir, int lattice_override) {
    FamilyManifest man = FamilyManifest::read(dir);
    std::vector<Trajectory> members;
    std::vector<double> params;
    for (size_t i = 0; i < man.member_dirs.size(); ++i) {
        if (man.member_failed[i]) {
            // downstream tools skip failed members with a warning
            continue;
        }
        members.push_back(load_run_dir(dir + "/" + man.member_dirs[i]));
        if (man.param == "cells")
            params.push_back(man.base.extent / man.values[i]);  // h, descending
        else
            params.push_back(man.values[i]);
    }
    FamilyData out{make_family(man.param == "cells" ? "h" : man.param, params,
                               std::move(members), man.base.make_initial(),
                               lattice_override > 0 ? lattice_override : man.lattice),
                   man.base};
    return out;
}

namespace {

void diagnose_single(const std::string& dir) {
    RunConfig cfg;
    Trajectory traj = load_run_dir(dir, &cfg);
    fs::path diag = fs::path(dir) / "diag";
    fs::create_directories(diag);

    auto budget = energy_budget(traj, traj.params.law);
    {
        std::vector<std::vector<double>> rows;
        for (size_t k = 0; k < budget.t.size(); ++k)
            rows.push_back({budget.t[k], budget.residual[k]});
        write_csv((diag / "budget.csv").string(), "t,residual", rows);
    }
    {
        auto rep = apriori_bounds(traj, traj.params);
        auto names = AprioriReport::entry_names();
        auto vals = rep.entries();
        std::string out = "name,value\n";
        for (size_t e = 0; e < names.size(); ++e)
            out += names[e] + "," + format_g17(vals[e]) + "\n";
        write_file_atomic((diag / "apriori.csv").string(), out);
    }
    {
        double T = traj.snaps.back().t;
        auto fam = TestFunctionFamily::make(TestFunctionFamily::Kind::TensorTrig, 3, traj.grid,
                                            std::max(T, 1e-6));
        std::string out = "member,residual,time_quadrature_error\n";
        for (const auto& psi : fam.scalars)
            out += psi.id + "," + format_g17(weak_residual_continuity(traj, psi)) + "," +
                   format_g17(weak_residual_time_quadrature_error(traj, psi, false)) + "\n";
        for (const auto& phi : fam.vectors)
            out += phi.id + "," + format_g17(weak_residual_momentum(traj, phi)) + "," +
                   format_g17(weak_residual_time_quadrature_error(traj, phi, true)) + "\n";
        write_file_atomic((diag / "weak_residuals.csv").string(), out);
    }
}

} // namespace

void cmd_diagnose(const std::string& dir) {
    if (!fs::exists(fs::path(dir) / "family.json")) {
        diagnose_single(dir);
        return;
    }
    FamilyManifest man = FamilyManifest::read(dir);
    std::vector<std::string> live_dirs;
    for (size_t i = 0; i < man.member_dirs.size(); ++i) {
        if (man.member_failed[i]) continue;
        live_dirs.push_back(dir + "/" + man.member_dirs[i]);
    }
    parallel_for(live_dirs.size(), [&](size_t i) { diagnose_single(live_dirs[i]); });

    fs::path diag = fs::path(dir) / "diag";
    fs::create_directories(diag);

    // family-level a-priori table
    std::vector<AprioriReport> reports;
    std::vector<double> params;
    std::vector<Trajectory> trajs;
    for (const auto& mdir : live_dirs) {
        Trajectory traj = load_run_dir(mdir);
        reports.push_back(apriori_bounds(traj, traj.params));
        trajs.push_back(std::move(traj));
    }
    for (size_t i = 0; i < man.values.size(); ++i)
        if (!man.member_failed[i]) params.push_back(man.values[i]);
    {
        std::string out = "param";
        for (const auto& n : AprioriReport::entry_names()) out += "," + n;
        out += "\n";
        for (size_t i = 0; i < reports.size(); ++i) {
            out += format_g17(params[i]);
            for (double v : reports[i].entries()) out += "," + format_g17(v);
            out += "\n";
        }
        auto uni = apriori_uniformity(reports, 2.0);
        out += "max_over_median";
        for (double r : uni.max_over_median) out += "," + format_g17(r);
        out += "\n";
        write_file_atomic((diag / "apriori_family.csv").string(), out);
    }

    if (man.param == "K") {
        double T = trajs.front().snaps.back().t;
        auto fam = TestFunctionFamily::make(TestFunctionFamily::Kind::TensorTrig, 3,
                                            trajs.front().grid, std::max(T, 1e-6));
        std::vector<TestFunction> psis(fam.scalars.begin(), fam.scalars.end());
        std::vector<TestFunction> phis(fam.vectors.begin(), fam.vectors.end());
        auto rates = vanishing_k_terms(trajs, params, psis, phis);
        std::string out = "K,term,member,value,slope\n";
        for (const auto& r : rates)
            for (size_t m = 0; m < r.k_values.size(); ++m)
                out += format_g17(r.k_values[m]) + "," + r.term + "," + r.member_id + "," +
                       format_g17(r.values[m]) + "," + format_g17(r.slope) + "\n";
        write_file_atomic((diag / "rates.csv").string(), out);
    }
}

namespace {

template <class T>
void put_le(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

DefectReport defects_for(const FamilyData& fd, const EmpiricalYoungMeasure& eym) {
    const auto& g = fd.family.members.front().grid;
    double T = eym.snap_times.back();
    auto tests = TestFunctionFamily::make(TestFunctionFamily::Kind::TensorTrig, 2, g,
                                          std::max(T, 1e-6));
    return estimate_defects(fd.family, eym, fd.base.make_params().law, tests);
}

} // namespace

void cmd_ym_build(const std::string& family_dir, int lattice, int sub_samples) {
    FamilyData fd = load_family(family_dir, lattice);
    auto eym = build_empirical_measure(fd.family, sub_samples);
    fs::path ym = fs::path(family_dir) / "ym";
    fs::create_directories(ym);

    std::string bytes;
    for (size_t b = 0; b < eym.bins.size(); ++b) {
        put_le<uint32_t>(bytes, static_cast<uint32_t>(b));
        put_le<uint16_t>(bytes, static_cast<uint16_t>(eym.bins[b].s.size()));
        for (size_t a = 0; a < eym.bins[b].s.size(); ++a) {
            put_le<double>(bytes, eym.bins[b].s[a]);
            put_le<double>(bytes, eym.bins[b].v[a]);
            put_le<double>(bytes, eym.bins[b].w[a]);
        }
    }
    write_file_atomic((ym / "atoms.bin").string(), bytes);

    auto rep = defects_for(fd, eym);
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < rep.tau.size(); ++k)
        rows.push_back({rep.tau[k], rep.E_inf[k], rep.sigma_inf_series[k], rep.D[k],
                        rep.chi[k], rep.xi[k]});
    write_csv((ym / "defects.csv").string(), "tau,E_inf,sigma_inf,D,chi,xi", rows);
}

bool cmd_ym_validate(const std::string& family_dir, int lattice, int sub_samples,
                     const DD1Tolerances& tol, bool adversarial_expected) {
    FamilyData fd = load_family(family_dir, lattice);
    auto eym = build_empirical_measure(fd.family, sub_samples);
    auto rep = defects_for(fd, eym);
    const auto& g = fd.family.members.front().grid;
    double T = eym.snap_times.back();
    auto tests = TestFunctionFamily::make(TestFunctionFamily::Kind::TensorTrig, 2, g,
                                          std::max(T, 1e-6));
    auto val = validate_dmv(fd.family, eym, rep, fd.base.make_params().law, tests, tol);

    nlohmann::ordered_json j;
    auto dump = [&](const DD1ValidationReport::Check& c) {
        nlohmann::ordered_json cj;
        cj["pass"] = c.pass;
        cj["worst_margin"] = c.worst_margin;
        cj["detail"] = c.detail;
        return cj;
    };
    j["continuity"] = dump(val.continuity);
    j["momentum"] = dump(val.momentum);
    j["energy_inequality"] = dump(val.energy_inequality);
    j["kopo"] = dump(val.kopo);
    j["chi_max"] = val.chi_max;
    j["xi_max"] = val.xi_max;
    j["all_pass"] = val.all_pass();
    j["adversarial_expected"] = adversarial_expected;
    fs::path ym = fs::path(family_dir) / "ym";
    fs::create_directories(ym);
    write_file_atomic((ym / "dd1.json").string(), j.dump(2) + "\n");

    for (const auto* c : {&val.continuity, &val.momentum, &val.energy_inequality, &val.kopo})
        std::printf("[%s] %s (worst margin %.3e)%s%s\n", c->pass ? "PASS" : "FAIL",
                    c->name.c_str(), c->worst_margin, c->detail.empty() ? "" : " :: ",
                    c->detail.c_str());
    return val.all_pass();
}

RelativeEnergyReport cmd_wsu(const WsuConfig& cfg, const std::string& out_dir) {
    auto rep = stability_experiment(cfg);
    fs::create_directories(out_dir);
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < rep.tau.size(); ++k)
        rows.push_back({rep.tau[k], rep.E_mv[k], rep.D[k],
                        rep.bound.empty() ? 0.0 : rep.bound[k]});
    write_csv(out_dir + "/relener.csv", "tau,E_mv,D,bound", rows);

    nlohmann::ordered_json j;
    j["mode"] = rep.matched_mode ? "matched" : "perturbed";
    j["lambda"] = rep.lambda;
    j["E_mv0"] = rep.E_mv0;
    j["monotone"] = rep.monotone;
    j["coarse_over_fine"] = rep.coarse_over_fine;
    j["note"] = rep.note;
    nlohmann::ordered_json ladder = nlohmann::ordered_json::array();
    for (const auto& pt : rep.ladder) {
        nlohmann::ordered_json pj;
        pj["param"] = pt.param;
        pj["cells"] = pt.cells;
        pj["E_atomic_T"] = pt.E_atomic_T;
        pj["defect_T"] = pt.defect_T;
        pj["value"] = pt.value;
        pj["grad_distance"] = pt.grad_distance;
        ladder.push_back(pj);
    }
    j["ladder"] = ladder;
    nlohmann::ordered_json norms;
    norms["sup_r"] = rep.sup_r;
    norms["sup_r_inv"] = rep.sup_r_inv;
    norms["sup_U"] = rep.sup_U;
    norms["sup_grad_U"] = rep.sup_grad_U;
    norms["chi_max"] = rep.chi_max;
    norms["xi_max"] = rep.xi_max;
    j["reference_norms"] = norms;
    write_file_atomic(out_dir + "/lambda.json", j.dump(2) + "\n");
    return rep;
}

std::vector<std::string> cmd_report(const std::string& dir) {
    fs::path root(dir);
    fs::path rep = root / "report";
    fs::create_directories(rep);
    struct Stage {
        const char* rel;
        const char* out;
    };
    std::vector<Stage> stages = {
        {"diag/budget.csv", "budget.csv"},
        {"diag/apriori.csv", "apriori.csv"},
        {"diag/apriori_family.csv", "apriori_family.csv"},
        {"diag/weak_residuals.csv", "weak_residuals.csv"},
        {"diag/rates.csv", "rates.csv"},
        {"ym/defects.csv", "defects.csv"},
        {"relener.csv", "relener.csv"},
        {"lambda.json", "lambda.json"},
    };
    std::vector<std::string> missing;
    std::string summary = "# consolidated report\n\n";
    for (const auto& st : stages) {
        fs::path src = root / st.rel;
        if (fs::exists(src)) {
            std::ifstream in(src, std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            write_file_atomic((rep / st.out).string(), ss.str());
            summary += std::string("- present: ") + st.rel + "\n";
        } else {
            missing.push_back(st.rel);
            summary += std::string("- missing: ") + st.rel + "\n";
        }
    }
    write_file_atomic((rep / "summary.md").string(), summary);
    return missing;
}

} // namespace mvflow
