#include "mvflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "mvflow/errors.hpp"

namespace mvflow {

using std::numbers::pi;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string suggest_key(const std::string& key, const std::vector<std::string>& known) {
    std::string lk = key;
    std::transform(lk.begin(), lk.end(), lk.begin(), ::tolower);
    if (lk.find("visc") != std::string::npos) return "mu or eta";
    std::string best;
    int best_d = 1 << 20;
    for (const auto& k : known) {
        int d = edit_distance(lk, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    if (best_d <= std::max<int>(2, static_cast<int>(key.size()) / 2)) return best;
    return {};
}

struct Checker {
    std::vector<std::string> errors;

    void unknown_keys(const toml::Table& t, const std::string& section,
                      const std::vector<std::string>& known) {
        for (const auto& [k, v] : t) {
            (void)v;
            if (std::find(known.begin(), known.end(), k) != known.end()) continue;
            std::string msg = "unknown key '" + (section.empty() ? k : section + "." + k) + "'";
            std::string hint = suggest_key(k, known);
            if (!hint.empty()) msg += " (did you mean " + hint + "?)";
            errors.push_back(msg);
        }
    }
    void require(bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    }

    double num(const toml::Table& t, const std::string& name, double fallback) {
        auto it = t.find(name);
        if (it == t.end()) return fallback;
        if (it->second.kind != toml::Value::Kind::Number) {
            errors.push_back("'" + name + "' must be a number");
            return fallback;
        }
        return it->second.number;
    }
    std::string str(const toml::Table& t, const std::string& name, std::string fallback) {
        auto it = t.find(name);
        if (it == t.end()) return fallback;
        if (it->second.kind != toml::Value::Kind::String) {
            errors.push_back("'" + name + "' must be a string");
            return fallback;
        }
        return it->second.str;
    }
};

const toml::Table& section(const toml::Table& root, const std::string& name,
                           const toml::Table& empty) {
    auto it = root.find(name);
    if (it == root.end()) return empty;
    return it->second.table;
}

} // namespace

RunConfig parse_run_config(const toml::Table& root) {
    static const toml::Table empty;
    RunConfig cfg;
    Checker chk;

    chk.unknown_keys(root, "",
                     {"grid", "pressure", "model", "time", "initial", "forcing", "output"});

    const auto& grid = section(root, "grid", empty);
    chk.unknown_keys(grid, "grid", {"dim", "cells", "extent", "bc"});
    cfg.dim = static_cast<int>(chk.num(grid, "dim", 1));
    cfg.cells = static_cast<int>(chk.num(grid, "cells", 256));
    cfg.extent = chk.num(grid, "extent", 1.0);
    cfg.bc = chk.str(grid, "bc", "noslip");
    chk.require(cfg.dim == 1, "grid.dim: time integration supports dim = 1 in this build");
    chk.require(cfg.cells >= 2, "grid.cells must be >= 2");
    chk.require(cfg.extent > 0.0, "grid.extent must be > 0");
    chk.require(cfg.bc == "noslip" || cfg.bc == "periodic",
                "grid.bc must be \"noslip\" or \"periodic\"");

    const auto& pres = section(root, "pressure", empty);
    chk.unknown_keys(pres, "pressure", {"a", "gamma"});
    cfg.a = chk.num(pres, "a", 1.0);
    cfg.gamma = chk.num(pres, "gamma", 2.0);
    chk.require(cfg.a > 0.0, "pressure.a must be > 0");
    chk.require(cfg.gamma >= 1.0, "pressure.gamma must be >= 1");

    const auto& model = section(root, "model", empty);
    chk.unknown_keys(model, "model", {"mu", "eta", "K", "delta", "Gamma"});
    cfg.mu = chk.num(model, "mu", 0.1);
    cfg.eta = chk.num(model, "eta", 0.0);
    cfg.K = chk.num(model, "K", 0.0);
    cfg.delta = chk.num(model, "delta", 0.0);
    cfg.Gamma = chk.num(model, "Gamma", 2.0);
    chk.require(cfg.mu > 0.0, "model.mu: shear viscosity must be positive (mu > 0)");
    chk.require(cfg.eta >= 0.0, "model.eta must be >= 0");
    chk.require(cfg.K >= 0.0, "model.K must be >= 0");
    chk.require(cfg.delta >= 0.0, "model.delta must be >= 0");
    if (cfg.delta > 0.0)
        chk.require(cfg.Gamma > 1.0, "model.Gamma must be > 1 when delta > 0");

    const auto& time = section(root, "time", empty);
    chk.unknown_keys(time, "time", {"T", "safety", "snapshots"});
    cfg.T = chk.num(time, "T", 0.5);
    cfg.safety = chk.num(time, "safety", 0.4);
    chk.require(cfg.T >= 0.0, "time.T must be >= 0");
    chk.require(cfg.safety > 0.0 && cfg.safety <= 1.0, "time.safety must lie in (0, 1]");
    if (auto it = time.find("snapshots"); it != time.end()) {
        if (it->second.kind == toml::Value::Kind::Number) {
            cfg.snapshot_count = static_cast<int>(it->second.number);
            chk.require(cfg.snapshot_count >= 2, "time.snapshots count must be >= 2");
        } else if (it->second.kind == toml::Value::Kind::Array) {
            for (const auto& v : it->second.array) {
                if (v.kind != toml::Value::Kind::Number) {
                    chk.errors.push_back("time.snapshots entries must be numbers");
                    break;
                }
                cfg.snapshot_times.push_back(v.number);
            }
        } else {
            chk.errors.push_back("time.snapshots must be a count or a list of times");
        }
    }

    const auto& init = section(root, "initial", empty);
    chk.unknown_keys(init, "initial", {"profile", "rho0", "drho", "u0"});
    cfg.profile = chk.str(init, "profile", "smooth-bump");
    cfg.rho0 = chk.num(init, "rho0", 1.0);
    cfg.drho = chk.num(init, "drho", 0.2);
    cfg.u0 = chk.num(init, "u0", 0.1);
    std::set<std::string> profiles = {"rest", "smooth-bump", "acoustic", "compress",
                                      "manufactured"};
    chk.require(profiles.count(cfg.profile) == 1,
                "initial.profile must be one of rest, smooth-bump, acoustic, compress, "
                "manufactured");
    chk.require(cfg.rho0 > std::abs(cfg.drho),
                "initial: rho0 must exceed |drho| so the density starts positive");

    const auto& forcing = section(root, "forcing", empty);
    chk.unknown_keys(forcing, "forcing", {"kind"});
    cfg.forcing = chk.str(forcing, "kind", "none");
    chk.require(cfg.forcing == "none" || cfg.forcing == "manufactured" ||
                    cfg.forcing == "limit",
                "forcing.kind must be none, manufactured, or limit");

    const auto& output = section(root, "output", empty);
    chk.unknown_keys(output, "output", {"dir"});
    cfg.out_dir = chk.str(output, "dir", "");

    if (!chk.errors.empty()) {
        std::ostringstream os;
        os << "config validation failed (" << chk.errors.size() << " problem"
           << (chk.errors.size() > 1 ? "s" : "") << "):";
        for (const auto& e : chk.errors) os << "\n  - " << e;
        throw ConfigError(os.str());
    }
    return cfg;
}

RunConfig parse_run_config_file(const std::string& path) {
    return parse_run_config(toml::parse_file(path));
}

Grid RunConfig::make_grid() const {
    return Grid::make_1d(cells, extent, bc == "noslip" ? Bc::NoSlip : Bc::Periodic);
}

ModelParams RunConfig::make_params() const {
    ModelParams p;
    p.mu = mu;
    p.eta = eta;
    p.K = K;
    p.delta = delta;
    p.Gamma = Gamma;
    p.law = PressureLaw::power_law(a, gamma);
    return p;
}

InitialDataSpec RunConfig::make_initial() const {
    InitialDataSpec out;
    out.label = profile;
    double L = extent, r0 = rho0, dr = drho, ua = u0;
    if (profile == "rest") {
        out.rho0 = [r0](double) { return r0; };
        out.u0 = [](double) { return 0.0; };
    } else if (profile == "smooth-bump") {
        out.rho0 = [r0, dr, L](double x) { return r0 + dr * std::cos(pi * x / L); };
        out.u0 = [ua, L](double x) {
            double s = std::sin(pi * x / L);
            return ua * s * s;
        };
    } else if (profile == "acoustic") {
        out.rho0 = [r0, dr, L](double x) { return r0 + dr * std::cos(2.0 * pi * x / L); };
        out.u0 = [](double) { return 0.0; };
    } else if (profile == "compress") {
        out.rho0 = [r0](double) { return r0; };
        out.u0 = [ua, L](double x) { return -ua * std::sin(2.0 * pi * x / L); };
    } else if (profile == "manufactured") {
        auto ref = ReferenceSolution::manufactured(L);
        out.rho0 = [ref](double x) { return ref.r(0.0, x); };
        out.u0 = [ref](double x) { return ref.U(0.0, x); };
    } else {
        throw ConfigError("unknown initial profile: " + profile);
    }
    return out;
}

RunSpec RunConfig::make_run_spec() const {
    RunSpec spec;
    spec.grid = make_grid();
    spec.params = make_params();
    spec.params.validate();
    spec.T = T;
    spec.safety = safety;
    if (!snapshot_times.empty()) {
        spec.snapshot_times = snapshot_times;
    } else {
        for (int k = 0; k < snapshot_count; ++k)
            spec.snapshot_times.push_back(T * k / (snapshot_count - 1));
    }
    auto init = make_initial();
    spec.rho0 = init.rho0;
    spec.u0 = init.u0;
    if (forcing != "none") {
        auto ref = ReferenceSolution::manufactured(extent);
        ModelParams fp = make_params();
        if (forcing == "limit") {
            fp.K = 0.0;
            fp.delta = 0.0;
        }
        spec.forcing = manufactured_forcing(ref, fp);
    }
    return spec;
}

toml::Table RunConfig::to_toml() const {
    using toml::Value;
    toml::Table root;
    toml::Table grid;
    grid["dim"] = Value::num(dim, true);
    grid["cells"] = Value::num(cells, true);
    grid["extent"] = Value::num(extent);
    grid["bc"] = Value::string(bc);
    root["grid"] = Value::table_v(grid);

    toml::Table pres;
    pres["a"] = Value::num(a);
    pres["gamma"] = Value::num(gamma);
    root["pressure"] = Value::table_v(pres);

    toml::Table model;
    model["mu"] = Value::num(mu);
    model["eta"] = Value::num(eta);
    model["K"] = Value::num(K);
    model["delta"] = Value::num(delta);
    model["Gamma"] = Value::num(Gamma);
    root["model"] = Value::table_v(model);

    toml::Table time;
    time["T"] = Value::num(T);
    time["safety"] = Value::num(safety);
    if (!snapshot_times.empty()) {
        std::vector<Value> arr;
        for (double t : snapshot_times) arr.push_back(Value::num(t));
        time["snapshots"] = Value::array_v(arr);
    } else {
        time["snapshots"] = Value::num(snapshot_count, true);
    }
    root["time"] = Value::table_v(time);

    toml::Table init;
    init["profile"] = Value::string(profile);
    init["rho0"] = Value::num(rho0);
    init["drho"] = Value::num(drho);
    init["u0"] = Value::num(u0);
    root["initial"] = Value::table_v(init);

    toml::Table forcing_t;
    forcing_t["kind"] = Value::string(forcing);
    root["forcing"] = Value::table_v(forcing_t);

    if (!out_dir.empty()) {
        toml::Table output;
        output["dir"] = Value::string(out_dir);
        root["output"] = Value::table_v(output);
    }
    return root;
}

WsuFileConfig parse_wsu_config_file(const std::string& path, bool perturbed) {
    static const toml::Table empty;
    auto root = toml::parse_file(path);
    Checker chk;
    chk.unknown_keys(root, "", {"wsu", "pressure", "model", "output"});
    const auto& w = section(root, "wsu", empty);
    chk.unknown_keys(w, "wsu",
                     {"T", "snapshots", "extent", "param", "ladder", "ladder_cells",
                      "perturbation", "lattice", "sub_samples"});
    const auto& pres = section(root, "pressure", empty);
    chk.unknown_keys(pres, "pressure", {"a", "gamma"});
    const auto& model = section(root, "model", empty);
    chk.unknown_keys(model, "model", {"mu", "eta"});
    const auto& output = section(root, "output", empty);
    chk.unknown_keys(output, "output", {"dir"});

    WsuFileConfig out;
    out.wsu.mode = perturbed ? WsuConfig::Mode::Perturbed : WsuConfig::Mode::Matched;
    out.wsu.T = chk.num(w, "T", 0.25);
    out.wsu.snapshots = static_cast<int>(chk.num(w, "snapshots", 16));
    out.wsu.extent = chk.num(w, "extent", 1.0);
    out.wsu.ladder_param = chk.str(w, "param", "K");
    out.wsu.perturbation = chk.num(w, "perturbation", perturbed ? 1e-2 : 0.0);
    out.wsu.lattice_cells = static_cast<int>(chk.num(w, "lattice", 0));
    out.wsu.sub_samples = static_cast<int>(chk.num(w, "sub_samples", 8));
    out.wsu.reference = ReferenceSolution::manufactured(out.wsu.extent);
    out.wsu.base.mu = chk.num(model, "mu", 0.1);
    out.wsu.base.eta = chk.num(model, "eta", 0.0);
    out.wsu.base.law =
        PressureLaw::power_law(chk.num(pres, "a", 1.0), chk.num(pres, "gamma", 2.0));
    out.out_dir = chk.str(output, "dir", "");

    std::vector<double> params;
    std::vector<int> cells;
    if (auto it = w.find("ladder"); it != w.end() && it->second.kind == toml::Value::Kind::Array)
        for (const auto& v : it->second.array) params.push_back(v.number);
    else
        chk.errors.push_back("wsu.ladder must be an array of parameter values");
    if (auto it = w.find("ladder_cells");
        it != w.end() && it->second.kind == toml::Value::Kind::Array)
        for (const auto& v : it->second.array) cells.push_back(static_cast<int>(v.number));
    if (cells.empty()) cells.assign(params.size(), 256);
    chk.require(cells.size() == params.size(),
                "wsu.ladder_cells must match wsu.ladder in length");
    chk.require(params.size() >= 3, "wsu.ladder needs >= 3 rungs");
    chk.require(out.wsu.ladder_param == "K" || out.wsu.ladder_param == "delta",
                "wsu.param must be K or delta");
    chk.require(out.wsu.T > 0.0, "wsu.T must be > 0");
    chk.require(out.wsu.snapshots >= 2, "wsu.snapshots must be >= 2");
    chk.require(out.wsu.base.mu > 0.0, "model.mu: shear viscosity must be positive (mu > 0)");
    if (perturbed)
        chk.require(out.wsu.perturbation >= 0.0, "wsu.perturbation must be >= 0");
    if (!chk.errors.empty()) {
        std::ostringstream os;
        os << "wsu config validation failed:";
        for (const auto& e : chk.errors) os << "\n  - " << e;
        throw ConfigError(os.str());
    }
    for (size_t i = 0; i < params.size(); ++i)
        out.wsu.ladder.push_back({params[i], cells[i]});
    return out;
}

} // namespace mvflow
