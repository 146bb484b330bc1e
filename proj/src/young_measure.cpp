#include "mvflow/young_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "mvflow/errors.hpp"

namespace mvflow {

using std::numbers::pi;

namespace {
constexpr double kGoldenOffset = 0.618033988749895;  // de-aliases stratified sampling
}

void SolutionFamily::validate(bool require_three) const {
    if (members.empty()) throw ConfigError("family has no members");
    if (require_three && members.size() < 3)
        throw ConfigError("family needs >= 3 members, got " + std::to_string(members.size()));
    if (members.size() != param_values.size())
        throw ConfigError("family: members/parameter count mismatch");
    for (size_t i = 1; i < param_values.size(); ++i)
        if (!(param_values[i] < param_values[i - 1]) || !(param_values[i] > 0.0))
            throw ConfigError("family: parameter values must be positive and descending");
    const auto& t0 = members.front().snaps;
    for (const auto& m : members) {
        if (m.snaps.size() != t0.size())
            throw ConfigError("family: members disagree on snapshot count");
        for (size_t k = 0; k < t0.size(); ++k)
            if (std::abs(m.snaps[k].t - t0[k].t) > 1e-9)
                throw ConfigError("family: members disagree on snapshot times");
        if (lattice_cells <= 0 || m.grid.n[0] % lattice_cells != 0)
            throw ConfigError("family: lattice must divide every member grid");
        if (std::abs(m.grid.extent[0] - members.front().grid.extent[0]) > 1e-14)
            throw ConfigError("family: members disagree on the domain extent");
    }
}

std::vector<double> SolutionFamily::snap_times() const {
    std::vector<double> times;
    for (const auto& s : members.front().snaps) times.push_back(s.t);
    return times;
}

std::vector<size_t> SolutionFamily::finest_half() const {
    size_t m = members.size();
    size_t used = m <= 2 ? m : (m + 1) / 2;
    std::vector<size_t> idx;
    for (size_t i = m - used; i < m; ++i) idx.push_back(i);
    return idx;
}

SolutionFamily make_family(std::string param_name, std::vector<double> values,
                           std::vector<Trajectory> members, InitialDataSpec common_initial,
                           int lattice_cells) {
    SolutionFamily fam;
    fam.param_name = std::move(param_name);
    fam.param_values = std::move(values);
    fam.members = std::move(members);
    fam.common_initial = std::move(common_initial);
    fam.lattice_cells = lattice_cells;
    fam.validate(false);
    return fam;
}

namespace {

// piecewise-constant member evaluation: fine cell containing x
void eval_member(const Trajectory& traj, size_t snap, double x, double& s, double& v) {
    const Grid& g = traj.grid;
    int i = std::clamp(static_cast<int>(x / g.dx[0]), 0, g.n[0] - 1);
    const auto& sn = traj.snaps[snap];
    s = sn.rho[i];
    bool per = g.bc == Bc::Periodic;
    double ur = sn.u.x()[per ? g.wrap(i + 1, 0) : i + 1];
    v = 0.5 * (sn.u.x()[i] + ur);
}

} // namespace

EmpiricalYoungMeasure build_empirical_measure(const SolutionFamily& family, int sub_samples,
                                              int atom_cap) {
    family.validate(false);
    if (sub_samples < 1) throw ConfigError("sub_samples must be >= 1");
    EmpiricalYoungMeasure eym;
    eym.lattice_cells = family.lattice_cells;
    eym.extent = family.extent();
    eym.snap_times = family.snap_times();
    size_t snaps = eym.snap_times.size();
    eym.bins.resize(snaps * family.lattice_cells);

    auto used = family.finest_half();
    double w0 = 1.0 / (static_cast<double>(used.size()) * sub_samples);
    double dxl = eym.dx();

    for (size_t k = 0; k < snaps; ++k) {
        for (int i = 0; i < family.lattice_cells; ++i) {
            std::map<std::pair<double, double>, double> merged;
            for (size_t mi : used) {
                for (int q = 0; q < sub_samples; ++q) {
                    double x = (i + (q + kGoldenOffset) / sub_samples) * dxl;
                    double s, v;
                    eval_member(family.members[mi], k, x, s, v);
                    merged[{s, v}] += w0;
                }
            }
            auto& bin = eym.bins[eym.bin_index(i, static_cast<int>(k))];
            for (const auto& [key, w] : merged) {
                bin.s.push_back(key.first);
                bin.v.push_back(key.second);
                bin.w.push_back(w);
            }
            if (static_cast<int>(bin.s.size()) > atom_cap) {
                // deterministic stratified thinning, then renormalize
                int stride = (static_cast<int>(bin.s.size()) + atom_cap - 1) / atom_cap;
                EmpiricalYoungMeasure::Bin thin;
                for (size_t a = 0; a < bin.s.size(); a += stride) {
                    thin.s.push_back(bin.s[a]);
                    thin.v.push_back(bin.v[a]);
                    thin.w.push_back(bin.w[a]);
                }
                double total = 0.0;
                for (double w : thin.w) total += w;
                for (double& w : thin.w) w /= total;
                bin = std::move(thin);
            }
        }
    }
    return eym;
}

std::vector<double> moment(const EmpiricalYoungMeasure& eym,
                           const std::function<double(double, double)>& F, int snap) {
    std::vector<double> out(eym.lattice_cells, 0.0);
    for (int i = 0; i < eym.lattice_cells; ++i) {
        const auto& bin = eym.bins[eym.bin_index(i, snap)];
        double acc = 0.0;
        for (size_t a = 0; a < bin.s.size(); ++a) {
            double f = F(bin.s[a], bin.v[a]);
            if (!std::isfinite(f)) {
                std::ostringstream os;
                os << "moment: non-finite observable at atom (s = " << bin.s[a]
                   << ", v = " << bin.v[a] << ") in bin (" << i << ", " << snap << ")";
                throw RuntimeFailure(os.str());
            }
            acc += bin.w[a] * f;
        }
        out[i] = acc;
    }
    return out;
}

namespace {

// gradient of a lattice cell field; wall value 0 a half cell outside
std::vector<double> lattice_gradient(const std::vector<double>& v, double dx, bool periodic) {
    size_t n = v.size();
    std::vector<double> g;
    if (periodic) {
        g.resize(n);
        for (size_t j = 0; j < n; ++j) g[j] = (v[j] - v[(j + n - 1) % n]) / dx;
        return g;
    }
    g.resize(n + 1);
    g[0] = (v[0] - 0.0) / (0.5 * dx);
    g[n] = (0.0 - v[n - 1]) / (0.5 * dx);
    for (size_t j = 1; j < n; ++j) g[j] = (v[j] - v[j - 1]) / dx;
    return g;
}

double lattice_dissipation_rate(const std::vector<double>& vbar, double dx, bool periodic,
                                double mu, double eta) {
    auto g = lattice_gradient(vbar, dx, periodic);
    double lambda = mu / 3.0 + eta;
    double acc = 0.0;
    for (size_t j = 0; j < g.size(); ++j) {
        double w = 1.0;
        if (!periodic && (j == 0 || j + 1 == g.size())) w = 0.5;
        acc += w * (mu + lambda) * g[j] * g[j];
    }
    return acc * dx;
}

double pair_with_field(const std::vector<double>& field, const EmpiricalYoungMeasure& eym,
                       const std::function<double(double, double)>& psi_of_tx, double t) {
    double acc = 0.0;
    double dxl = eym.dx();
    for (int i = 0; i < eym.lattice_cells; ++i)
        acc += field[i] * psi_of_tx(t, (i + 0.5) * dxl);
    return acc * dxl;
}

struct MeasureCache {
    // per snapshot: moment fields the residuals reuse
    std::vector<std::vector<double>> s, sv, svv, ps, v;
};

MeasureCache build_cache(const EmpiricalYoungMeasure& eym, const PressureLaw& law) {
    MeasureCache c;
    size_t snaps = eym.snap_times.size();
    c.s.resize(snaps);
    c.sv.resize(snaps);
    c.svv.resize(snaps);
    c.ps.resize(snaps);
    c.v.resize(snaps);
    for (size_t k = 0; k < snaps; ++k) {
        int ki = static_cast<int>(k);
        c.s[k] = moment(eym, [](double s, double) { return s; }, ki);
        c.sv[k] = moment(eym, [](double s, double v) { return s * v; }, ki);
        c.svv[k] = moment(eym, [](double s, double v) { return s * v * v; }, ki);
        c.ps[k] = moment(eym, [&law](double s, double) { return pressure(law, s); }, ki);
        c.v[k] = moment(eym, [](double, double v) { return v; }, ki);
    }
    return c;
}

// (dmvB1) residual at horizon tau_k against the declared initial data
double measure_continuity_residual(const SolutionFamily& family,
                                   const EmpiricalYoungMeasure& eym, const MeasureCache& c,
                                   const TestFunction& psi, size_t k) {
    double dxl = eym.dx();
    double tau = eym.snap_times[k];
    double lhs = pair_with_field(c.s[k], eym, psi.val, tau);
    double init = 0.0;
    for (int i = 0; i < eym.lattice_cells; ++i) {
        double x = (i + 0.5) * dxl;
        init += family.common_initial.rho0(x) * psi.val(0.0, x);
    }
    init *= dxl;
    double interior = 0.0;
    for (size_t j = 0; j + 1 <= k; ++j) {
        double dt = eym.snap_times[j + 1] - eym.snap_times[j];
        auto rate = [&](size_t kk) {
            double t = eym.snap_times[kk];
            double acc = 0.0;
            for (int i = 0; i < eym.lattice_cells; ++i) {
                double x = (i + 0.5) * dxl;
                acc += c.s[kk][i] * psi.dt(t, x) + c.sv[kk][i] * psi.dx(t, x);
            }
            return acc * dxl;
        };
        interior += 0.5 * dt * (rate(j) + rate(j + 1));
    }
    return lhs - init - interior;
}

double measure_momentum_residual(const SolutionFamily& family, const EmpiricalYoungMeasure& eym,
                                 const MeasureCache& c, const TestFunction& phi, size_t k,
                                 double mu, double eta) {
    const Grid& mgrid = family.members.back().grid;
    bool periodic = mgrid.bc == Bc::Periodic;
    double dxl = eym.dx();
    double tau = eym.snap_times[k];
    double lhs = pair_with_field(c.sv[k], eym, phi.val, tau);
    double init = 0.0;
    for (int i = 0; i < eym.lattice_cells; ++i) {
        double x = (i + 0.5) * dxl;
        init += family.common_initial.rho0(x) * family.common_initial.u0(x) * phi.val(0.0, x);
    }
    init *= dxl;
    double lambda = mu / 3.0 + eta;
    double interior = 0.0;
    for (size_t j = 0; j + 1 <= k; ++j) {
        double dt = eym.snap_times[j + 1] - eym.snap_times[j];
        auto rate = [&](size_t kk) {
            double t = eym.snap_times[kk];
            auto grad = lattice_gradient(c.v[kk], dxl, periodic);
            double acc = 0.0;
            for (int i = 0; i < eym.lattice_cells; ++i) {
                double x = (i + 0.5) * dxl;
                acc += c.sv[kk][i] * phi.dt(t, x);
                acc += (c.svv[kk][i] + c.ps[kk][i]) * phi.dx(t, x);
                // S(grad u) : grad phi with u the barycentric velocity
                double gl = grad[i];
                double gr = periodic ? grad[(i + 1) % eym.lattice_cells] : grad[i + 1];
                double gc = 0.5 * (gl + gr);
                acc -= (mu + lambda) * gc * phi.dx(t, x);
            }
            return acc * dxl;
        };
        interior += 0.5 * dt * (rate(j) + rate(j + 1));
    }
    return lhs - init - interior;
}

} // namespace

DefectReport estimate_defects(const SolutionFamily& family, const EmpiricalYoungMeasure& eym,
                              const PressureLaw& law, const TestFunctionFamily& tests) {
    family.validate(true);
    const Trajectory& finest = family.members.back();
    const Grid& mgrid = finest.grid;
    bool periodic = mgrid.bc == Bc::Periodic;
    double mu = finest.params.mu, eta = finest.params.eta;
    size_t snaps = eym.snap_times.size();
    double dxl = eym.dx();

    MeasureCache cache = build_cache(eym, law);

    DefectReport rep;
    rep.tau = eym.snap_times;
    rep.E_inf.resize(snaps);
    rep.sigma_inf_series.assign(snaps, 0.0);
    rep.D.resize(snaps);

    for (size_t k = 0; k < snaps; ++k) {
        double e_fin = energy(finest.snaps[k], law, mgrid);
        double e_meas = 0.0;
        auto em = moment(
            eym,
            [&law](double s, double v) { return 0.5 * s * v * v + pressure_potential(law, s); },
            static_cast<int>(k));
        for (double v : em) e_meas += v;
        e_meas *= dxl;
        rep.E_inf[k] = e_fin - e_meas;
    }

    // sigma_inf over [0, tau]: finest accumulated dissipation minus the
    // dissipation of the moment velocity, trapezoid in time
    double moment_diss = 0.0;
    for (size_t k = 1; k < snaps; ++k) {
        double dt = eym.snap_times[k] - eym.snap_times[k - 1];
        double r0 = lattice_dissipation_rate(cache.v[k - 1], dxl, periodic, mu, eta);
        double r1 = lattice_dissipation_rate(cache.v[k], dxl, periodic, mu, eta);
        moment_diss += 0.5 * dt * (r0 + r1);
        rep.sigma_inf_series[k] = finest.snaps[k].dissipation_integral - moment_diss;
    }
    rep.sigma_inf = rep.sigma_inf_series.back();
    for (size_t k = 0; k < snaps; ++k) rep.D[k] = rep.E_inf[k] + rep.sigma_inf_series[k];

    // smallest chi, xi making the residual bounds hold over the test family
    rep.chi.assign(snaps, 0.0);
    rep.xi.assign(snaps, 0.0);
    rep.rC_bound.assign(snaps, 0.0);
    rep.rM_bound.assign(snaps, 0.0);
    double floor = 1e-14;
    double max_psi_norm = 0.0, max_phi_norm = 0.0;
    for (const auto& psi : tests.scalars) max_psi_norm = std::max(max_psi_norm, psi.c1_norm);
    for (const auto& phi : tests.vectors) max_phi_norm = std::max(max_phi_norm, phi.c1_norm);
    for (size_t k = 1; k < snaps; ++k) {
        double d = std::max(rep.D[k], floor);
        for (const auto& psi : tests.scalars) {
            double r = std::abs(measure_continuity_residual(family, eym, cache, psi, k));
            rep.chi[k] = std::max(rep.chi[k], r / (d * psi.c1_norm));
        }
        for (const auto& phi : tests.vectors) {
            double r =
                std::abs(measure_momentum_residual(family, eym, cache, phi, k, mu, eta));
            rep.xi[k] = std::max(rep.xi[k], r / (d * phi.c1_norm));
        }
        rep.rC_bound[k] = rep.chi[k] * rep.D[k] * max_psi_norm;
        rep.rM_bound[k] = rep.xi[k] * rep.D[k] * max_phi_norm;
    }
    return rep;
}

DD1ValidationReport validate_dmv(const SolutionFamily& family,
                                 const EmpiricalYoungMeasure& eym, const DefectReport& report,
                                 const PressureLaw& law, const TestFunctionFamily& tests,
                                 const DD1Tolerances& tol) {
    const Trajectory& finest = family.members.back();
    const Grid& mgrid = finest.grid;
    bool periodic = mgrid.bc == Bc::Periodic;
    double mu = finest.params.mu, eta = finest.params.eta;
    size_t snaps = eym.snap_times.size();
    double dxl = eym.dx();
    MeasureCache cache = build_cache(eym, law);

    DD1ValidationReport out;
    for (double v : report.chi) out.chi_max = std::max(out.chi_max, v);
    for (double v : report.xi) out.xi_max = std::max(out.xi_max, v);

    auto run_residual_check = [&](bool momentum) {
        DD1ValidationReport::Check chk;
        chk.name = momentum ? "momentum residual bound (dmvB2)" : "continuity residual bound (dmvB1)";
        chk.worst_margin = 1e300;
        const auto& fns = momentum ? tests.vectors : tests.scalars;
        const auto& profile = momentum ? report.xi : report.chi;
        for (size_t k = 1; k < snaps; ++k) {
            double cap = std::min(profile[k], tol.chi_cap);
            double d = std::max(report.D[k], tol.defect_floor);
            for (const auto& fn : fns) {
                double r = momentum ? std::abs(measure_momentum_residual(family, eym, cache,
                                                                          fn, k, mu, eta))
                                    : std::abs(measure_continuity_residual(family, eym, cache,
                                                                            fn, k));
                double bound = cap * d * fn.c1_norm + tol.residual_tol;
                double margin = bound - r;
                if (margin < chk.worst_margin) {
                    chk.worst_margin = margin;
                    std::ostringstream os;
                    os << fn.id << " at tau = " << eym.snap_times[k] << ": |r| = " << r
                       << ", bound = " << bound;
                    chk.detail = os.str();
                }
                if (margin < 0.0) chk.pass = false;
            }
        }
        return chk;
    };
    out.continuity = run_residual_check(false);
    out.momentum = run_residual_check(true);

    // (dmvEI) with u = <nu; v>
    {
        DD1ValidationReport::Check chk;
        chk.name = "energy inequality (dmvEI)";
        chk.worst_margin = 1e300;
        auto measure_energy = [&](size_t k) {
            auto em = moment(
                eym,
                [&law](double s, double v) {
                    return 0.5 * s * v * v + pressure_potential(law, s);
                },
                static_cast<int>(k));
            double acc = 0.0;
            for (double v : em) acc += v;
            return acc * dxl;
        };
        double e0 = measure_energy(0) + std::max(report.D[0], 0.0);
        double diss = 0.0;
        for (size_t k = 1; k < snaps; ++k) {
            double dt = eym.snap_times[k] - eym.snap_times[k - 1];
            double r0 = lattice_dissipation_rate(cache.v[k - 1], dxl, periodic, mu, eta);
            double r1 = lattice_dissipation_rate(cache.v[k], dxl, periodic, mu, eta);
            diss += 0.5 * dt * (r0 + r1);
            double lhs = measure_energy(k) + diss + report.D[k];
            double margin = e0 + tol.energy_tol - lhs;
            if (margin < chk.worst_margin) {
                chk.worst_margin = margin;
                std::ostringstream os;
                os << "tau = " << eym.snap_times[k] << ": E + diss + D = " << lhs
                   << ", E(0) = " << e0;
                chk.detail = os.str();
            }
            if (margin < 0.0) chk.pass = false;
        }
        out.energy_inequality = chk;
    }

    // (KoPo): intint <|v - u|^2> <= c_P D(tau)
    {
        DD1ValidationReport::Check chk;
        chk.name = "Poincare hypothesis (KoPo)";
        chk.worst_margin = 1e300;
        double cp;
        if (!periodic) {
            Grid lat = Grid::make_1d(eym.lattice_cells, eym.extent, Bc::NoSlip);
            cp = poincare_constant(lat).c_p;
        } else {
            // torus analogue of the paired eigenproblem, first nonzero mode
            double t = std::tan(pi * dxl / eym.extent);
            cp = dxl * dxl / (4.0 * t * t);
        }
        double acc = 0.0;
        for (size_t k = 1; k < snaps; ++k) {
            double dt = eym.snap_times[k] - eym.snap_times[k - 1];
            auto var_at = [&](size_t kk) {
                auto vv = moment(eym, [](double, double v) { return v * v; },
                                 static_cast<int>(kk));
                double a = 0.0;
                for (int i = 0; i < eym.lattice_cells; ++i) {
                    double m1 = cache.v[kk][i];
                    a += vv[i] - m1 * m1;
                }
                return a * dxl;
            };
            acc += 0.5 * dt * (var_at(k - 1) + var_at(k));
            double bound = cp * std::max(report.D[k], 0.0) + tol.kopo_tol;
            double margin = bound - acc;
            if (margin < chk.worst_margin) {
                chk.worst_margin = margin;
                std::ostringstream os;
                os << "tau = " << eym.snap_times[k] << ": intint var = " << acc
                   << ", c_P D + tol = " << bound;
                chk.detail = os.str();
            }
            if (margin < 0.0) chk.pass = false;
        }
        out.kopo = chk;
    }
    return out;
}

// ---- synthetic families ----

SyntheticFamily concentration_family(const std::vector<int>& ns) {
    SyntheticFamily fam;
    fam.label = "concentration";
    for (int n : ns) {
        SyntheticMember m;
        m.index = n;
        double w = 1.0 / n, h = std::sqrt(static_cast<double>(n));
        m.z = [w, h](double x) { return x < w ? h : 0.0; };
        m.breakpoints = {w};
        fam.members.push_back(std::move(m));
    }
    return fam;
}

SyntheticFamily oscillation_family(const std::vector<int>& ns) {
    SyntheticFamily fam;
    fam.label = "oscillation";
    for (int n : ns) {
        SyntheticMember m;
        m.index = n;
        m.z = [n](double x) { return std::sin(2.0 * pi * n * x); };
        fam.members.push_back(std::move(m));
    }
    return fam;
}

SyntheticFamily mixed_family(const std::vector<int>& ns) {
    SyntheticFamily fam;
    fam.label = "mixed";
    for (int n : ns) {
        SyntheticMember m;
        m.index = n;
        double a = 0.5, b = 0.5 + 1.0 / n, h = std::sqrt(static_cast<double>(n));
        m.z = [n, a, b, h](double x) {
            double osc = std::sin(2.0 * pi * n * x);
            return x >= a && x < b ? osc + h : osc;
        };
        m.breakpoints = {a, b};
        fam.members.push_back(std::move(m));
    }
    return fam;
}

std::vector<DominationWindow> default_windows() {
    std::vector<DominationWindow> out;
    out.push_back({"one", [](double) { return 1.0; }});
    out.push_back({"sin2", [](double x) {
                       double s = std::sin(pi * x);
                       return s * s;
                   }});
    out.push_back({"ramp2", [](double x) { return x * x; }});
    return out;
}

namespace {

// breakpoint-aware composite Simpson over (0, 1); panel count scales with
// the member's oscillation index
double member_integral(const SyntheticMember& m, const std::function<double(double)>& F,
                       const std::function<double(double)>& phi) {
    std::vector<double> cuts = {0.0};
    for (double b : m.breakpoints)
        if (b > 0.0 && b < 1.0) cuts.push_back(b);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    int per_unit = std::max(4096, 64 * static_cast<int>(m.index));
    for (size_t p = 0; p + 1 < cuts.size(); ++p) {
        double a = cuts[p], b = cuts[p + 1];
        if (b - a < 1e-300) continue;
        int panels = std::max(16, static_cast<int>(per_unit * (b - a)));
        double h = (b - a) / panels;
        // nudge the piece endpoints inward so z is sampled on its own side
        double eps = 1e-12 * (b - a);
        double piece = 0.0;
        for (int j = 0; j < panels; ++j) {
            double x0 = a + j * h, x1 = x0 + h, xm = x0 + 0.5 * h;
            double f0 = F(m.z(j == 0 ? x0 + eps : x0)) * phi(x0);
            double fm = F(m.z(xm)) * phi(xm);
            double f1 = F(m.z(j == panels - 1 ? x1 - eps : x1)) * phi(x1);
            piece += h / 6.0 * (f0 + 4.0 * fm + f1);
        }
        acc += piece;
    }
    return acc;
}

} // namespace

DominationResult lemma_domination_check(const std::function<double(double)>& F,
                                        const std::function<double(double)>& G,
                                        const SyntheticFamily& family,
                                        const std::vector<DominationWindow>& windows,
                                        int lattice_cells, int sub_samples, double tol) {
    if (family.members.size() < 2)
        throw ConfigError("lemma_domination_check needs >= 2 members");
    DominationResult res;

    // sample atoms: finest half of members at stratified lattice points
    size_t m = family.members.size();
    size_t used0 = m <= 2 ? 0 : m - (m + 1) / 2;
    std::vector<std::vector<std::pair<double, double>>> atoms(lattice_cells);  // (z, w)
    double dxl = 1.0 / lattice_cells;
    double w0 = 1.0 / (static_cast<double>(m - used0) * sub_samples);
    for (size_t mi = used0; mi < m; ++mi) {
        for (int i = 0; i < lattice_cells; ++i)
            for (int q = 0; q < sub_samples; ++q) {
                double x = (i + (q + kGoldenOffset) / sub_samples) * dxl;
                atoms[i].push_back({family.members[mi].z(x), w0});
            }
    }

    // precondition: |F| <= G on every atom; G uniformly bounded in L1
    for (const auto& cell : atoms)
        for (const auto& [z, w] : cell) {
            (void)w;
            if (std::abs(F(z)) > G(z) + 1e-12) {
                std::ostringstream os;
                os << "pointwise domination violated on atom z = " << z << ": |F| = "
                   << std::abs(F(z)) << " > G = " << G(z);
                throw ConfigError(os.str());
            }
        }
    for (const auto& mem : family.members) {
        double l1 = member_integral(mem, G, [](double) { return 1.0; });
        if (!std::isfinite(l1))
            throw ConfigError("G(member) is not integrable on the lattice");
    }

    const SyntheticMember& finest = family.members.back();
    for (const auto& win : windows) {
        DominationResult::PerWindow pw;
        pw.window = win.id;
        double f_tilde = member_integral(finest, F, win.phi);
        double g_tilde = member_integral(finest, G, win.phi);
        double f_meas = 0.0, g_meas = 0.0;
        for (int i = 0; i < lattice_cells; ++i) {
            double phi_c = win.phi((i + 0.5) * dxl);
            double fm = 0.0, gm = 0.0;
            for (const auto& [z, w] : atoms[i]) {
                fm += w * F(z);
                gm += w * G(z);
            }
            f_meas += fm * phi_c * dxl;
            g_meas += gm * phi_c * dxl;
        }
        pw.F_inf = f_tilde - f_meas;
        pw.G_inf = g_tilde - g_meas;
        pw.margin = pw.G_inf + tol - std::abs(pw.F_inf);
        pw.ok = pw.margin >= 0.0;
        if (!pw.ok) res.pass = false;
        res.windows.push_back(std::move(pw));
    }
    return res;
}

} // namespace mvflow
