#include "mvflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mvflow/errors.hpp"

namespace mvflow {

using std::numbers::pi;

std::vector<std::string> AprioriReport::entry_names() {
    return {"sup_potential", "sup_kinetic", "dissipation",
            "grad_u_sq",     "u_sq",        "brenner_weighted"};
}

double energy(const FlowState& state, const PressureLaw& law, const Grid& g) {
    auto uc = cell_velocity(state.u, g);
    double e = 0.0;
    for (int i = 0; i < g.n[0]; ++i)
        e += 0.5 * state.rho[i] * uc[i] * uc[i] + pressure_potential(law, state.rho[i]);
    return e * g.dx[0];
}

double energy(const Snapshot& snap, const PressureLaw& law, const Grid& g) {
    FlowState s;
    s.rho = snap.rho;
    s.u = snap.u;
    s.time = snap.t;
    return energy(s, law, g);
}

EnergyBudget energy_budget(const Trajectory& traj, const PressureLaw& law) {
    EnergyBudget out;
    if (traj.snaps.size() < 2) return out;
    double e_prev = energy(traj.snaps.front(), law, traj.grid);
    for (size_t k = 1; k < traj.snaps.size(); ++k) {
        const auto& a = traj.snaps[k - 1];
        const auto& b = traj.snaps[k];
        double e_cur = energy(b, law, traj.grid);
        double r = e_cur - e_prev + (b.dissipation_integral - a.dissipation_integral) +
                   (b.brenner_integral - a.brenner_integral) -
                   (b.work_integral - a.work_integral);
        out.t.push_back(b.t);
        out.residual.push_back(r);
        out.max_abs = std::max(out.max_abs, std::abs(r));
        out.max_signed = std::max(out.max_signed, r);
        e_prev = e_cur;
    }
    return out;
}

namespace {

struct MidState {
    double t;
    CellField rho;
    FaceField u;
};

MidState midpoint(const Snapshot& a, const Snapshot& b) {
    MidState m;
    m.t = 0.5 * (a.t + b.t);
    m.rho = a.rho;
    for (size_t i = 0; i < m.rho.size(); ++i) m.rho[i] = 0.5 * (a.rho[i] + b.rho[i]);
    m.u = a.u;
    for (size_t j = 0; j < m.u.x().size(); ++j)
        m.u.x()[j] = 0.5 * (a.u.x()[j] + b.u.x()[j]);
    return m;
}

// midpoint-in-time over snapshot intervals, optionally skipping every other
// snapshot (the Richardson coarse pass)
template <class F>
double time_integral(const Trajectory& traj, F rate_of_state, int stride = 1) {
    double acc = 0.0;
    const auto& s = traj.snaps;
    for (size_t k = 0; k + stride < s.size(); k += stride) {
        size_t k2 = k + stride;
        MidState m = midpoint(s[k], s[k2]);
        acc += (s[k2].t - s[k].t) * rate_of_state(m);
    }
    return acc;
}

double ux_at_cell(const FaceField& u, const Grid& g, int i) {
    bool per = g.bc == Bc::Periodic;
    double ur = u.x()[per ? g.wrap(i + 1, 0) : i + 1];
    return (ur - u.x()[i]) / g.dx[0];
}

} // namespace

AprioriReport apriori_bounds(const Trajectory& traj, const ModelParams& params) {
    AprioriReport rep;
    const Grid& g = traj.grid;
    for (const auto& s : traj.snaps) {
        double pot = 0.0, kin = 0.0;
        auto uc = cell_velocity(s.u, g);
        for (int i = 0; i < g.n[0]; ++i) {
            pot += pressure_potential(params.law, s.rho[i]);
            kin += s.rho[i] * uc[i] * uc[i];
        }
        rep.sup_potential = std::max(rep.sup_potential, pot * g.dx[0]);
        rep.sup_kinetic = std::max(rep.sup_kinetic, kin * g.dx[0]);
    }
    rep.dissipation = traj.snaps.back().dissipation_integral;
    rep.brenner_weighted = traj.snaps.back().brenner_integral;
    rep.grad_u_sq = time_integral(traj, [&](const MidState& m) {
        double acc = 0.0;
        for (int i = 0; i < g.n[0]; ++i) {
            double ux = ux_at_cell(m.u, g, i);
            acc += ux * ux;
        }
        return acc * g.dx[0];
    });
    rep.u_sq = time_integral(traj, [&](const MidState& m) {
        auto uc = cell_velocity(m.u, g);
        double acc = 0.0;
        for (double v : uc) acc += v * v;
        return acc * g.dx[0];
    });
    return rep;
}

UniformityCheck apriori_uniformity(const std::vector<AprioriReport>& reports, double factor) {
    UniformityCheck out;
    out.entry = AprioriReport::entry_names();
    size_t m = out.entry.size();
    out.max_over_median.assign(m, 0.0);
    for (size_t e = 0; e < m; ++e) {
        std::vector<double> vals;
        for (const auto& r : reports) vals.push_back(r.entries()[e]);
        std::vector<double> sorted = vals;
        std::sort(sorted.begin(), sorted.end());
        double median = sorted.size() % 2 == 1
                            ? sorted[sorted.size() / 2]
                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        double mx = sorted.back();
        double ratio = median > 0.0 ? mx / median : (mx > 0.0 ? 1e300 : 1.0);
        out.max_over_median[e] = ratio;
        if (ratio > factor) out.pass = false;
    }
    return out;
}

namespace {

// rho psi integrated over cells at a snapshot
double mass_pairing(const Snapshot& s, const Grid& g,
                    const std::function<double(double, double)>& psi) {
    double acc = 0.0;
    for (int i = 0; i < g.n[0]; ++i) acc += s.rho[i] * psi(s.t, g.cell_x(i));
    return acc * g.dx[0];
}

double momentum_pairing(const Snapshot& s, const Grid& g,
                        const std::function<double(double, double)>& phi) {
    std::vector<double> f(s.u.x().size());
    for (size_t j = 0; j < f.size(); ++j) {
        double rf;
        if (g.bc == Bc::NoSlip) {
            int n = g.n[0];
            rf = j == 0 ? s.rho[0]
                        : (static_cast<int>(j) == n ? s.rho[n - 1]
                                                    : 0.5 * (s.rho[j - 1] + s.rho[j]));
        } else {
            rf = 0.5 * (s.rho[g.wrap(static_cast<int>(j) - 1, 0)] + s.rho[j]);
        }
        f[j] = rf * s.u.x()[j] * phi(s.t, g.face_x(static_cast<int>(j)));
    }
    return integrate_faces(f, g);
}

double continuity_rate(const MidState& m, const Grid& g, double K, const TestFunction& psi) {
    double acc = 0.0;
    for (int i = 0; i < g.n[0]; ++i) acc += m.rho[i] * psi.dt(m.t, g.cell_x(i));
    acc *= g.dx[0];
    // rho u . grad psi and -K grad rho . grad psi live at faces
    FaceField gr = grad_cell_to_face(m.rho, g);
    std::vector<double> f(m.u.x().size());
    for (size_t j = 0; j < f.size(); ++j) {
        double rf;
        int n = g.n[0];
        if (g.bc == Bc::NoSlip)
            rf = j == 0 ? m.rho[0]
                        : (static_cast<int>(j) == n ? m.rho[n - 1]
                                                    : 0.5 * (m.rho[j - 1] + m.rho[j]));
        else
            rf = 0.5 * (m.rho[g.wrap(static_cast<int>(j) - 1, 0)] + m.rho[j]);
        double px = psi.dx(m.t, g.face_x(static_cast<int>(j)));
        f[j] = (rf * m.u.x()[j] - K * gr.x()[j]) * px;
    }
    return acc + integrate_faces(f, g);
}

} // namespace

double weak_residual_continuity(const Trajectory& traj, const TestFunction& psi) {
    const Grid& g = traj.grid;
    double K = traj.params.K;
    double boundary = mass_pairing(traj.snaps.back(), g, psi.val) -
                      mass_pairing(traj.snaps.front(), g, psi.val);
    double interior =
        time_integral(traj, [&](const MidState& m) { return continuity_rate(m, g, K, psi); });
    return boundary - interior;
}

namespace {

double momentum_rate(const MidState& m, const Grid& g, const ModelParams& p,
                     const TestFunction& phi) {
    int n = g.n[0];
    // m . dt phi at faces
    std::vector<double> fm(m.u.x().size());
    for (size_t j = 0; j < fm.size(); ++j) {
        double rf;
        if (g.bc == Bc::NoSlip)
            rf = j == 0 ? m.rho[0]
                        : (static_cast<int>(j) == n ? m.rho[n - 1]
                                                    : 0.5 * (m.rho[j - 1] + m.rho[j]));
        else
            rf = 0.5 * (m.rho[g.wrap(static_cast<int>(j) - 1, 0)] + m.rho[j]);
        fm[j] = rf * m.u.x()[j] * phi.dt(m.t, g.face_x(static_cast<int>(j)));
    }
    double acc = integrate_faces(fm, g);

    // cell terms: (rho u u + p_tot - S - K u grad rho) . grad phi
    FaceField gr = grad_cell_to_face(m.rho, g);
    bool per = g.bc == Bc::Periodic;
    auto uc = cell_velocity(m.u, g);
    double cells = 0.0;
    for (int i = 0; i < n; ++i) {
        double px = phi.dx(m.t, g.cell_x(i));
        double conv = m.rho[i] * uc[i] * uc[i];
        double ptot = pressure(p.law, m.rho[i]);
        if (p.delta > 0.0) ptot += p.delta * std::pow(m.rho[i], p.Gamma);
        double S = viscous_stress_1d(ux_at_cell(m.u, g, i), p.mu, p.eta);
        double gright = gr.x()[per ? g.wrap(i + 1, 0) : i + 1];
        double gbar = 0.5 * (gr.x()[i] + gright);
        double kterm = p.K * uc[i] * gbar;
        cells += (conv + ptot - S - kterm) * px;
    }
    return acc + cells * g.dx[0];
}

} // namespace

double weak_residual_momentum(const Trajectory& traj, const TestFunction& phi) {
    const Grid& g = traj.grid;
    if (g.bc == Bc::NoSlip && !phi.boundary_compatible)
        throw ConfigError("weak_residual_momentum: phi must vanish at the walls");
    double boundary = momentum_pairing(traj.snaps.back(), g, phi.val) -
                      momentum_pairing(traj.snaps.front(), g, phi.val);
    double interior = time_integral(
        traj, [&](const MidState& m) { return momentum_rate(m, g, traj.params, phi); });
    return boundary - interior;
}

double weak_residual_time_quadrature_error(const Trajectory& traj, const TestFunction& fn,
                                           bool momentum) {
    const Grid& g = traj.grid;
    auto rate = [&](const MidState& m) {
        return momentum ? momentum_rate(m, g, traj.params, fn)
                        : continuity_rate(m, g, traj.params.K, fn);
    };
    double fine = time_integral(traj, rate, 1);
    double coarse = time_integral(traj, rate, 2);
    return std::abs(fine - coarse) / 3.0;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("fit_loglog_slope needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = x.size();
    for (size_t i = 0; i < n; ++i) {
        double lx = std::log(std::max(x[i], 1e-300));
        double ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<VanishingRate> vanishing_k_terms(const std::vector<Trajectory>& family,
                                             const std::vector<double>& k_values,
                                             const std::vector<TestFunction>& psis,
                                             const std::vector<TestFunction>& phis) {
    if (family.size() != k_values.size())
        throw ConfigError("vanishing_k_terms: family/K size mismatch");
    size_t positive = 0;
    for (double k : k_values)
        if (k > 0.0) ++positive;
    if (positive < 3) throw ConfigError("vanishing_k_terms needs >= 3 members with K > 0");

    std::vector<VanishingRate> out;
    auto continuity_term = [](const Trajectory& traj, const TestFunction& psi) {
        const Grid& g = traj.grid;
        double v = time_integral(traj, [&](const MidState& m) {
            FaceField gr = grad_cell_to_face(m.rho, g);
            std::vector<double> f(gr.x().size());
            for (size_t j = 0; j < f.size(); ++j)
                f[j] = gr.x()[j] * psi.dx(m.t, g.face_x(static_cast<int>(j)));
            return integrate_faces(f, g);
        });
        return std::abs(traj.params.K * v);
    };
    auto momentum_term = [](const Trajectory& traj, const TestFunction& phi) {
        const Grid& g = traj.grid;
        bool per = g.bc == Bc::Periodic;
        double v = time_integral(traj, [&](const MidState& m) {
            FaceField gr = grad_cell_to_face(m.rho, g);
            auto uc = cell_velocity(m.u, g);
            double acc = 0.0;
            for (int i = 0; i < g.n[0]; ++i) {
                double gright = gr.x()[per ? g.wrap(i + 1, 0) : i + 1];
                double gbar = 0.5 * (gr.x()[i] + gright);
                acc += uc[i] * gbar * phi.dx(m.t, g.cell_x(i));
            }
            return acc * g.dx[0];
        });
        return std::abs(traj.params.K * v);
    };

    for (const auto& psi : psis) {
        VanishingRate r;
        r.term = "continuity";
        r.member_id = psi.id;
        for (size_t m = 0; m < family.size(); ++m) {
            if (k_values[m] <= 0.0) continue;
            r.k_values.push_back(k_values[m]);
            r.values.push_back(continuity_term(family[m], psi));
        }
        r.slope = fit_loglog_slope(r.k_values, r.values);
        out.push_back(std::move(r));
    }
    for (const auto& phi : phis) {
        VanishingRate r;
        r.term = "momentum";
        r.member_id = phi.id;
        for (size_t m = 0; m < family.size(); ++m) {
            if (k_values[m] <= 0.0) continue;
            r.k_values.push_back(k_values[m]);
            r.values.push_back(momentum_term(family[m], phi));
        }
        r.slope = fit_loglog_slope(r.k_values, r.values);
        out.push_back(std::move(r));
    }
    return out;
}

Renormalizer Renormalizer::default_bump() {
    // b = s^2 below 1, s^2 w(s-1) on [1, 2] with the quintic smoothstep
    // w(y) = 1 - 10y^3 + 15y^4 - 6y^5, identically 0 beyond 2. C2 at both joins.
    auto w = [](double y) { return 1.0 - 10 * y * y * y + 15 * y * y * y * y - 6 * std::pow(y, 5); };
    auto dw = [](double y) { return -30 * y * y + 60 * y * y * y - 30 * y * y * y * y; };
    auto ddw = [](double y) { return -60 * y + 180 * y * y - 120 * y * y * y; };
    Renormalizer b;
    b.b = [w](double s) {
        if (s <= 1.0) return s * s;
        if (s >= 2.0) return 0.0;
        return s * s * w(s - 1.0);
    };
    b.db = [w, dw](double s) {
        if (s <= 1.0) return 2.0 * s;
        if (s >= 2.0) return 0.0;
        return 2.0 * s * w(s - 1.0) + s * s * dw(s - 1.0);
    };
    b.ddb = [w, dw, ddw](double s) {
        if (s <= 1.0) return 2.0;
        if (s >= 2.0) return 0.0;
        return 2.0 * w(s - 1.0) + 4.0 * s * dw(s - 1.0) + s * s * ddw(s - 1.0);
    };
    return b;
}

Renormalizer Renormalizer::zero() {
    Renormalizer b;
    auto z = [](double) { return 0.0; };
    b.b = z;
    b.db = z;
    b.ddb = z;
    return b;
}

RenormalizationBudget renormalization_budget(const Trajectory& traj, const Renormalizer& b) {
    if (!b.b || !b.db || !b.ddb)
        throw ConfigError("renormalization_budget: b, b', b'' must all be supplied");
    const Grid& g = traj.grid;
    double K = traj.params.K;
    RenormalizationBudget out;

    auto b_mass = [&](const Snapshot& s) {
        double acc = 0.0;
        for (int i = 0; i < g.n[0]; ++i) acc += b.b(s.rho[i]);
        return acc * g.dx[0];
    };
    double endpoint = b_mass(traj.snaps.back()) - b_mass(traj.snaps.front());

    double transport = time_integral(traj, [&](const MidState& m) {
        double acc = 0.0;
        for (int i = 0; i < g.n[0]; ++i) {
            double divu = ux_at_cell(m.u, g, i);
            acc += (b.db(m.rho[i]) * m.rho[i] - b.b(m.rho[i])) * divu;
        }
        return acc * g.dx[0];
    });

    double diffusion = 0.0, capture = 0.0;
    if (K > 0.0) {
        diffusion = time_integral(traj, [&](const MidState& m) {
            FaceField gr = grad_cell_to_face(m.rho, g);
            std::vector<double> f(gr.x().size());
            for (size_t j = 0; j < f.size(); ++j) {
                double rf;
                int n = g.n[0];
                if (g.bc == Bc::NoSlip)
                    rf = j == 0 ? m.rho[0]
                                : (static_cast<int>(j) == n
                                       ? m.rho[n - 1]
                                       : 0.5 * (m.rho[j - 1] + m.rho[j]));
                else
                    rf = 0.5 * (m.rho[g.wrap(static_cast<int>(j) - 1, 0)] + m.rho[j]);
                f[j] = b.ddb(rf) * gr.x()[j] * gr.x()[j];
            }
            return integrate_faces(f, g);
        });
        capture = time_integral(traj, [&](const MidState& m) {
            FaceField gr = grad_cell_to_face(m.rho, g);
            std::vector<double> f(gr.x().size());
            for (size_t j = 0; j < f.size(); ++j) {
                double rf;
                int n = g.n[0];
                if (g.bc == Bc::NoSlip)
                    rf = j == 0 ? m.rho[0]
                                : (static_cast<int>(j) == n
                                       ? m.rho[n - 1]
                                       : 0.5 * (m.rho[j - 1] + m.rho[j]));
                else
                    rf = 0.5 * (m.rho[g.wrap(static_cast<int>(j) - 1, 0)] + m.rho[j]);
                f[j] = rf <= 1.0 ? gr.x()[j] * gr.x()[j] : 0.0;
            }
            return integrate_faces(f, g);
        });
    }
    out.residual = endpoint + transport + K * diffusion;
    out.low_density_capture = K * capture;
    return out;
}

PoincareResult poincare_constant(const Grid& g) {
    if (g.dim != 1 || g.bc != Bc::NoSlip)
        throw ConfigError("poincare_constant requires a 1D no-slip grid");
    int n = g.n[0];
    int m = n - 1;  // interior face unknowns
    double dx = g.dx[0];

    // stiffness K u (tridiagonal) and the face-average mass form M u
    auto apply_M = [&](const std::vector<double>& u, std::vector<double>& out) {
        for (int j = 0; j < m; ++j) {
            double left = j > 0 ? u[j - 1] : 0.0;
            double right = j < m - 1 ? u[j + 1] : 0.0;
            out[j] = dx * (0.25 * left + 0.5 * u[j] + 0.25 * right);
        }
    };
    auto rayleigh = [&](const std::vector<double>& u) {
        double num = 0.0, den = 0.0;
        // u^T K u = sum over cells of ((u_r - u_l)/dx)^2 dx with wall zeros
        double prev = 0.0;
        for (int j = 0; j <= m; ++j) {
            double cur = j < m ? u[j] : 0.0;
            double d = (cur - prev) / dx;
            num += d * d * dx;
            prev = cur;
        }
        std::vector<double> mu(m);
        apply_M(u, mu);
        for (int j = 0; j < m; ++j) den += u[j] * mu[j];
        return num / den;
    };

    std::vector<double> u(m, 1.0), rhs_v(m), diag(m), work(m);
    PoincareResult res;
    double lambda_prev = 0.0;
    for (int it = 1; it <= 10000; ++it) {
        apply_M(u, rhs_v);
        // Thomas solve K w = M u, K = (1/dx) tridiag(-1, 2, -1)
        double a = -1.0 / dx, b = 2.0 / dx;
        diag[0] = b;
        work[0] = rhs_v[0];
        for (int j = 1; j < m; ++j) {
            double w = a / diag[j - 1];
            diag[j] = b - w * a;
            work[j] = rhs_v[j] - w * work[j - 1];
        }
        u[m - 1] = work[m - 1] / diag[m - 1];
        for (int j = m - 2; j >= 0; --j) u[j] = (work[j] - a * u[j + 1]) / diag[j];
        double norm = 0.0;
        for (double v : u) norm = std::max(norm, std::abs(v));
        for (double& v : u) v /= norm;
        double lambda = rayleigh(u);
        res.iterations = it;
        if (it > 1 && std::abs(lambda - lambda_prev) <= 1e-13 * std::abs(lambda)) {
            res.c_p = 1.0 / lambda;
            res.converged = true;
            return res;
        }
        lambda_prev = lambda;
    }
    throw RuntimeFailure("poincare_constant: inverse power iteration did not converge");
}

VelocityNorms velocity_norms(const Trajectory& traj) {
    const Grid& g = traj.grid;
    VelocityNorms out;
    out.u_sq = time_integral(traj, [&](const MidState& m) {
        auto uc = cell_velocity(m.u, g);
        double acc = 0.0;
        for (double v : uc) acc += v * v;
        return acc * g.dx[0];
    });
    out.grad_u_sq = time_integral(traj, [&](const MidState& m) {
        double acc = 0.0;
        for (int i = 0; i < g.n[0]; ++i) {
            double ux = ux_at_cell(m.u, g, i);
            acc += ux * ux;
        }
        return acc * g.dx[0];
    });
    return out;
}

TestFunctionFamily TestFunctionFamily::make(Kind kind, int max_index, const Grid& g, double T) {
    if (g.dim != 1) throw ConfigError("test functions are 1D in this build");
    double L = g.extent[0];
    double omega = 2.0 * pi / std::max(T, 1e-6);
    TestFunctionFamily fam;

    // index 0 keeps a unit time factor so the constant member is exactly
    // constant; higher members carry a phase-shifted oscillation
    auto tfactor = [omega](int k) {
        if (k == 0)
            return std::pair(std::function<double(double)>([](double) { return 1.0; }),
                             std::function<double(double)>([](double) { return 0.0; }));
        double phase = 0.7 * k;
        return std::pair(
            std::function<double(double)>(
                [omega, phase](double t) { return 1.0 + 0.5 * std::cos(omega * t + phase); }),
            std::function<double(double)>([omega, phase](double t) {
                return -0.5 * omega * std::sin(omega * t + phase);
            }));
    };
    auto tf_sup = [](int k) { return k == 0 ? 1.0 : 1.5; };

    if (kind == Kind::TensorTrig) {
        bool per = g.bc == Bc::Periodic;
        for (int k = 0; k <= max_index; ++k) {
            auto [tv, td] = tfactor(k);
            TestFunction psi;
            psi.id = "trig_psi_" + std::to_string(k);
            double w = (per ? 2.0 * pi : pi) * k / L;
            psi.val = [w, tv](double t, double x) { return std::cos(w * x) * tv(t); };
            psi.dt = [w, td](double t, double x) { return std::cos(w * x) * td(t); };
            psi.dx = [w, tv](double t, double x) { return -w * std::sin(w * x) * tv(t); };
            psi.c1_norm = tf_sup(k) * (1.0 + w);  // space C1 norm, sup over t
            fam.scalars.push_back(std::move(psi));
        }
        for (int k = 1; k <= max_index; ++k) {
            auto [tv, td] = tfactor(k);
            TestFunction phi;
            phi.id = "trig_phi_" + std::to_string(k);
            double w = (per ? 2.0 * pi : pi) * k / L;
            phi.val = [w, tv](double t, double x) { return std::sin(w * x) * tv(t); };
            phi.dt = [w, td](double t, double x) { return std::sin(w * x) * td(t); };
            phi.dx = [w, tv](double t, double x) { return w * std::cos(w * x) * tv(t); };
            phi.c1_norm = tf_sup(k) * (1.0 + w);
            phi.boundary_compatible = true;
            fam.vectors.push_back(std::move(phi));
        }
        return fam;
    }

    if (g.bc != Bc::NoSlip)
        throw ConfigError("polynomial-bubble test functions require a no-slip grid");
    for (int k = 0; k <= max_index; ++k) {
        auto [tv, td] = tfactor(k);
        TestFunction psi;
        psi.id = "poly_psi_" + std::to_string(k);
        psi.val = [k, L, tv](double t, double x) { return std::pow(x / L, k) * tv(t); };
        psi.dt = [k, L, td](double t, double x) { return std::pow(x / L, k) * td(t); };
        psi.dx = [k, L, tv](double t, double x) {
            return k == 0 ? 0.0 : k * std::pow(x / L, k - 1) / L * tv(t);
        };
        psi.c1_norm = tf_sup(k) * (1.0 + k / L);
        fam.scalars.push_back(std::move(psi));
    }
    for (int k = 1; k <= max_index; ++k) {
        auto [tv, td] = tfactor(k);
        TestFunction phi;
        phi.id = "poly_phi_" + std::to_string(k);
        // x^k (L - x) / L^(k+1): vanishes at both walls through the bubble
        auto shape = [k, L](double x) { return std::pow(x, k) * (L - x) / std::pow(L, k + 1); };
        auto dshape = [k, L](double x) {
            return (k * std::pow(x, k - 1) * L - (k + 1) * std::pow(x, k)) / std::pow(L, k + 1);
        };
        phi.val = [shape, tv](double t, double x) { return shape(x) * tv(t); };
        phi.dt = [shape, td](double t, double x) { return shape(x) * td(t); };
        phi.dx = [dshape, tv](double t, double x) { return dshape(x) * tv(t); };
        // closed-form sups: |shape| peaks at x = kL/(k+1); |shape'| at a wall
        // or at the analytic critical point (k-1)L/(k+1)
        double xpk = k * L / (k + 1.0);
        double sup_val = shape(xpk);
        double sup_d = std::max(std::abs(dshape(0.0)), std::abs(dshape(L)));
        if (k >= 2) sup_d = std::max(sup_d, std::abs(dshape((k - 1.0) * L / (k + 1.0))));
        phi.c1_norm = tf_sup(k) * (sup_val + sup_d);
        phi.boundary_compatible = true;
        fam.vectors.push_back(std::move(phi));
    }
    return fam;
}

} // namespace mvflow
