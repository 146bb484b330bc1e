#include "mvflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mvflow/errors.hpp"

namespace mvflow {

void ModelParams::validate() const {
    std::ostringstream bad;
    if (!(mu > 0.0)) bad << "mu must be > 0 (got " << mu << "); ";
    if (eta < 0.0) bad << "eta must be >= 0; ";
    if (K < 0.0) bad << "K must be >= 0; ";
    if (delta < 0.0) bad << "delta must be >= 0; ";
    if (delta > 0.0 && !(Gamma > 1.0)) bad << "Gamma must be > 1 when delta > 0; ";
    if (!bad.str().empty()) throw ConfigError("model: " + bad.str());
}

namespace {

void require_1d(const Grid& g, const char* what) {
    if (g.dim != 1)
        throw ConfigError(std::string(what) +
                          ": time integration supports 1D grids in this build");
}

double face_density(const CellField& rho, const Grid& g, int j) {
    int n = g.n[0];
    if (g.bc == Bc::NoSlip) {
        if (j == 0) return rho[0];
        if (j == n) return rho[n - 1];
        return 0.5 * (rho[j - 1] + rho[j]);
    }
    return 0.5 * (rho[g.wrap(j - 1, 0)] + rho[j]);
}

void check_finite_tend(const Tendencies& t, const char* stage) {
    for (size_t i = 0; i < t.drho.size(); ++i)
        if (!std::isfinite(t.drho[i]))
            throw RuntimeFailure(std::string("non-finite continuity tendency at cell ") +
                                 std::to_string(i) + " (" + stage + ")");
    for (size_t j = 0; j < t.dmom.x().size(); ++j)
        if (!std::isfinite(t.dmom.x()[j]))
            throw RuntimeFailure(std::string("non-finite momentum tendency at face ") +
                                 std::to_string(j) + " (" + stage + ")");
}

} // namespace

Forcing manufactured_forcing(const ReferenceSolution& ref, const ModelParams& params) {
    double mu = params.mu, eta = params.eta, K = params.K;
    double delta = params.delta, Gamma = params.Gamma;
    PressureLaw law = params.law;
    Forcing f;
    f.mass = [ref, K](double t, double x) {
        return ref.r_t(t, x) + ref.r_x(t, x) * ref.U(t, x) + ref.r(t, x) * ref.U_x(t, x) -
               K * ref.r_xx(t, x);
    };
    f.momentum = [ref, mu, eta, K, delta, Gamma, law](double t, double x) {
        double r = ref.r(t, x), rx = ref.r_x(t, x), rxx = ref.r_xx(t, x), rt = ref.r_t(t, x);
        double U = ref.U(t, x), Ut = ref.U_t(t, x), Ux = ref.U_x(t, x), Uxx = ref.U_xx(t, x);
        double conv = rx * U * U + 2.0 * r * U * Ux;
        double press = pressure_derivative(law, r) * rx;
        if (delta > 0.0) press += delta * Gamma * std::pow(r, Gamma - 1.0) * rx;
        double visc = ((4.0 / 3.0) * mu + eta) * Uxx;
        double brenner = K * (Ux * rx + U * rxx);
        return rt * U + r * Ut + conv + press - visc - brenner;
    };
    return f;
}

Tendencies rhs(const FlowState& state, const ModelParams& params, const Grid& g,
               const Forcing* forcing) {
    require_1d(g, "rhs");
    int n = g.n[0];
    double dx = g.dx[0];
    bool periodic = (g.bc == Bc::Periodic);
    int nf = g.face_count(0);

    const auto& rho = state.rho;
    const auto& u = state.u.x();

    Tendencies out;
    out.drho = CellField(g);
    out.dmom = FaceField(g);
    auto& drho = out.drho;
    auto& dmom = out.dmom.x();

    // continuity: -div(upwind flux) + K Lap rho with Neumann closure
    FaceField mass_flux = upwind_mass_flux(rho, state.u, g);
    CellField divF = div_face_to_cell(mass_flux, g);
    if (params.K > 0.0) {
        FaceField gr = grad_cell_to_face(rho, g);
        CellField lap = div_face_to_cell(gr, g);
        for (int i = 0; i < n; ++i) drho[i] = -divF[i] + params.K * lap[i];
    } else {
        for (int i = 0; i < n; ++i) drho[i] = -divF[i];
    }

    // momentum convection: cell flux C_i = <mass flux>_i * upwinded face velocity
    std::vector<double> conv(n);
    auto uface = [&](int j) { return u[periodic ? g.wrap(j, 0) : j]; };
    auto fface = [&](int j) { return mass_flux.x()[periodic ? g.wrap(j, 0) : j]; };
    for (int i = 0; i < n; ++i) {
        double fbar = 0.5 * (fface(i) + fface(i + 1));
        conv[i] = fbar * (fbar > 0.0 ? uface(i) : uface(i + 1));
    }

    // total pressure and viscous stress at cells
    std::vector<double> ptot(n), stress(n);
    for (int i = 0; i < n; ++i) {
        ptot[i] = pressure(params.law, rho[i]);
        if (params.delta > 0.0) ptot[i] += params.delta * std::pow(rho[i], params.Gamma);
        double ux = (uface(i + 1) - uface(i)) / dx;
        stress[i] = viscous_stress_1d(ux, params.mu, params.eta);
    }

    // Brenner momentum flux K u (grad rho) sampled at cells
    std::vector<double> bren;
    if (params.K > 0.0) {
        FaceField gr = grad_cell_to_face(rho, g);
        bren.resize(n);
        auto gface = [&](int j) { return gr.x()[periodic ? g.wrap(j, 0) : j]; };
        for (int i = 0; i < n; ++i) {
            double ubar = 0.5 * (uface(i) + uface(i + 1));
            double gbar = 0.5 * (gface(i) + gface(i + 1));
            bren[i] = params.K * ubar * gbar;
        }
    }

    auto cell = [&](const std::vector<double>& c, int i) { return c[g.wrap(i, 0)]; };
    int jlo = periodic ? 0 : 1;
    int jhi = periodic ? nf : n;  // no-slip walls keep dmom = 0
    for (int j = jlo; j < jhi; ++j) {
        int il = periodic ? g.wrap(j - 1, 0) : j - 1;
        double d = -(cell(conv, j) - conv[il]) / dx;
        d -= (cell(ptot, j) - ptot[il]) / dx;
        d += (cell(stress, j) - stress[il]) / dx;
        if (params.K > 0.0) d += (cell(bren, j) - bren[il]) / dx;
        dmom[j] = d;
    }

    if (forcing) {
        if (forcing->mass)
            for (int i = 0; i < n; ++i) drho[i] += forcing->mass(state.time, g.cell_x(i));
        if (forcing->momentum)
            for (int j = jlo; j < jhi; ++j)
                dmom[j] += forcing->momentum(state.time, g.face_x(j));
    }

    check_finite_tend(out, "rhs");
    return out;
}

double cfl_dt(const FlowState& state, const ModelParams& params, const Grid& g,
              double safety) {
    require_1d(g, "cfl_dt");
    double umax = 0.0;
    for (double v : state.u.x()) umax = std::max(umax, std::abs(v));
    double cmax = 0.0, rho_min = std::numeric_limits<double>::infinity();
    for (double r : state.rho.v) {
        rho_min = std::min(rho_min, r);
        double c2 = pressure_derivative(params.law, std::max(r, 1e-300));
        if (params.delta > 0.0)
            c2 += params.delta * params.Gamma * std::pow(r, params.Gamma - 1.0);
        cmax = std::max(cmax, std::sqrt(std::max(c2, 0.0)));
    }
    double dx = g.dx[0];
    double dt = dx / std::max(umax + cmax, 1e-300);
    double nu = ((4.0 / 3.0) * params.mu + params.eta) / std::max(rho_min, 1e-300);
    dt = std::min(dt, dx * dx / (2.0 * nu));
    if (params.K > 0.0) dt = std::min(dt, dx * dx / (2.0 * params.K));
    dt *= safety;
    if (!(dt > 1e-12))
        throw RuntimeFailure("cfl_dt underflow: dt = " + std::to_string(dt));
    return dt;
}

namespace {

struct Conserved {
    CellField rho;
    std::vector<double> mom;  // at faces
};

Conserved to_conserved(const FlowState& s, const Grid& g) {
    Conserved c;
    c.rho = s.rho;
    int nf = g.face_count(0);
    c.mom.resize(nf);
    for (int j = 0; j < nf; ++j) c.mom[j] = face_density(s.rho, g, j) * s.u.x()[j];
    return c;
}

FlowState to_state(const Conserved& c, const Grid& g, double t) {
    FlowState s;
    s.rho = c.rho;
    s.u = FaceField(g);
    int nf = g.face_count(0);
    for (int j = 0; j < nf; ++j) s.u.x()[j] = c.mom[j] / face_density(c.rho, g, j);
    if (g.bc == Bc::NoSlip) {
        s.u.x().front() = 0.0;
        s.u.x().back() = 0.0;
    }
    s.time = t;
    return s;
}

bool positive(const CellField& rho) {
    for (double v : rho.v)
        if (!(v > 0.0)) return false;
    return true;
}

double dissipation_rate(const FlowState& s, const ModelParams& p, const Grid& g) {
    int n = g.n[0];
    bool periodic = g.bc == Bc::Periodic;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double ur = s.u.x()[periodic ? g.wrap(i + 1, 0) : i + 1];
        double ux = (ur - s.u.x()[i]) / g.dx[0];
        acc += dissipation_1d(ux, p.mu, p.eta);
    }
    return acc * g.dx[0];
}

double brenner_rate(const FlowState& s, const ModelParams& p, const Grid& g) {
    if (p.K <= 0.0) return 0.0;
    FaceField gr = grad_cell_to_face(s.rho, g);
    double acc = 0.0;
    int nf = g.face_count(0);
    for (int j = 0; j < nf; ++j) {
        double rf = face_density(s.rho, g, j);
        double gsq = gr.x()[j] * gr.x()[j];
        acc += pressure_derivative(p.law, rf) / rf * gsq;
    }
    return p.K * acc * g.dx[0];
}

double work_rate(const FlowState& s, const ModelParams& p, const Grid& g,
                 const Forcing* forcing) {
    if (!forcing) return 0.0;
    double acc = 0.0;
    int n = g.n[0];
    bool periodic = g.bc == Bc::Periodic;
    if (forcing->momentum) {
        int jlo = periodic ? 0 : 1;
        int jhi = periodic ? n : n;
        for (int j = jlo; j < jhi; ++j)
            acc += forcing->momentum(s.time, g.face_x(j)) * s.u.x()[j];
    }
    if (forcing->mass) {
        for (int i = 0; i < n; ++i) {
            double ur = s.u.x()[periodic ? g.wrap(i + 1, 0) : i + 1];
            double ubar = 0.5 * (s.u.x()[i] + ur);
            double gsrc = forcing->mass(s.time, g.cell_x(i));
            acc += gsrc * (pressure_potential_derivative(p.law, s.rho[i]) - 0.5 * ubar * ubar);
        }
    }
    return acc * g.dx[0];
}

} // namespace

FlowState step(const FlowState& state, double dt, const ModelParams& params, const Grid& g,
               StepAccumulators& acc, const Forcing* forcing) {
    require_1d(g, "step");
    int nf = g.face_count(0);
    double dt_try = dt;
    for (int attempt = 0; attempt <= 20; ++attempt) {
        Conserved c0 = to_conserved(state, g);

        Tendencies k1 = rhs(state, params, g, forcing);
        Conserved c1 = c0;
        for (int i = 0; i < g.n[0]; ++i) c1.rho[i] += dt_try * k1.drho[i];
        for (int j = 0; j < nf; ++j) c1.mom[j] += dt_try * k1.dmom.x()[j];
        if (!positive(c1.rho)) {
            dt_try *= 0.5;
            continue;
        }
        FlowState s1 = to_state(c1, g, state.time + dt_try);

        Tendencies k2 = rhs(s1, params, g, forcing);
        Conserved c2 = c1;
        for (int i = 0; i < g.n[0]; ++i)
            c2.rho[i] = 0.5 * (c0.rho[i] + c1.rho[i] + dt_try * k2.drho[i]);
        for (int j = 0; j < nf; ++j)
            c2.mom[j] = 0.5 * (c0.mom[j] + c1.mom[j] + dt_try * k2.dmom.x()[j]);
        if (!positive(c2.rho)) {
            dt_try *= 0.5;
            continue;
        }
        FlowState out = to_state(c2, g, state.time + dt_try);

        // stage-averaged quadrature of the dissipation integrals
        acc.dissipation +=
            0.5 * dt_try * (dissipation_rate(state, params, g) + dissipation_rate(s1, params, g));
        acc.brenner +=
            0.5 * dt_try * (brenner_rate(state, params, g) + brenner_rate(s1, params, g));
        if (forcing)
            acc.work += 0.5 * dt_try *
                        (work_rate(state, params, g, forcing) + work_rate(s1, params, g, forcing));
        return out;
    }
    double rmin = *std::min_element(state.rho.v.begin(), state.rho.v.end());
    std::ostringstream os;
    os << "positivity failure after 20 dt halvings at t = " << state.time
       << " (dt = " << dt_try << ", min rho = " << rmin << ")";
    throw RuntimeFailure(os.str());
}

double total_mass(const CellField& rho, const Grid& g) { return integrate_cells(rho, g); }

std::vector<double> cell_velocity(const FaceField& u, const Grid& g) {
    int n = g.n[0];
    bool periodic = g.bc == Bc::Periodic;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double ur = u.x()[periodic ? g.wrap(i + 1, 0) : i + 1];
        out[i] = 0.5 * (u.x()[i] + ur);
    }
    return out;
}

FlowState initial_state(const RunSpec& spec) {
    const Grid& g = spec.grid;
    FlowState s;
    s.rho = CellField(g);
    s.u = FaceField(g);
    s.time = 0.0;
    for (int i = 0; i < g.n[0]; ++i) s.rho[i] = spec.rho0(g.cell_x(i));
    int nf = g.face_count(0);
    for (int j = 0; j < nf; ++j) s.u.x()[j] = spec.u0(g.face_x(j));
    if (g.bc == Bc::NoSlip) {
        s.u.x().front() = 0.0;
        s.u.x().back() = 0.0;
    }
    if (!positive(s.rho)) throw ConfigError("initial density must be positive everywhere");
    return s;
}

const Snapshot& Trajectory::at_time(double t) const {
    if (snaps.empty()) throw RuntimeFailure("trajectory has no snapshots");
    size_t best = 0;
    for (size_t k = 1; k < snaps.size(); ++k)
        if (std::abs(snaps[k].t - t) < std::abs(snaps[best].t - t)) best = k;
    return snaps[best];
}

Trajectory run(const RunSpec& spec) {
    spec.params.validate();
    require_1d(spec.grid, "run");
    Trajectory traj;
    traj.grid = spec.grid;
    traj.params = spec.params;

    std::vector<double> req = spec.snapshot_times;
    if (req.empty()) req = {0.0, spec.T};
    std::sort(req.begin(), req.end());
    req.erase(std::unique(req.begin(), req.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              req.end());

    FlowState state = initial_state(spec);
    StepAccumulators acc;
    const Forcing* forcing = spec.forcing ? &*spec.forcing : nullptr;

    auto record = [&](const FlowState& s) {
        Snapshot snap;
        snap.t = s.time;
        snap.rho = s.rho;
        snap.u = s.u;
        snap.dissipation_integral = acc.dissipation;
        snap.brenner_integral = acc.brenner;
        snap.work_integral = acc.work;
        snap.mass = total_mass(s.rho, spec.grid);
        traj.snaps.push_back(std::move(snap));
    };

    size_t next_req = 0;
    while (next_req < req.size() && req[next_req] <= 0.0) {
        record(state);
        ++next_req;
    }
    if (spec.T <= 0.0) {
        if (traj.snaps.empty()) record(state);
        return traj;
    }

    FlowState prev = state;
    StepAccumulators prev_acc = acc;
    try {
        while (state.time < spec.T - 1e-14 && next_req < req.size()) {
            double dt = cfl_dt(state, spec.params, spec.grid, spec.safety);
            dt = std::min(dt, spec.T - state.time);
            // land exactly on the next requested time so families built from
            // sweeps share snapshot times bitwise
            if (req[next_req] > state.time)
                dt = std::min(dt, req[next_req] - state.time);
            prev = state;
            prev_acc = acc;
            state = step(state, dt, spec.params, spec.grid, acc, forcing);
            ++traj.steps_taken;
            while (next_req < req.size() && state.time >= req[next_req] - 1e-14) {
                // nearest completed step wins; no interpolation
                if (std::abs(prev.time - req[next_req]) < std::abs(state.time - req[next_req])) {
                    std::swap(acc, prev_acc);
                    std::swap(state, prev);
                    record(state);
                    std::swap(state, prev);
                    std::swap(acc, prev_acc);
                } else {
                    record(state);
                }
                ++next_req;
            }
        }
    } catch (const RuntimeFailure& e) {
        traj.failed = true;
        traj.failure = e.what();
        record(state);
    }
    return traj;
}

} // namespace mvflow
