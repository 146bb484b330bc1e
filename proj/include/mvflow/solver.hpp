#ifndef MVFLOW_SOLVER_HPP
#define MVFLOW_SOLVER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mvflow/mesh.hpp"
#include "mvflow/pressure.hpp"
#include "mvflow/reference.hpp"

namespace mvflow {

// Model selection is by coefficients: K = 0, delta = 0 is the plain
// Navier-Stokes system; K > 0 adds the mass-diffusion and compensating
// momentum flux; delta > 0 adds the artificial pressure delta rho^Gamma.
struct ModelParams {
    double mu = 0.1;     // shear viscosity, > 0
    double eta = 0.0;    // bulk viscosity, >= 0
    double K = 0.0;      // mass diffusion, >= 0
    double delta = 0.0;  // artificial-pressure weight, >= 0
    double Gamma = 2.0;  // artificial-pressure exponent, > 1 when delta > 0
    PressureLaw law;

    void validate() const;  // throws ConfigError listing violations
};

struct FlowState {
    CellField rho;
    FaceField u;
    double time = 0.0;
};

struct Tendencies {
    CellField drho;   // d rho / dt at cells
    FaceField dmom;   // d (rho u) / dt at faces
};

// Volume sources added verbatim to the continuity (cells) and momentum
// (faces) equations.
struct Forcing {
    std::function<double(double t, double x)> mass;      // may be null
    std::function<double(double t, double x)> momentum;  // may be null
};

// Residual forcing that turns the reference pair into an exact solution of
// the model selected by params (linear in K and delta by construction).
Forcing manufactured_forcing(const ReferenceSolution& ref, const ModelParams& params);

Tendencies rhs(const FlowState& state, const ModelParams& params, const Grid& g,
               const Forcing* forcing = nullptr);

// dt = safety min( dx/(|u|+c)_max, dx^2/(2 nu), dx^2/(2K) ); c includes the
// artificial-pressure stiffness when delta > 0. Throws if dt underflows 1e-12.
double cfl_dt(const FlowState& state, const ModelParams& params, const Grid& g,
              double safety);

struct StepAccumulators {
    double dissipation = 0.0;  // int S(grad u):grad u
    double brenner = 0.0;      // K int P''(rho) |grad rho|^2
    double work = 0.0;         // forcing power (zero for unforced runs)
};

// Two-stage SSP-RK2 update of (rho, rho u); face velocities recovered by
// arithmetic-mean face density. Rejects and halves dt (up to 20 times) if
// any stage loses density positivity. Accumulates the dissipation integrals
// by stage-averaged quadrature.
FlowState step(const FlowState& state, double dt, const ModelParams& params, const Grid& g,
               StepAccumulators& acc, const Forcing* forcing = nullptr);

struct Snapshot {
    double t = 0.0;
    CellField rho;
    FaceField u;
    double dissipation_integral = 0.0;
    double brenner_integral = 0.0;
    double work_integral = 0.0;
    double mass = 0.0;
};

struct Trajectory {
    Grid grid;
    ModelParams params;
    std::vector<Snapshot> snaps;
    bool failed = false;
    std::string failure;
    long long steps_taken = 0;

    const Snapshot& at_time(double t) const;  // nearest recorded snapshot
};

struct RunSpec {
    Grid grid;
    ModelParams params;
    double T = 1.0;
    double safety = 0.4;
    std::vector<double> snapshot_times;  // defaults to {0, T} when empty
    std::function<double(double x)> rho0;
    std::function<double(double x)> u0;  // sampled at faces, walls pinned to 0
    std::optional<Forcing> forcing;
};

// Deterministic time integration to T with snapshots at the nearest
// completed step (no interpolation). On failure the partial trajectory is
// returned with the failure marker set.
Trajectory run(const RunSpec& spec);

FlowState initial_state(const RunSpec& spec);
double total_mass(const CellField& rho, const Grid& g);
// face-averaged velocity at cell centers
std::vector<double> cell_velocity(const FaceField& u, const Grid& g);

} // namespace mvflow

#endif
