#ifndef MVFLOW_DIAGNOSTICS_HPP
#define MVFLOW_DIAGNOSTICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "mvflow/mesh.hpp"
#include "mvflow/pressure.hpp"
#include "mvflow/solver.hpp"

namespace mvflow {

// Space-time test functions with analytic derivatives and closed-form C1
// norms. Scalar members psi test the continuity equation; vector members
// phi vanish at no-slip walls and test the momentum equation.
struct TestFunction {
    std::string id;
    std::function<double(double t, double x)> val;
    std::function<double(double t, double x)> dt;
    std::function<double(double t, double x)> dx;
    double c1_norm = 1.0;  // sup |f| + sup |grad f| over [0,T] x domain
    bool boundary_compatible = false;  // vanishes at the walls
};

struct TestFunctionFamily {
    enum class Kind { TensorTrig, PolynomialBubble };
    std::vector<TestFunction> scalars;  // psi
    std::vector<TestFunction> vectors;  // phi, phi = 0 on the walls

    static TestFunctionFamily make(Kind kind, int max_index, const Grid& g, double T);
};

struct AprioriReport {
    double sup_potential = 0.0;       // sup_t int P(rho)
    double sup_kinetic = 0.0;         // sup_t int rho |u|^2
    double dissipation = 0.0;         // int int S(grad u):grad u
    double grad_u_sq = 0.0;           // int int |grad u|^2
    double u_sq = 0.0;                // int int |u|^2
    double brenner_weighted = 0.0;    // K int int (p'(rho)/rho) |grad rho|^2

    std::vector<double> entries() const {
        return {sup_potential, sup_kinetic, dissipation, grad_u_sq, u_sq, brenner_weighted};
    }
    static std::vector<std::string> entry_names();
};

double energy(const FlowState& state, const PressureLaw& law, const Grid& g);
double energy(const Snapshot& snap, const PressureLaw& law, const Grid& g);

struct EnergyBudget {
    std::vector<double> t;         // interval right endpoints
    std::vector<double> residual;  // E(t2) - E(t1) + Ddiss + Dbrenner - Dwork
    double max_abs = 0.0;
    double max_signed = 0.0;  // most positive residual (inequality direction)
};

EnergyBudget energy_budget(const Trajectory& traj, const PressureLaw& law);

AprioriReport apriori_bounds(const Trajectory& traj, const ModelParams& params);

// max over K of each entry within `factor` of the ladder median
struct UniformityCheck {
    std::vector<std::string> entry;
    std::vector<double> max_over_median;
    bool pass = true;
};
UniformityCheck apriori_uniformity(const std::vector<AprioriReport>& reports, double factor);

// Weak-form residuals over [t0, tau], tau the last snapshot; space-time
// integrals by midpoint-in-time over snapshot intervals.
double weak_residual_continuity(const Trajectory& traj, const TestFunction& psi);
double weak_residual_momentum(const Trajectory& traj, const TestFunction& phi);

// Two-grid Richardson estimate of the snapshot-quadrature error: the
// residual recomputed on every other snapshot, gap / 3.
double weak_residual_time_quadrature_error(const Trajectory& traj, const TestFunction& psi,
                                           bool momentum);

struct VanishingRate {
    std::string term;              // "continuity" or "momentum"
    std::string member_id;         // test function id
    std::vector<double> k_values;
    std::vector<double> values;    // |K intint ...| per K
    double slope = 0.0;            // log-log fit vs K
};

// K-weighted integrals K int int grad rho . grad psi and
// K int int (u grad rho) . grad phi per family member, with fitted slopes.
// Requires >= 3 members with K > 0.
std::vector<VanishingRate> vanishing_k_terms(const std::vector<Trajectory>& family,
                                             const std::vector<double>& k_values,
                                             const std::vector<TestFunction>& psis,
                                             const std::vector<TestFunction>& phis);

// C2 renormalizer with compact support in [0, inf)
struct Renormalizer {
    std::function<double(double)> b, db, ddb;
    // b(s) = s^2 for s <= 1, quintic-smoothstep cut to 0 on [1, 2]
    static Renormalizer default_bump();
    static Renormalizer zero();
};

struct RenormalizationBudget {
    double residual = 0.0;             // [int b]_0^tau + intint (b' rho - b) div u + K intint b'' |grad rho|^2
    double low_density_capture = 0.0;  // K intint_{rho <= 1} |grad rho|^2
};

RenormalizationBudget renormalization_budget(const Trajectory& traj, const Renormalizer& b);

struct PoincareResult {
    double c_p = 0.0;
    int iterations = 0;
    bool converged = false;
};

// 1/lambda_1 of the discrete Dirichlet eigenproblem paired with the
// face-average mass form used by all velocity quadratures; inverse power
// iteration with a tridiagonal solve.
PoincareResult poincare_constant(const Grid& g);

// intint <u^2> (face-averaged, cell quadrature) and intint |grad u|^2 for a
// trajectory; used by the (KoPo)-style audit.
struct VelocityNorms {
    double u_sq = 0.0;
    double grad_u_sq = 0.0;
};
VelocityNorms velocity_norms(const Trajectory& traj);

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace mvflow

#endif
