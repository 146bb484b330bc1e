#ifndef MVFLOW_YOUNG_MEASURE_HPP
#define MVFLOW_YOUNG_MEASURE_HPP

#include <functional>
#include <string>
#include <vector>

#include "mvflow/diagnostics.hpp"
#include "mvflow/mesh.hpp"
#include "mvflow/pressure.hpp"
#include "mvflow/solver.hpp"

namespace mvflow {

// Descriptor of the shared initial data a family is declared to emanate
// from; the DD1 validator pins its t = 0 endpoint to this profile, so a
// family whose members secretly start elsewhere fails the continuity check.
struct InitialDataSpec {
    std::function<double(double x)> rho0;
    std::function<double(double x)> u0;
    std::string label;
};

// A parameter ladder of trajectories sharing snapshot times. Members keep
// their own grids; lattice restriction for the measure happens at build
// time (cell averages for lattice fields, sub-cell sampling for atoms).
struct SolutionFamily {
    std::string param_name;         // "K", "delta" or "h"
    std::vector<double> param_values;  // descending, positive
    std::vector<Trajectory> members;   // same order as param_values
    InitialDataSpec common_initial;
    int lattice_cells = 0;  // common coarse lattice (must divide member grids)

    void validate(bool require_three = true) const;
    double extent() const { return members.front().grid.extent[0]; }
    std::vector<double> snap_times() const;
    // members entering the measure: the finest ceil(m/2), all when m <= 2
    std::vector<size_t> finest_half() const;
};

SolutionFamily make_family(std::string param_name, std::vector<double> values,
                           std::vector<Trajectory> members, InitialDataSpec common_initial,
                           int lattice_cells);

// Per (lattice cell, snapshot) atom list over state values (s, v), weights
// summing to one. Identical sampled values merge into a single atom, so a
// family of identical constant states yields one Dirac atom per bin.
struct EmpiricalYoungMeasure {
    int lattice_cells = 0;
    double extent = 0.0;
    std::vector<double> snap_times;
    // bin (cell i, snapshot k) at index k * lattice_cells + i
    struct Bin {
        std::vector<double> s, v, w;
    };
    std::vector<Bin> bins;

    int bin_index(int cell, int snap) const { return snap * lattice_cells + cell; }
    double dx() const { return extent / lattice_cells; }
};

// sub_samples: stratified evaluation points per lattice cell (golden-ratio
// offset, deterministic); atom count per bin capped (default 256).
EmpiricalYoungMeasure build_empirical_measure(const SolutionFamily& family, int sub_samples,
                                              int atom_cap = 256);

// <nu; F> per bin at one snapshot; throws naming the atom if F is not
// finite there.
std::vector<double> moment(const EmpiricalYoungMeasure& eym,
                           const std::function<double(double s, double v)>& F, int snap);

struct DefectReport {
    std::vector<double> tau;        // snapshot times
    std::vector<double> E_inf;      // energy concentration series
    std::vector<double> sigma_inf_series;  // gradient defect over [0, tau]
    double sigma_inf = 0.0;         // total over [0, T]
    std::vector<double> D;          // E_inf + sigma_inf([0,tau])
    std::vector<double> chi, xi;    // fitted residual-bound profiles
    std::vector<double> rC_bound, rM_bound;  // chi(t) D(t) max||psi||, xi(t) D(t) max||phi||
};

// Weak-* limits approximated by the finest family member; defects are the
// gaps between the finest member's energy/dissipation and the measure
// moments. chi and xi are the smallest profiles making the residual bounds
// hold for the supplied test family.
DefectReport estimate_defects(const SolutionFamily& family, const EmpiricalYoungMeasure& eym,
                              const PressureLaw& law, const TestFunctionFamily& tests);

// ---- Lemma-style domination check on synthetic families ----

struct SyntheticMember {
    std::function<double(double x)> z;
    std::vector<double> breakpoints;  // discontinuities inside (0, 1)
    double index = 0.0;               // the family parameter n
};

struct SyntheticFamily {
    std::vector<SyntheticMember> members;  // ascending index, last = finest
    std::string label;
};

SyntheticFamily concentration_family(const std::vector<int>& ns);  // sqrt(n) 1_(0,1/n)
SyntheticFamily oscillation_family(const std::vector<int>& ns);    // sin(2 pi n x)
SyntheticFamily mixed_family(const std::vector<int>& ns);          // oscillation + interior spike

struct DominationWindow {
    std::string id;
    std::function<double(double x)> phi;  // smooth, >= 0
};

struct DominationResult {
    bool precondition_ok = true;   // |F| <= G on every atom
    bool pass = true;
    struct PerWindow {
        std::string window;
        double F_inf = 0.0;  // <F_infinity, phi>
        double G_inf = 0.0;  // <G_infinity, phi>
        double margin = 0.0;  // G_inf + tol - |F_inf|
        bool ok = true;
    };
    std::vector<PerWindow> windows;
};

// F_infinity and G_infinity as weak-limit surrogates: exact integrals of the
// finest member minus lattice-sampled measure moments, paired with smooth
// windows. Asserts |<F_inf, phi>| <= <G_inf, phi> + tol per window.
DominationResult lemma_domination_check(const std::function<double(double)>& F,
                                        const std::function<double(double)>& G,
                                        const SyntheticFamily& family,
                                        const std::vector<DominationWindow>& windows,
                                        int lattice_cells, int sub_samples, double tol);

std::vector<DominationWindow> default_windows();

// ---- Definition-level validation ----

struct DD1Tolerances {
    double residual_tol = 1e-3;  // additive slack on the residual bounds
    double energy_tol = 1e-3;    // slack on the energy inequality
    double kopo_tol = 1e-6;      // slack on the Poincare-type inequality
    double chi_cap = 100.0;      // fitted chi/xi beyond this fail the check
    double defect_floor = 1e-14;
};

struct DD1ValidationReport {
    struct Check {
        std::string name;
        bool pass = true;
        double worst_margin = 0.0;  // most negative (bound - |residual|)
        std::string detail;
    };
    Check continuity, momentum, energy_inequality, kopo;
    double chi_max = 0.0, xi_max = 0.0;
    bool all_pass() const {
        return continuity.pass && momentum.pass && energy_inequality.pass && kopo.pass;
    }
};

DD1ValidationReport validate_dmv(const SolutionFamily& family,
                                 const EmpiricalYoungMeasure& eym, const DefectReport& report,
                                 const PressureLaw& law, const TestFunctionFamily& tests,
                                 const DD1Tolerances& tol);

} // namespace mvflow

#endif
