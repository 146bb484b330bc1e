#ifndef MVFLOW_PRESSURE_HPP
#define MVFLOW_PRESSURE_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mvflow {

// Barotropic pressure law p(rho) = a rho^gamma together with its pressure
// potential P, the primitive with P''(s) = p'(s)/s and P(1) = 0. The
// tabulated mode interpolates user-supplied (s, p) samples and evaluates P
// by adaptive quadrature of the defining integral.
struct PressureLaw {
    enum class Mode { PowerLaw, Tabulated };

    double a = 1.0;      // pressure coefficient, > 0
    double gamma = 2.0;  // adiabatic exponent, >= 1
    Mode mode = Mode::PowerLaw;

    // tabulated mode only: strictly increasing s-samples with p-values
    std::vector<double> tab_s;
    std::vector<double> tab_p;

    static PressureLaw power_law(double a, double gamma);
    static PressureLaw tabulated(std::vector<double> s, std::vector<double> p);
};

struct ValidationClause {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationClause> clauses;
    std::vector<double> sample_points;
    bool all_pass() const;
};

// Checks the coercivity hypotheses on a log-spaced sample grid up to s = 1e6.
// The two liminf clauses are evaluated as ratio lower bounds at the largest
// samples. Non-finite evaluation anywhere throws RuntimeFailure naming the
// offending s.
ValidationReport validate_law(const PressureLaw& law);

double pressure(const PressureLaw& law, double s);          // p(s), s >= 0
double pressure_derivative(const PressureLaw& law, double s);  // p'(s), s > 0

// P(s) = s * int_1^s p(z)/z^2 dz. Closed form for the power law
// (a(s^g - s)/(g-1), or a s log s at g = 1); adaptive quadrature otherwise.
double pressure_potential(const PressureLaw& law, double s);
double pressure_potential_derivative(const PressureLaw& law, double s);  // P'(s), s > 0

// Bregman distance of P: P(s) - P'(r)(s - r) - P(r). Nonnegative for
// convex P (gamma >= 1). Requires r > 0.
double helmholtz_distance(const PressureLaw& law, double s, double r);

// Smallest C with p(s) <= C P(s) on s in [2, 1e6] (log-spaced scan).
double fit_growth_constant(const PressureLaw& law);

namespace quadrature {
struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
};
// Adaptive Simpson on [a, b]; used as the oracle for P in tests and as the
// production path for tabulated laws.
Result adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 48);
} // namespace quadrature

} // namespace mvflow

#endif
