#include "mvflow/reference.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mvflow/errors.hpp"

namespace mvflow {

using std::numbers::pi;

ReferenceSolution ReferenceSolution::manufactured(double L) {
    ReferenceSolution ref;
    ref.name = "manufactured";
    double k = 2.0 * pi / L;
    double q = pi / L;
    ref.r = [k](double t, double x) { return 2.0 + 0.5 * std::sin(k * (x - t)); };
    ref.r_t = [k](double t, double x) { return -0.5 * k * std::cos(k * (x - t)); };
    ref.r_x = [k](double t, double x) { return 0.5 * k * std::cos(k * (x - t)); };
    ref.r_xx = [k](double t, double x) { return -0.5 * k * k * std::sin(k * (x - t)); };
    ref.U = [q](double t, double x) {
        double s = std::sin(q * x);
        return s * s * std::sin(2.0 * pi * t);
    };
    ref.U_t = [q](double t, double x) {
        double s = std::sin(q * x);
        return s * s * 2.0 * pi * std::cos(2.0 * pi * t);
    };
    ref.U_x = [q](double t, double x) {
        return 2.0 * q * std::sin(q * x) * std::cos(q * x) * std::sin(2.0 * pi * t);
    };
    ref.U_xx = [q](double t, double x) {
        return 2.0 * q * q * std::cos(2.0 * q * x) * std::sin(2.0 * pi * t);
    };
    return ref;
}

ReferenceSolution ReferenceSolution::rest(double rho0) {
    ReferenceSolution ref;
    ref.name = "rest";
    auto zero = [](double, double) { return 0.0; };
    ref.r = [rho0](double, double) { return rho0; };
    ref.r_t = zero;
    ref.r_x = zero;
    ref.r_xx = zero;
    ref.U = zero;
    ref.U_t = zero;
    ref.U_x = zero;
    ref.U_xx = zero;
    return ref;
}

void ReferenceSolution::check_admissible(const Grid& g, double T) const {
    int nt = 17;
    for (int k = 0; k <= nt; ++k) {
        double t = T * k / nt;
        for (int i = 0; i < g.n[0]; ++i) {
            double rv = r(t, g.cell_x(i));
            if (!(rv > 0.0)) {
                std::ostringstream os;
                os << "reference density not positive: r(" << t << ", " << g.cell_x(i)
                   << ") = " << rv;
                throw ConfigError(os.str());
            }
        }
        if (g.bc == Bc::NoSlip) {
            if (std::abs(U(t, 0.0)) > 1e-14 || std::abs(U(t, g.extent[0])) > 1e-14)
                throw ConfigError("reference velocity does not vanish at the walls");
        }
    }
}

} // namespace mvflow
