#ifndef MVFLOW_REFERENCE_HPP
#define MVFLOW_REFERENCE_HPP

#include <functional>
#include <string>

#include "mvflow/mesh.hpp"

namespace mvflow {

// Smooth reference pair (r, U) with the analytic derivatives the forcing
// residual and the relative-energy experiments need. r must be strictly
// positive; U must vanish at no-slip walls.
struct ReferenceSolution {
    using Fn = std::function<double(double t, double x)>;
    Fn r, r_t, r_x, r_xx;
    Fn U, U_t, U_x, U_xx;
    std::string name;

    // Built-in manufactured pair on [0, L]:
    //   r = 2 + 1/2 sin(2 pi (x - t) / L),  U = sin^2(pi x / L) sin(2 pi t)
    // inf r = 3/2 and U(0) = U(L) = 0 exactly.
    static ReferenceSolution manufactured(double L);
    static ReferenceSolution rest(double rho0);

    // Throws ConfigError if r <= 0 anywhere on the sampled lattice or U
    // fails to vanish at the walls of a no-slip grid.
    void check_admissible(const Grid& g, double T) const;
};

} // namespace mvflow

#endif
