#ifndef MVFLOW_MESH_HPP
#define MVFLOW_MESH_HPP

#include <array>
#include <vector>

namespace mvflow {

enum class Bc { NoSlip, Periodic };

// Staggered uniform grid on an interval (no-slip walls, Neumann density) or
// a torus. Density unknowns live at cell centers, velocities at faces. In
// 1D with no-slip walls there are n cells and n+1 faces with the two
// boundary faces pinned to zero velocity; periodic grids have n faces per
// axis. 2D grids are periodic only.
struct Grid {
    int dim = 1;
    std::array<int, 2> n{1, 1};
    std::array<double, 2> extent{1.0, 1.0};
    Bc bc = Bc::NoSlip;
    std::array<double, 2> dx{1.0, 1.0};

    static Grid make_1d(int cells, double extent, Bc bc);
    static Grid make_2d_periodic(int nx, int ny, double Lx, double Ly);

    int cell_count() const { return n[0] * (dim == 2 ? n[1] : 1); }
    // faces carrying the `axis`-component of velocity
    int face_count(int axis) const;
    double cell_volume() const { return dx[0] * (dim == 2 ? dx[1] : 1.0); }

    double cell_x(int i) const { return (i + 0.5) * dx[0]; }
    double face_x(int j) const { return j * dx[0]; }

    // 2D flattened indexing, row-major in (i, j) with i the x index
    int cid(int i, int j) const { return j * n[0] + i; }
    int wrap(int i, int axis) const {
        int m = n[axis];
        return (i % m + m) % m;
    }
};

struct CellField {
    std::vector<double> v;
    CellField() = default;
    explicit CellField(const Grid& g, double fill = 0.0)
        : v(static_cast<size_t>(g.cell_count()), fill) {}
    double& operator[](size_t i) { return v[i]; }
    double operator[](size_t i) const { return v[i]; }
    size_t size() const { return v.size(); }
};

// comp[a] holds the a-component of a face vector field; comp[1] is unused in 1D
struct FaceField {
    std::array<std::vector<double>, 2> comp;
    FaceField() = default;
    explicit FaceField(const Grid& g, double fill = 0.0) {
        comp[0].assign(static_cast<size_t>(g.face_count(0)), fill);
        if (g.dim == 2) comp[1].assign(static_cast<size_t>(g.face_count(1)), fill);
    }
    std::vector<double>& x() { return comp[0]; }
    const std::vector<double>& x() const { return comp[0]; }
    std::vector<double>& y() { return comp[1]; }
    const std::vector<double>& y() const { return comp[1]; }
};

// Two-point difference across each face. At a no-slip wall the face value is
// pinned to 0, which is the discrete Neumann condition for the density.
FaceField grad_cell_to_face(const CellField& field, const Grid& g);

// Per-cell difference of adjacent face fluxes over dx; the
// summation-by-parts partner of grad_cell_to_face.
CellField div_face_to_cell(const FaceField& flux, const Grid& g);

// First-order upwind mass flux: u+ rho(left) + u- rho(right); zero at walls.
FaceField upwind_mass_flux(const CellField& rho, const FaceField& u, const Grid& g);

// Velocity gradient sampled at cell centers from face velocities. In 1D the
// per-cell value is u_x; in 2D entries are row-major (du_i/dx_j), with
// off-diagonal entries averaged from the four surrounding corners.
struct GradField {
    int dim = 1;
    std::vector<double> g;  // cell_count * dim * dim, row-major per cell
    double at(int cell, int i, int j) const { return g[(cell * dim + i) * dim + j]; }
    double& at(int cell, int i, int j) { return g[(cell * dim + i) * dim + j]; }
};

GradField velocity_gradient(const FaceField& u, const Grid& g);

// Newtonian stress S = mu (G + G^T - 2/3 tr G I) + eta tr G I, the 2/3
// factor kept verbatim in every dimension. In 1D this is ((4/3)mu + eta) u_x.
GradField viscous_stress(const GradField& grad_u, double mu, double eta);
double viscous_stress_1d(double ux, double mu, double eta);

// Pointwise S(G):G and the no-slip-equivalent density mu |G|^2 + lambda (tr G)^2
// with lambda = mu/3 + eta.
CellField dissipation_pointwise(const GradField& grad_u, double mu, double eta);
CellField dissipation_noslip_form(const GradField& grad_u, double mu, double eta);
double dissipation_1d(double ux, double mu, double eta);

double integrate_cells(const CellField& f, const Grid& g);
// Trapezoid-in-space over face-located values (half weights at walls).
double integrate_faces(const std::vector<double>& f, const Grid& g, int axis = 0);

} // namespace mvflow

#endif
