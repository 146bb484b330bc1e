#include "mvflow/mesh.hpp"

#include <cmath>
#include <string>

#include "mvflow/errors.hpp"

namespace mvflow {

Grid Grid::make_1d(int cells, double extent, Bc bc) {
    if (cells < 2) throw ConfigError("grid: cells must be >= 2, got " + std::to_string(cells));
    if (!(extent > 0.0)) throw ConfigError("grid: extent must be > 0");
    Grid g;
    g.dim = 1;
    g.n = {cells, 1};
    g.extent = {extent, 1.0};
    g.bc = bc;
    g.dx = {extent / cells, 1.0};
    return g;
}

Grid Grid::make_2d_periodic(int nx, int ny, double Lx, double Ly) {
    if (nx < 2 || ny < 2) throw ConfigError("grid: 2D cells must be >= 2 per axis");
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw ConfigError("grid: extent must be > 0");
    Grid g;
    g.dim = 2;
    g.n = {nx, ny};
    g.extent = {Lx, Ly};
    g.bc = Bc::Periodic;
    g.dx = {Lx / nx, Ly / ny};
    return g;
}

int Grid::face_count([[maybe_unused]] int axis) const {
    if (dim == 1) return bc == Bc::NoSlip ? n[0] + 1 : n[0];
    return n[0] * n[1];  // 2D periodic: one `axis`-face per cell
}

namespace {

void check_cell_size(const CellField& f, const Grid& g, const char* op) {
    if (f.size() != static_cast<size_t>(g.cell_count()))
        throw ConfigError(std::string(op) + ": cell field size " + std::to_string(f.size()) +
                          " does not match grid cells " + std::to_string(g.cell_count()));
}

void check_face_size(const FaceField& f, const Grid& g, const char* op) {
    for (int a = 0; a < g.dim; ++a)
        if (f.comp[a].size() != static_cast<size_t>(g.face_count(a)))
            throw ConfigError(std::string(op) + ": face field axis " + std::to_string(a) +
                              " size mismatch");
}

} // namespace

FaceField grad_cell_to_face(const CellField& field, const Grid& g) {
    check_cell_size(field, g, "grad_cell_to_face");
    FaceField out(g);
    if (g.dim == 1) {
        int n = g.n[0];
        double idx = 1.0 / g.dx[0];
        if (g.bc == Bc::NoSlip) {
            for (int j = 1; j < n; ++j) out.x()[j] = (field[j] - field[j - 1]) * idx;
            out.x()[0] = 0.0;
            out.x()[n] = 0.0;
        } else {
            for (int j = 0; j < n; ++j)
                out.x()[j] = (field[j] - field[g.wrap(j - 1, 0)]) * idx;
        }
        return out;
    }
    int nx = g.n[0], ny = g.n[1];
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            out.x()[g.cid(i, j)] =
                (field[g.cid(i, j)] - field[g.cid(g.wrap(i - 1, 0), j)]) / g.dx[0];
            out.y()[g.cid(i, j)] =
                (field[g.cid(i, j)] - field[g.cid(i, g.wrap(j - 1, 1))]) / g.dx[1];
        }
    return out;
}

CellField div_face_to_cell(const FaceField& flux, const Grid& g) {
    check_face_size(flux, g, "div_face_to_cell");
    CellField out(g);
    if (g.dim == 1) {
        int n = g.n[0];
        double idx = 1.0 / g.dx[0];
        if (g.bc == Bc::NoSlip) {
            for (int i = 0; i < n; ++i) out[i] = (flux.x()[i + 1] - flux.x()[i]) * idx;
        } else {
            for (int i = 0; i < n; ++i)
                out[i] = (flux.x()[g.wrap(i + 1, 0)] - flux.x()[i]) * idx;
        }
        return out;
    }
    int nx = g.n[0], ny = g.n[1];
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double dfx = (flux.x()[g.cid(g.wrap(i + 1, 0), j)] - flux.x()[g.cid(i, j)]) / g.dx[0];
            double dfy = (flux.y()[g.cid(i, g.wrap(j + 1, 1))] - flux.y()[g.cid(i, j)]) / g.dx[1];
            out[g.cid(i, j)] = dfx + dfy;
        }
    return out;
}

FaceField upwind_mass_flux(const CellField& rho, const FaceField& u, const Grid& g) {
    check_cell_size(rho, g, "upwind_mass_flux");
    check_face_size(u, g, "upwind_mass_flux");
    FaceField out(g);
    auto up = [](double uf, double left, double right) {
        return uf > 0.0 ? uf * left : uf * right;
    };
    if (g.dim == 1) {
        int n = g.n[0];
        if (g.bc == Bc::NoSlip) {
            out.x()[0] = 0.0;
            out.x()[n] = 0.0;
            for (int j = 1; j < n; ++j) out.x()[j] = up(u.x()[j], rho[j - 1], rho[j]);
        } else {
            for (int j = 0; j < n; ++j)
                out.x()[j] = up(u.x()[j], rho[g.wrap(j - 1, 0)], rho[j]);
        }
        return out;
    }
    int nx = g.n[0], ny = g.n[1];
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            out.x()[g.cid(i, j)] =
                up(u.x()[g.cid(i, j)], rho[g.cid(g.wrap(i - 1, 0), j)], rho[g.cid(i, j)]);
            out.y()[g.cid(i, j)] =
                up(u.y()[g.cid(i, j)], rho[g.cid(i, g.wrap(j - 1, 1))], rho[g.cid(i, j)]);
        }
    return out;
}

GradField velocity_gradient(const FaceField& u, const Grid& g) {
    check_face_size(u, g, "velocity_gradient");
    GradField out;
    out.dim = g.dim;
    out.g.assign(static_cast<size_t>(g.cell_count()) * g.dim * g.dim, 0.0);
    if (g.dim == 1) {
        int n = g.n[0];
        double idx = 1.0 / g.dx[0];
        if (g.bc == Bc::NoSlip) {
            for (int i = 0; i < n; ++i) out.g[i] = (u.x()[i + 1] - u.x()[i]) * idx;
        } else {
            for (int i = 0; i < n; ++i) out.g[i] = (u.x()[g.wrap(i + 1, 0)] - u.x()[i]) * idx;
        }
        return out;
    }
    int nx = g.n[0], ny = g.n[1];
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int c = g.cid(i, j);
            int ip = g.wrap(i + 1, 0), jp = g.wrap(j + 1, 1);
            int im = g.wrap(i - 1, 0), jm = g.wrap(j - 1, 1);
            // diagonal entries live naturally at centers
            out.at(c, 0, 0) = (u.x()[g.cid(ip, j)] - u.x()[c]) / g.dx[0];
            out.at(c, 1, 1) = (u.y()[g.cid(i, jp)] - u.y()[c]) / g.dx[1];
            // du/dy at a cell: centered difference of the two x-face pairs
            double duy = (u.x()[g.cid(i, jp)] + u.x()[g.cid(ip, jp)] - u.x()[g.cid(i, jm)] -
                          u.x()[g.cid(ip, jm)]) /
                         (4.0 * g.dx[1]);
            double dvx = (u.y()[g.cid(ip, j)] + u.y()[g.cid(ip, jp)] - u.y()[g.cid(im, j)] -
                          u.y()[g.cid(im, jp)]) /
                         (4.0 * g.dx[0]);
            out.at(c, 0, 1) = duy;
            out.at(c, 1, 0) = dvx;
        }
    return out;
}

double viscous_stress_1d(double ux, double mu, double eta) {
    return ((4.0 / 3.0) * mu + eta) * ux;
}

GradField viscous_stress(const GradField& grad_u, double mu, double eta) {
    if (!(mu > 0.0)) throw ConfigError("viscous_stress: mu must be > 0");
    if (eta < 0.0) throw ConfigError("viscous_stress: eta must be >= 0");
    GradField out = grad_u;
    int d = grad_u.dim;
    size_t cells = grad_u.g.size() / static_cast<size_t>(d * d);
    for (size_t c = 0; c < cells; ++c) {
        double tr = 0.0;
        for (int i = 0; i < d; ++i) tr += grad_u.g[(c * d + i) * d + i];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double gij = grad_u.g[(c * d + i) * d + j];
                double gji = grad_u.g[(c * d + j) * d + i];
                double s = mu * (gij + gji);
                if (i == j) s += (eta - 2.0 / 3.0 * mu) * tr;
                out.g[(c * d + i) * d + j] = s;
            }
    }
    return out;
}

CellField dissipation_pointwise(const GradField& grad_u, double mu, double eta) {
    GradField S = viscous_stress(grad_u, mu, eta);
    int d = grad_u.dim;
    size_t cells = grad_u.g.size() / static_cast<size_t>(d * d);
    CellField out;
    out.v.assign(cells, 0.0);
    for (size_t c = 0; c < cells; ++c) {
        double acc = 0.0;
        for (int k = 0; k < d * d; ++k) acc += S.g[c * d * d + k] * grad_u.g[c * d * d + k];
        out.v[c] = acc;
    }
    return out;
}

CellField dissipation_noslip_form(const GradField& grad_u, double mu, double eta) {
    double lambda = mu / 3.0 + eta;
    int d = grad_u.dim;
    size_t cells = grad_u.g.size() / static_cast<size_t>(d * d);
    CellField out;
    out.v.assign(cells, 0.0);
    for (size_t c = 0; c < cells; ++c) {
        double frob = 0.0, tr = 0.0;
        for (int i = 0; i < d; ++i) {
            tr += grad_u.g[(c * d + i) * d + i];
            for (int j = 0; j < d; ++j) {
                double gij = grad_u.g[(c * d + i) * d + j];
                frob += gij * gij;
            }
        }
        out.v[c] = mu * frob + lambda * tr * tr;
    }
    return out;
}

double dissipation_1d(double ux, double mu, double eta) {
    return ((4.0 / 3.0) * mu + eta) * ux * ux;
}

double integrate_cells(const CellField& f, const Grid& g) {
    check_cell_size(f, g, "integrate_cells");
    double acc = 0.0;
    for (double v : f.v) acc += v;
    return acc * g.cell_volume();
}

double integrate_faces(const std::vector<double>& f, const Grid& g, int axis) {
    if (f.size() != static_cast<size_t>(g.face_count(axis)))
        throw ConfigError("integrate_faces: size mismatch");
    if (g.dim == 2 || g.bc == Bc::Periodic) {
        double acc = 0.0;
        for (double v : f) acc += v;
        return acc * g.cell_volume();
    }
    // 1D no-slip: trapezoid over the n+1 face nodes
    double acc = 0.5 * (f.front() + f.back());
    for (size_t j = 1; j + 1 < f.size(); ++j) acc += f[j];
    return acc * g.dx[0];
}

} // namespace mvflow
