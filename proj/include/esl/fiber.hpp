#pragma once
// The fiber eigenproblem h(k) = -d^2/dx^2 + (b x - k)^2 on the half-line,
// Dirichlet or Neumann at x = 0, discretized by second-order finite
// differences and solved for band values E_j(k) and normalized modes.

#include <cmath>
#include <cstddef>
#include <vector>

#include "esl/numerics.hpp"

namespace esl {

enum class BoundaryCondition { Dirichlet, Neumann };

struct FiberSpec {
    double b = 1.0;                                       // magnetic field strength
    BoundaryCondition bc = BoundaryCondition::Dirichlet;  // condition at x = 0
    int n_x = 600;                                        // interior grid points (coarsest level)
    double pad = 12.0;                                    // padding in units of b^{-1/2}
    int richardson = 3;                                   // extrapolation levels, 1..3

    void validate() const {
        if (!(b > 0.0)) throw numeric_error("FiberSpec: b must be > 0");
        if (n_x < 200) throw numeric_error("FiberSpec: n_x must be >= 200");
        if (!(pad >= 8.0)) throw numeric_error("FiberSpec: pad must be >= 8");
        if (richardson < 1 || richardson > 3)
            throw numeric_error("FiberSpec: richardson must be in {1,2,3}");
    }

    double domain_length(double k) const {
        return std::max(k, 0.0) / b + pad / std::sqrt(b);
    }
};

struct Mode {
    int j = 0;
    double k = 0.0;
    double energy = 0.0;  // Richardson-extrapolated
    std::vector<double> x_grid;
    std::vector<double> values;
    double dx = 0.0;
    double disc_error = 0.0;
};

// FD matrix on [0, L] with n interior points.
// Dirichlet: vertex grid x_i = i*dx, dx = L/(n+1), zero at both ends.
// Neumann: staggered grid x_i = (i-1/2)*dx, dx = L/n, reflected ghost cell at
// x=0 (first diagonal 1/dx^2 + q(x_1)), Dirichlet truncation at x=L.
inline TriDiag assemble_fiber_matrix(const FiberSpec& spec, double k, int n,
                                     std::vector<double>* x_grid = nullptr,
                                     double* dx_out = nullptr, double min_length = 0.0) {
    spec.validate();
    const double L = std::max(spec.domain_length(k), min_length);
    const bool dirichlet = spec.bc == BoundaryCondition::Dirichlet;
    const double dx = dirichlet ? L / (n + 1) : L / n;
    TriDiag T;
    T.diag.resize(n);
    T.offdiag.assign(n - 1, -1.0 / (dx * dx));
    if (x_grid) x_grid->resize(n);
    for (int i = 0; i < n; ++i) {
        double x = dirichlet ? (i + 1) * dx : (i + 0.5) * dx;
        double q = spec.b * x - k;
        T.diag[i] = 2.0 / (dx * dx) + q * q;
        if (x_grid) (*x_grid)[i] = x;
    }
    if (!dirichlet) T.diag[0] -= 1.0 / (dx * dx);  // reflected ghost cell
    if (dx_out) *dx_out = dx;
    return T;
}

struct BandValue {
    double energy = 0.0;
    double disc_error = 0.0;
};

// Interior point count at refinement level l such that the mesh width halves
// exactly: Dirichlet has dx = L/(n+1), so n+1 must double; staggered Neumann
// has dx = L/n, so n doubles.
inline int refined_points(const FiberSpec& spec, int level) {
    if (spec.bc == BoundaryCondition::Dirichlet)
        return ((spec.n_x + 1) << level) - 1;
    return spec.n_x << level;
}

// E_j(k) by Richardson extrapolation in dx^2 across grids n_x, 2n_x, 4n_x.
inline BandValue band_value(const FiberSpec& spec, int j, double k) {
    spec.validate();
    if (j < 1) throw numeric_error("band_value: j must be >= 1");
    const int levels = spec.richardson;
    std::vector<double> e(levels);
    for (int l = 0; l < levels; ++l) {
        TriDiag T = assemble_fiber_matrix(spec, k, refined_points(spec, l));
        e[l] = tridiag_eigs(T, std::size_t(j)).back();
    }
    BandValue out;
    if (levels == 1) {
        out.energy = e[0];
        out.disc_error = 0.0;  // no refinement available to estimate from
        return out;
    }
    // first-order Richardson pass (error ~ dx^2)
    std::vector<double> r1(levels - 1);
    for (int l = 0; l + 1 < levels; ++l) r1[l] = (4.0 * e[l + 1] - e[l]) / 3.0;
    if (levels == 2) {
        out.energy = r1[0];
        out.disc_error = std::fabs(r1[0] - e[1]);
        return out;
    }
    double r2 = (16.0 * r1[1] - r1[0]) / 15.0;  // second pass (error ~ dx^4)
    out.energy = r2;
    out.disc_error = std::fabs(r2 - r1[1]);
    return out;
}

// Normalized mode on the finest grid; Dirichlet sign convention: first lobe
// positive (values near 0+ positive); Neumann: values[0] > 0.
inline Mode fiber_mode(const FiberSpec& spec, int j, double k) {
    spec.validate();
    if (j < 1) throw numeric_error("fiber_mode: j must be >= 1");
    BandValue bv = band_value(spec, j, k);

    const int n = refined_points(spec, spec.richardson - 1);
    Mode m;
    m.j = j;
    m.k = k;
    m.energy = bv.energy;
    m.disc_error = bv.disc_error;
    TriDiag T = assemble_fiber_matrix(spec, k, n, &m.x_grid, &m.dx);
    double mu = tridiag_eigs(T, std::size_t(j)).back();
    m.values = inverse_iteration(T, mu);

    // discrete L2 normalization: trapezoid on the vertex grid with zero
    // boundary values and midpoint on the staggered grid both reduce to dx*sum
    KahanSum s;
    for (double v : m.values) s.add(v * v);
    double nrm = std::sqrt(s.value() * m.dx);
    double mx = 0.0;
    for (double v : m.values) mx = std::max(mx, std::fabs(v));
    // sign: first entry with non-negligible magnitude decides
    double lead = 0.0;
    for (double v : m.values) {
        if (std::fabs(v) >= 1e-3 * mx) {
            lead = v;
            break;
        }
    }
    double sgn = (lead < 0.0) ? -1.0 : 1.0;
    for (double& v : m.values) v *= sgn / nrm;
    return m;
}

// E_j'(k) = -2 \int (b x - k) psi_j(x;k)^2 dx (Hellmann-Feynman).
inline double band_derivative(const FiberSpec& spec, int j, double k) {
    Mode m = fiber_mode(spec, j, k);
    KahanSum s;
    for (std::size_t i = 0; i < m.values.size(); ++i)
        s.add((spec.b * m.x_grid[i] - k) * m.values[i] * m.values[i]);
    return -2.0 * s.value() * m.dx;
}

// psi_{j,infty}(x;k) = b^{1/4} phi_j(b^{1/2} x - b^{-1/2} k)
inline double limit_mode(int j, double k, double b, double x) {
    if (j < 1) throw numeric_error("limit_mode: j must be >= 1");
    if (!(b > 0.0)) throw numeric_error("limit_mode: b must be > 0");
    double rb = std::sqrt(b);
    return std::sqrt(rb) * hermite_phi(j, rb * x - k / rb);
}

}  // namespace esl
