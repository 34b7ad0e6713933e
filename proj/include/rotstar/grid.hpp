#pragma once

#include <Eigen/Dense>

#include "rotstar/parity.hpp"

namespace rotstar {

using Eigen::VectorXd;

// Uniform cell-centred grid on the half meridional plane [0, r_max] x [0, z_max].
// Fields are stored row-major in r (index i*nz + k) and extended to z < 0 by parity.
struct AxiGrid {
    int nr = 0, nz = 0;
    double r_max = 0, z_max = 0, dr = 0, dz = 0;

    AxiGrid() = default;
    AxiGrid(int nr, int nz, double r_max, double z_max);

    int size() const { return nr * nz; }
    int idx(int i, int k) const { return i * nz + k; }
    double r(int i) const { return (i + 0.5) * dr; }
    double z(int k) const { return (k + 0.5) * dz; }
    // Volume of the two mirror cells (r_i, +-z_k) in three dimensions.
    double weight(int i) const { return 4 * M_PI * r(i) * dr * dz; }
    VectorXd weights() const;

    double integrate(const VectorXd& f) const;
    double dot(const VectorXd& f, const VectorXd& g) const;
    // W_i = int f(r_i, z) dz over the full line.
    VectorXd column_integral(const VectorXd& f) const;
    // m_i = int_0^{r_i} s int f dz ds with the cell containing r_i counted by half.
    // For f = rho this is the cylinder mass without the 2 pi factor.
    VectorXd cylinder_integral(const VectorXd& f) const;
    // Complement: int_{r_i}^inf s int f dz ds, same half-cell convention.
    VectorXd cylinder_tail(const VectorXd& f) const;

    // Second-order differences; the axis and the midplane use mirror values.
    VectorXd d_dr(const VectorXd& f) const;
    VectorXd d_dz(const VectorXd& f, Parity parity) const;
};

}  // namespace rotstar
