#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rotstar/grid.hpp"

namespace rotstar {

using Eigen::MatrixXd;

// psi = |x|^-1 * f for axisymmetric f on an AxiGrid, by a Legendre expansion
// of the azimuthally averaged kernel truncated at l_max:
//   psi(x) = sum_y w(y) f(y) sum_l s_<^l / s_>^(l+1) P_l(cos x) P_l(cos y).
// Even fields keep even l, odd fields odd l. The discrete kernel is symmetric
// and positive semidefinite, so psi-based forms are exactly symmetric.
class MultipolePoisson {
public:
    MultipolePoisson(const AxiGrid& grid, int l_max = 32);

    const AxiGrid& grid() const { return grid_; }
    int l_max() const { return l_max_; }

    VectorXd apply(const VectorXd& f, Parity parity = Parity::even) const;
    // psi at the origin (only the monopole survives there).
    double center(const VectorXd& f) const;
    // psi at an arbitrary meridional point; O(N l_max).
    double at_point(const VectorXd& f, double r, double z, Parity parity = Parity::even) const;

private:
    AxiGrid grid_;
    int l_max_;
    double scale_;
    std::vector<int> order_;  // node indices by increasing s
    VectorXd s_;              // s / scale
    MatrixXd P_;              // P_l(cos theta) per node, (l_max+1) x N
    VectorXd w_;
};

}  // namespace rotstar
