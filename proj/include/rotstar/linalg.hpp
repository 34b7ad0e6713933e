#pragma once

#include <functional>

#include <Eigen/Dense>

namespace rotstar {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Inertia {
    int neg = 0;
    int zero = 0;
    int pos = 0;
};

// Symmetric pencil (Q, G) restricted to the numerically nonsingular part of G.
struct PencilEigen {
    VectorXd values;   // ascending
    MatrixXd vectors;  // coefficient space, G-orthonormal columns
    MatrixXd S;        // S^T G S = I
};

PencilEigen pencil_eigen(const MatrixXd& Q, const MatrixXd& G, double drop_rel = 1e-12);

// Discretized symmetric bilinear form with its Gram matrix and inertia.
struct QuadraticFormMatrix {
    MatrixXd Q;
    MatrixXd G;
    double tol_zero = 0;
    Inertia inertia;
    VectorXd eigenvalues;
    MatrixXd eigenvectors;
    bool constraint_vacuous = false;
};

QuadraticFormMatrix make_form(MatrixXd Q, MatrixXd G, double tol_rel = 1e-8);

// Orthonormal basis of {c : b.c = 0}.
MatrixXd null_space_of_row(const VectorXd& b);

double symmetry_defect(const MatrixXd& Q);

// Restarted GMRES for a matrix-free operator. Returns the iteration count.
int gmres(const std::function<VectorXd(const VectorXd&)>& apply, const VectorXd& rhs, VectorXd& x,
          double rel_tol, int max_iter, int restart = 60);

}  // namespace rotstar

namespace rotstar {

// Inertia where one eigenvector may be identified with a known symmetry mode.
// overlap(k) = <basis_k, t>, t_norm = ||t||, both in the pencil's Gram inner product.
struct SymmetryAdjusted {
    Inertia inertia;
    double correlation = 0;
    double mode_value = 0;
    int mode_index = -1;
};

SymmetryAdjusted inertia_with_symmetry_mode(const QuadraticFormMatrix& f, const VectorXd& overlap,
                                            double t_norm, double corr_min = 0.99,
                                            double small_rel = 1e-2);

}  // namespace rotstar
