#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotstar/equilibria.hpp"

namespace rotstar {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BasisSpec {
    int deg_r = 5;      // Legendre degree in r^2 (degree 10 in r)
    int deg_z = 3;      // Legendre degree in z^2, even sector
    int deg_z_odd = 2;  // odd sector: z times Legendre in z^2
    bool append_symmetry_mode = true;  // d rho/d mu (even) or d_z rho0 (odd)
};

// delta rho_k = chi_k / Phi''(rho0) on the support. Polynomial chi in
// x = 2 r^2/R0^2 - 1 and y = 2 z^2/Z0^2 - 1 (times z/Z0 in the odd sector).
struct PerturbationBasis {
    Parity parity = Parity::even;
    MatrixXd chi;   // nodes x K, zero off the support
    MatrixXd chi_r, chi_z;  // gradient of the unrestricted chi
    MatrixXd drho;  // chi / Phi''
    MatrixXd gram;  // int chi_j chi_k / Phi''
    VectorXd mass;  // int delta rho_k
    std::vector<std::string> labels;
    int mode_index = -1;  // appended symmetry-mode column, or -1

    int size() const { return static_cast<int>(chi.cols()); }
};

// Legendre P_n and derivative at x; d2p (optional) receives the second derivative.
void legendre_with_derivative(int n_max, double x, double* p, double* dp, double* d2p = nullptr);

// dH/dmu at fixed grid by central differences with one Richardson step.
struct MuDerivative {
    VectorXd dH;
    double dM = 0;      // dM/dmu
    double dc = 0;      // dc/dmu
};
MuDerivative mu_derivative(const AxiStar& star, double h = 1e-3, const ScfOptions& opt = {});

// d_z H, the enthalpy form of the translation mode d_z rho0 = d_z H / Phi''.
VectorXd translation_chi(const AxiStar& star);

PerturbationBasis make_basis(const AxiStar& star, Parity parity, const BasisSpec& spec = {},
                             const VectorXd* mode_chi = nullptr);

// Basis from explicit chi columns (restricted to the support); gradients by differences.
PerturbationBasis basis_from_chi(const AxiStar& star, Parity parity, const MatrixXd& chi);

// Keeps the span of the basis orthogonal (in the Phi'' inner product) to its
// appended mode column and drops that column.
PerturbationBasis remove_mode(const PerturbationBasis& b);

// Separable factor with derivatives: radial parts also carry f'(r)/r, which
// stays finite on the axis for functions of r^2.
struct RadialFactor {
    double f = 0, d = 0, d_over_r = 0, dd = 0;
};
struct AxialFactor {
    double f = 0, d = 0, dd = 0;
};
using RadialFn = std::function<RadialFactor(double)>;
using AxialFn = std::function<AxialFactor(double)>;

// P_a(2 r^2/R^2 - 1).
RadialFn legendre_r2(int a, double R);
// P_b(2 z^2/Z^2 - 1), times z/Z when odd.
AxialFn legendre_z2(int b, double Z, bool odd);
// Uniform cubic B-spline centred at c with knot spacing h.
RadialFn cubic_bspline(double c, double h);
AxialFn sine_z(double k);

// Meridional velocity fields (v_r, v_z) at nodes with sigma = -div(rho0 v).
struct VelocityBasis {
    Parity parity = Parity::even;  // parity of v_r
    MatrixXd vr, vz, sigma;
    int n_gradient = 0;
    int size() const { return static_cast<int>(vr.cols()); }
};

// grad chi for chi = R_a(r) Z_b(z).
VelocityBasis gradient_fields(const AxiStar& star, Parity parity, const std::vector<RadialFn>& rf,
                              const std::vector<AxialFn>& zf, bool skip_constant);
// Fields with rho0 v = curl(rho0^2 a e_theta), a = r R(r) t(z); div(rho0 v) = 0.
VelocityBasis stream_fields(const AxiStar& star, Parity parity, const std::vector<RadialFn>& rf,
                            const std::vector<AxialFn>& tf);
VelocityBasis concat(const VelocityBasis& a, const VelocityBasis& b);
// Y inner product int rho0 (u.v) dx.
MatrixXd y_gram(const AxiStar& star, const VelocityBasis& v);

}  // namespace rotstar
