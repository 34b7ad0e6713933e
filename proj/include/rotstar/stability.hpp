#pragma once

#include <optional>
#include <string>

#include "rotstar/basis.hpp"
#include "rotstar/linalg.hpp"

namespace rotstar {

// <L drho_j, drho_k> = int Phi'' drho_j drho_k - int int drho_j drho_k / |x - y|.
QuadraticFormMatrix assemble_L(const AxiStar& star, const PerturbationBasis& basis);

// Coulomb matrix int int drho_j drho_k / |x - y| of the basis.
MatrixXd coulomb_matrix(const AxiStar& star, const PerturbationBasis& basis);

// Cylinder flux F(r_i) = int_0^r s int drho dz ds per column. With mass_zero the
// outer half uses -int_r^inf to avoid cancellation.
MatrixXd cylinder_flux(const AxiStar& star, const MatrixXd& drho, bool mass_zero);

// Column weights q_i with <R drho, drho> = sum_i dr q_i F_i^2; q_i = 2 pi Upsilon_i / (r_i W_i).
// Throws PreconditionError when the discriminant is negative on the support.
VectorXd rotational_weights(const AxiStar& star);

// K = L + R in the basis coordinates (R vanishes in the odd sector).
QuadraticFormMatrix assemble_K(const AxiStar& star, const PerturbationBasis& basis);

// Restriction to {sum_k c_k int drho_k = 0}. Z (coefficients of the restricted
// basis) is returned through Z_out. Vacuous constraints return the input flagged.
QuadraticFormMatrix restrict_mass_zero(const QuadraticFormMatrix& Q, const PerturbationBasis& basis,
                                       MatrixXd* Z_out = nullptr);

// K restricted to mass-zero perturbations, with the rotational term built from
// the cancellation-free flux.
QuadraticFormMatrix assemble_K_mass_zero(const AxiStar& star, const PerturbationBasis& basis,
                                         MatrixXd* Z_out = nullptr);

struct ThetaLift {
    VectorXd u_theta;  // per column (independent of z)
    double hardy_ratio = 0;            // ||u||_{rho0} / ||drho||_{Phi''}
    double a1_value = 0;               // <A1 u, u>
    double accessibility_defect = 0;   // max_r |int u rho0 dz - d_r(omega r^2) F / r^2|
};

ThetaLift u_theta_lift(const AxiStar& star, const PerturbationBasis& basis, const VectorXd& coeffs);

// A1 = 4 omega^2 rho0 / Upsilon per node (rho0 for non-rotating stars).
VectorXd a1_weight(const AxiStar& star);

// Perturbation (rho, v_theta, v_r, v_z) at grid nodes; rho and v_theta share the parity.
struct LinearState {
    Parity parity = Parity::even;
    VectorXd rho, v_theta, v_r, v_z;
};

double casimir_second_variation(const AxiStar& star, const LinearState& state);

struct StabilityReport {
    int n_minus_L = 0;
    int n_minus_K_constrained = 0;
    int n_zero = 0;
    std::string verdict;
    std::optional<int> generator_unstable_count;
    std::optional<double> growth_rate;
    double min_eigen_K_constrained = 0;  // even sector, Gram-normalised
    double translation_correlation = 0;
    int n_minus_L_even = 0, n_minus_K_even = 0, n_minus_odd = 0;
};

// Even sector: K restricted to mass zero with d rho/d mu appended; odd sector: L
// with the translation mode identified. dmu may be null (then it is computed).
StabilityReport analyze_stability(const AxiStar& star, const BasisSpec& spec = {},
                                  const MuDerivative* dmu = nullptr);

std::string to_json(const StabilityReport& r);

// <L drho/dmu, drho/dmu> against dV(R)/dmu * dM/dmu on a radial star, with a
// one-dimensional quadrature independent of the grid code.
struct TurningIdentity {
    double form = 0, dV_surface = 0, dM = 0;
    double rhs() const { return dV_surface * dM; }
};
TurningIdentity radial_turning_identity(const EquationOfState& eos, double mu, double h = 1e-3);

}  // namespace rotstar
