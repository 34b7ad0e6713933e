#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rotstar/basis.hpp"
#include "rotstar/linalg.hpp"

namespace rotstar {

// One refinement level of the meridional velocity basis.
struct SpectralLevel {
    int grad_deg = 1;      // gradients of P_a(r^2) P_b(z^2), a, b <= grad_deg, constant dropped
    int n_splines = 8;     // radial cubic B-splines for stream fields, centres (j+1) R0/(n+1)
    int n_axial = 4;       // axial Legendre factors of the stream fields
};

struct SpectralSpec {
    Parity parity = Parity::even;
    std::vector<SpectralLevel> levels{{1, 8, 4}, {2, 16, 8}};
    double edge_rel = 1e-3;     // eigenvalue within edge_rel*a of -a is ambiguous
    double inside_fraction = 0.9;
    int jobs = 1;  // levels solved concurrently
};

VelocityBasis spectral_basis(const AxiStar& star, Parity parity, const SpectralLevel& level);

// Range of Upsilon over the support columns: essential interval [-a, b].
struct UpsilonRange {
    double a = 0, b = 0;
    double r_min = 0;  // location of the minimum
};
UpsilonRange upsilon_range(const AxiStar& star);

// [L~u,u] = int Phi'' sigma^2 - int sigma psi[sigma] + int rho0 Upsilon v_r^2, Gram = Y.
// Throws PreconditionError on a Rayleigh-stable star.
QuadraticFormMatrix assemble_Ltilde(const AxiStar& star, const VelocityBasis& v);

struct LevelSpectrum {
    int dim = 0;
    VectorXd eigenvalues;
    double delta = 0;          // smallest margin putting inside_fraction of eigenvalues in [-a-delta, b+delta]
    double inside_fraction = 0;  // fraction in [-a, b]
    int below = 0, above = 0;
};

struct SpectrumReport {
    double a = 0, b = 0, eta0 = 0;
    std::vector<double> discrete_below;
    std::vector<bool> discrete_below_converged;  // moved < 1e-3 relative between the two finest levels
    int discrete_above_count = 0;
    double cluster_fraction = 0;
    double top_growth = 0;      // ratio of top eigenvalues, finest / previous level
    bool ambiguous = false;
    std::string ambiguity;
    std::vector<LevelSpectrum> levels;
};

SpectrumReport spectrum(const AxiStar& star, const SpectralSpec& spec = {});
nlohmann::ordered_json to_json(const SpectrumReport& r);

// System  u'' = -L~ u  in Y-orthonormal coordinates of one basis level.
struct SecondOrderSystem {
    MatrixXd S;        // basis coefficients = S * orthonormal coordinates
    MatrixXd Ahat;     // S^T Q S
    VectorXd lambda;   // eigenvalues of Ahat
    MatrixXd U;        // eigenvectors of Ahat
    MatrixXd Y;        // Gram matrix in basis coefficients
    int dim() const { return static_cast<int>(Ahat.rows()); }
    // Orthonormal coordinates of a field given in basis coefficients.
    VectorXd coordinates(const VectorXd& coeff) const;
};

SecondOrderSystem second_order_system(const QuadraticFormMatrix& Lt);

struct SecondOrderTrajectory {
    std::vector<double> t, norm, energy;
    double growth_rate = 0;
    double max_rel_drift = 0;
    double dt = 0;
};

// Implicit midpoint, default dt = 0.1/sqrt(lambda_max). StepSizeError if dt*sqrt(lambda_max) > 2.
SecondOrderTrajectory evolve_second_order(const SecondOrderSystem& sys, const VectorXd& u0, const VectorXd& v0,
                                          double T, double dt = 0, int record_every = 1);

// Projection onto eigenvectors with eigenvalues in [lo, hi].
VectorXd spectral_projection(const SecondOrderSystem& sys, const VectorXd& x, double lo, double hi);

// Rayleigh quotient of a localized divergence-free field
// a = r B((r - r*)/h) sin(k z), compared with Upsilon near r*.
struct WeylCheck {
    double r_star = 0, h = 0, k = 0;
    double quotient = 0, upsilon_center = 0, upsilon_oscillation = 0, tolerance = 0;
    bool pass() const { return std::abs(quotient - upsilon_center) <= tolerance; }
};
WeylCheck weyl_quotient(const AxiStar& star, double r_star, double h, double k);

}  // namespace rotstar
