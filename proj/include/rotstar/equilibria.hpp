#pragma once

#include <memory>
#include <string>

#include "rotstar/eos.hpp"
#include "rotstar/grid.hpp"
#include "rotstar/poisson.hpp"
#include "rotstar/radial.hpp"
#include "rotstar/rotlaw.hpp"

namespace rotstar {

enum class RotationKind { none, fixed_omega, fixed_j };

struct Rotation {
    RotationKind kind = RotationKind::none;
    AngularVelocityLaw law = AngularVelocityLaw::rigid(0.0);
    double kappa = 0;
    MomentumDistribution j = MomentumDistribution::bb();
    double eps = 0;

    static Rotation none() { return {}; }
    static Rotation fixed_omega(const AngularVelocityLaw& law, double kappa);
    static Rotation fixed_j(const MomentumDistribution& j, double eps);
    bool rotating() const;
};

struct GridSpec {
    int nr = 96, nz = 96;
    double r_factor = 1.4;  // grid extent in units of the non-rotating radius R_mu
    double z_factor = 1.2;
    int l_max = 32;
};

struct ScfOptions {
    double tol = 1e-12;  // on max|H - T(H)| / Phi'(mu)
    int max_newton = 40;
    int max_gmres = 400;
};

// Per-column rotation data at the cell centres r_i: omega, d/dr(omega r^2) and
// the discriminant (all zero for non-rotating stars).
struct ColumnRotation {
    VectorXd omega, d_omega_r2, upsilon;
};

// Axisymmetric equilibrium on the half-grid. H = Phi'(rho) on the support and
// continues as the effective potential outside; psi = -V.
struct AxiStar {
    std::shared_ptr<const MultipolePoisson> poisson;
    EquationOfState eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    Rotation rotation;
    double mu = 0;
    VectorXd H, rho, psi, rot;
    VectorXd m_of_r;  // cylinder mass per column, m(R0) = M / (2 pi)
    double M = 0, R0 = 0, Z0 = 0, c_const = 0;
    double residual = 0;  // max steady-state defect on the support
    double curvature = 0; // osculating-circle curvature of the surface at (R0, 0)
    int newton_iterations = 0;

    const AxiGrid& grid() const { return poisson->grid(); }
    VectorXd V() const { return -psi; }
    bool in_support(int node) const { return rho(node) > 1e-12 * mu; }
    ColumnRotation columns() const;
    // 1/Phi''(rho0) per node (0 off the support).
    VectorXd inv_phi2() const;
};

std::shared_ptr<const MultipolePoisson> make_grid(const EquationOfState& eos, double mu, const GridSpec& spec);

AxiStar solve_equilibrium(const EquationOfState& eos, const Rotation& rot, double mu,
                          std::shared_ptr<const MultipolePoisson> grid, const ScfOptions& opt = {},
                          const VectorXd* H_guess = nullptr);

AxiStar solve_fixed_omega(const EquationOfState& eos, const AngularVelocityLaw& law, double kappa, double mu,
                          const GridSpec& grid = {}, const ScfOptions& opt = {});
AxiStar solve_fixed_j(const EquationOfState& eos, const MomentumDistribution& j, double eps, double mu,
                      const GridSpec& grid = {}, const ScfOptions& opt = {});

// Interpolates the non-rotating profile onto a grid (the SCF initial guess).
VectorXd radial_enthalpy_on_grid(const RadialStar& star, const AxiGrid& grid);

struct AsymptoticFit {
    double slope = 0, target = 0;
    int n_points = 0;
};

// Slope of log int rho^lambda dz against log(R0 - r) over the outer tenth of [0, R0].
AsymptoticFit boundary_asymptotics_check(const AxiStar& star, double lambda);

// Same exponent fit for the density of a radial star (outer 10% of the support).
AsymptoticFit radial_boundary_exponent(const RadialStar& star);

// Writes <prefix>.grid.json, <prefix>.density.csv (row-major in r) and <prefix>.meta.json.
void write_bundle(const AxiStar& star, const std::string& prefix);

}  // namespace rotstar
