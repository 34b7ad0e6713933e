#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rotstar/basis.hpp"
#include "rotstar/stability.hpp"

namespace rotstar {

using Eigen::VectorXcd;

struct GeneratorSpec {
    int rho_deg_r = 4, rho_deg_z = 3, rho_deg_z_odd = 2;  // density and gradient velocity fields
    int stream_deg_r = 4, stream_deg_z = 2;               // divergence-free meridional fields
    int theta_deg_r = 4, theta_deg_z = 2;                 // v_theta = r P_a(r^2) T_b(z)
};

// Galerkin discretisation of the linearised Euler-Poisson system in one parity
// sector, in coordinates orthonormal for the density, v_theta and Y Gram matrices:
//   a' = C b,  c' = -E^T b,  b' = -C^T L a + E c,
// with conserved energy (a^T L a + |c|^2 + |b|^2) / 2.
struct GeneratorSystem {
    Parity parity = Parity::even;
    int na = 0, nc = 0, nb = 0;
    MatrixXd G;             // generator, (na+nc+nb)^2
    MatrixXd Lhat, Chat, Ehat;
    // Maps from orthonormal coordinates to node fields.
    MatrixXd rho_map, theta_map, vr_map, vz_map;

    int dim() const { return na + nc + nb; }
    double energy(const VectorXd& x) const;
    LinearState state(const VectorXd& x) const;
};

// Rayleigh-stable stars only. The odd sector drops the translation mode d_z rho0.
GeneratorSystem assemble_generator(const AxiStar& star, Parity parity, const GeneratorSpec& spec = {});

struct GeneratorSpectrum {
    VectorXcd eigenvalues;
    int unstable_count = 0;        // Re lambda > tol
    double tol = 0;
    double max_growth = 0;
    double quadruple_defect = 0;   // relative to the spectral radius
    double imaginary_axis_defect = 0;  // max |Re lambda| / spectral radius
    int reduced_negative = 0;      // negative eigenvalues of C^T L C + E E^T
};

GeneratorSpectrum generator_spectrum(const GeneratorSystem& sys, double rel_tol = 1e-6);

struct LinearTrajectory {
    std::vector<double> t, norm, energy;
    double growth_rate = 0;     // slope of log norm over the second half
    double max_rel_drift = 0;   // max |E - E0| / max(|E0|, ...)
};

// Implicit midpoint (conserves the quadratic energy exactly for this linear flow).
LinearTrajectory evolve_linearized(const GeneratorSystem& sys, const VectorXd& x0, double T, double dt);

}  // namespace rotstar
