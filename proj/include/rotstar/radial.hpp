#pragma once

#include <limits>
#include <string>
#include <vector>

#include "rotstar/eos.hpp"
#include "rotstar/linalg.hpp"
#include "rotstar/parity.hpp"

namespace rotstar {

// Non-rotating equilibrium. y(r) = Phi'(rho(r)) on [0, R]; V(r) = -M/R - y(r).
struct RadialStar {
    EquationOfState eos;
    double mu = 0, R = 0, M = 0;
    std::vector<double> r, y, dy, rho;

    double y_at(double s) const;   // continued outside by M/s - M/R
    double dy_at(double s) const;
    double rho_at(double s) const;
    double V_at(double s) const { return -M / R - y_at(s); }
    double mass_within(double s) const { return -s * s * dy_at(s); }
};

struct RadialOptions {
    double tol = 1e-11;
    int n_profile = 4001;
    double max_radius_factor = 100.0;
};

RadialStar solve_radial(const EquationOfState& eos, double mu, const RadialOptions& opt = {});

struct Extremum {
    double mu = 0;
    bool is_max = false;
    int bracket = 0;  // index i with the sign change between grid points i and i+1
};

struct RadialScanRow {
    double mu, R, M, dMdmu, MoverR, dMoverR;
};

struct RadialScan {
    std::vector<RadialScanRow> rows;
    std::vector<Extremum> mass_extrema;
    double mu_tilde = std::numeric_limits<double>::infinity();
};

// Central differences with step h*mu and one Richardson extrapolation.
double radial_dmass_dmu(const EquationOfState& eos, double mu, double h = 1e-3,
                        const RadialOptions& opt = {});

RadialScan family_scan_radial(const EquationOfState& eos, const std::vector<double>& mu_grid,
                              int jobs = 1, const RadialOptions& opt = {});

std::string radial_scan_csv(const RadialScan& scan);

struct DMesh {
    int n_elem = 400;
    double ball_factor = 1.25;  // ball radius / R
    int l_max = 8;
};

struct ReducedD {
    QuadraticFormMatrix form;
    SymmetryAdjusted adjusted;  // odd parity: d_z V identified as kernel
    std::vector<int> block_l;
    double ball_radius = 0;
};

// Galerkin matrix of <D f, f> = int |grad f|^2 - 4 pi int f^2 / Phi''(rho) on
// axisymmetric f(s) P_l(cos theta), P1 elements in s, exact exterior harmonic term.
ReducedD assemble_reduced_D(const RadialStar& star, const DMesh& mesh, Parity parity);

}  // namespace rotstar
