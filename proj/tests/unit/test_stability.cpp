#include <cmath>

#include <gtest/gtest.h>

#include "rotstar/stability.hpp"

using namespace rotstar;

namespace {
GridSpec grid(int n) {
    GridSpec g;
    g.nr = g.nz = n;
    return g;
}
AxiStar still(double gam, int n) {
    const auto eos = EquationOfState::polytrope(1.0, gam);
    return solve_equilibrium(eos, Rotation::none(), 1.0, make_grid(eos, 1.0, grid(n)));
}
}  // namespace

TEST(Stability, StiffPolytropeStable) {
    const StabilityReport r = analyze_stability(still(5.0 / 3.0, 48));
    EXPECT_EQ(r.n_minus_K_constrained, 0);
    EXPECT_GT(r.min_eigen_K_constrained, 0);
    EXPECT_GT(r.translation_correlation, 0.99);
}

TEST(Stability, SoftPolytropeUnstable) {
    const StabilityReport r = analyze_stability(still(1.3, 48));
    EXPECT_GE(r.n_minus_K_constrained, 1);
    EXPECT_GE(r.n_minus_L, r.n_minus_K_constrained);
}

TEST(Stability, FormsSymmetric) {
    const auto eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    const AxiStar st = solve_fixed_omega(eos, AngularVelocityLaw::rigid(1.0), 0.2, 1.0, grid(32));
    for (Parity p : {Parity::even, Parity::odd}) {
        const PerturbationBasis b = make_basis(st, p, {}, nullptr);
        EXPECT_LT(symmetry_defect(assemble_L(st, b).Q), 1e-12);
        EXPECT_LT(symmetry_defect(assemble_K(st, b).Q), 1e-12);
    }
}

TEST(Stability, RotationTermNonNegative) {
    // K - L is the rotational term, which is non-negative for Rayleigh-stable rotation.
    const auto eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    const AxiStar st = solve_fixed_omega(eos, AngularVelocityLaw::rigid(1.0), 0.2, 1.0, grid(32));
    const PerturbationBasis b = make_basis(st, Parity::even, {}, nullptr);
    const MatrixXd R = assemble_K(st, b).Q - assemble_L(st, b).Q;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (R + R.transpose()));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
}

TEST(Stability, TurningIdentity) {
    for (double gam : {5.0 / 3.0, 1.3}) {
        const TurningIdentity t = radial_turning_identity(EquationOfState::polytrope(1.0, gam), 1.0);
        EXPECT_NEAR(t.form / t.rhs(), 1.0, 0.05);
    }
}

TEST(Stability, VerdictReported) {
    const StabilityReport r = analyze_stability(still(5.0 / 3.0, 32));
    EXPECT_NE(to_json(r).find("n_minus_K_constrained"), std::string::npos);
}
