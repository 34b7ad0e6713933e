#include <cmath>

#include <gtest/gtest.h>

#include "rotstar/equilibria.hpp"
#include "rotstar/errors.hpp"

using namespace rotstar;

namespace {
GridSpec grid(int n) {
    GridSpec g;
    g.nr = g.nz = n;
    return g;
}
}  // namespace

TEST(Equilibria, NonRotatingMatchesRadial) {
    const auto eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    const AxiStar st = solve_equilibrium(eos, Rotation::none(), 1.0, make_grid(eos, 1.0, grid(64)));
    const RadialStar rs = solve_radial(eos, 1.0);
    EXPECT_NEAR(st.M, rs.M, 5e-3 * rs.M);
    EXPECT_NEAR(st.R0, rs.R, 0.02 * rs.R);
    EXPECT_NEAR(st.Z0, st.R0, 0.02 * rs.R);
    EXPECT_LT(st.residual, 1e-8);
    EXPECT_NEAR(st.rho.maxCoeff(), 1.0, 0.02);
}

TEST(Equilibria, RotationFlattens) {
    const auto eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    const AxiStar st = solve_fixed_omega(eos, AngularVelocityLaw::rigid(1.0), 0.3, 1.0, grid(48));
    EXPECT_GT(st.R0, st.Z0);
    EXPECT_LT(st.residual, 1e-8);
    const ColumnRotation c = st.columns();
    EXPECT_NEAR(c.upsilon(0), 4 * 0.3 * 0.3, 1e-10);  // kappa scales omega
}

TEST(Equilibria, CylinderMassConsistent) {
    const auto eos = EquationOfState::polytrope(1.0, 1.5);
    const AxiStar st = solve_fixed_j(eos, MomentumDistribution::bb(), 0.5, 1.0, grid(48));
    EXPECT_NEAR(2 * M_PI * st.m_of_r(st.grid().nr - 1), st.M, 1e-3 * st.M);
    for (int i = 1; i < st.grid().nr; ++i) EXPECT_GE(st.m_of_r(i), st.m_of_r(i - 1));
}

TEST(Equilibria, BoundaryExponentRadial) {
    for (double gam : {5.0 / 3.0, 1.5}) {
        const AsymptoticFit f = radial_boundary_exponent(solve_radial(EquationOfState::polytrope(1.0, gam), 1.0));
        EXPECT_NEAR(f.slope / f.target, 1.0, 0.05);
        EXPECT_NEAR(f.target, 1 / (gam - 1), 1e-12);
    }
}

TEST(Equilibria, RejectsNonPositiveCentralDensity) {
    const auto eos = EquationOfState::polytrope(1.0, 5.0 / 3.0);
    EXPECT_THROW(solve_fixed_omega(eos, AngularVelocityLaw::rigid(1.0), 0.1, -1.0, grid(16)), DomainError);
}
