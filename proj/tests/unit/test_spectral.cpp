#include <cmath>

#include <gtest/gtest.h>

#include "rotstar/errors.hpp"
#include "rotstar/spectral.hpp"

using namespace rotstar;

namespace {
const AxiStar& unstable_star() {
    static const AxiStar st = [] {
        const auto eos = EquationOfState::polytrope(1.0, 1.3);
        GridSpec g;
        g.nr = g.nz = 48;
        const double R = solve_radial(eos, 1.0).R;
        return solve_fixed_omega(eos, AngularVelocityLaw::power_tail(1.0, 0.4 * R, 2.0), 0.05, 1.0, g);
    }();
    return st;
}
}  // namespace

TEST(Spectral, RequiresRayleighUnstableStar) {
    GridSpec g;
    g.nr = g.nz = 32;
    const AxiStar st = solve_fixed_omega(EquationOfState::polytrope(1.0, 5.0 / 3.0), AngularVelocityLaw::rigid(1.0), 0.2, 1.0, g);
    EXPECT_THROW(assemble_Ltilde(st, spectral_basis(st, Parity::even, {1, 8, 4})), PreconditionError);
}

TEST(Spectral, UpsilonRangeNegativeMinimum) {
    const UpsilonRange u = upsilon_range(unstable_star());
    EXPECT_GT(u.a, 0);
    EXPECT_GT(u.b, u.a);
    EXPECT_GT(u.r_min, 0);
}

TEST(Spectral, EnlargingBasisLowersBottom) {
    const AxiStar& st = unstable_star();
    const VelocityBasis small = spectral_basis(st, Parity::even, {1, 8, 4});
    const VelocityBasis big = concat(small, spectral_basis(st, Parity::even, {2, 12, 6}));
    const double e_small = assemble_Ltilde(st, small).eigenvalues(0);
    const double e_big = assemble_Ltilde(st, big).eigenvalues(0);
    EXPECT_LE(e_big, e_small + 1e-10 * std::abs(e_small));
}

TEST(Spectral, StreamFieldsAreDivergenceFree) {
    const AxiStar& st = unstable_star();
    const VelocityBasis v = spectral_basis(st, Parity::even, {1, 8, 4});
    ASSERT_GT(v.size(), v.n_gradient);
    const double gmax = v.sigma.leftCols(v.n_gradient).cwiseAbs().maxCoeff();
    EXPECT_EQ(v.sigma.rightCols(v.size() - v.n_gradient).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(gmax, 0);
}

TEST(Spectral, WeylQuotientTracksUpsilon) {
    const AxiStar& st = unstable_star();
    for (double rs : {0.3, 0.6}) {
        const WeylCheck w = weyl_quotient(st, rs * st.R0, 0.05 * st.R0, 100 / st.R0);
        EXPECT_TRUE(w.pass()) << rs << " " << w.quotient << " vs " << w.upsilon_center;
    }
}

TEST(Spectral, LevelsClusterInEssentialInterval) {
    const SpectrumReport rep = spectrum(unstable_star());
    ASSERT_EQ(rep.levels.size(), 2u);
    EXPECT_GE(rep.levels.back().inside_fraction, 0.9);
    EXPECT_LT(rep.eta0, -rep.a);
    EXPECT_FALSE(rep.ambiguous);
}

TEST(Spectral, MidpointConservesEnergy) {
    const AxiStar& st = unstable_star();
    const SecondOrderSystem sys = second_order_system(assemble_Ltilde(st, spectral_basis(st, Parity::even, {1, 8, 4})));
    const VectorXd u0 = VectorXd::Ones(sys.dim());
    const SecondOrderTrajectory tr = evolve_second_order(sys, u0, VectorXd::Zero(sys.dim()), 10.0, 0, 10);
    EXPECT_LT(tr.max_rel_drift, 1e-10);
    EXPECT_THROW(evolve_second_order(sys, u0, u0, 1.0, 3.0 / std::sqrt(sys.lambda.maxCoeff())), StepSizeError);
}
