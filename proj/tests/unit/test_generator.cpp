#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rotstar/generator.hpp"
#include "rotstar/stability.hpp"

using namespace rotstar;

namespace {
GridSpec grid(int n) {
    GridSpec g;
    g.nr = g.nz = n;
    return g;
}
const AxiStar& soft_star() {
    static const AxiStar st =
        solve_fixed_omega(EquationOfState::polytrope(1.0, 1.3), AngularVelocityLaw::rigid(1.0), 0.05, 1.0, grid(48));
    return st;
}
}  // namespace

TEST(Generator, UnstableCountMatchesK) {
    const StabilityReport rep = analyze_stability(soft_star());
    int count = 0;
    for (Parity p : {Parity::even, Parity::odd}) count += generator_spectrum(assemble_generator(soft_star(), p)).unstable_count;
    EXPECT_EQ(count, rep.n_minus_K_constrained);
    EXPECT_EQ(count, 1);
}

TEST(Generator, HamiltonianQuadruples) {
    const GeneratorSpectrum gs = generator_spectrum(assemble_generator(soft_star(), Parity::even));
    EXPECT_LT(gs.quadruple_defect, 1e-8);
    EXPECT_GT(gs.max_growth, 0);
    EXPECT_EQ(gs.reduced_negative, gs.unstable_count);
}

TEST(Generator, EnergyIsHalfCasimir) {
    const GeneratorSystem sys = assemble_generator(soft_star(), Parity::even);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 3; ++t) {
        VectorXd x(sys.dim());
        for (auto& v : x) v = nd(rng);
        const double c = casimir_second_variation(soft_star(), sys.state(x));
        // Same quadrature on both sides; the gap is roundoff through the weakly conditioned basis.
        EXPECT_NEAR(c, 2 * sys.energy(x), 1e-4 * std::abs(c));
    }
}

TEST(Generator, EvolutionConservesEnergyAndGrows) {
    const GeneratorSystem sys = assemble_generator(soft_star(), Parity::even);
    const GeneratorSpectrum gs = generator_spectrum(sys);
    VectorXd x = VectorXd::Ones(sys.dim());
    const LinearTrajectory tr = evolve_linearized(sys, x, 40.0, 0.01);
    EXPECT_LT(tr.max_rel_drift, 1e-8);
    EXPECT_NEAR(tr.growth_rate / gs.max_growth, 1.0, 0.02);
}

TEST(Generator, StableStarHasNoGrowth) {
    const AxiStar st =
        solve_fixed_omega(EquationOfState::polytrope(1.0, 5.0 / 3.0), AngularVelocityLaw::rigid(1.0), 0.2, 1.0, grid(32));
    for (Parity p : {Parity::even, Parity::odd}) EXPECT_EQ(generator_spectrum(assemble_generator(st, p)).unstable_count, 0);
}
