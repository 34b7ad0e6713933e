#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "rotstar/errors.hpp"
#include "rotstar/rotlaw.hpp"

using namespace rotstar;

TEST(RotLaw, RigidDiscriminant) {
    const auto law = AngularVelocityLaw::rigid(0.7);
    for (double r : {0.0, 0.2, 1.0, 5.0}) {
        EXPECT_NEAR(law.discriminant(r), 4 * 0.49, 1e-12);
        EXPECT_NEAR(law.rot_potential(r), 0.49 * r * r / 2, 1e-12);
    }
}

TEST(RotLaw, PowerTailAgainstQuadrature) {
    const auto law = AngularVelocityLaw::power_tail(1.3, 0.4, 2.0);
    EXPECT_NEAR(law.discriminant(0), 4 * 1.69, 1e-10);
    for (double r : {0.1, 0.5, 1.2}) {
        const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double s) { return std::pow(law.omega(s), 2) * s; }, 0.0, r, 10, 1e-13);
        EXPECT_NEAR(law.rot_potential(r), ref, 1e-10);
        const double h = 1e-5;
        const double L = [&](double s) { return std::pow(law.omega(s) * s * s, 2); }(r + h);
        const double Lm = std::pow(law.omega(r - h) * (r - h) * (r - h), 2);
        EXPECT_NEAR(law.discriminant(r), (L - Lm) / (2 * h) / (r * r * r), 1e-6);
    }
}

TEST(RotLaw, PowerTailRayleighSignChange) {
    // With p = 2, omega r^2 peaks at r = r_c, so the discriminant changes sign there.
    const auto law = AngularVelocityLaw::power_tail(1.0, 0.4, 2.0);
    EXPECT_NEAR(law.discriminant(0.4), 0.0, 1e-12);
    EXPECT_GT(law.discriminant(0.3), 0);
    EXPECT_LT(law.discriminant(0.5), 0);
    const RayleighClass c = classify_rayleigh(law, 0.0, 2.0);
    EXPECT_FALSE(c.stable);
    EXPECT_LT(c.min_upsilon, 0);
    EXPECT_GT(c.witness, 0.4);
    const RayleighClass rigid = classify_rayleigh(AngularVelocityLaw::rigid(1.0), 0.0, 2.0);
    EXPECT_TRUE(rigid.stable);
    EXPECT_NEAR(rigid.min_upsilon, 4.0, 1e-12);
}

TEST(RotLaw, TableReproducesSmoothLaw) {
    std::vector<double> r, w;
    for (int i = 0; i <= 40; ++i) {
        r.push_back(i * 0.05);
        w.push_back(1 + 0.3 * r.back() * r.back());
    }
    const auto law = AngularVelocityLaw::table(r, w);
    for (double s : {0.0, 0.33, 1.01, 1.77}) EXPECT_NEAR(law.omega(s), 1 + 0.3 * s * s, 1e-6);
    EXPECT_NEAR(law.discriminant(0), 4.0, 1e-4);
}

TEST(RotLaw, ScaledLaw) {
    const auto law = AngularVelocityLaw::power_tail(1.0, 0.5, 1.5);
    const auto s = law.scaled(0.3);
    for (double r : {0.1, 0.9}) EXPECT_NEAR(s.discriminant(r), 0.09 * law.discriminant(r), 1e-12);
}

TEST(RotLaw, CasimirConsistency) {
    std::vector<double> rg;
    for (int i = 1; i <= 50; ++i) rg.push_back(0.02 * i);
    const CasimirTable t = casimir_g0(AngularVelocityLaw::power_tail(1.0, 0.5, 1.0), rg);
    EXPECT_LT(t.max_derivative_defect, 1e-6);
    EXPECT_LT(t.max_closed_form_defect, 1e-8);
}

TEST(RotLaw, MomentumSmoothness) {
    const auto bb = MomentumDistribution::bb();
    EXPECT_NO_THROW(bb.check_smooth(1.0));
    EXPECT_TRUE(bb.rayleigh_stable_on(1.0));
    EXPECT_NEAR(bb.j(0, 1.0), 0.0, 1e-14);
    const auto flat = MomentumDistribution::power(1.0, 0.0);
    EXPECT_THROW(flat.check_smooth(1.0), PreconditionError);
}

TEST(RotLaw, MomentumDerivative) {
    const auto j = MomentumDistribution::power(0.8, 1.5);
    for (double p : {0.1, 0.5, 0.9}) {
        const double h = 1e-6;
        EXPECT_NEAR(j.j_p(p, 1.0), (j.j(p + h, 1.0) - j.j(p - h, 1.0)) / (2 * h), 1e-6);
    }
}
