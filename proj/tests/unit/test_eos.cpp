#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "rotstar/eos.hpp"

using namespace rotstar;

TEST(Eos, PolytropeClosedForms) {
    const double c = 1.7, g = 5.0 / 3.0;
    const auto e = EquationOfState::polytrope(c, g);
    for (double rho : {1e-6, 0.01, 0.5, 1.0, 3.0}) {
        EXPECT_NEAR(e.pressure(rho), c * std::pow(rho, g), 1e-13 * c * std::pow(rho, g));
        EXPECT_NEAR(e.enthalpy(rho), c * g / (g - 1) * std::pow(rho, g - 1), 1e-12 * std::pow(rho, g - 1));
        EXPECT_NEAR(e.enthalpy_second(rho), c * g * std::pow(rho, g - 2), 1e-12 * c * g * std::pow(rho, g - 2));
        EXPECT_NEAR(e.inv_enthalpy_second(rho) * e.enthalpy_second(rho), 1.0, 1e-12);
    }
    EXPECT_EQ(e.inv_enthalpy_second(0.0), 0.0);
    EXPECT_EQ(e.enthalpy(0.0), 0.0);
}

TEST(Eos, AsymptoticEnthalpyMatchesQuadrature) {
    EosParams p;
    p.kind = EosKind::asymptotic;
    const EquationOfState e(p);
    for (double rho : {0.1, 0.9, 2.0, 5.0, 12.0, 100.0}) {
        // The integrand behaves like s^(gamma0 - 2) at 0; tanh-sinh handles the endpoint.
        // Pieces split at the blend edges, where P'' jumps.
        auto f = [&](double s) { return e.dpressure(s) / s; };
        boost::math::quadrature::tanh_sinh<double> ts;
        double ref = 0, lo = 0;
        for (double cut : {p.blend_lo, p.blend_hi, rho}) {
            const double hi = std::min(cut, rho);
            if (hi > lo) ref += ts.integrate(f, lo, hi);
            lo = std::max(lo, hi);
        }
        EXPECT_NEAR(e.enthalpy(rho), ref, 1e-7 * ref) << "rho=" << rho;
    }
}

TEST(Eos, AsymptoticLimits) {
    EosParams p;
    p.kind = EosKind::asymptotic;
    const EquationOfState e(p);
    // Local exponent d log P / d log rho tends to gamma0 at low and gamma_inf at high density.
    auto expo = [&](double rho) { return e.dpressure(rho) * rho / e.pressure(rho); };
    EXPECT_NEAR(expo(1e-3), p.gamma0, 1e-9);
    EXPECT_NEAR(expo(1e4), p.gamma_inf, 1e-9);
}

TEST(Eos, InverseRoundTrip) {
    EosParams p;
    p.kind = EosKind::asymptotic;
    for (const EquationOfState& e : {EquationOfState(p), EquationOfState::polytrope(1.0, 1.3)}) {
        for (double rho = 1e-4; rho < 1e3; rho *= 3.7) {
            EXPECT_NEAR(e.enthalpy_inverse(e.enthalpy(rho)), rho, 1e-9 * rho);
        }
    }
}

TEST(Eos, EnthalpyIncreasing) {
    EosParams p;
    p.kind = EosKind::asymptotic;
    const EquationOfState e(p);
    double prev = 0;
    for (double rho = 1e-3; rho < 1e3; rho *= 1.1) {
        const double h = e.enthalpy(rho);
        EXPECT_GT(h, prev);
        EXPECT_GT(e.enthalpy_second(rho), 0);
        prev = h;
    }
}
