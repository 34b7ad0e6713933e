#include <cmath>
#include <random>

#include <boost/math/special_functions/ellint_1.hpp>
#include <gtest/gtest.h>

#include "rotstar/poisson.hpp"

using namespace rotstar;

namespace {

// Potential of a unit-mass ring of radius a at height zeta, by the complete elliptic integral.
double ring(double a, double zeta, double r, double z) {
    const double d2 = (r + a) * (r + a) + (z - zeta) * (z - zeta);
    const double k = std::sqrt(4 * r * a / d2);
    return 2 / M_PI * boost::math::ellint_1(k) / std::sqrt(d2);
}

VectorXd blob(const AxiGrid& g, bool odd) {
    VectorXd f(g.size());
    for (int i = 0; i < g.nr; ++i)
        for (int k = 0; k < g.nz; ++k) {
            const double r = g.r(i), z = g.z(k);
            const double s2 = r * r + z * z;
            f(g.idx(i, k)) = std::max(0.0, 1 - s2) * (1 + 0.5 * r * r) * (odd ? z : 1.0);
        }
    return f;
}

}  // namespace

TEST(Poisson, RingSumOracleOutside) {
    const AxiGrid g(24, 24, 1.2, 1.2);
    const MultipolePoisson P(g, 32);
    for (bool odd : {false, true}) {
        const VectorXd f = blob(g, odd);
        const Parity par = odd ? Parity::odd : Parity::even;
        for (auto [r, z] : {std::pair{2.5, 0.3}, {0.4, 2.2}, {1.9, 1.9}}) {
            double ref = 0;
            for (int i = 0; i < g.nr; ++i)
                for (int k = 0; k < g.nz; ++k) {
                    const double m = 0.5 * g.weight(i) * f(g.idx(i, k));
                    ref += m * (ring(g.r(i), g.z(k), r, z) + (odd ? -1 : 1) * ring(g.r(i), -g.z(k), r, z));
                }
            EXPECT_NEAR(P.at_point(f, r, z, par), ref, 1e-8 * std::abs(ref) + 1e-12) << r << "," << z;
        }
    }
}

TEST(Poisson, UniformSphere) {
    const int n = 64;
    const AxiGrid g(n, n, 1.5, 1.5);
    VectorXd f(g.size());
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) f(g.idx(i, k)) = std::hypot(g.r(i), g.z(k)) < 1 ? 1.0 : 0.0;
    const MultipolePoisson P(g);
    const VectorXd psi = P.apply(f);
    // Interior 2 pi (1 - s^2/3) with unit radius; staircase boundary costs O(h).
    for (int i = 0; i < n; i += 9)
        for (int k = 0; k < n; k += 9) {
            const double s = std::hypot(g.r(i), g.z(k));
            if (s > 0.8) continue;
            EXPECT_NEAR(psi(g.idx(i, k)), 2 * M_PI * (1 - s * s / 3), 0.03);
        }
    EXPECT_NEAR(P.center(f), 2 * M_PI, 0.03);
    EXPECT_NEAR(P.at_point(f, 3.0, 4.0), g.integrate(f) / 5.0, 1e-3);
}

TEST(Poisson, KernelSymmetricPositive) {
    const AxiGrid g(16, 16, 1.0, 1.0);
    const MultipolePoisson P(g, 16);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (Parity p : {Parity::even, Parity::odd}) {
        for (int t = 0; t < 5; ++t) {
            VectorXd a(g.size()), b(g.size());
            for (int i = 0; i < g.size(); ++i) {
                a(i) = nd(rng);
                b(i) = nd(rng);
            }
            const double ab = g.dot(a, P.apply(b, p)), ba = g.dot(b, P.apply(a, p));
            EXPECT_NEAR(ab, ba, 1e-11 * (std::abs(ab) + 1));
            EXPECT_GE(g.dot(a, P.apply(a, p)), -1e-12);
        }
    }
}

TEST(Poisson, LinearInSource) {
    const AxiGrid g(12, 12, 1.0, 1.0);
    const MultipolePoisson P(g, 8);
    const VectorXd f = blob(g, false);
    EXPECT_LT((P.apply(3 * f) - 3 * P.apply(f)).norm(), 1e-12 * P.apply(f).norm());
}
