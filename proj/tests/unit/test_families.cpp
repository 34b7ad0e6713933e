#include <cmath>

#include <gtest/gtest.h>

#include "rotstar/families.hpp"

using namespace rotstar;

namespace {
// Synthetic family with M = -(mu - 5)^2 (maximum at 5) and a prescribed unstable count.
FamilyScanResult synthetic(double switch_mu) {
    FamilyScanResult r;
    for (double mu : {1.0, 2.0, 3.0, 4.0, 4.5, 5.5, 6.0, 7.0, 8.0}) {
        FamilyRecord x;
        x.mu = mu;
        x.M = 10 - (mu - 5) * (mu - 5);
        x.dMdmu = -2 * (mu - 5);
        x.n_u = mu > switch_mu ? 1 : 0;
        r.records.push_back(x);
    }
    return r;
}
}  // namespace

TEST(Families, LogGrid) {
    const auto g = log_grid(3, 200, 20);
    ASSERT_EQ(g.size(), 20u);
    EXPECT_DOUBLE_EQ(g.front(), 3);
    EXPECT_NEAR(g.back(), 200, 1e-12);
    for (size_t i = 2; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
}

TEST(Families, TurningPointHolds) {
    FamilyScanResult r = synthetic(5.0);
    classify_family(r);
    ASSERT_EQ(r.extrema.size(), 1u);
    EXPECT_TRUE(r.extrema[0].is_max);
    // Zero of mu dM/dmu interpolated linearly between 4.5 and 5.5.
    EXPECT_NEAR(*r.mu_star, 4.95, 1e-12);
    ASSERT_EQ(r.transitions.size(), 1u);
    EXPECT_TRUE(r.tpp_holds);
    EXPECT_EQ(r.tpp_verdict, "TPP-holds");
}

TEST(Families, LateTransitionFails) {
    FamilyScanResult r = synthetic(6.5);
    classify_family(r);
    EXPECT_FALSE(r.tpp_holds);
    EXPECT_NEAR(*r.mu_hat, 7.0, 1e-12);
    EXPECT_EQ(r.tpp_verdict.rfind("TPP-fails", 0), 0u);
}

TEST(Families, FailedMembersMarkPartial) {
    FamilyScanResult r = synthetic(5.0);
    r.records[2].n_u = -1;
    classify_family(r);
    EXPECT_TRUE(r.partial);
    EXPECT_NE(r.tpp_verdict.find("(partial)"), std::string::npos);
}

TEST(Families, CsvShape) {
    FamilyScanResult r = synthetic(5.0);
    classify_family(r);
    const std::string csv = family_csv(r);
    EXPECT_EQ(csv.rfind("mu,M,dMdmu,n_u,verdict\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
    EXPECT_EQ(family_summary(r)["tpp_verdict"], "TPP-holds");
}

TEST(Families, SmallFixedJScan) {
    FamilyOptions opt;
    opt.grid.nr = opt.grid.nz = 32;
    const FamilyScanResult r =
        scan_fixed_j(EquationOfState::polytrope(1.0, 5.0 / 3.0), MomentumDistribution::bb(), 0.5, {0.5, 1.0, 2.0}, opt);
    ASSERT_EQ(r.records.size(), 3u);
    for (const auto& x : r.records) {
        EXPECT_TRUE(x.ok());
        EXPECT_EQ(x.n_u, 0);
        EXPECT_GT(x.dMdmu, 0);
    }
    EXPECT_TRUE(r.extrema.empty());
    EXPECT_TRUE(r.tpp_holds);
}
