#include "mmtdd/loadmodel.hpp"
#include "mmtdd/rate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace mmtdd;

TEST(Rate, SpectralEfficiencyOfFullCoverage)
{
    const auto g = db_grid(-40, 80, 1);
    const std::vector<double> one(g.size(), 1.0);
    EXPECT_NEAR(spectral_efficiency(g, one), std::log2(1.0 + 1e8), 1e-6);
    EXPECT_NEAR(spectral_efficiency(g, one, false), std::log1p(1e8), 1e-6);
    const std::vector<double> zero(g.size(), 0.0);
    EXPECT_DOUBLE_EQ(spectral_efficiency(g, zero), 0.0);
}

TEST(Rate, SpectralEfficiencyOfAStep)
{
    // S = 1 up to 10 dB and 0 beyond integrates to log2(11) up to the
    // half-panel the step occupies on the grid.
    const auto g = db_grid(-40, 80, 0.01);
    std::vector<double> s(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) s[j] = g[j] <= 10.0 + 1e-9 ? 1.0 : 0.0;
    EXPECT_NEAR(spectral_efficiency(g, s), std::log2(11.0), 5e-3);
}

TEST(Rate, GridMustBeUniform)
{
    const std::vector<double> g = {0, 1, 3};
    const std::vector<double> s = {1, 1, 1};
    EXPECT_THROW(spectral_efficiency(g, s), ParamError);
    EXPECT_THROW(spectral_efficiency(std::vector<double>{0.0}, std::vector<double>{1.0}), ParamError);
}

TEST(Rate, ReportIdentities)
{
    auto p = NetworkParams::defaults();
    p.F = 5;
    p.access_scheme = AccessScheme::Dynamic;
    p.backhaul_scheme = BackhaulScheme::UAB;
    const auto r = mean_rate(p, ModelOptions{});
    EXPECT_NEAR(r.R_ul, r.A_m * r.R_ul_m + r.A_s * r.R_ul_s, 1e-9 * r.R_ul);
    EXPECT_NEAR(r.R_dl, r.A_m * r.R_dl_m + r.A_s * r.R_dl_s, 1e-9 * r.R_dl);
    EXPECT_NEAR(r.R_overall, p.eta * r.R_dl + (1 - p.eta) * r.R_ul, 1e-9 * r.R_overall);
    EXPECT_NEAR(r.A_m + r.A_s, 1.0, 1e-15);
    // The mean of a minimum never exceeds the minimum of the means.
    EXPECT_LE(r.R_ul_s, std::min(r.Ra_ul, r.Rb_ul) * (1 + 1e-12));
    EXPECT_LE(r.R_dl_s, std::min(r.Ra_dl, r.Rb_dl) * (1 + 1e-12));
    EXPECT_GT(r.R_ul_s, 0.0);
    EXPECT_GT(r.R_dl_s, 0.0);
    EXPECT_EQ(r.params_hash, params_hash(p, ModelOptions{}));
}

TEST(Rate, MbsOnlyCollapsesToOneTier)
{
    auto p = NetworkParams::defaults();
    p.lambda_s = 0.0;
    const auto r = mean_rate(p, ModelOptions{});
    EXPECT_DOUBLE_EQ(r.A_m, 1.0);
    EXPECT_DOUBLE_EQ(r.R_ul_s, 0.0);
    EXPECT_DOUBLE_EQ(r.R_dl_s, 0.0);
    EXPECT_DOUBLE_EQ(r.R_ul, r.R_ul_m);
    EXPECT_DOUBLE_EQ(r.R_dl, r.R_dl_m);
}

TEST(Rate, AllDownlinkStaticLeavesNoUplink)
{
    auto p = NetworkParams::defaults();
    p.eta = 1.0;
    p.F = 4;
    const auto r = mean_rate(p, ModelOptions{});
    EXPECT_LT(r.R_ul, 1e-9 * r.R_dl);
    EXPECT_GT(r.R_dl, 0.0);
}

TEST(Rate, SlotWeights)
{
    auto p = NetworkParams::defaults();
    SubframeLayout lay;
    lay.F = 6;
    lay.Fa = 4;
    lay.Fbd = 1;
    lay.Fad = 1;
    const double eps = 2.0;
    double inv_u = 0.0, inv_d = 0.0;
    for (int n = 0; n < 400; ++n)
        for (int n2 = 0; n2 <= n; ++n2) {
            const double w = joint_pmf(eps, p.eta, n - n2, n2, 4.5);
            inv_u += w / (n - n2 + 1);
            inv_d += w / (n2 + 1);
        }
    const auto wu = ul_slot_weights(p, lay, eps, 1e-14);
    const auto wd = dl_slot_weights(p, lay, eps, 1e-14);
    ASSERT_EQ(wu.size(), 4u);
    EXPECT_NEAR(std::accumulate(wu.begin(), wu.end(), 0.0), 3 * inv_u, 1e-10);
    EXPECT_NEAR(std::accumulate(wd.begin(), wd.end(), 0.0), 1 * inv_d, 1e-10);
    EXPECT_DOUBLE_EQ(wu[0], 0.0);
    EXPECT_DOUBLE_EQ(wd[1], 0.0);

    p.access_scheme = AccessScheme::Dynamic;
    const auto du = ul_slot_weights(p, lay, eps, 1e-14);
    const auto dd = dl_slot_weights(p, lay, eps, 1e-14);
    for (int i = 0; i < 4; ++i) {
        EXPECT_LE(du[i], inv_u + 1e-12);
        EXPECT_LE(dd[i], inv_d + 1e-12);
        if (i) {
            EXPECT_GE(du[i] + 1e-15, du[i - 1]);
            EXPECT_LE(dd[i], dd[i - 1] + 1e-15);
        }
    }
    EXPECT_GT(dd[0], dd[3]);
}

TEST(Rate, OptimizeDeltaPicksTheArgmax)
{
    auto p = NetworkParams::defaults();
    p.F = 10;
    const auto sw = optimize_delta(p, ModelOptions{}, {0.9, 0.3, 0.5, 0.7});
    ASSERT_EQ(sw.sweep.size(), 4u);
    EXPECT_DOUBLE_EQ(sw.sweep.front().delta, 0.3);
    for (const auto& r : sw.sweep) EXPECT_GE(sw.best.R_overall, r.R_overall);
    EXPECT_DOUBLE_EQ(sw.best.delta, sw.delta_star);
    const auto th = optimize_delta(p, ModelOptions{}, {0.3, 0.5, 0.7, 0.9}, DeltaObjective::TwoHop);
    for (const auto& r : th.sweep) EXPECT_GE(th.best.two_hop(), r.two_hop());
    EXPECT_THROW(optimize_delta(p, ModelOptions{}, {}), ParamError);
    EXPECT_EQ(default_delta_set().size(), 10u);
}

TEST(Rate, TiesGoToTheSmallerDelta)
{
    auto p = NetworkParams::defaults();
    p.lambda_s = 0.0;  // no SBS users: the two-hop objective is zero everywhere
    const auto sw = optimize_delta(p, ModelOptions{}, {0.8, 0.4, 0.6}, DeltaObjective::TwoHop);
    EXPECT_DOUBLE_EQ(sw.delta_star, 0.4);
}

TEST(Rate, CsvRow)
{
    RateReport r;
    std::ostringstream os;
    write_rate_csv_header(os);
    write_rate_csv_row(os, r);
    EXPECT_EQ(os.str().rfind("scheme_a,scheme_b,eta,delta,", 0), 0u);
    EXPECT_NE(os.str().find("\nstatic,sab,"), std::string::npos);
}
