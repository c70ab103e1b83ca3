#include "mmtdd/params.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

using namespace mmtdd;

TEST(Params, DefaultsValidate)
{
    const auto p = NetworkParams::defaults();
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.lambda_m, 20e-6, 1e-18);
    EXPECT_NEAR(p.lambda_s, 80e-6, 1e-18);
    EXPECT_NEAR(p.lambda_u, 200e-6, 1e-18);
    EXPECT_NEAR(watt_to_dbm(p.P(Device::U)), 20.0, 1e-12);
    EXPECT_NEAR(linear_to_db(p.G(Device::M)), 24.0, 1e-12);
    EXPECT_DOUBLE_EQ(p.f_c, 28e9);
    EXPECT_DOUBLE_EQ(p.W, 200e6);
    EXPECT_NO_THROW(ModelOptions{}.validate());
}

TEST(Params, ValidationNamesTheField)
{
    auto p = NetworkParams::defaults();
    p.alpha_l = 1.9;
    try {
        p.validate();
        FAIL() << "expected ParamError";
    } catch (const ParamError& e) {
        EXPECT_NE(std::string(e.what()).find("alpha_l"), std::string::npos);
    }
    p = NetworkParams::defaults();
    p.eta = 1.5;
    EXPECT_THROW(p.validate(), ParamError);
    p = NetworkParams::defaults();
    p.F = 0;
    EXPECT_THROW(p.validate(), ParamError);
    p = NetworkParams::defaults();
    p.side_gain[0] = p.main_gain[0] * 2.0;
    EXPECT_THROW(p.validate(), ParamError);
    p = NetworkParams::defaults();
    p.lambda_s = 0.0;  // MBS-only deployments are valid
    EXPECT_NO_THROW(p.validate());
}

TEST(Params, UnitConversionsRoundTrip)
{
    for (double x : {-30.0, 0.0, 3.0, 24.0}) {
        EXPECT_NEAR(linear_to_db(db_to_linear(x)), x, 1e-12);
        EXPECT_NEAR(watt_to_dbm(dbm_to_watt(x)), x, 1e-12);
    }
    EXPECT_NEAR(dbm_to_watt(30.0), 1.0, 1e-15);
    EXPECT_NEAR(deg_to_rad(180.0), M_PI, 1e-15);
    EXPECT_NEAR(per_m2_to_per_km2(per_km2_to_per_m2(37.0)), 37.0, 1e-12);
}

TEST(Params, EnumStringsRoundTrip)
{
    for (Link l : {Link::ULAccess, Link::ULBackhaul, Link::DLAccess, Link::DLBackhaul})
        EXPECT_EQ(link_from_string(to_string(l)), l);
    EXPECT_EQ(access_scheme_from_string("dynamic"), AccessScheme::Dynamic);
    EXPECT_EQ(backhaul_scheme_from_string("uab"), BackhaulScheme::UAB);
    EXPECT_THROW(link_from_string("sideways"), ParamError);
}

TEST(Params, HashSeesEveryChange)
{
    const auto p = NetworkParams::defaults();
    const ModelOptions o;
    const auto h = params_hash(p, o);
    EXPECT_EQ(h, params_hash(p, o));
    auto q = p;
    q.p_dl = 0.5;
    EXPECT_NE(h, params_hash(q, o));
    auto oo = o;
    oo.reference_forms = true;
    EXPECT_NE(h, params_hash(p, oo));
}
