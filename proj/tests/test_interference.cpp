#include "mmtdd/interference.hpp"
#include "mmtdd/quadrature.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace mmtdd;

namespace {

LaplaceQuery query(Link l, int slot, const SubframeLayout& lay, Tier t, LinkType m, double R)
{
    LaplaceQuery q;
    q.link = l;
    q.slot = slot;
    q.layout = lay;
    q.tier = t;
    q.link_type = m;
    q.R = R;
    return q;
}

SubframeLayout layout(int F, int Fa, int Fbd, int Fad)
{
    SubframeLayout l;
    l.F = F;
    l.Fa = Fa;
    l.Fbd = Fbd;
    l.Fad = Fad;
    return l;
}

// int_lower^inf w(r) x / (x + r) Lambda(dr) by adaptive quadrature in ln r.
double radial_oracle(const TierIntensity& lam, const Weight& w, double lower, double x)
{
    auto f = [&](double y) {
        if (y > 700.0) return 0.0;  // the integrand decays like exp(-(1 - 2/alpha_n) y)
        const double r = std::exp(y);
        return r * lam.density(r) * w.value(r) * x / (x + r);
    };
    const double lo = std::log(std::max(lower, lam.inverse(1e-15)));
    double acc = 0.0;
    double a = lo;
    std::vector<double> br = {std::log(lam.knot_l()), std::log(lam.knot_n()), 60.0};
    for (double k : w.knots()) br.push_back(std::log(k));
    std::sort(br.begin(), br.end());
    for (double b : br) {
        if (b <= a) continue;
        acc += quad::adaptive(f, a, b, 1e-12, 1e-9);
        a = b;
    }
    return acc + quad::adaptive(f, a, INFINITY, 1e-12, 1e-9);
}

// Plane integral of the exact UL kernel: interferers around the receiver,
// thinned by their link to the UE at (R, 0).
double exact_oracle(const NetworkParams& p, double lambda, double R, const double r_excl[2], double x)
{
    const double dl = p.d_los, pl = p.p_los;
    constexpr int kAngles = 4000;
    auto survive = [&](double e) {
        const double los = e <= dl ? pl : 0.0;
        return los * (e >= r_excl[0] ? 1.0 : 0.0) + (1.0 - los) * (e >= r_excl[1] ? 1.0 : 0.0);
    };
    auto radial = [&](double d) {
        double ang = 0.0;
        for (int k = 0; k < kAngles; ++k) {
            const double th = M_PI * (k + 0.5) / kAngles;
            ang += survive(std::sqrt(d * d + R * R - 2 * d * R * std::cos(th)));
        }
        ang *= 2.0 * M_PI / kAngles;
        const double g = d <= dl ? pl * x / (x + std::pow(d, p.alpha_l)) + (1 - pl) * x / (x + std::pow(d, p.alpha_n))
                                 : x / (x + std::pow(d, p.alpha_n));
        return lambda * d * ang * g;
    };
    std::vector<double> br = {1e-3, dl};
    for (double rho : {r_excl[0], r_excl[1], dl}) {
        br.push_back(std::abs(R - rho));
        br.push_back(R + rho);
    }
    constexpr double kFar = 1e4;
    const auto nodes = quad::composite(br, 1e-3, kFar, 20.0, 16);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += nodes.w[k] * radial(nodes.x[k]);
    // Far field: every interferer survives and x << d^alpha_n.
    return acc + 2 * M_PI * lambda * x * std::pow(kFar, 2 - p.alpha_n) / (p.alpha_n - 2);
}

}  // namespace

TEST(Interference, RadialKernelMatchesDirectQuadrature)
{
    const auto p = NetworkParams::defaults();
    const auto Lm = tier_intensity(p, Tier::M);
    const auto Ls = tier_intensity(p, Tier::S);
    const Weight weights[] = {Weight::constant(), Weight::one_minus_exp(Ls, 0.7), Weight::void_mix(Lm, 0.4)};
    for (const auto& w : weights)
        for (double lower : {0.0, 1e3, 5e6})
            for (double x : {1e2, 1e5, 1e8, 1e11}) {
                const double k = radial_kernel(Ls, w, lower)(x);
                EXPECT_NEAR(k, radial_oracle(Ls, w, lower, x), 1e-6 * k + 1e-12) << lower << " " << x;
            }
}

TEST(Interference, ExactUlKernelMatchesPlaneIntegral)
{
    const auto p = NetworkParams::defaults();
    const double R = 60.0;
    const double r_excl[2] = {35.0, 90.0};
    for (double x : {1e4, 1e6, 1e8}) {
        const double k = exact_ul_kernel(p, 1e-4, R, r_excl)(x);
        EXPECT_NEAR(k, exact_oracle(p, 1e-4, R, r_excl, x), 2e-3 * k) << x;
    }
}

TEST(Interference, LaplaceIsADecreasingTransform)
{
    auto p = NetworkParams::defaults();
    p.access_scheme = AccessScheme::Dynamic;
    p.backhaul_scheme = BackhaulScheme::UAB;
    const InterferenceModel m(p, ModelOptions{});
    const auto lay = layout(4, 2, 1, 1);
    const LaplaceQuery qs[] = {
        query(Link::ULAccess, 1, lay, Tier::S, LinkType::NLOS, 80.0),
        query(Link::DLAccess, 2, lay, Tier::M, LinkType::LOS, 40.0),
        query(Link::DLAccess, 3, lay, Tier::S, LinkType::NLOS, 120.0),
        query(Link::ULAccess, 4, lay, Tier::S, LinkType::NLOS, 120.0),
        query(Link::ULBackhaul, 4, lay, Tier::M, LinkType::NLOS, 150.0),
        query(Link::DLBackhaul, 3, lay, Tier::M, LinkType::LOS, 150.0),
    };
    for (const auto& q : qs) {
        EXPECT_DOUBLE_EQ(m.laplace(q, 0.0), 1.0);
        double prev = 1.0;
        for (double s : {1e3, 1e6, 1e9, 1e12, 1e15}) {
            const double v = m.laplace(q, s);
            EXPECT_GT(v, 0.0);
            EXPECT_LE(v, prev + 1e-15);
            prev = v;
        }
    }
}

TEST(Interference, DroppingTheExclusionLowersTheTransform)
{
    auto p = NetworkParams::defaults();
    p.access_scheme = AccessScheme::Dynamic;
    const InterferenceModel m(p, ModelOptions{});
    const auto lay = layout(5, 5, 0, 2);
    for (Tier t : {Tier::M, Tier::S})
        for (double R : {20.0, 100.0, 300.0}) {
            const auto q = query(Link::ULAccess, 2, lay, t, LinkType::NLOS, R);
            for (double s : {1e6, 1e9, 1e12}) EXPECT_LE(m.laplace_bs_lower_bound(q, s), m.laplace(q, s) + 1e-15);
        }
}

TEST(Interference, InfeasibleQueriesThrow)
{
    const InterferenceModel m(NetworkParams::defaults(), ModelOptions{});
    const auto lay = layout(4, 2, 1, 1);
    EXPECT_THROW(m.check_feasible(query(Link::DLBackhaul, 1, lay, Tier::M, LinkType::NLOS, 50)), ParamError);
    EXPECT_THROW(m.check_feasible(query(Link::ULBackhaul, 3, lay, Tier::M, LinkType::NLOS, 50)), ParamError);
    // SAB never schedules access in backhaul slots.
    EXPECT_THROW(m.check_feasible(query(Link::ULAccess, 4, lay, Tier::S, LinkType::NLOS, 50)), ParamError);
    EXPECT_THROW(m.check_feasible(query(Link::ULAccess, 5, lay, Tier::M, LinkType::NLOS, 50)), ParamError);
    EXPECT_THROW(m.check_feasible(query(Link::DLAccess, 1, lay, Tier::M, LinkType::LOS, 500)), ParamError);
    EXPECT_NO_THROW(m.check_feasible(query(Link::ULBackhaul, 4, lay, Tier::M, LinkType::NLOS, 50)));
}

TEST(Interference, ZeroScaleSilencesEveryInterferer)
{
    ModelOptions o;
    o.interference_scale = 0.0;
    const InterferenceModel m(NetworkParams::defaults(), o);
    const auto q = query(Link::DLAccess, 1, layout(1, 1, 0, 1), Tier::M, LinkType::NLOS, 100.0);
    EXPECT_DOUBLE_EQ(m.laplace(q, 1e12), 1.0);
}
