#include "mmtdd/interference.hpp"

#include "mmtdd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

namespace mmtdd {

namespace {

constexpr double kPi = std::numbers::pi;
// Lambda below this value carries negligible interferer mass.
constexpr double kHeadMass = 1e-13;
// exp(-50) is far below double resolution relative to 1.
constexpr double kSaturation = 50.0;

}  // namespace

Weight Weight::one_minus_exp(const TierIntensity& l, double scale)
{
    Weight w;
    w.kind = Kind::OneMinusExp;
    w.lam = l;
    w.scale = scale;
    return w;
}

Weight Weight::void_mix(const TierIntensity& l, double p_void)
{
    Weight w;
    w.kind = Kind::VoidMix;
    w.lam = l;
    w.p_void = p_void;
    return w;
}

double Weight::value(double r) const
{
    switch (kind) {
    case Kind::Const: return 1.0;
    case Kind::OneMinusExp: return -std::expm1(-lam.value(scale * r));
    case Kind::VoidMix: {
        const double e = std::exp(-lam.value(r));
        return p_void * (1.0 - e) + e;
    }
    }
    return 1.0;
}

double Weight::at_infinity() const
{
    switch (kind) {
    case Kind::Const: return 1.0;
    case Kind::OneMinusExp: return lam.empty() ? 0.0 : 1.0;
    case Kind::VoidMix: return lam.empty() ? 1.0 : p_void;
    }
    return 1.0;
}

double Weight::saturation() const
{
    if (kind == Kind::Const || lam.empty()) return 0.0;
    const double s = lam.inverse(kSaturation);
    return kind == Kind::OneMinusExp ? s / scale : s;
}

std::vector<double> Weight::knots() const
{
    if (kind == Kind::Const || lam.empty()) return {};
    const double sc = kind == Kind::OneMinusExp ? scale : 1.0;
    return {lam.knot_l() / sc, lam.knot_n() / sc};
}

double ShotKernel::operator()(double x) const
{
    if (!(x > 0.0)) return 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < D.size(); ++j) acc += W[j] * x / (x + D[j]);
    if (tail_c > 0.0) {
        const double b = tail_beta;
        const double z = x / (x + tail_T);
        acc += tail_c * std::pow(x, b) * (kPi / std::sin(kPi * b))
               * boost::math::ibeta(1.0 - b, b, z);
    }
    return acc;
}

double ShotKernel::mass() const
{
    double m = 0.0;
    for (double w : W) m += w;
    return m;
}

ShotKernel radial_kernel(const TierIntensity& lam, const Weight& w, double lower)
{
    ShotKernel k;
    // A OneMinusExp weight over an empty tier vanishes identically.
    if (lam.empty() || (w.kind == Weight::Kind::OneMinusExp && w.lam.empty())) return k;
    const double lo = std::max(lower, lam.inverse(kHeadMass));
    const double T = std::max({lam.knot_n(), w.saturation(), lo});
    if (T > lo) {
        std::vector<double> br = {std::log(lam.knot_l()), std::log(lam.knot_n())};
        for (double kn : w.knots()) br.push_back(std::log(kn));
        const quad::Nodes nodes = quad::composite(br, std::log(lo), std::log(T), 1.0, 8);
        k.D.reserve(nodes.size());
        k.W.reserve(nodes.size());
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const double r = std::exp(nodes.x[j]);
            const double wt = nodes.w[j] * r * lam.density(r) * w.value(r);
            if (wt > 0.0) {
                k.D.push_back(r);
                k.W.push_back(wt);
            }
        }
    }
    // Beyond T only NLOS links remain and w is constant.
    k.tail_c = w.at_infinity() * 2.0 * kPi * lam.lambda() / lam.alpha_n();
    k.tail_beta = 2.0 / lam.alpha_n();
    k.tail_T = T;
    return k;
}

ShotKernel exact_ul_kernel(const NetworkParams& p, double lambda_nu, double R, const double r_excl[2])
{
    ShotKernel k;
    if (lambda_nu <= 0.0) return k;
    const double dl = p.d_los;
    const double pl = p.p_los;
    const double rl = r_excl[idx(LinkType::LOS)];
    const double rn = r_excl[idx(LinkType::NLOS)];

    // Fraction of the circle of radius d around the receiver lying within
    // distance rho of the reference UE.
    auto frac = [R](double d, double rho) {
        if (rho <= 0.0) return 0.0;
        if (R + d <= rho) return 1.0;
        if (std::abs(R - d) >= rho) return 0.0;
        const double c = (d * d + R * R - rho * rho) / (2.0 * d * R);
        return std::acos(std::clamp(c, -1.0, 1.0)) / kPi;
    };
    // Angular share of interferers at distance d from the receiver that do
    // not out-compete it for the UE, weighted by their link-type law.
    auto share = [&](double d) {
        const double fd = frac(d, dl);
        const double los = pl * std::max(0.0, fd - frac(d, rl));
        const double fn = frac(d, rn);
        const double nlos = (1.0 - fn) - pl * std::max(0.0, fd - fn);
        return std::max(0.0, los + nlos);
    };

    const double d_lo = std::sqrt(kHeadMass / (kPi * lambda_nu));
    const double T = R + std::max(dl, rn);
    std::vector<double> br = {d_lo, T, dl};
    for (double rho : {rl, rn, dl}) {
        br.push_back(std::abs(R - rho));
        br.push_back(R + rho);
    }
    std::erase_if(br, [&](double b) { return !(b >= d_lo && b <= T) || !std::isfinite(b); });
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    // Panels in d with a cosine map at both ends, which absorbs the
    // square-root behaviour of the arc fractions at tangency points.
    const quad::Rule& rule = quad::gauss_legendre(8);
    const double al = p.alpha_l, an = p.alpha_n;
    auto emit = [&](double a, double b) {
        const double h = b - a;
        for (std::size_t j = 0; j < rule.x.size(); ++j) {
            const double t = 0.5 * (rule.x[j] + 1.0);
            const double d = a + 0.5 * h * (1.0 - std::cos(kPi * t));
            const double jac = 0.5 * h * kPi * std::sin(kPi * t) * 0.5 * rule.w[j];
            const double mass = 2.0 * kPi * lambda_nu * d * share(d) * jac;
            if (!(mass > 0.0)) continue;
            if (d <= dl) {
                k.D.push_back(std::pow(d, al));
                k.W.push_back(pl * mass);
                k.D.push_back(std::pow(d, an));
                k.W.push_back((1.0 - pl) * mass);
            } else {
                k.D.push_back(std::pow(d, an));
                k.W.push_back(mass);
            }
        }
    };
    for (std::size_t s = 0; s + 1 < br.size(); ++s) {
        const double a = br[s], b = br[s + 1];
        const int n = std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(1.5))));
        const double q = std::pow(b / a, 1.0 / n);
        double x0 = a;
        for (int j = 0; j < n; ++j) {
            const double x1 = j + 1 == n ? b : x0 * q;
            emit(x0, x1);
            x0 = x1;
        }
    }
    // Past T every interferer is NLOS to the receiver and outside every
    // exclusion ball, so the tail is the plain NLOS shot integral.
    k.tail_c = 2.0 * kPi * lambda_nu / an;
    k.tail_beta = 2.0 / an;
    k.tail_T = std::pow(T, an);
    return k;
}

InterferenceModel::InterferenceModel(const NetworkParams& p, const ModelOptions& o) : p_(p), o_(o)
{
    p_.validate();
    o_.validate();
    eff_ = effective_densities(p_);
    lam_[0] = tier_intensity(p_, Tier::M);
    lam_[1] = tier_intensity(p_, Tier::S);
    for (Device a : {Device::M, Device::S, Device::U})
        for (Device b : {Device::M, Device::S, Device::U}) gains_[idx(a)][idx(b)] = gain_pmf(a, b, p_);
    C0_ = reference_pathloss(p_.f_c);
    noise_ = o_.noise_override >= 0.0 ? o_.noise_override : noise_power(p_.W);
}

const SlotActivity& InterferenceModel::activity(const SubframeLayout& lay) const
{
    std::lock_guard lock(mu_);
    const auto key = std::make_pair(lay.Fa, lay.Fad);
    auto it = acts_.find(key);
    if (it == acts_.end())
        it = acts_.emplace(key, std::make_unique<SlotActivity>(p_, eff_, lay, o_.ue_activity)).first;
    return *it->second;
}

void InterferenceModel::check_feasible(const LaplaceQuery& q) const
{
    const auto& L = q.layout;
    const int i = q.slot;
    auto fail = [&](const std::string& why) {
        throw ParamError(std::string("infeasible ") + to_string(q.link) + " query in slot "
                         + std::to_string(i) + ": " + why);
    };
    if (!(q.R > 0.0)) fail("serving distance must be > 0");
    if (i < 1 || i > L.F) fail("slot outside 1..F");
    if (q.link_type == LinkType::LOS && q.R > p_.d_los) fail("LOS serving link beyond d_los");
    const bool uab = p_.backhaul_scheme == BackhaulScheme::UAB;
    switch (q.link) {
    case Link::ULAccess:
        if (L.is_access(i)) return;
        if (uab && q.tier == Tier::S && L.is_backhaul_ul(i)) return;
        fail("UL access outside the access subframe needs UAB, an SBS and an UL backhaul slot");
        break;
    case Link::DLAccess:
        if (L.is_access(i)) return;
        if (uab && q.tier == Tier::S && L.is_backhaul_dl(i)) return;
        fail("DL access outside the access subframe needs UAB, an SBS and a DL backhaul slot");
        break;
    case Link::ULBackhaul:
        if (!L.is_backhaul_ul(i)) fail("not an UL backhaul slot");
        break;
    case Link::DLBackhaul:
        if (!L.is_backhaul_dl(i)) fail("not a DL backhaul slot");
        break;
    }
}

std::vector<FactorSpec> InterferenceModel::factors(const LaplaceQuery& q) const
{
    check_feasible(q);
    const auto& P = p_;
    const Tier t = q.tier;
    const int i = q.slot;
    const auto& L = q.layout;
    const bool dynamic = P.access_scheme == AccessScheme::Dynamic;
    const bool uab = P.backhaul_scheme == BackhaulScheme::UAB;
    const bool strict = o_.reference_forms;
    const double a_mu = P.alpha(q.link_type);
    auto ratio = [&](Tier a, Tier b) { return P.assoc_weight(a) / P.assoc_weight(b); };
    auto per_sbs = [&](double dens) { return P.lambda_s > 0.0 ? dens / P.lambda_s : 0.0; };

    std::vector<FactorSpec> out;
    auto add = [&](std::string key, KernelSpec k, Device tx, Device rx, double power, double act) {
        FactorSpec f;
        f.key = std::move(key);
        f.kernel = std::move(k);
        f.tx = tx;
        f.rx = rx;
        f.power = power;
        f.activity = act * o_.interference_scale;
        out.push_back(std::move(f));
    };
    auto radial = [&](Tier tier, Weight w, double lower_ratio, double lower_alpha) {
        KernelSpec k;
        k.kind = KernelSpec::Kind::Radial;
        k.tier = tier;
        k.weight = std::move(w);
        k.lower_ratio = lower_ratio;
        k.lower_alpha = lower_alpha;
        return k;
    };

    switch (q.link) {
    case Link::ULAccess:
        if (L.is_access(i)) {
            const SlotActivity& act = activity(L);
            if (dynamic) {
                for (Tier nu : {Tier::M, Tier::S}) {
                    if (P.lambda(nu) <= 0.0) continue;
                    KernelSpec k;
                    if (o_.exact_bs_laplace) {
                        k.kind = KernelSpec::Kind::ExactUL;
                        k.tier = nu;
                        k.excl_ratio = ratio(nu, t);
                        k.serving_alpha = a_mu;
                    } else {
                        k = radial(nu, Weight::constant(), 0.0, 1.0);
                    }
                    add(std::string("ula/bs/") + to_string(nu) + (o_.exact_bs_laplace ? "/exact" : "/lb"),
                        k, device_of(nu), device_of(t), P.P(nu), act.dl_active(i, nu));
                }
            }
            for (Tier k : {Tier::M, Tier::S}) {
                if (P.lambda(k) <= 0.0) continue;
                add(std::string("ula/ue/") + to_string(k),
                    radial(k, Weight::one_minus_exp(lam_[idx(k)], ratio(k, t)), 0.0, 1.0), Device::U,
                    device_of(t), P.P(Device::U), act.ul_active(i, k));
            }
        } else {
            add("ula_bh/sbs", radial(Tier::M, Weight::void_mix(lam_[0], eff_.p_void), 0.0, 1.0),
                Device::S, Device::S, P.P(Device::S), 1.0);
            add("ula_bh/ue", radial(Tier::S, Weight::one_minus_exp(lam_[1], 1.0), 0.0, 1.0), Device::U,
                Device::S, P.P(Device::U), per_sbs(eff_.lambda_hat));
        }
        break;
    case Link::ULBackhaul:
        if (P.lambda_s > 0.0) {
            add("ulb/sbs", radial(Tier::M, Weight::one_minus_exp(lam_[0], 1.0), 0.0, 1.0), Device::S,
                Device::M, P.P(Device::S), eff_.p_void);
        }
        if (uab && P.lambda_s > 0.0) {
            add("ulb/ue", radial(Tier::S, Weight::one_minus_exp(lam_[1], 1.0), 0.0, 1.0), Device::U,
                Device::M, P.P(Device::U), per_sbs(eff_.lambda_bar_u));
        }
        break;
    case Link::DLAccess:
        if (L.is_access(i)) {
            const SlotActivity& act = activity(L);
            for (Tier nu : {Tier::M, Tier::S}) {
                if (P.lambda(nu) <= 0.0) continue;
                const double lr = strict ? 1.0 : ratio(nu, t);
                const Device tx = strict ? device_of(t) : device_of(nu);
                add(std::string("dla/bs/") + to_string(nu), radial(nu, Weight::constant(), lr, a_mu), tx,
                    Device::U, P.P(nu), act.dl_active(i, nu));
            }
            if (dynamic) {
                for (Tier k : {Tier::M, Tier::S}) {
                    if (P.lambda(k) <= 0.0) continue;
                    add(std::string("dla/ue/") + to_string(k), radial(k, Weight::constant(), 0.0, 1.0),
                        Device::U, Device::U, P.P(Device::U), act.ul_active(i, k));
                }
            }
        } else {
            add("dla_bh/mbs", radial(Tier::M, Weight::constant(), ratio(Tier::M, Tier::S), a_mu),
                Device::M, Device::U, P.P(Device::M), eff_.p_mbs_dl);
            add("dla_bh/sbs", radial(Tier::S, Weight::constant(), strict ? 0.0 : 1.0, a_mu), Device::S,
                Device::U, P.P(Device::S), per_sbs(eff_.lambda_hat_d));
        }
        break;
    case Link::DLBackhaul: {
        const double la = o_.dl_backhaul_linktype_exclusion ? a_mu : P.alpha_l;
        if (P.lambda_s > 0.0) {
            add("dlb/mbs", radial(Tier::M, Weight::constant(), 1.0, la), Device::M, Device::S,
                P.P(Device::M), eff_.p_mbs_dl);
        }
        if (uab && P.lambda_s > 0.0) {
            if (strict)
                add("dlb/sbs", radial(Tier::S, Weight::constant(), 0.0, 1.0), Device::M, Device::U,
                    P.P(Device::U), per_sbs(eff_.lambda_bar_d));
            else
                add("dlb/sbs", radial(Tier::S, Weight::constant(), 0.0, 1.0), Device::M, Device::S,
                    P.P(Device::S), per_sbs(eff_.lambda_bar_d));
        }
        break;
    }
    }
    return out;
}

ShotKernel InterferenceModel::kernel(const KernelSpec& k, double R) const
{
    if (k.kind == KernelSpec::Kind::ExactUL) {
        double r_excl[2];
        for (LinkType m : {LinkType::LOS, LinkType::NLOS})
            r_excl[idx(m)] = std::pow(k.excl_ratio * std::pow(R, k.serving_alpha), 1.0 / p_.alpha(m));
        return exact_ul_kernel(p_, p_.lambda(k.tier), R, r_excl);
    }
    const double lower = k.lower_ratio > 0.0 ? k.lower_ratio * std::pow(R, k.lower_alpha) : 0.0;
    return radial_kernel(lam_[idx(k.tier)], k.weight, lower);
}

double InterferenceModel::shot(const FactorSpec& f, double R, double s) const
{
    if (!(s > 0.0)) return 0.0;
    const ShotKernel K = kernel(f.kernel, R);
    double acc = 0.0;
    for (const auto& a : gain(f.tx, f.rx).atoms) acc += a.prob * K(s * C0_ * f.power * a.gain);
    return acc;
}

double InterferenceModel::laplace(const LaplaceQuery& q, double s) const
{
    if (s < 0.0) throw ParamError("laplace: s must be >= 0");
    double expo = 0.0;
    for (const auto& f : factors(q)) {
        if (f.activity <= 0.0) continue;
        expo += f.activity * shot(f, q.R, s);
    }
    return std::exp(-expo);
}

double InterferenceModel::laplace_bs_lower_bound(const LaplaceQuery& q, double s) const
{
    if (s < 0.0) throw ParamError("laplace: s must be >= 0");
    double expo = 0.0;
    for (auto f : factors(q)) {
        if (f.activity <= 0.0) continue;
        if (f.kernel.kind == KernelSpec::Kind::ExactUL) {
            f.kernel.kind = KernelSpec::Kind::Radial;
            f.kernel.weight = Weight::constant();
            f.kernel.lower_ratio = 0.0;
        }
        expo += f.activity * shot(f, q.R, s);
    }
    return std::exp(-expo);
}

}  // namespace mmtdd
