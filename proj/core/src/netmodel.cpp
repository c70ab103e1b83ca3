#include "mmtdd/netmodel.hpp"

#include "mmtdd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mmtdd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLight = 3e8;

void require_nonneg(double d, const char* what)
{
    if (!(d >= 0.0)) throw ParamError(std::string(what) + ": distance must be >= 0");
}

}  // namespace

double reference_pathloss(double f_c)
{
    if (!(f_c > 0.0)) throw ParamError("f_c: must be > 0");
    const double a = kLight / (4.0 * kPi * f_c);
    return a * a;
}

double noise_power_dbm(double W)
{
    if (!(W > 0.0)) throw ParamError("W: must be > 0");
    return -174.0 + 10.0 * std::log10(W) + 5.0;
}

double noise_power(double W) { return dbm_to_watt(noise_power_dbm(W)); }

double los_probability(const NetworkParams& p, double d)
{
    require_nonneg(d, "los_probability");
    return d <= p.d_los ? p.p_los : 0.0;
}

double nlos_probability(const NetworkParams& p, double d) { return 1.0 - los_probability(p, d); }

double GainPMF::mean() const
{
    double m = 0.0;
    for (const auto& a : atoms) m += a.gain * a.prob;
    return m;
}

double GainPMF::total_prob() const
{
    double s = 0.0;
    for (const auto& a : atoms) s += a.prob;
    return s;
}

GainPMF gain_pmf(Device tx, Device rx, const NetworkParams& p)
{
    const double G1 = p.main_gain[idx(tx)], g1 = p.side_gain[idx(tx)];
    const double G2 = p.main_gain[idx(rx)], g2 = p.side_gain[idx(rx)];
    const double q1 = p.beamwidth[idx(tx)] / (2.0 * kPi);
    const double q2 = p.beamwidth[idx(rx)] / (2.0 * kPi);
    GainPMF out;
    if (tx == rx) {
        out.atoms = {{G1 * G1, q1 * q1}, {G1 * g1, 2.0 * q1 * (1.0 - q1)}, {g1 * g1, (1.0 - q1) * (1.0 - q1)}};
    } else {
        out.atoms = {{G1 * G2, q1 * q2},
                     {G1 * g2, q1 * (1.0 - q2)},
                     {g1 * G2, (1.0 - q1) * q2},
                     {g1 * g2, (1.0 - q1) * (1.0 - q2)}};
    }
    return out;
}

TierIntensity::TierIntensity(double lambda, double p_los, double d_los, double alpha_l,
                             double alpha_n)
    : lambda_(lambda), p_(p_los), d_(d_los), al_(alpha_l), an_(alpha_n),
      knot_l_(std::pow(d_los, alpha_l)), knot_n_(std::pow(d_los, alpha_n))
{
}

double TierIntensity::value(double tau) const
{
    if (!(tau > 0.0)) {
        if (tau == 0.0) return 0.0;
        throw ParamError("propagation_intensity: tau must be > 0");
    }
    if (lambda_ <= 0.0) return 0.0;
    const double tn = std::pow(tau, 2.0 / an_);
    double v;
    if (tau < knot_l_)
        v = p_ * std::pow(tau, 2.0 / al_) + (1.0 - p_) * tn;
    else if (tau <= knot_n_)
        v = p_ * d_ * d_ + (1.0 - p_) * tn;
    else
        v = tn;
    return kPi * lambda_ * v;
}

double TierIntensity::density(double tau) const
{
    if (!(tau > 0.0)) throw ParamError("propagation_intensity: tau must be > 0");
    if (lambda_ <= 0.0) return 0.0;
    const double base = 2.0 * kPi * lambda_ * std::pow(tau, 2.0 / an_ - 1.0) / an_;
    double factor;
    if (tau < knot_l_)
        factor = an_ * p_ * std::pow(tau, 2.0 / al_ - 2.0 / an_) / al_ + 1.0 - p_;
    else if (tau <= knot_n_)
        factor = 1.0 - p_;
    else
        factor = 1.0;
    return base * factor;
}

double TierIntensity::inverse(double v) const
{
    if (lambda_ <= 0.0) return std::numeric_limits<double>::infinity();
    if (v <= 0.0) return 0.0;
    // Lambda is continuous and strictly increasing except on the flat LOS
    // plateau when p_los = 1; bisection in log tau returns the left end.
    double lo = -400.0, hi = 400.0;
    for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (value(std::exp(mid)) >= v)
            hi = mid;
        else
            lo = mid;
    }
    return std::exp(hi);
}

TierIntensity tier_intensity(const NetworkParams& p, Tier t)
{
    return {p.lambda(t), p.p_los, p.d_los, p.alpha_l, p.alpha_n};
}

double association_probability(const NetworkParams& p)
{
    if (p.lambda_s <= 0.0) return 1.0;
    const TierIntensity Lm = tier_intensity(p, Tier::M);
    const TierIntensity Ls = tier_intensity(p, Tier::S);
    const double c = p.assoc_weight(Tier::S) / p.assoc_weight(Tier::M);
    // A_m = int V_s(c tau) v_m(tau) dtau, integrated in y = ln tau between
    // the points where Lambda_m is negligible and where V_m has vanished.
    const double y0 = std::log(Lm.inverse(1e-17));
    const double y1 = std::log(Lm.inverse(60.0));
    std::vector<double> br = {std::log(Lm.knot_l()), std::log(Lm.knot_n()),
                              std::log(Ls.knot_l() / c), std::log(Ls.knot_n() / c)};
    const quad::Nodes nodes = quad::composite(br, y0, y1, 0.25, 16);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double tau = std::exp(nodes.x[k]);
        acc += nodes.w[k] * tau * Lm.density(tau) * std::exp(-Lm.value(tau) - Ls.value(c * tau));
    }
    if (!std::isfinite(acc)) throw NumericError("association_probability: non-finite result");
    return std::clamp(acc, 0.0, 1.0);
}

double void_probability(const NetworkParams& p, Tier t, LinkType m, double R)
{
    require_nonneg(R, "serving_distance");
    const double lam = p.lambda(t);
    const double rl = std::min(R, p.d_los);
    const double e = m == LinkType::LOS ? p.p_los * rl * rl : R * R - p.p_los * rl * rl;
    return std::exp(-kPi * lam * e);
}

double serving_pdf(const NetworkParams& p, Tier t, LinkType m, double R)
{
    require_nonneg(R, "serving_distance");
    const double lam = p.lambda(t);
    const double pm = link_probability(p, m, R);
    if (pm <= 0.0) return 0.0;
    return 2.0 * kPi * lam * R * pm * void_probability(p, t, m, R);
}

ServingDistance serving_distance(const NetworkParams& p, const TierLinkDistance& q)
{
    return {serving_pdf(p, q.tier, q.link, q.R), void_probability(p, q.tier, q.link, q.R)};
}

double association_exclusion(const NetworkParams& p, Tier t, LinkType m, double R)
{
    const double pl = std::pow(R, p.alpha(m));
    double prod = 1.0;
    for (Tier t2 : {Tier::M, Tier::S}) {
        if (p.lambda(t2) <= 0.0) continue;
        const double ratio = p.assoc_weight(t2) / p.assoc_weight(t);
        for (LinkType m2 : {LinkType::LOS, LinkType::NLOS}) {
            if (t2 == t && m2 == m) continue;
            prod *= void_probability(p, t2, m2, std::pow(ratio * pl, 1.0 / p.alpha(m2)));
        }
    }
    return prod;
}

double mbs_exclusion(const NetworkParams& p, LinkType m, double R)
{
    const LinkType other = m == LinkType::LOS ? LinkType::NLOS : LinkType::LOS;
    return void_probability(p, Tier::M, other, std::pow(R, p.alpha(m) / p.alpha(other)));
}

}  // namespace mmtdd
