#include "mmtdd/frame.hpp"

#include "mmtdd/loadmodel.hpp"
#include "mmtdd/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmtdd {

namespace {

double idle_prob(double eps) { return std::pow(1.0 + eps / 3.5, -3.5); }

}  // namespace

std::vector<IntAtom> random_rounding(double x)
{
    if (!(x >= 0.0) || !std::isfinite(x)) throw ParamError("random_rounding: x must be finite and >= 0");
    const double f = std::floor(x);
    const double frac = x - f;
    const int lo = static_cast<int>(f);
    if (frac == 0.0) return {{lo, 1.0}};
    return {{lo, 1.0 - frac}, {lo + 1, frac}};
}

std::vector<IntAtom> access_split_pmf(double delta, int F)
{
    if (!(delta >= 0.0 && delta <= 1.0)) throw ParamError("delta: must lie in [0,1]");
    if (F < 1) throw ParamError("F: must be a positive integer");
    return random_rounding(delta * F);
}

std::vector<double> static_fad_pmf(double gamma, int Fa)
{
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParamError("static_fad_pmf: gamma must lie in [0,1]");
    if (Fa < 0) throw ParamError("static_fad_pmf: F_a must be >= 0");
    std::vector<double> pmf(static_cast<std::size_t>(Fa) + 1, 0.0);
    for (const auto& a : random_rounding(gamma * Fa)) pmf[std::min(a.value, Fa)] += a.prob;
    return pmf;
}

DynamicFad dynamic_fad_pmf(double eps, double eta, int Fa, double tail)
{
    if (Fa < 0) throw ParamError("dynamic_fad_pmf: F_a must be >= 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw ParamError("dynamic_fad_pmf: eta must lie in [0,1]");
    DynamicFad out;
    out.pmf.assign(static_cast<std::size_t>(Fa) + 1, 0.0);
    out.with_ul.assign(static_cast<std::size_t>(Fa) + 1, 0.0);
    out.p_no_dl = idle_prob(eps * eta);
    out.p_no_ul = idle_prob(eps * (1.0 - eta));
    // gamma = 1(N_d > 0) N_d / (N_u + N_d); F_ad is its randomized rounding.
    const auto total = nb_table(3.5, eps, tail);
    double mass = 0.0;
    for (std::size_t n = 0; n < total.size(); ++n) {
        const int nn = static_cast<int>(n);
        for (int n2 = 0; n2 <= nn; ++n2) {
            const int n1 = nn - n2;
            const double w = joint_pmf(eps, eta, n1, n2, 3.5);
            if (w == 0.0) continue;
            mass += w;
            const double x = n2 > 0 ? static_cast<double>(n2) * Fa / nn : 0.0;
            for (const auto& a : random_rounding(x)) {
                out.pmf[a.value] += w * a.prob;
                if (n1 > 0) out.with_ul[a.value] += w * a.prob;
            }
        }
    }
    if (!(mass > 0.0)) throw NumericError("dynamic_fad_pmf: empty load support");
    for (std::size_t k = 0; k < out.pmf.size(); ++k) {
        out.pmf[k] /= mass;
        out.with_ul[k] /= mass;
    }
    return out;
}

std::vector<SubframeLayout> layout_atoms(const NetworkParams& p)
{
    std::vector<SubframeLayout> out;
    for (const auto& fa : access_split_pmf(p.delta, p.F)) {
        for (const auto& fbd : random_rounding(p.eta * (p.F - fa.value))) {
            for (const auto& fad : random_rounding(p.eta * fa.value)) {
                SubframeLayout l;
                l.F = p.F;
                l.Fa = fa.value;
                l.Fbd = fbd.value;
                l.Fad = fad.value;
                l.prob = fa.prob * fbd.prob * fad.prob;
                if (l.prob > 0.0) out.push_back(l);
            }
        }
    }
    return out;
}

EffectiveDensities effective_densities(const NetworkParams& p)
{
    return effective_densities(p, association_probability(p));
}

EffectiveDensities effective_densities(const NetworkParams& p, double A_m)
{
    EffectiveDensities e;
    e.A_m = A_m;
    e.A_s = 1.0 - A_m;
    const double A[2] = {e.A_m, e.A_s};
    for (Tier t : {Tier::M, Tier::S}) {
        const int k = idx(t);
        const double lam = p.lambda(t);
        if (lam <= 0.0) continue;
        e.eps_all[k] = p.lambda_u * A[k] / lam;
        e.eps_u[k] = e.eps_all[k] * (1.0 - p.eta);
        e.eps_d[k] = e.eps_all[k] * p.eta;
        e.p_has_ul[k] = 1.0 - idle_prob(e.eps_u[k]);
        e.p_has_dl[k] = 1.0 - idle_prob(e.eps_d[k]);
    }
    const int s = idx(Tier::S);
    if (p.lambda_s <= 0.0) return e;
    e.lambda_su = p.lambda_s * e.p_has_ul[s];
    e.lambda_sd = p.lambda_s * e.p_has_dl[s];
    e.p_void = 1.0 - idle_prob(e.lambda_su / p.lambda_m);
    e.p_mbs_dl = 1.0 - idle_prob(e.lambda_sd / p.lambda_m);
    e.unscheduled_sbs =
        std::max(0.0, p.lambda_s - (1.0 - idle_prob(p.lambda_s / p.lambda_m)) * p.lambda_m);
    e.lambda_hat = p.p_ul * e.unscheduled_sbs * e.p_has_ul[s];
    e.lambda_bar_u = e.lambda_hat;
    e.lambda_bar_d = p.p_dl * e.unscheduled_sbs * e.p_has_dl[s];
    e.lambda_hat_d = e.lambda_bar_d;
    return e;
}

SlotActivity::SlotActivity(const NetworkParams& p, const EffectiveDensities& eff,
                           const SubframeLayout& lay, UeActivityRule rule)
    : p_(p), eff_(eff), lay_(lay), rule_(rule)
{
    if (p.access_scheme == AccessScheme::Dynamic) {
        for (Tier t : {Tier::M, Tier::S})
            dyn_[idx(t)] = dynamic_fad_pmf(eff.eps_all[idx(t)], p.eta, lay.Fa);
    }
}

void SlotActivity::check_slot(int i) const
{
    if (i < 1 || i > lay_.Fa)
        throw ParamError("slot " + std::to_string(i) + " outside the access subframe 1.."
                         + std::to_string(lay_.Fa));
}

double SlotActivity::dl_active(int i, Tier nu) const
{
    check_slot(i);
    if (p_.lambda(nu) <= 0.0) return 0.0;
    if (p_.access_scheme == AccessScheme::Static)
        return i <= lay_.Fad ? eff_.p_has_dl[idx(nu)] : 0.0;
    const auto& pmf = dyn_[idx(nu)].pmf;
    double acc = 0.0;
    for (int n = i; n <= lay_.Fa; ++n) acc += pmf[n];
    return std::clamp(acc, 0.0, 1.0);
}

double SlotActivity::ul_active(int i, Tier k) const
{
    check_slot(i);
    if (p_.lambda(k) <= 0.0) return 0.0;
    if (p_.access_scheme == AccessScheme::Static)
        return i > lay_.Fad ? eff_.p_has_ul[idx(k)] : 0.0;
    const auto& law = dyn_[idx(k)];
    double below = 0.0;
    double below_ul = 0.0;
    for (int n = 0; n < i; ++n) {
        below += law.pmf[n];
        below_ul += law.with_ul[n];
    }
    if (rule_ == UeActivityRule::Exact) return std::clamp(below_ul, 0.0, 1.0);
    return std::clamp(below - law.p_no_ul, 0.0, 1.0);
}

}  // namespace mmtdd
