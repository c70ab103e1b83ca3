#include "mmtdd/rate.hpp"

#include "mmtdd/frame.hpp"
#include "mmtdd/loadmodel.hpp"
#include "mmtdd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <tuple>

namespace mmtdd {

void write_rate_csv_header(std::ostream& os)
{
    os << "scheme_a,scheme_b,eta,delta,p_ul,p_dl,R_ul,R_dl,R_overall,R_ul_m,R_ul_s,R_dl_m,R_dl_s,"
          "Ra_ul,Rb_ul,Ra_dl,Rb_dl\n";
}

void write_rate_csv_row(std::ostream& os, const RateReport& r)
{
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%s,%s,%.6f,%.6f,%.6f,%.6f,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e,%.6e\n",
                  to_string(r.scheme_a), to_string(r.scheme_b), r.eta, r.delta, r.p_ul, r.p_dl, r.R_ul,
                  r.R_dl, r.R_overall, r.R_ul_m, r.R_ul_s, r.R_dl_m, r.R_dl_s, r.Ra_ul, r.Rb_ul, r.Ra_dl,
                  r.Rb_dl);
    os << buf;
}

double spectral_efficiency(std::span<const double> tau_db, std::span<const double> coverage, bool base2)
{
    const std::size_t n = tau_db.size();
    if (n < 2 || coverage.size() != n) throw ParamError("spectral_efficiency: need matching grids of size >= 2");
    const double step = tau_db[1] - tau_db[0];
    for (std::size_t j = 1; j < n; ++j)
        if (std::abs(tau_db[j] - tau_db[j - 1] - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw ParamError("spectral_efficiency: dB grid must be uniform");
    // Substitute u = ln tau: integrand S tau / (1 + tau) du.
    const double h = step * std::numbers::ln10 / 10.0;
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = db_to_linear(tau_db[j]);
        y[j] = coverage[j] * t / (1.0 + t);
    }
    const double t0 = db_to_linear(tau_db[0]);
    const double nats = coverage[0] * std::log1p(t0) + quad::simpson(y, h);
    return base2 ? nats / std::numbers::ln2 : nats;
}

namespace {

// Accumulates w(n1, n2) into slot weights given the F_ad atoms of the
// tagged BS. `dl` selects slots i <= F_ad and the DL share.
std::vector<double> slot_weights(const NetworkParams& p, const SubframeLayout& lay, double eps, double tail,
                                 bool dl)
{
    const int Fa = lay.Fa;
    std::vector<double> at(static_cast<std::size_t>(Fa) + 1, 0.0);  // mass by F_ad value
    if (Fa == 0) return {};
    const bool dynamic = p.access_scheme == AccessScheme::Dynamic;
    const auto total = nb_table(4.5, eps, tail);
    for (std::size_t n = 0; n < total.size(); ++n) {
        const int nn = static_cast<int>(n);
        for (int n2 = 0; n2 <= nn; ++n2) {
            const int n1 = nn - n2;
            const double w = joint_pmf(eps, p.eta, n1, n2, 4.5);
            if (w == 0.0) continue;
            // The typical UE joins its own direction at the tagged BS.
            const double share = dl ? 1.0 / (n2 + 1) : 1.0 / (n1 + 1);
            if (!dynamic) {
                at[lay.Fad] += w * share;
                continue;
            }
            const double gamma = dl ? static_cast<double>(n2 + 1) / (nn + 1) : static_cast<double>(n2) / (nn + 1);
            for (const auto& a : random_rounding(gamma * Fa)) at[std::min(a.value, Fa)] += w * share * a.prob;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(Fa), 0.0);
    for (int i = 1; i <= Fa; ++i) {
        double acc = 0.0;
        if (dl)
            for (int f = i; f <= Fa; ++f) acc += at[f];
        else
            for (int f = 0; f < i; ++f) acc += at[f];
        out[i - 1] = acc;
    }
    return out;
}

}  // namespace

std::vector<double> ul_slot_weights(const NetworkParams& p, const SubframeLayout& lay, double eps, double tail)
{
    return slot_weights(p, lay, eps, tail, false);
}

std::vector<double> dl_slot_weights(const NetworkParams& p, const SubframeLayout& lay, double eps, double tail)
{
    return slot_weights(p, lay, eps, tail, true);
}

RateReport mean_rate(const NetworkParams& p, const ModelOptions& o, std::shared_ptr<KTableCache> cache)
{
    const CoverageEngine eng(p, o, std::move(cache));
    const auto& eff = eng.model().densities();
    const bool uab = p.backhaul_scheme == BackhaulScheme::UAB;
    const bool base2 = !o.reference_forms;
    const double tail = o.load_tail;

    // Slot coverage depends on the atom only through (F_a, F_bd, F_ad).
    std::map<std::tuple<int, int, int, int, int, int>, double> se_cache;
    auto se = [&](Link l, int i, const SubframeLayout& lay, Tier t) {
        const auto key = std::make_tuple(static_cast<int>(l), i, lay.Fa, lay.Fbd, lay.Fad, idx(t));
        auto it = se_cache.find(key);
        if (it != se_cache.end()) return it->second;
        const auto cov = eng.slot_coverage(l, i, lay, t);
        const double v = spectral_efficiency(eng.tau_db(), cov, base2);
        se_cache.emplace(key, v);
        return v;
    };

    RateReport r;
    r.scheme_a = p.access_scheme;
    r.scheme_b = p.backhaul_scheme;
    r.eta = p.eta;
    r.delta = p.delta;
    r.p_ul = p.p_ul;
    r.p_dl = p.p_dl;
    r.params_hash = params_hash(p, o);
    r.A_m = eff.A_m;
    r.A_s = eff.A_s;

    const double unit = p.W / p.F;
    const bool has_s = p.lambda_s > 0.0 && eff.A_s > 0.0;
    const int s = idx(Tier::S);
    // Backhaul sharing at the serving MBS and UE sharing at the tagged SBS.
    const double inv_nsu = has_s ? tagged_inverse_mean(eff.lambda_su / p.lambda_m, tail) : 0.0;
    const double inv_nsd = has_s ? tagged_inverse_mean(eff.lambda_sd / p.lambda_m, tail) : 0.0;
    const double inv_nu = has_s ? tagged_inverse_mean(eff.eps_u[s], tail) : 0.0;
    const double inv_nd = has_s ? tagged_inverse_mean(eff.eps_d[s], tail) : 0.0;

    for (const auto& lay : layout_atoms(p)) {
        const double pr = lay.prob;
        // MBS-attached users.
        {
            const double eps = eff.eps_all[idx(Tier::M)];
            const auto wu = ul_slot_weights(p, lay, eps, tail);
            const auto wd = dl_slot_weights(p, lay, eps, tail);
            double ul = 0.0, dl = 0.0;
            for (int i = 1; i <= lay.Fa; ++i) {
                if (wu[i - 1] > 0.0) ul += wu[i - 1] * se(Link::ULAccess, i, lay, Tier::M);
                if (wd[i - 1] > 0.0) dl += wd[i - 1] * se(Link::DLAccess, i, lay, Tier::M);
            }
            r.R_ul_m += pr * unit * ul;
            r.R_dl_m += pr * unit * dl;
        }
        if (!has_s) continue;
        const double eps = eff.eps_all[s];
        const auto wu = ul_slot_weights(p, lay, eps, tail);
        const auto wd = dl_slot_weights(p, lay, eps, tail);
        double ra_ul = 0.0, ra_dl = 0.0, rb_ul = 0.0, rb_dl = 0.0;
        for (int i = 1; i <= lay.Fa; ++i) {
            if (wu[i - 1] > 0.0) ra_ul += wu[i - 1] * se(Link::ULAccess, i, lay, Tier::S);
            if (wd[i - 1] > 0.0) ra_dl += wd[i - 1] * se(Link::DLAccess, i, lay, Tier::S);
        }
        for (int i = lay.Fa + 1; i <= lay.F; ++i) {
            if (lay.is_backhaul_ul(i)) {
                rb_ul += inv_nsu * inv_nu * se(Link::ULBackhaul, i, lay, Tier::M);
                if (uab) ra_ul += (1.0 - inv_nsu) * p.p_ul * inv_nu * se(Link::ULAccess, i, lay, Tier::S);
            } else if (lay.is_backhaul_dl(i)) {
                rb_dl += inv_nsd * inv_nd * se(Link::DLBackhaul, i, lay, Tier::M);
                if (uab) ra_dl += (1.0 - inv_nsd) * p.p_dl * inv_nd * se(Link::DLAccess, i, lay, Tier::S);
            }
        }
        r.Ra_ul += pr * unit * ra_ul;
        r.Rb_ul += pr * unit * rb_ul;
        r.Ra_dl += pr * unit * ra_dl;
        r.Rb_dl += pr * unit * rb_dl;
        r.R_ul_s += pr * unit * std::min(ra_ul, rb_ul);
        r.R_dl_s += pr * unit * std::min(ra_dl, rb_dl);
    }
    r.R_ul = r.A_m * r.R_ul_m + r.A_s * r.R_ul_s;
    r.R_dl = r.A_m * r.R_dl_m + r.A_s * r.R_dl_s;
    r.R_overall = p.eta * r.R_dl + (1.0 - p.eta) * r.R_ul;
    return r;
}

std::vector<double> default_delta_set()
{
    std::vector<double> d;
    for (int k = 1; k <= 10; ++k) d.push_back(k / 10.0);
    return d;
}

DeltaSweep optimize_delta(const NetworkParams& p, const ModelOptions& o, std::vector<double> deltas,
                          DeltaObjective obj, std::shared_ptr<KTableCache> cache)
{
    if (deltas.empty()) throw ParamError("optimize_delta: empty delta set");
    std::sort(deltas.begin(), deltas.end());
    if (!cache) cache = std::make_shared<KTableCache>();
    DeltaSweep out;
    double best = -1.0;
    for (double d : deltas) {
        NetworkParams q = p;
        q.delta = d;
        q.validate();
        RateReport r = mean_rate(q, o, cache);
        const double v = obj == DeltaObjective::Overall ? r.R_overall : r.two_hop();
        if (v > best) {
            best = v;
            out.delta_star = d;
            out.best = r;
        }
        out.sweep.push_back(r);
    }
    return out;
}

}  // namespace mmtdd
