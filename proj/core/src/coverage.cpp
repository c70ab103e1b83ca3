#include "mmtdd/coverage.hpp"

#include "mmtdd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <tbb/parallel_for.h>

namespace mmtdd {

namespace {

// exp(-27.6) ~ 1e-12: the serving-distance law carries no mass beyond.
constexpr double kVoidLog = 27.6;

std::string fmt_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Under static TDD an access slot has one network-wide direction, so the
// other direction is never scheduled there.
bool carries(Link l, int slot, const SubframeLayout& lay, Tier t, bool uab, bool fixed_dir)
{
    switch (l) {
    case Link::ULAccess:
        if (lay.is_access(slot)) return !fixed_dir || slot > lay.Fad;
        return uab && t == Tier::S && lay.is_backhaul_ul(slot);
    case Link::DLAccess:
        if (lay.is_access(slot)) return !fixed_dir || slot <= lay.Fad;
        return uab && t == Tier::S && lay.is_backhaul_dl(slot);
    case Link::ULBackhaul: return lay.is_backhaul_ul(slot);
    case Link::DLBackhaul: return lay.is_backhaul_dl(slot);
    }
    return false;
}

}  // namespace

std::vector<double> db_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !(hi >= lo)) throw ParamError("tau grid: need step > 0 and hi >= lo");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int k = 0; k <= n; ++k) out.push_back(lo + k * step);
    return out;
}

double CoverageCurve::threshold_at(double level) const
{
    for (std::size_t j = 0; j + 1 < coverage.size(); ++j) {
        const double a = coverage[j], b = coverage[j + 1];
        if (a >= level && b < level) {
            const double f = (a - level) / (a - b);
            return tau_db[j] + f * (tau_db[j + 1] - tau_db[j]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void write_csv_header(std::ostream& os) { os << "link,scheme_a,scheme_b,slot,tier,tau_db,coverage\n"; }

void write_csv_rows(std::ostream& os, const CoverageCurve& c)
{
    char buf[64];
    for (std::size_t j = 0; j < c.tau_db.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", c.tau_db[j], c.coverage[j]);
        os << to_string(c.link) << ',' << to_string(c.scheme_a) << ',' << to_string(c.scheme_b) << ','
           << c.slot << ',' << (c.tier ? to_string(*c.tier) : "all") << ',' << buf << '\n';
    }
}

std::shared_ptr<const KTableCache::Table> KTableCache::find(const std::string& key) const
{
    std::lock_guard lock(mu_);
    auto it = tables_.find(key);
    return it == tables_.end() ? nullptr : it->second;
}

std::shared_ptr<const KTableCache::Table> KTableCache::insert(const std::string& key, Table t)
{
    std::lock_guard lock(mu_);
    auto [it, fresh] = tables_.emplace(key, nullptr);
    if (fresh) it->second = std::make_shared<const Table>(std::move(t));
    return it->second;
}

std::size_t KTableCache::size() const
{
    std::lock_guard lock(mu_);
    return tables_.size();
}

CoverageEngine::CoverageEngine(const NetworkParams& p, const ModelOptions& o,
                               std::shared_ptr<KTableCache> cache, std::vector<double> tau_db)
    : model_(p, o), cache_(cache ? std::move(cache) : std::make_shared<KTableCache>()),
      tau_db_(std::move(tau_db))
{
    if (tau_db_.empty()) throw ParamError("tau grid: empty");
    for (std::size_t j = 1; j < tau_db_.size(); ++j)
        if (!(tau_db_[j] > tau_db_[j - 1])) throw ParamError("tau grid: must be strictly increasing");
    for (double d : tau_db_) tau_.push_back(db_to_linear(d));

    // Tables do not depend on traffic split, frame or activity parameters.
    NetworkParams kp = p;
    kp.lambda_u = 1.0;
    kp.W = 1.0;
    kp.eta = 0.5;
    kp.delta = 0.5;
    kp.F = 1;
    kp.p_ul = kp.p_dl = 1.0;
    kp.access_scheme = AccessScheme::Static;
    kp.backhaul_scheme = BackhaulScheme::SAB;
    ModelOptions ko = o;
    ko.ue_activity = UeActivityRule::Marginal;
    ko.load_tail = 1e-9;
    ko.interference_scale = 1.0;
    ko.noise_override = -1.0;
    kbase_ = std::to_string(params_hash(kp, ko)) + "|" + fmt_double(tau_db_.front()) + ":"
             + fmt_double(tau_db_.back()) + ":" + std::to_string(tau_db_.size());

    const double d = p.d_los;
    for (int bh = 0; bh < 2; ++bh) {
        for (Tier t : {Tier::M, Tier::S}) {
            if (bh && t == Tier::S) continue;
            const double lam = p.lambda(t);
            const double A = bh ? 1.0 : (t == Tier::M ? model_.densities().A_m : model_.densities().A_s);
            if (lam <= 0.0 || !(A > 0.0)) continue;
            double Rmax = std::sqrt(kVoidLog / (std::numbers::pi * lam) + p.p_los * d * d);
            if (Rmax < d) Rmax = std::sqrt(kVoidLog / (std::numbers::pi * lam * (1.0 - p.p_los)));
            for (LinkType m : {LinkType::LOS, LinkType::NLOS}) {
                const double am = p.alpha(m);
                const double hi = m == LinkType::LOS ? std::min(d, Rmax) : Rmax;
                if (m == LinkType::LOS && p.p_los <= 0.0) continue;
                std::vector<double> br = {0.5, 1, 2, 4, 8, 16, 32, 50, d};
                // Kinks where exclusion radii or lower limits cross d_los.
                for (Tier t2 : {Tier::M, Tier::S}) {
                    const double r = bh ? 1.0 : p.assoc_weight(t2) / p.assoc_weight(t);
                    for (double a2 : {p.alpha_l, p.alpha_n}) br.push_back(std::pow(std::pow(d, a2) / r, 1.0 / am));
                }
                const quad::Nodes q = quad::composite(br, 0.0, hi, 40.0, 8);
                RNodes& out = nodes_[bh][idx(t)][idx(m)];
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const double R = q.x[k];
                    const double excl = bh ? mbs_exclusion(p, m, R) : association_exclusion(p, t, m, R);
                    const double w = q.w[k] * serving_pdf(p, t, m, R) * excl / A;
                    if (w > 0.0) {
                        out.R.push_back(R);
                        out.w.push_back(w);
                    }
                }
            }
        }
    }
}

const CoverageEngine::RNodes& CoverageEngine::nodes(Link l, Tier t, LinkType m) const
{
    const int bh = is_backhaul(l) ? 1 : 0;
    return nodes_[bh][bh ? 0 : idx(t)][idx(m)];
}

double CoverageEngine::tx_scale(Link l, Tier t) const
{
    const auto& p = params();
    double P = 0.0, g = 0.0;
    switch (l) {
    case Link::ULAccess: P = p.P(Device::U); g = p.G(Device::U) * p.G(t); break;
    case Link::DLAccess: P = p.P(t); g = p.G(t) * p.G(Device::U); break;
    case Link::ULBackhaul: P = p.P(Device::S); g = p.G(Device::S) * p.G(Device::M); break;
    case Link::DLBackhaul: P = p.P(Device::M); g = p.G(Device::M) * p.G(Device::S); break;
    }
    return model_.C0() * P * g;
}

double CoverageEngine::distance_mass(Link l, Tier t) const
{
    double acc = 0.0;
    for (LinkType m : {LinkType::LOS, LinkType::NLOS})
        for (double w : nodes(l, t, m).w) acc += w;
    return acc;
}

std::shared_ptr<const KTableCache::Table> CoverageEngine::table(const FactorSpec& f, Link l, Tier t,
                                                                LinkType m) const
{
    const auto& k = f.kernel;
    std::string key = kbase_ + "|" + to_string(l) + "|" + to_string(t) + "|" + to_string(m) + "|" + f.key;
    key += "|" + std::to_string(static_cast<int>(k.kind)) + "," + std::to_string(static_cast<int>(k.weight.kind))
           + "," + fmt_double(k.weight.scale) + "," + fmt_double(k.weight.p_void) + ","
           + fmt_double(k.lower_ratio) + "," + fmt_double(k.lower_alpha) + "," + fmt_double(k.excl_ratio)
           + "," + fmt_double(k.serving_alpha) + "," + to_string(f.tx) + to_string(f.rx) + ","
           + fmt_double(f.power);
    if (auto hit = cache_->find(key)) return hit;

    const RNodes& N = nodes(l, t, m);
    const std::size_t nt = tau_.size();
    const double am = params().alpha(m);
    const double c = tx_scale(l, t);
    const double cp = model_.C0() * f.power;
    const auto& atoms = model_.gain(f.tx, f.rx).atoms;
    KTableCache::Table T(N.R.size() * nt, 0.0);
    tbb::parallel_for(std::size_t{0}, N.R.size(), [&](std::size_t r) {
        const ShotKernel K = model_.kernel(k, N.R[r]);
        const double base = std::pow(N.R[r], am) / c;
        for (std::size_t j = 0; j < nt; ++j) {
            const double s = tau_[j] * base;
            double acc = 0.0;
            for (const auto& a : atoms) acc += a.prob * K(s * cp * a.gain);
            T[r * nt + j] = acc;
        }
    });
    return cache_->insert(key, std::move(T));
}

std::vector<double> CoverageEngine::evaluate(Link l, int slot, const SubframeLayout& lay, Tier t,
                                             bool interference) const
{
    const Tier tt = is_backhaul(l) ? Tier::M : t;
    if (!is_backhaul(l) && params().lambda(t) <= 0.0)
        throw ParamError(std::string("coverage: tier ") + to_string(t) + " has zero density");
    const std::size_t nt = tau_.size();
    std::vector<double> cov(nt, 0.0);
    const double c = tx_scale(l, tt);
    const double noise = model_.noise();
    for (LinkType m : {LinkType::LOS, LinkType::NLOS}) {
        const RNodes& N = nodes(l, tt, m);
        if (N.R.empty()) continue;
        const double am = params().alpha(m);
        std::vector<std::pair<double, std::shared_ptr<const KTableCache::Table>>> terms;
        if (interference) {
            LaplaceQuery q;
            q.link = l;
            q.slot = slot;
            q.layout = lay;
            q.tier = tt;
            q.link_type = m;
            q.R = 1.0;
            for (const auto& f : model_.factors(q))
                if (f.activity > 0.0) terms.emplace_back(f.activity, table(f, l, tt, m));
        }
        for (std::size_t r = 0; r < N.R.size(); ++r) {
            const double sn = std::pow(N.R[r], am) / c * noise;
            for (std::size_t j = 0; j < nt; ++j) {
                double e = tau_[j] * sn;
                for (const auto& [a, T] : terms) e += a * (*T)[r * nt + j];
                cov[j] += N.w[r] * std::exp(-e);
            }
        }
    }
    for (double& v : cov) v = std::clamp(v, 0.0, 1.0);
    return cov;
}

std::vector<double> CoverageEngine::slot_coverage(Link l, int slot, const SubframeLayout& lay, Tier t) const
{
    return evaluate(l, slot, lay, t, true);
}

std::vector<double> CoverageEngine::snr_coverage(Link l, Tier t) const
{
    SubframeLayout lay;
    return evaluate(l, 1, lay, t, false);
}

CoverageCurve CoverageEngine::curve(Link l, int slot, std::optional<Tier> t) const
{
    const auto& p = params();
    const bool uab = p.backhaul_scheme == BackhaulScheme::UAB;
    const bool fixed_dir = p.access_scheme == AccessScheme::Static;
    const auto& eff = model_.densities();
    CoverageCurve c;
    c.link = l;
    c.scheme_a = p.access_scheme;
    c.scheme_b = p.backhaul_scheme;
    c.slot = slot;
    c.tier = is_backhaul(l) ? std::optional<Tier>() : t;
    c.tau = tau_;
    c.tau_db = tau_db_;
    c.coverage.assign(tau_.size(), 0.0);
    double mass = 0.0;
    for (const auto& lay : layout_atoms(p)) {
        std::vector<double> s;
        if (is_backhaul(l) || t) {
            const Tier tt = t.value_or(Tier::M);
            if (!carries(l, slot, lay, tt, uab, fixed_dir)) continue;
            s = slot_coverage(l, slot, lay, tt);
        } else {
            if (!lay.is_access(slot) || !carries(l, slot, lay, Tier::M, uab, fixed_dir)) continue;
            s = slot_coverage(l, slot, lay, Tier::M);
            for (double& v : s) v *= eff.A_m;
            if (eff.A_s > 0.0) {
                const auto ss = slot_coverage(l, slot, lay, Tier::S);
                for (std::size_t j = 0; j < s.size(); ++j) s[j] += eff.A_s * ss[j];
            }
        }
        for (std::size_t j = 0; j < s.size(); ++j) c.coverage[j] += lay.prob * s[j];
        mass += lay.prob;
    }
    if (!(mass > 0.0))
        throw ParamError(std::string("coverage: slot ") + std::to_string(slot) + " never carries "
                         + to_string(l) + " for this configuration");
    for (double& v : c.coverage) v = std::clamp(v / mass, 0.0, 1.0);
    return c;
}

CoverageCurve CoverageEngine::curve(Link l, int slot, std::optional<Tier> t, const std::vector<double>& tau_db) const
{
    CoverageCurve full = curve(l, slot, t);
    CoverageCurve out = full;
    out.tau_db = tau_db;
    out.tau.clear();
    out.coverage.clear();
    for (double x : tau_db) {
        out.tau.push_back(db_to_linear(x));
        const auto& g = full.tau_db;
        double v;
        if (x <= g.front()) v = full.coverage.front();
        else if (x >= g.back()) v = full.coverage.back();
        else {
            const auto it = std::upper_bound(g.begin(), g.end(), x);
            const std::size_t j = static_cast<std::size_t>(it - g.begin()) - 1;
            const double f = (x - g[j]) / (g[j + 1] - g[j]);
            v = full.coverage[j] + f * (full.coverage[j + 1] - full.coverage[j]);
        }
        out.coverage.push_back(v);
    }
    return out;
}

}  // namespace mmtdd
