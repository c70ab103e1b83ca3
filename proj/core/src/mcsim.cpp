#include "mmtdd/mcsim.hpp"

#include "mmtdd/netmodel.hpp"
#include "mmtdd/rng.hpp"

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace mmtdd {

namespace {

// Substream tags.
enum : std::uint64_t {
    kGeom = 0x67656f6dULL,
    kLos = 0x6c6f73ULL,
    kSched = 0x73636864ULL,
    kFade = 0x66616465ULL,
    kGain = 0x6761696eULL,
    kTypFad = 0x74666164ULL,
    kAlt = 0x616c74ULL,
};

constexpr double kInf = std::numeric_limits<double>::infinity();
// Floor on link distance; co-located points would give infinite power.
constexpr double kMinDist = 1e-3;

int round_random(double x, double u)
{
    const double f = std::floor(x);
    return static_cast<int>(f) + (u < x - f ? 1 : 0);
}

// Uniform bucket grid on the torus for nearest-by-metric searches.
class Grid {
public:
    Grid(const std::vector<Point>& pts, int first, int last, double L, double density) : L_(L)
    {
        const double target = density > 0.0 ? std::sqrt(4.0 / density) : L;
        n_ = std::clamp(static_cast<int>(L / target), 1, 512);
        cell_ = L / n_;
        cells_.resize(static_cast<std::size_t>(n_) * n_);
        for (int i = first; i < last; ++i) cells_[index(coord(pts[i].x), coord(pts[i].y))].push_back(i);
        first_ = first;
        last_ = last;
    }

    // Visits points ring by ring around x until stop(d) holds for the
    // smallest distance d any unvisited point can have.
    template <class Visit, class Stop>
    void search(const Point& x, Visit&& visit, Stop&& stop) const
    {
        const int cx = coord(x.x), cy = coord(x.y);
        for (int k = 0;; ++k) {
            if (k > 0 && stop((k - 1) * cell_)) return;
            if (2 * k + 1 >= n_) {
                for (int i = first_; i < last_; ++i) visit(i);
                return;
            }
            for (int dx = -k; dx <= k; ++dx)
                for (int dy = -k; dy <= k; ++dy) {
                    if (std::max(std::abs(dx), std::abs(dy)) != k) continue;
                    for (int i : cells_[index(wrap(cx + dx), wrap(cy + dy))]) visit(i);
                }
        }
    }

private:
    int coord(double v) const { return std::clamp(static_cast<int>(v / cell_), 0, n_ - 1); }
    int wrap(int c) const { return ((c % n_) + n_) % n_; }
    std::size_t index(int cx, int cy) const { return static_cast<std::size_t>(cx) * n_ + cy; }

    double L_;
    double cell_ = 1.0;
    int n_ = 1;
    int first_ = 0, last_ = 0;
    std::vector<std::vector<int>> cells_;
};

double min_path_loss(const NetworkParams& p, double d)
{
    d = std::max(d, kMinDist);
    const double n = std::pow(d, p.alpha_n);
    if (p.p_los > 0.0 && d <= p.d_los) return std::min(n, std::pow(d, p.alpha_l));
    return n;
}

struct Best {
    int index = -1;
    double metric = kInf;
};

// Biased association over all BSs: argmin L / (P G B).
Best associate(const NetworkParams& p, const NetworkRealization& r, const Grid& g, const Point& x,
               std::uint64_t id)
{
    const double wmax = std::max(p.assoc_weight(Tier::M), p.lambda_s > 0.0 ? p.assoc_weight(Tier::S) : 0.0);
    Best best;
    g.search(
        x,
        [&](int b) {
            const double d = r.distance(x, r.bs[b]);
            const double pl = path_loss(p, los_mark(p, r, id, bs_id(b), d), d);
            const double m = pl / p.assoc_weight(r.tier(b));
            if (m < best.metric) best = {b, m};
        },
        [&](double dmin) { return min_path_loss(p, dmin) / wmax > best.metric; });
    return best;
}

// Unbiased association to the MBS tier.
Best associate_mbs(const NetworkParams& p, const NetworkRealization& r, const Grid& g, const Point& x,
                   std::uint64_t id)
{
    Best best;
    g.search(
        x,
        [&](int b) {
            const double d = r.distance(x, r.bs[b]);
            const double pl = path_loss(p, los_mark(p, r, id, bs_id(b), d), d);
            if (pl < best.metric) best = {b, pl};
        },
        [&](double dmin) { return min_path_loss(p, dmin) > best.metric; });
    return best;
}

void draw_points(CounterRng& g, double mean, double L, std::vector<Point>& out)
{
    const auto n = g.poisson(mean);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double x = g.uniform() * L;
        const double y = g.uniform() * L;
        out.push_back({x, y});
    }
}

}  // namespace

double default_window(const NetworkParams& p)
{
    if (!(p.lambda_m > 0.0)) throw ParamError("mcsim: lambda_m must be > 0");
    return std::max({3000.0, 6.0 / std::sqrt(std::numbers::pi * p.lambda_m), std::sqrt(100.0 / p.lambda_m)});
}

double NetworkRealization::distance(const Point& a, const Point& b) const
{
    double dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
    dx = std::min(dx, L - dx);
    dy = std::min(dy, L - dy);
    return std::max(std::hypot(dx, dy), kMinDist);
}

bool los_mark(const NetworkParams& p, const NetworkRealization& r, std::uint64_t a, std::uint64_t b, double d)
{
    if (d > p.d_los || !(p.p_los > 0.0)) return false;
    if (p.p_los >= 1.0) return true;
    return to_unit(hash_words({r.seed, r.drop, kLos, std::min(a, b), std::max(a, b)})) < p.p_los;
}

double path_loss(const NetworkParams& p, bool los, double d)
{
    return std::pow(std::max(d, kMinDist), los ? p.alpha_l : p.alpha_n);
}

namespace {

double resolve_window(const NetworkParams& p, const McConfig& c)
{
    const double L = c.window > 0.0 ? c.window : default_window(p);
    if (p.lambda_m * L * L < 100.0)
        throw ParamError("mcsim: window holds fewer than 100 MBSs on average; enlarge it");
    return L;
}

void draw_bs(const NetworkParams& p, NetworkRealization& r, CounterRng& g)
{
    draw_points(g, p.lambda_m * r.L * r.L, r.L, r.bs);
    r.n_mbs = static_cast<int>(r.bs.size());
    draw_points(g, p.lambda_s * r.L * r.L, r.L, r.bs);
    r.origin = {r.L / 2.0, r.L / 2.0};
}

}  // namespace

Tier typical_association(const NetworkParams& p, const McConfig& c, std::uint64_t drop)
{
    NetworkRealization r;
    r.seed = c.seed;
    r.drop = drop;
    r.L = resolve_window(p, c);
    CounterRng g{c.seed, drop, kGeom};
    draw_bs(p, r, g);
    if (r.bs.empty()) throw NumericError("mcsim: drop without BSs");
    const Grid all(r.bs, 0, r.n_bs(), r.L, p.lambda_b());
    return r.tier(associate(p, r, all, r.origin, kTypicalUeId).index);
}

NetworkRealization generate(const NetworkParams& p, const McConfig& c, std::uint64_t drop)
{
    NetworkRealization r;
    r.seed = c.seed;
    r.drop = drop;
    r.L = resolve_window(p, c);
    CounterRng g{c.seed, drop, kGeom};
    draw_bs(p, r, g);
    draw_points(g, p.lambda_u * r.L * r.L, r.L, r.ue);
    const int nb = r.n_bs();
    if (r.n_mbs == 0) throw NumericError("mcsim: drop without MBSs");

    r.ue_dl.resize(r.ue.size());
    for (auto& t : r.ue_dl) t = g.uniform() < p.eta ? 1 : 0;

    const Grid all(r.bs, 0, nb, r.L, p.lambda_b());
    const Grid mbs(r.bs, 0, r.n_mbs, r.L, p.lambda_m);

    r.ue_bs.resize(r.ue.size());
    r.ul_ues.assign(nb, {});
    r.dl_ues.assign(nb, {});
    for (std::size_t u = 0; u < r.ue.size(); ++u) {
        const int b = associate(p, r, all, r.ue[u], ue_id(r, static_cast<int>(u))).index;
        r.ue_bs[u] = b;
        (r.ue_dl[u] ? r.dl_ues : r.ul_ues)[b].push_back(static_cast<int>(u));
    }

    r.sbs_mbs.assign(nb, -1);
    r.mbs_sbs_ul.assign(nb, {});
    r.mbs_sbs_dl.assign(nb, {});
    for (int b = r.n_mbs; b < nb; ++b) {
        const int m = associate_mbs(p, r, mbs, r.bs[b], bs_id(b)).index;
        r.sbs_mbs[b] = m;
        if (!r.ul_ues[b].empty()) r.mbs_sbs_ul[m].push_back(b);
        if (!r.dl_ues[b].empty()) r.mbs_sbs_dl[m].push_back(b);
    }

    r.tagged = associate(p, r, all, r.origin, kTypicalUeId).index;
    r.vs_mbs = associate_mbs(p, r, mbs, r.origin, kVirtualSbsId).index;
    return r;
}

FrameSchedule schedule_frame(const NetworkParams& p, const NetworkRealization& r, std::uint64_t frame)
{
    CounterRng g{r.seed, r.drop, frame, kSched};
    FrameSchedule s;
    auto& lay = s.layout;
    lay.F = p.F;
    lay.Fa = round_random(p.delta * p.F, g.uniform());
    lay.Fbd = round_random(p.eta * (p.F - lay.Fa), g.uniform());
    lay.Fad = round_random(p.eta * lay.Fa, g.uniform());
    lay.prob = 1.0;

    const int nb = r.n_bs();
    const bool dynamic = p.access_scheme == AccessScheme::Dynamic;
    const bool uab = p.backhaul_scheme == BackhaulScheme::UAB;
    s.fad.assign(nb, lay.Fad);
    if (dynamic)
        for (int b = 0; b < nb; ++b) {
            const double nu = static_cast<double>(r.ul_ues[b].size());
            const double nd = static_cast<double>(r.dl_ues[b].size());
            const double gamma = nd > 0.0 ? nd / (nu + nd) : 0.0;
            s.fad[b] = std::min(round_random(gamma * lay.Fa, g.uniform()), lay.Fa);
        }

    auto pick = [&](const std::vector<int>& v) { return v[g.below(v.size())]; };
    auto bs_dev = [&](int b) { return device_of(r.tier(b)); };

    s.slots.assign(p.F, {});
    s.mbs_choice.assign(p.F, std::vector<int>(nb, -1));
    for (int i = 1; i <= p.F; ++i) {
        auto& tx = s.slots[i - 1];
        if (lay.is_access(i)) {
            for (int b = 0; b < nb; ++b) {
                if (i <= s.fad[b]) {
                    if (r.dl_ues[b].empty()) continue;
                    tx.push_back({r.bs[b], bs_id(b), bs_dev(b), TxKind::DLAccess, b});
                } else {
                    if (r.ul_ues[b].empty()) continue;
                    const int u = pick(r.ul_ues[b]);
                    tx.push_back({r.ue[u], ue_id(r, u), Device::U, TxKind::ULAccess, b});
                }
            }
            continue;
        }
        const bool dl = lay.is_backhaul_dl(i);
        auto& choice = s.mbs_choice[i - 1];
        for (int m = 0; m < r.n_mbs; ++m) {
            const auto& el = dl ? r.mbs_sbs_dl[m] : r.mbs_sbs_ul[m];
            if (el.empty()) continue;
            const int k = pick(el);
            choice[m] = k;
            if (dl)
                tx.push_back({r.bs[m], bs_id(m), Device::M, TxKind::DLBackhaul, m});
            else
                tx.push_back({r.bs[k], bs_id(k), Device::S, TxKind::ULBackhaul, m});
        }
        if (!uab) continue;
        for (int b = r.n_mbs; b < nb; ++b) {
            const auto& ues = dl ? r.dl_ues[b] : r.ul_ues[b];
            if (ues.empty() || choice[r.sbs_mbs[b]] == b) continue;
            if (g.uniform() >= (dl ? p.p_dl : p.p_ul)) continue;
            const int u = pick(ues);
            if (dl)
                tx.push_back({r.bs[b], bs_id(b), Device::S, TxKind::PoachDL, b});
            else
                tx.push_back({r.ue[u], ue_id(r, u), Device::U, TxKind::PoachUL, b});
        }
    }
    return s;
}

namespace {

struct Endpoint {
    Point pos;
    std::uint64_t id;
    Device dev;
};

class Meter {
public:
    Meter(const NetworkParams& p, const NetworkRealization& r, std::uint64_t frame, double noise)
        : p_(p), r_(r), frame_(frame), noise_(noise), c0_(reference_pathloss(p.f_c))
    {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) pmf_[a][b] = gain_pmf(static_cast<Device>(a), static_cast<Device>(b), p);
    }

    double received(const Endpoint& tx, const Endpoint& rx, int slot, double gain) const
    {
        const double d = r_.distance(tx.pos, rx.pos);
        const double pl = path_loss(p_, los_mark(p_, r_, tx.id, rx.id, d), d);
        const double h = -std::log(to_unit(hash_words({r_.seed, r_.drop, frame_, kFade, static_cast<std::uint64_t>(slot), tx.id, rx.id})));
        return c0_ * p_.P(tx.dev) * gain * h / pl;
    }

    double side_gain(const Endpoint& tx, const Endpoint& rx, int slot) const
    {
        const auto& atoms = pmf_[idx_dev(tx.dev)][idx_dev(rx.dev)].atoms;
        double u = to_unit(hash_words({r_.seed, r_.drop, frame_, kGain, static_cast<std::uint64_t>(slot), tx.id, rx.id}));
        for (const auto& a : atoms) {
            if (u < a.prob) return a.gain;
            u -= a.prob;
        }
        return atoms.back().gain;
    }

    // SINR of tx -> rx with main-lobe alignment; `skip` filters interferers.
    template <class Skip>
    double sinr(const Endpoint& tx, const Endpoint& rx, int slot, const std::vector<Transmission>& all, Skip&& skip,
                const std::vector<Endpoint>& extra = {}) const
    {
        const double s = received(tx, rx, slot, p_.G(tx.dev) * p_.G(rx.dev));
        double i = 0.0;
        for (const auto& t : all) {
            if (skip(t)) continue;
            const Endpoint e{t.pos, t.id, t.dev};
            i += received(e, rx, slot, side_gain(e, rx, slot));
        }
        for (const auto& e : extra) i += received(e, rx, slot, side_gain(e, rx, slot));
        return s / (i + noise_);
    }

private:
    static int idx_dev(Device d) { return static_cast<int>(d); }

    const NetworkParams& p_;
    const NetworkRealization& r_;
    std::uint64_t frame_;
    double noise_;
    double c0_;
    GainPMF pmf_[3][3];
};

}  // namespace

std::vector<SinrSample> measure(const NetworkParams& p, const NetworkRealization& r, const FrameSchedule& s,
                                std::uint64_t frame, double noise)
{
    const Meter m(p, r, frame, noise);
    const bool dynamic = p.access_scheme == AccessScheme::Dynamic;
    const bool uab = p.backhaul_scheme == BackhaulScheme::UAB;
    const auto& lay = s.layout;
    const int bt = r.tagged;
    const Tier tt = r.tier(bt);
    const bool tagged_sbs = tt == Tier::S;
    const int xm = tagged_sbs ? r.sbs_mbs[bt] : -1;

    const Endpoint ue{r.origin, kTypicalUeId, Device::U};
    const Endpoint serving{r.bs[bt], bs_id(bt), device_of(tt)};
    const Endpoint vsbs{r.origin, kVirtualSbsId, Device::S};
    const Endpoint vmbs{r.bs[r.vs_mbs], bs_id(r.vs_mbs), Device::M};

    std::vector<SinrSample> out;
    auto push = [&](Link l, int i, Tier t, Probe pr, double v) {
        out.push_back({l, i, t, pr, !is_backhaul(l) && !lay.is_access(i), v});
    };

    for (int i = 1; i <= p.F; ++i) {
        const auto& tx = s.slots[i - 1];
        if (lay.is_access(i)) {
            auto own = [&](const Transmission& t) { return t.cell == bt; };
            if (dynamic || i > lay.Fad) push(Link::ULAccess, i, tt, Probe::Typical, m.sinr(ue, serving, i, tx, own));
            if (dynamic || i <= lay.Fad) push(Link::DLAccess, i, tt, Probe::Typical, m.sinr(serving, ue, i, tx, own));
            continue;
        }
        const bool dl = lay.is_backhaul_dl(i);
        const auto& choice = s.mbs_choice[i - 1];
        const TxKind bh = dl ? TxKind::DLBackhaul : TxKind::ULBackhaul;
        const TxKind poach = dl ? TxKind::PoachDL : TxKind::PoachUL;
        const Link bl = dl ? Link::DLBackhaul : Link::ULBackhaul;

        // Virtual typical SBS: it replaces whatever its MBS scheduled.
        {
            auto skip = [&](const Transmission& t) { return t.kind == bh && t.cell == r.vs_mbs; };
            const double v = dl ? m.sinr(vmbs, vsbs, i, tx, skip) : m.sinr(vsbs, vmbs, i, tx, skip);
            push(bl, i, Tier::M, Probe::Typical, v);
        }
        if (!tagged_sbs) continue;
        const Endpoint mbs{r.bs[xm], bs_id(xm), Device::M};
        {
            // Tagged SBS scheduled by its MBS: it neither poaches nor shares the slot.
            auto skip = [&](const Transmission& t) {
                return (t.kind == bh && t.cell == xm) || (t.kind == poach && t.cell == bt);
            };
            const double v = dl ? m.sinr(mbs, serving, i, tx, skip) : m.sinr(serving, mbs, i, tx, skip);
            push(bl, i, Tier::M, Probe::Tagged, v);
        }
        if (!uab) continue;
        // Poaching access: the tagged SBS is unscheduled, so its MBS serves
        // another eligible SBS if it has one.
        const auto& el = dl ? r.mbs_sbs_dl[xm] : r.mbs_sbs_ul[xm];
        std::vector<int> others;
        for (int k : el)
            if (k != bt) others.push_back(k);
        const bool displaced = choice[xm] == bt;
        std::vector<Endpoint> extra;
        if (displaced && !others.empty() && !dl) {
            const auto h = hash_words({r.seed, r.drop, frame, kAlt, static_cast<std::uint64_t>(i)});
            const int k = others[h % others.size()];
            extra.push_back({r.bs[k], bs_id(k), Device::S});
        }
        auto skip = [&](const Transmission& t) {
            if (t.kind == poach && t.cell == bt) return true;
            if (t.kind == bh && t.cell == xm && displaced) return dl ? others.empty() : true;
            return false;
        };
        if (dl)
            push(Link::DLAccess, i, tt, Probe::Typical, m.sinr(serving, ue, i, tx, skip, extra));
        else
            push(Link::ULAccess, i, tt, Probe::Typical, m.sinr(ue, serving, i, tx, skip, extra));
    }
    return out;
}

double EmpiricalCcdf::at(double tau_db) const
{
    if (sorted_db.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto it = std::upper_bound(sorted_db.begin(), sorted_db.end(), static_cast<float>(tau_db));
    return static_cast<double>(sorted_db.end() - it) / static_cast<double>(sorted_db.size());
}

double EmpiricalCcdf::stderr_at(double tau_db) const
{
    const double q = at(tau_db);
    return std::sqrt(std::max(q * (1.0 - q), 0.0) / std::max<double>(1.0, static_cast<double>(n())));
}

std::string curve_key(Link l, int slot, std::optional<Tier> tier, Probe probe)
{
    std::string k = std::string(to_string(l)) + "/" + std::to_string(slot) + "/";
    if (is_backhaul(l)) return k + (probe == Probe::Typical ? "typical" : "tagged");
    return k + (tier ? to_string(*tier) : "all");
}

namespace {

// Per-drop reduction input; merged in drop order for determinism.
struct DropOut {
    std::vector<SinrSample> samples;
    Tier tier = Tier::M;
    double r_ul = 0.0, r_dl = 0.0;
    std::size_t n_mbs = 0, n_sbs = 0;
    std::size_t ue_on[2] = {0, 0};
    std::vector<std::size_t> fad_hist[2];
};

double log2p1(double x) { return std::log2(1.0 + x); }

DropOut run_drop(const NetworkParams& p, const McConfig& c, std::uint64_t drop, double noise)
{
    DropOut d;
    const auto r = generate(p, c, drop);
    const int bt = r.tagged;
    d.tier = r.tier(bt);
    d.n_mbs = static_cast<std::size_t>(r.n_mbs);
    d.n_sbs = r.bs.size() - d.n_mbs;
    for (int b = 0; b < r.n_bs(); ++b) d.ue_on[idx(r.tier(b))] += r.ul_ues[b].size() + r.dl_ues[b].size();
    for (auto& h : d.fad_hist) h.assign(static_cast<std::size_t>(p.F) + 1, 0);

    const bool dynamic = p.access_scheme == AccessScheme::Dynamic;
    const bool uab = p.backhaul_scheme == BackhaulScheme::UAB;
    const bool sbs = d.tier == Tier::S;
    // The typical UE joins its own direction at the tagged BS.
    const double nu = static_cast<double>(r.ul_ues[bt].size()) + 1.0;
    const double nd = static_cast<double>(r.dl_ues[bt].size()) + 1.0;
    double ns_u = 1.0, ns_d = 1.0;
    if (sbs) {
        const int xm = r.sbs_mbs[bt];
        ns_u = static_cast<double>(r.mbs_sbs_ul[xm].size()) + (r.ul_ues[bt].empty() ? 1.0 : 0.0);
        ns_d = static_cast<double>(r.mbs_sbs_dl[xm].size()) + (r.dl_ues[bt].empty() ? 1.0 : 0.0);
    }

    double a_ul = 0.0, b_ul = 0.0, a_dl = 0.0, b_dl = 0.0;
    for (int f = 0; f < c.frames; ++f) {
        const auto fr = static_cast<std::uint64_t>(f);
        const auto s = schedule_frame(p, r, fr);
        const auto& lay = s.layout;
        if (lay.Fa == p.F)
            for (int b = 0; b < r.n_bs(); ++b) ++d.fad_hist[idx(r.tier(b))][s.fad[b]];
        auto samples = measure(p, r, s, fr, noise);

        int fad_ul = lay.Fad, fad_dl = lay.Fad;
        if (dynamic) {
            const double n_all = nu + nd - 1.0;
            fad_ul = round_random((nd - 1.0) / n_all * lay.Fa, to_unit(hash_words({r.seed, r.drop, fr, kTypFad, 0})));
            fad_dl = round_random(nd / n_all * lay.Fa, to_unit(hash_words({r.seed, r.drop, fr, kTypFad, 1})));
            fad_ul = std::min(fad_ul, lay.Fa);
            fad_dl = std::min(fad_dl, lay.Fa);
        }
        for (const auto& x : samples) {
            const double se = log2p1(x.sinr);
            const bool access = !is_backhaul(x.link);
            if (access && !x.poaching) {
                if (x.link == Link::ULAccess && x.slot > fad_ul) a_ul += se / nu;
                if (x.link == Link::DLAccess && x.slot <= fad_dl) a_dl += se / nd;
            } else if (access && uab) {
                if (x.link == Link::ULAccess) a_ul += (1.0 - 1.0 / ns_u) * p.p_ul * se / nu;
                if (x.link == Link::DLAccess) a_dl += (1.0 - 1.0 / ns_d) * p.p_dl * se / nd;
            } else if (x.probe == Probe::Tagged) {
                if (x.link == Link::ULBackhaul) b_ul += se / (ns_u * nu);
                if (x.link == Link::DLBackhaul) b_dl += se / (ns_d * nd);
            }
        }
        d.samples.insert(d.samples.end(), samples.begin(), samples.end());
    }
    const double unit = p.W / p.F / c.frames;
    d.r_ul = unit * (sbs ? std::min(a_ul, b_ul) : a_ul);
    d.r_dl = unit * (sbs ? std::min(a_dl, b_dl) : a_dl);
    return d;
}

struct Moments {
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    void add(double x)
    {
        sum += x;
        sq += x * x;
        ++n;
    }
    McRate rate() const
    {
        McRate r;
        r.n = n;
        if (n == 0) return r;
        r.mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sq - sum * sum / n) / (n - 1)) : 0.0;
        r.stderr_ = std::sqrt(var / n);
        return r;
    }
};

}  // namespace

McResult run_mc(const NetworkParams& p, const McConfig& c)
{
    p.validate();
    if (c.drops <= 0 || c.frames <= 0) throw ParamError("mcsim: drops and frames must be > 0");
    (void)resolve_window(p, c);
    const double noise = c.noise_override >= 0.0 ? c.noise_override : noise_power(p.W);

    std::unique_ptr<tbb::global_control> limit;
    if (c.parallelism > 0)
        limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                      static_cast<std::size_t>(c.parallelism));

    std::map<std::string, std::vector<float>> raw;
    std::map<std::string, double> se_sum;
    Moments ul, dl, ov, ul_t[2], dl_t[2];
    std::size_t n_m = 0, total_mbs = 0, total_sbs = 0, ue_on[2] = {0, 0};
    std::vector<std::size_t> fad[2];
    for (auto& h : fad) h.assign(static_cast<std::size_t>(p.F) + 1, 0);

    constexpr int kBlock = 64;
    std::vector<DropOut> block;
    for (int start = 0; start < c.drops; start += kBlock) {
        const int n = std::min(kBlock, c.drops - start);
        block.assign(n, {});
        tbb::parallel_for(0, n, [&](int k) { block[k] = run_drop(p, c, static_cast<std::uint64_t>(start + k), noise); });
        for (const auto& d : block) {
            for (const auto& s : d.samples) {
                const float db = static_cast<float>(10.0 * std::log10(std::max(s.sinr, 1e-300)));
                const double se = log2p1(s.sinr);
                std::vector<std::string> keys;
                if (is_backhaul(s.link)) {
                    keys.push_back(curve_key(s.link, s.slot, std::nullopt, s.probe));
                } else {
                    keys.push_back(curve_key(s.link, s.slot, s.tier));
                    if (!s.poaching) keys.push_back(curve_key(s.link, s.slot, std::nullopt));
                }
                for (const auto& k : keys) {
                    raw[k].push_back(db);
                    se_sum[k] += se;
                }
            }
            const int t = idx(d.tier);
            if (d.tier == Tier::M) ++n_m;
            ul.add(d.r_ul);
            dl.add(d.r_dl);
            ov.add(p.eta * d.r_dl + (1.0 - p.eta) * d.r_ul);
            ul_t[t].add(d.r_ul);
            dl_t[t].add(d.r_dl);
            total_mbs += d.n_mbs;
            total_sbs += d.n_sbs;
            ue_on[0] += d.ue_on[0];
            ue_on[1] += d.ue_on[1];
            for (int k = 0; k < 2; ++k)
                for (std::size_t j = 0; j < fad[k].size(); ++j) fad[k][j] += d.fad_hist[k][j];
        }
    }

    McResult res;
    res.drops = c.drops;
    for (auto& [k, v] : raw) {
        EmpiricalCcdf e;
        std::sort(v.begin(), v.end());
        e.mean_log2 = se_sum[k] / static_cast<double>(v.size());
        e.sorted_db = std::move(v);
        res.curves.emplace(k, std::move(e));
    }
    res.R_ul = ul.rate();
    res.R_dl = dl.rate();
    res.R_overall = ov.rate();
    res.R_ul_m = ul_t[0].rate();
    res.R_ul_s = ul_t[1].rate();
    res.R_dl_m = dl_t[0].rate();
    res.R_dl_s = dl_t[1].rate();
    res.frac_mbs = static_cast<double>(n_m) / c.drops;
    res.sbs_per_mbs = total_mbs > 0 ? static_cast<double>(total_sbs) / total_mbs : 0.0;
    res.ues_per_bs[0] = total_mbs > 0 ? static_cast<double>(ue_on[0]) / total_mbs : 0.0;
    res.ues_per_bs[1] = total_sbs > 0 ? static_cast<double>(ue_on[1]) / total_sbs : 0.0;
    for (int k = 0; k < 2; ++k) {
        double tot = 0.0;
        for (auto v : fad[k]) tot += static_cast<double>(v);
        res.fad_pmf[k].assign(fad[k].size(), 0.0);
        if (tot > 0.0)
            for (std::size_t j = 0; j < fad[k].size(); ++j) res.fad_pmf[k][j] = fad[k][j] / tot;
    }
    return res;
}

double mc_association_fraction(const NetworkParams& p, const McConfig& c)
{
    p.validate();
    if (c.drops <= 0) throw ParamError("mcsim: drops must be > 0");
    std::vector<std::uint8_t> is_m(static_cast<std::size_t>(c.drops), 0);
    tbb::parallel_for(0, c.drops, [&](int k) {
        is_m[k] = typical_association(p, c, static_cast<std::uint64_t>(k)) == Tier::M ? 1 : 0;
    });
    std::size_t n = 0;
    for (auto v : is_m) n += v;
    return static_cast<double>(n) / c.drops;
}

}  // namespace mmtdd
