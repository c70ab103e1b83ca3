// Acceptance run: one PASS/FAIL line per criterion. Tolerances are fixed
// here and never loosened to make a run pass.

#include "mmtdd/coverage.hpp"
#include "mmtdd/frame.hpp"
#include "mmtdd/loadmodel.hpp"
#include "mmtdd/mcsim.hpp"
#include "mmtdd/netmodel.hpp"
#include "mmtdd/rate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

using namespace mmtdd;

namespace {

// Criterion 1
constexpr double kActivityTol = 0.02;
constexpr double kDlSlot1 = 0.95;
constexpr double kDlSlot5 = 0.04;
// Criterion 2
constexpr double kAssocQuadTol = 1e-6;
constexpr double kAssocMcTol = 0.01;
constexpr int kAssocDrops = 100000;
// Criterion 3
constexpr double kCurveGapTol = 0.05;
constexpr double kGapLoDb = -10.0;
constexpr double kGapHiDb = 30.0;
constexpr int kValidationDrops = 20000;
constexpr std::uint64_t kValidationSeed = 7;
// Criterion 4
constexpr double kShiftLoDb = 10.0;
constexpr double kShiftHiDb = 17.0;
// Criterion 5
constexpr double kDl01Lo = 1.8, kDl01Hi = 2.2;
constexpr double kUl05Lo = 0.85, kUl05Hi = 0.93;
constexpr double kDl05Lo = 1.10, kDl05Hi = 1.20;
// Criterion 6
constexpr double kNoiseDl01Lo = 4.0, kNoiseDl01Hi = 6.0;
constexpr double kNoiseGain05 = 1.20;
// Criterion 8
constexpr double kTaggedGapDb = 3.0;
// Criterion 9
constexpr double kPmfTol = 1e-9;
constexpr double kShannonRelTol = 0.02;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

// Median of the empirical SINR in dB: the threshold where the CCDF is 0.5.
double empirical_median_db(const EmpiricalCcdf& e)
{
    const auto& v = e.sorted_db;
    const std::size_t n = v.size();
    if (n == 0) return std::nan("");
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

NetworkParams single_tier_100(double lambda_u_km2)
{
    auto p = NetworkParams::defaults();
    p.lambda_m = per_km2_to_per_m2(100.0);
    p.lambda_s = 0.0;
    p.lambda_u = per_km2_to_per_m2(lambda_u_km2);
    return p;
}

// ---------------------------------------------------------------------------

Outcome slot_activity()
{
    auto p = single_tier_100(500.0);
    p.eta = 0.5;
    p.F = 5;
    p.delta = 1.0;
    p.access_scheme = AccessScheme::Dynamic;
    const auto eff = effective_densities(p);
    const auto lay = layout_atoms(p).front();
    const SlotActivity act(p, eff, lay);
    const double s1 = act.dl_active(1, Tier::M), s5 = act.dl_active(5, Tier::M);

    // Same law at ten devices per BS, for reference.
    auto q = p;
    q.lambda_u = 10.0 * q.lambda_m;
    const SlotActivity ref(q, effective_densities(q), lay);

    Outcome o;
    o.pass = std::abs(s1 - kDlSlot1) <= kActivityTol && std::abs(s5 - kDlSlot5) <= kActivityTol;
    o.detail = "P(DL) slot1 " + fmt("%.3f", s1) + " slot5 " + fmt("%.3f", s5) + " (target 0.95/0.04 +-0.02; at 10 UE/BS "
               + fmt("%.3f", ref.dl_active(1, Tier::M)) + "/" + fmt("%.3f", ref.dl_active(5, Tier::M)) + ")";
    return o;
}

Outcome association()
{
    auto p = NetworkParams::defaults();
    p.power[idx(Device::S)] = p.power[idx(Device::M)];
    p.main_gain[idx(Device::S)] = p.main_gain[idx(Device::M)];
    p.bias = {1.0, 1.0};
    const double am = association_probability(p);
    McConfig c;
    c.seed = 3;
    c.drops = kAssocDrops;
    const double frac = mc_association_fraction(p, c);
    Outcome o;
    o.pass = std::abs(am - 0.2) <= kAssocQuadTol && std::abs(frac - 0.2) <= kAssocMcTol;
    o.detail = "A_m " + fmt("%.8f", am) + ", MC fraction " + fmt("%.4f", frac) + " over 1e5 drops";
    return o;
}

McConfig validation_config()
{
    McConfig c;
    c.seed = kValidationSeed;
    c.drops = kValidationDrops;
    return c;
}

// Static TDD at the defaults, shared by the curve, tagged-gap and Shannon checks.
struct Validation {
    NetworkParams p = NetworkParams::defaults();
    McResult mc = run_mc(p, validation_config());
    CoverageEngine eng{p, ModelOptions{}};
};

const Validation& validation()
{
    static const Validation v;
    return v;
}

Outcome mc_match()
{
    const auto& v = validation();
    const auto grid = db_grid(kGapLoDb, kGapHiDb, 0.5);
    Outcome o;
    o.pass = true;
    for (Link l : {Link::ULAccess, Link::DLAccess, Link::ULBackhaul, Link::DLBackhaul}) {
        const auto key = curve_key(l, 1, std::nullopt, Probe::Typical);
        const auto it = v.mc.curves.find(key);
        if (it == v.mc.curves.end()) {
            o.pass = false;
            o.detail += key + " missing; ";
            continue;
        }
        const auto a = v.eng.curve(l, 1, std::nullopt, grid);
        double gap = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) gap = std::max(gap, std::abs(a.coverage[j] - it->second.at(grid[j])));
        o.pass = o.pass && gap <= kCurveGapTol;
        o.detail += std::string(to_string(l)) + " " + fmt("%.4f", gap) + " (n=" + std::to_string(it->second.n()) + "); ";
    }
    o.detail = "max gap " + o.detail;
    return o;
}

Outcome slot_separation()
{
    auto p = single_tier_100(500.0);
    p.eta = 0.5;
    p.delta = 1.0;
    p.F = 5;
    p.access_scheme = AccessScheme::Dynamic;
    const CoverageEngine eng(p, ModelOptions{});
    const double t1 = eng.curve(Link::ULAccess, 1, std::nullopt).threshold_at(0.5);
    const double t5 = eng.curve(Link::ULAccess, 5, std::nullopt).threshold_at(0.5);
    Outcome o;
    o.pass = within(t5 - t1, kShiftLoDb, kShiftHiDb);
    o.detail = "UL median SINR slot1 " + fmt("%.2f", t1) + " dB, slot5 " + fmt("%.2f", t5) + " dB, shift "
               + fmt("%.2f", t5 - t1) + " dB (band [10, 17])";
    return o;
}

struct RatePair {
    RateReport st, dy;
};

RatePair static_vs_dynamic(NetworkParams p, double eta, const std::shared_ptr<KTableCache>& cache)
{
    p.eta = eta;
    p.access_scheme = AccessScheme::Static;
    RatePair r;
    r.st = mean_rate(p, ModelOptions{}, cache);
    p.access_scheme = AccessScheme::Dynamic;
    r.dy = mean_rate(p, ModelOptions{}, cache);
    return r;
}

Outcome rate_ratios()
{
    auto p = single_tier_100(500.0);
    p.delta = 1.0;
    p.F = 1;
    auto cache = std::make_shared<KTableCache>();
    const auto a = static_vs_dynamic(p, 0.1, cache);
    const auto b = static_vs_dynamic(p, 0.5, cache);
    const double dl01 = a.dy.R_dl / a.st.R_dl;
    const double ul05 = b.dy.R_ul / b.st.R_ul;
    const double dl05 = b.dy.R_dl / b.st.R_dl;
    Outcome o;
    o.pass = within(dl01, kDl01Lo, kDl01Hi) && within(ul05, kUl05Lo, kUl05Hi) && within(dl05, kDl05Lo, kDl05Hi);
    o.detail = "dynamic/static DL@0.1 " + fmt("%.3f", dl01) + " [1.8,2.2], UL@0.5 " + fmt("%.3f", ul05)
               + " [0.85,0.93], DL@0.5 " + fmt("%.3f", dl05) + " [1.10,1.20]";
    return o;
}

Outcome noise_limited()
{
    auto p = single_tier_100(200.0);
    p.f_c = 73e9;
    p.W = 2e9;
    p.delta = 1.0;
    p.F = 1;
    auto cache = std::make_shared<KTableCache>();
    const auto a = static_vs_dynamic(p, 0.1, cache);
    const auto b = static_vs_dynamic(p, 0.5, cache);
    const double dl01 = a.dy.R_dl / a.st.R_dl;
    const double ul05 = b.dy.R_ul / b.st.R_ul;
    const double dl05 = b.dy.R_dl / b.st.R_dl;
    Outcome o;
    o.pass = within(dl01, kNoiseDl01Lo, kNoiseDl01Hi) && ul05 >= kNoiseGain05 && dl05 >= kNoiseGain05;
    o.detail = "dynamic/static DL@0.1 " + fmt("%.3f", dl01) + " [4,6], UL@0.5 " + fmt("%.3f", ul05) + ", DL@0.5 "
               + fmt("%.3f", dl05) + " (>= 1.20)";
    return o;
}

Outcome backhaul_structure()
{
    const std::vector<double> deltas = default_delta_set();
    Outcome o;
    o.pass = true;
    int trends = 0, bad_trends = 0, pairs = 0, bad_pairs = 0;

    // Optimum delta against SBS density.
    for (double fc : {28e9, 73e9})
        for (double lm : {20.0, 60.0})
            for (auto a : {AccessScheme::Static, AccessScheme::Dynamic})
                for (auto b : {BackhaulScheme::SAB, BackhaulScheme::UAB}) {
                    auto p = NetworkParams::defaults();
                    p.f_c = fc;
                    if (fc > 50e9) p.W = 2e9;
                    p.F = 10;
                    p.lambda_m = per_km2_to_per_m2(lm);
                    p.access_scheme = a;
                    p.backhaul_scheme = b;
                    auto cache = std::make_shared<KTableCache>();
                    std::vector<double> star;
                    for (double ls : {20.0, 40.0, 60.0, 80.0}) {
                        p.lambda_s = per_km2_to_per_m2(ls);
                        star.push_back(optimize_delta(p, ModelOptions{}, deltas, DeltaObjective::Overall, cache).delta_star);
                    }
                    ++trends;
                    if (!std::is_sorted(star.rbegin(), star.rend())) {
                        ++bad_trends;
                        o.detail += "trend breaks at fc " + fmt("%.0f", fc / 1e9) + " GHz lambda_m " + fmt("%.0f", lm) + " "
                                    + to_string(a) + "/" + to_string(b) + "; ";
                    }
                }

    // UAB against SAB on the eta x access grid.
    for (double eta : {0.1, 0.5, 0.9})
        for (auto a : {AccessScheme::Static, AccessScheme::Dynamic}) {
            auto p = NetworkParams::defaults();
            p.F = 10;
            p.eta = eta;
            p.access_scheme = a;
            auto cache = std::make_shared<KTableCache>();
            const double sab = optimize_delta(p, ModelOptions{}, deltas, DeltaObjective::Overall, cache).delta_star;
            p.backhaul_scheme = BackhaulScheme::UAB;
            const double uab = optimize_delta(p, ModelOptions{}, deltas, DeltaObjective::Overall, cache).delta_star;
            ++pairs;
            if (uab > sab + 1e-12) {
                ++bad_pairs;
                o.detail += "UAB " + fmt("%.1f", uab) + " > SAB " + fmt("%.1f", sab) + " at eta " + fmt("%.1f", eta) + " "
                            + to_string(a) + "; ";
            }
        }
    o.pass = bad_trends == 0 && bad_pairs == 0;
    o.detail = std::to_string(trends - bad_trends) + "/" + std::to_string(trends) + " density trends nonincreasing, "
               + std::to_string(pairs - bad_pairs) + "/" + std::to_string(pairs) + " UAB <= SAB; " + o.detail;
    return o;
}

Outcome tagged_gap()
{
    const auto& v = validation();
    Outcome o;
    o.pass = true;
    for (Link l : {Link::ULBackhaul, Link::DLBackhaul}) {
        const auto it = v.mc.curves.find(curve_key(l, 1, std::nullopt, Probe::Tagged));
        if (it == v.mc.curves.end()) {
            o.pass = false;
            o.detail += std::string(to_string(l)) + " tagged probe missing; ";
            continue;
        }
        const double a = v.eng.curve(l, 1, std::nullopt).threshold_at(0.5);
        const double e = empirical_median_db(it->second);
        const double gap = std::abs(a - e);
        o.pass = o.pass && gap <= kTaggedGapDb;
        o.detail += std::string(to_string(l)) + " analytic " + fmt("%.2f", a) + " dB vs tagged " + fmt("%.2f", e)
                    + " dB, gap " + fmt("%.2f", gap) + "; ";
    }
    return o;
}

Outcome properties()
{
    std::vector<std::string> failed;
    int checks = 0;
    auto check = [&](bool ok, const std::string& what) {
        ++checks;
        if (!ok) failed.push_back(what);
    };
    const auto p = NetworkParams::defaults();

    // Probability laws.
    for (double eps : {0.3, 2.5, 12.0}) {
        double s = 0.0, st = 0.0;
        for (int n = 0; n < 4000; ++n) {
            s += typical_pmf(eps, n);
            st += tagged_pmf(eps, n + 1);
        }
        check(std::abs(s - 1.0) <= kPmfTol && std::abs(st - 1.0) <= kPmfTol, "load pmf normalization");
        const auto d = dynamic_fad_pmf(eps, 0.4, 6);
        check(std::abs(std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0) - 1.0) <= kPmfTol, "F_ad pmf normalization");
    }
    for (int F : {1, 5, 10})
        for (double delta : {0.25, 0.5, 1.0}) {
            auto q = p;
            q.F = F;
            q.delta = delta;
            double s = 0.0;
            for (const auto& l : layout_atoms(q)) s += l.prob;
            check(std::abs(s - 1.0) <= kPmfTol, "layout normalization");
        }
    for (Device a : {Device::M, Device::S, Device::U})
        for (Device b : {Device::M, Device::S, Device::U})
            check(std::abs(gain_pmf(a, b, p).total_prob() - 1.0) <= kPmfTol, "gain pmf normalization");

    // Intensity continuity.
    for (Tier t : {Tier::M, Tier::S}) {
        const auto L = tier_intensity(p, t);
        for (double k : {L.knot_l(), L.knot_n()})
            check(std::abs(L.value(k * (1 - 1e-12)) - L.value(k * (1 + 1e-12))) <= 1e-9 * L.value(k),
                  "intensity continuity");
    }

    // Laplace transforms.
    {
        auto q = p;
        q.F = 4;
        q.delta = 0.5;
        q.access_scheme = AccessScheme::Dynamic;
        q.backhaul_scheme = BackhaulScheme::UAB;
        const InterferenceModel m(q, ModelOptions{});
        for (const auto& lay : layout_atoms(q))
            for (int i = 1; i <= q.F; ++i)
                for (Link l : {Link::ULAccess, Link::DLAccess, Link::ULBackhaul, Link::DLBackhaul}) {
                    LaplaceQuery lq;
                    lq.link = l;
                    lq.slot = i;
                    lq.layout = lay;
                    lq.tier = is_backhaul(l) ? Tier::M : Tier::S;
                    lq.R = 90.0;
                    try {
                        m.check_feasible(lq);
                    } catch (const ParamError&) {
                        continue;
                    }
                    check(m.laplace(lq, 0.0) == 1.0, "laplace at zero");
                    double prev = 1.0;
                    for (double s : {1e4, 1e7, 1e10, 1e13}) {
                        const double v = m.laplace(lq, s);
                        check(v > 0.0 && v <= prev, "laplace bounded and nonincreasing");
                        prev = v;
                    }
                }
    }

    // Coverage monotonicity, orderings and mixtures at the defaults.
    {
        auto cache = std::make_shared<KTableCache>();
        auto q = p;
        q.F = 4;
        q.delta = 0.5;
        const CoverageEngine sab(q, ModelOptions{}, cache);
        q.backhaul_scheme = BackhaulScheme::UAB;
        const CoverageEngine uab(q, ModelOptions{}, cache);
        for (Link l : {Link::ULBackhaul, Link::DLBackhaul})
            for (int i = 3; i <= 4; ++i) {
                std::optional<CoverageCurve> a, b;
                try {
                    a = sab.curve(l, i, std::nullopt);
                    b = uab.curve(l, i, std::nullopt);
                } catch (const ParamError&) {
                    continue;
                }
                for (std::size_t j = 0; j < a->coverage.size(); ++j) {
                    check(a->coverage[j] + 1e-12 >= b->coverage[j], "SAB >= UAB backhaul");
                    if (j) check(a->coverage[j] <= a->coverage[j - 1] + 1e-12, "coverage monotone");
                }
            }

        const CoverageEngine st(p, ModelOptions{}, cache);
        auto d = p;
        d.access_scheme = AccessScheme::Dynamic;
        const CoverageEngine dy(d, ModelOptions{}, cache);
        const auto a = st.curve(Link::ULAccess, 1, std::nullopt);
        const auto b = dy.curve(Link::ULAccess, 1, std::nullopt);
        for (std::size_t j = 0; j < a.coverage.size(); ++j)
            check(a.coverage[j] + 1e-12 >= b.coverage[j], "static >= dynamic UL access");

        const auto& eff = dy.model().densities();
        const auto all = dy.curve(Link::DLAccess, 1, std::nullopt);
        const auto cm = dy.curve(Link::DLAccess, 1, Tier::M);
        const auto cs = dy.curve(Link::DLAccess, 1, Tier::S);
        for (std::size_t j = 0; j < all.coverage.size(); ++j)
            check(std::abs(all.coverage[j] - eff.A_m * cm.coverage[j] - eff.A_s * cs.coverage[j]) <= 1e-12,
                  "association mixture");

        const auto r = mean_rate(d, ModelOptions{}, cache);
        check(std::abs(r.R_overall - (d.eta * r.R_dl + (1 - d.eta) * r.R_ul)) <= 1e-9 * r.R_overall, "eta mixture");
    }

    // Simulator determinism.
    {
        auto q = p;
        q.F = 4;
        q.backhaul_scheme = BackhaulScheme::UAB;
        McConfig c;
        c.seed = 99;
        c.drops = 24;
        c.parallelism = 1;
        const auto a = run_mc(q, c);
        c.parallelism = 0;
        const auto b = run_mc(q, c);
        bool same = a.curves.size() == b.curves.size() && a.R_overall.mean == b.R_overall.mean;
        for (const auto& [k, e] : a.curves) same = same && b.curves.count(k) && b.curves.at(k).sorted_db == e.sorted_db;
        check(same, "simulator determinism");
    }

    // Shannon identity on the empirical curves of the validation run.
    {
        const auto& v = validation();
        const auto grid = db_grid(-80.0, 100.0, 0.05);
        for (const auto& [k, e] : v.mc.curves) {
            if (e.n() < 1000) continue;
            std::vector<double> s(grid.size());
            for (std::size_t j = 0; j < grid.size(); ++j) s[j] = e.at(grid[j]);
            const double se = spectral_efficiency(grid, s);
            check(std::abs(se - e.mean_log2) <= kShannonRelTol * e.mean_log2, "Shannon identity " + k);
        }
    }

    Outcome o;
    o.pass = failed.empty();
    o.detail = std::to_string(checks - static_cast<int>(failed.size())) + "/" + std::to_string(checks) + " checks hold";
    if (!failed.empty()) {
        std::sort(failed.begin(), failed.end());
        failed.erase(std::unique(failed.begin(), failed.end()), failed.end());
        o.detail += "; failing: ";
        for (const auto& f : failed) o.detail += f + "; ";
    }
    return o;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion all[] = {
        {1, "slot activity anchors", slot_activity},
        {2, "association closed form", association},
        {3, "analytical vs simulated SINR", mc_match},
        {4, "dynamic TDD slot separation", slot_separation},
        {5, "rate ratio anchors", rate_ratios},
        {6, "noise-limited anchors", noise_limited},
        {7, "self-backhaul structure", backhaul_structure},
        {8, "typical vs tagged backhaul", tagged_gap},
        {9, "property suite", properties},
    };
    int failures = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) o.detail.pop_back();
        std::printf("criterion %d %s: %s | %s | %.1f s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), sec);
        std::fflush(stdout);
    }
    std::printf("%d of 9 criteria pass\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
