#pragma once

#include "mmtdd/params.hpp"

#include <vector>

namespace mmtdd {

struct IntAtom {
    int value;
    double prob;
};

// Randomized rounding of x >= 0: ceil(x) with probability x - floor(x),
// floor(x) otherwise. One atom when x is integral.
std::vector<IntAtom> random_rounding(double x);

// F_a over {floor(delta F), ceil(delta F)}.
std::vector<IntAtom> access_split_pmf(double delta, int F);

// Static TDD: P(F_ad = n), n = 0..F_a, for the network-wide fraction gamma.
std::vector<double> static_fad_pmf(double gamma, int Fa);

// Dynamic TDD law of F_ad at a typical BS whose loads follow the joint
// law with mean eps. `with_ul[n]` is P(F_ad = n, N_u > 0).
struct DynamicFad {
    std::vector<double> pmf;
    std::vector<double> with_ul;
    double p_no_dl = 1.0;  // P(N_d = 0)
    double p_no_ul = 1.0;  // P(N_u = 0)
};

// Enumerates every (n1, n2) load pair up to a tail of `tail`, so the result
// is exact up to that truncation; the PMF is renormalized.
DynamicFad dynamic_fad_pmf(double eps, double eta, int Fa, double tail = 1e-12);

// One atom of the frame layout F = {F_a, F_bd} plus the static F_ad.
struct SubframeLayout {
    int F = 1;
    int Fa = 1;
    int Fbd = 0;
    int Fad = 0;  // network-wide value under static TDD; unused under dynamic
    double prob = 1.0;

    int Fau() const { return Fa - Fad; }
    int Fb() const { return F - Fa; }
    int Fbu() const { return F - Fa - Fbd; }
    bool is_access(int i) const { return i >= 1 && i <= Fa; }
    bool is_backhaul_dl(int i) const { return i > Fa && i <= Fa + Fbd; }
    bool is_backhaul_ul(int i) const { return i > Fa + Fbd && i <= F; }
};

// Joint atoms of (F_a, F_bd, static F_ad), at most eight; probabilities sum to 1.
std::vector<SubframeLayout> layout_atoms(const NetworkParams& p);

// Thinned densities and activities shared by the Laplace functionals.
struct EffectiveDensities {
    double A_m = 1.0;
    double A_s = 0.0;
    double eps_u[2] = {0.0, 0.0};    // mean UL UEs per tier-k BS
    double eps_d[2] = {0.0, 0.0};    // mean DL UEs per tier-k BS
    double eps_all[2] = {0.0, 0.0};  // mean UEs per tier-k BS
    double p_has_ul[2] = {0.0, 0.0}; // 1 - kappa_{u,k}(0)
    double p_has_dl[2] = {0.0, 0.0}; // 1 - kappa_{d,k}(0)
    double lambda_su = 0.0;          // SBSs with at least one UL UE
    double lambda_sd = 0.0;          // SBSs with at least one DL UE
    double p_void = 0.0;             // MBS has a UL backhaul SBS to schedule
    double p_mbs_dl = 0.0;           // MBS has a DL backhaul SBS to schedule
    double unscheduled_sbs = 0.0;    // (lambda_s - (1 - kappa_{s}(0)) lambda_m)^+
    double lambda_hat = 0.0;         // UL poaching UEs (UL backhaul slots)
    double lambda_bar_u = 0.0;       // same density seen at the MBS
    double lambda_bar_d = 0.0;       // DL poaching SBSs seen at an SBS
    double lambda_hat_d = 0.0;       // DL poaching SBSs seen at a UE
};

EffectiveDensities effective_densities(const NetworkParams& p);
EffectiveDensities effective_densities(const NetworkParams& p, double A_m);

// Per-slot interferer activities for one layout atom. Dynamic-TDD values
// come from the tier-k F_ad law conditioned on F_a.
class SlotActivity {
public:
    SlotActivity(const NetworkParams& p, const EffectiveDensities& eff, const SubframeLayout& lay,
                 UeActivityRule rule = UeActivityRule::Marginal);

    // P(tier-nu BS transmits DL access in slot i), 1 <= i <= F_a.
    double dl_active(int i, Tier nu) const;
    // P(tier-k BS has a scheduled UL UE in slot i), 1 <= i <= F_a.
    double ul_active(int i, Tier k) const;

    const DynamicFad& dynamic_law(Tier t) const { return dyn_[idx(t)]; }
    const SubframeLayout& layout() const { return lay_; }

private:
    void check_slot(int i) const;

    NetworkParams p_;
    EffectiveDensities eff_;
    SubframeLayout lay_;
    UeActivityRule rule_;
    DynamicFad dyn_[2];
};

}  // namespace mmtdd
