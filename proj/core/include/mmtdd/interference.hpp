#pragma once

#include "mmtdd/frame.hpp"
#include "mmtdd/netmodel.hpp"
#include "mmtdd/params.hpp"

#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace mmtdd {

// Thinning weight w(r) applied to a propagation intensity Lambda(dr).
struct Weight {
    enum class Kind { Const, OneMinusExp, VoidMix };

    Kind kind = Kind::Const;
    TierIntensity lam;   // intensity inside the weight (OneMinusExp, VoidMix)
    double scale = 1.0;  // OneMinusExp: w(r) = 1 - exp(-lam(scale r))
    double p_void = 0.0; // VoidMix: p_void (1 - exp(-lam(r))) + exp(-lam(r))

    static Weight constant() { return {}; }
    static Weight one_minus_exp(const TierIntensity& l, double scale);
    static Weight void_mix(const TierIntensity& l, double p_void);

    double value(double r) const;
    double at_infinity() const;
    // Beyond this point w equals at_infinity() to double precision.
    double saturation() const;
    std::vector<double> knots() const;
};

// J(x) = sum_j W_j x / (x + D_j) + tail(x), a discretized shot integral
// int_a^inf w(r) x / (x + r) Lambda(dr). The tail covers D > tail_T where
// the measure is c D^(beta - 1) dD exactly.
struct ShotKernel {
    std::vector<double> D;
    std::vector<double> W;
    double tail_c = 0.0;
    double tail_beta = 0.5;
    double tail_T = std::numeric_limits<double>::infinity();

    double operator()(double x) const;
    bool empty() const { return D.empty() && tail_c == 0.0; }
    // Total measure of the discretized part plus the tail mass scale.
    double mass() const;
};

// Radial kernel over the propagation process of `tier`, from path loss `lower`.
ShotKernel radial_kernel(const TierIntensity& lam, const Weight& w, double lower);

// Exact kernel for dynamic-TDD BS interferers at an UL receiver at distance
// R from the reference UE: interferers of intensity lambda_nu that lose
// biased association to the receiver, distances measured to the receiver.
// r_excl[mu1] is the minimum distance from the UE for link type mu1.
ShotKernel exact_ul_kernel(const NetworkParams& p, double lambda_nu, double R,
                           const double r_excl[2]);

struct KernelSpec {
    enum class Kind { Radial, ExactUL };
    Kind kind = Kind::Radial;
    Tier tier = Tier::M;         // interferer process
    Weight weight;
    // Lower limit lower_ratio * R^lower_alpha; lower_ratio = 0 means from 0.
    double lower_ratio = 0.0;
    double lower_alpha = 1.0;
    // ExactUL: exclusion ratio P_nu G_nu B_nu / (P_t G_t B_t) and alpha_mu.
    double excl_ratio = 1.0;
    double serving_alpha = 2.0;
};

// One independent interferer class: factor exp(-activity * K(s)),
// K(s) = E_g[J(s C0 power g)].
struct FactorSpec {
    std::string key;  // identifies (kernel, gain, power); activity excluded
    KernelSpec kernel;
    Device tx = Device::U;
    Device rx = Device::M;
    double power = 0.0;
    double activity = 0.0;
};

struct LaplaceQuery {
    Link link = Link::ULAccess;
    int slot = 1;
    SubframeLayout layout;
    Tier tier = Tier::M;            // serving tier (ULBackhaul/DLBackhaul: M)
    LinkType link_type = LinkType::NLOS;
    double R = 1.0;                 // serving distance
};

class InterferenceModel {
public:
    InterferenceModel(const NetworkParams& p, const ModelOptions& o);

    const NetworkParams& params() const { return p_; }
    const ModelOptions& options() const { return o_; }
    const EffectiveDensities& densities() const { return eff_; }
    const TierIntensity& intensity(Tier t) const { return lam_[idx(t)]; }
    const GainPMF& gain(Device tx, Device rx) const { return gains_[idx(tx)][idx(rx)]; }
    double C0() const { return C0_; }
    double noise() const { return noise_; }

    // Throws ParamError when the (link, slot, scheme, tier) combination
    // cannot occur in the frame.
    void check_feasible(const LaplaceQuery& q) const;

    // Interferer classes for the query (R is not used).
    std::vector<FactorSpec> factors(const LaplaceQuery& q) const;
    ShotKernel kernel(const KernelSpec& k, double R) const;
    // E_g[J(s C0 power g)] for one factor at serving distance R.
    double shot(const FactorSpec& f, double R, double s) const;

    // Approximate Laplace transform of the total interference at argument s.
    double laplace(const LaplaceQuery& q, double s) const;
    // Dynamic-TDD BS factor with the exclusion region dropped (lower bound).
    double laplace_bs_lower_bound(const LaplaceQuery& q, double s) const;

    const SlotActivity& activity(const SubframeLayout& lay) const;

private:
    NetworkParams p_;
    ModelOptions o_;
    EffectiveDensities eff_;
    TierIntensity lam_[2];
    GainPMF gains_[3][3];
    double C0_ = 1.0;
    double noise_ = 0.0;

    mutable std::mutex mu_;
    mutable std::map<std::pair<int, int>, std::unique_ptr<SlotActivity>> acts_;
};

}  // namespace mmtdd
