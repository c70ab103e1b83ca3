#pragma once

#include "mmtdd/params.hpp"

#include <vector>

namespace mmtdd {

// C_0 = (c / (4 pi f_c))^2, the omnidirectional path loss at 1 m.
double reference_pathloss(double f_c);

// Thermal noise -174 + 10 log10(W) + 5 dBm, returned in W (and dBm).
double noise_power(double W);
double noise_power_dbm(double W);

// LOS-ball blockage; the boundary d = d_los counts as LOS.
double los_probability(const NetworkParams& p, double d);
double nlos_probability(const NetworkParams& p, double d);
inline double link_probability(const NetworkParams& p, LinkType m, double d)
{
    return m == LinkType::LOS ? los_probability(p, d) : nlos_probability(p, d);
}

struct GainAtom {
    double gain;
    double prob;
};

// Two-lobe sectored antenna product gain of an interfering link.
struct GainPMF {
    std::vector<GainAtom> atoms;

    double mean() const;
    double total_prob() const;
};

GainPMF gain_pmf(Device tx, Device rx, const NetworkParams& p);

// Intensity Lambda_t(tau) of the propagation process {L(X,0): X in Phi_t}
// and its density. Three regimes split at d_los^alpha_l and d_los^alpha_n.
class TierIntensity {
public:
    TierIntensity() = default;
    TierIntensity(double lambda, double p_los, double d_los, double alpha_l, double alpha_n);

    double lambda() const { return lambda_; }
    double knot_l() const { return knot_l_; }
    double knot_n() const { return knot_n_; }
    double alpha_n() const { return an_; }
    bool empty() const { return lambda_ <= 0.0; }

    double value(double tau) const;
    double density(double tau) const;
    // Smallest tau with value(tau) >= v; +inf for an empty tier.
    double inverse(double v) const;

private:
    double lambda_ = 0.0;
    double p_ = 0.0;
    double d_ = 1.0;
    double al_ = 2.1;
    double an_ = 3.4;
    double knot_l_ = 1.0;
    double knot_n_ = 1.0;
};

TierIntensity tier_intensity(const NetworkParams& p, Tier t);

// Probability A_m that a typical UE associates with an MBS.
double association_probability(const NetworkParams& p);

struct TierLinkDistance {
    Tier tier;
    LinkType link;
    double R;
};

struct ServingDistance {
    double pdf;   // f_{t,mu}(R)
    double void_; // F_{t,mu}(R)
};

// Density of the nearest tier-t type-mu BS at distance R together with the
// probability that no tier-t type-mu BS lies inside B(0, R).
ServingDistance serving_distance(const NetworkParams& p, const TierLinkDistance& q);
double serving_pdf(const NetworkParams& p, Tier t, LinkType m, double R);
double void_probability(const NetworkParams& p, Tier t, LinkType m, double R);

// Product over (t', mu') != (t, mu) of F_{t',mu'}(((P'G'B' R^a_mu)/(PGB))^(1/a_mu')),
// i.e. the probability that the candidate at R wins biased association.
double association_exclusion(const NetworkParams& p, Tier t, LinkType m, double R);

// MBS-only variant for SBS-to-MBS association (unbiased path loss): the
// other MBS link type must not offer a smaller path loss.
double mbs_exclusion(const NetworkParams& p, LinkType m, double R);

}  // namespace mmtdd
