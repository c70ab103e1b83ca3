#pragma once

#include "mmtdd/coverage.hpp"

#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace mmtdd {

// Mean rates in bit/s. SBS-attached rates use the min-of-means coupling of
// the access and backhaul components per frame layout atom.
struct RateReport {
    AccessScheme scheme_a = AccessScheme::Static;
    BackhaulScheme scheme_b = BackhaulScheme::SAB;
    double eta = 0.5;
    double delta = 0.5;
    double p_ul = 1.0;
    double p_dl = 1.0;
    std::uint64_t params_hash = 0;

    double A_m = 1.0;
    double A_s = 0.0;
    double R_ul = 0.0;
    double R_dl = 0.0;
    double R_overall = 0.0;
    double R_ul_m = 0.0;
    double R_ul_s = 0.0;
    double R_dl_m = 0.0;
    double R_dl_s = 0.0;
    // E over layouts of the access and backhaul components, in bit/s.
    double Ra_ul = 0.0;
    double Rb_ul = 0.0;
    double Ra_dl = 0.0;
    double Rb_dl = 0.0;

    // Mean rate of SBS-attached users.
    double two_hop() const { return eta * R_dl_s + (1.0 - eta) * R_ul_s; }
};

void write_rate_csv_header(std::ostream& os);
void write_rate_csv_row(std::ostream& os, const RateReport& r);

// (1/ln2) int_0^inf S(tau) / (1 + tau) dtau from coverage on a uniform dB
// grid. Below the grid S is taken as its first value; above, as zero.
// `base2 = false` drops the 1/ln2 factor.
double spectral_efficiency(std::span<const double> tau_db, std::span<const double> coverage,
                           bool base2 = true);

// Expected per-slot scheduling weights of the tagged BS for one layout atom:
// w[i-1] = E[1(slot i serves the typical UE's direction) / N_dir], from the
// tagged joint load law with mean eps.
std::vector<double> ul_slot_weights(const NetworkParams& p, const SubframeLayout& lay, double eps,
                                    double tail);
std::vector<double> dl_slot_weights(const NetworkParams& p, const SubframeLayout& lay, double eps,
                                    double tail);

RateReport mean_rate(const NetworkParams& p, const ModelOptions& o,
                     std::shared_ptr<KTableCache> cache = nullptr);

enum class DeltaObjective { Overall, TwoHop };

struct DeltaSweep {
    double delta_star = 1.0;
    RateReport best;
    std::vector<RateReport> sweep;
};

std::vector<double> default_delta_set();

// Argmax over `deltas`; ties go to the smaller delta.
DeltaSweep optimize_delta(const NetworkParams& p, const ModelOptions& o, std::vector<double> deltas,
                          DeltaObjective obj = DeltaObjective::Overall,
                          std::shared_ptr<KTableCache> cache = nullptr);

}  // namespace mmtdd
