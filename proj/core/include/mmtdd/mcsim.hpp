#pragma once

#include "mmtdd/frame.hpp"
#include "mmtdd/params.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmtdd {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct McConfig {
    std::uint64_t seed = 1;
    int drops = 1000;
    // Independent frames (fading, gains, coins, scheduling) per drop.
    int frames = 1;
    // Torus side in m; <= 0 selects max(3 km, 6/sqrt(pi lambda_m), sqrt(100/lambda_m)).
    double window = 0.0;
    // Worker threads; 0 lets the scheduler decide. Results do not depend on it.
    int parallelism = 0;
    // Noise power override in W; negative derives it from W.
    double noise_override = -1.0;
};

double default_window(const NetworkParams& p);

// One Poisson drop on a torus. BS index b < n_mbs is an MBS. The typical UE
// sits at the centre and is not part of the loads; a virtual typical SBS at
// the same point probes backhaul links without perturbing the network.
struct NetworkRealization {
    std::uint64_t seed = 0;
    std::uint64_t drop = 0;
    double L = 0.0;
    int n_mbs = 0;
    std::vector<Point> bs;
    std::vector<Point> ue;
    std::vector<std::uint8_t> ue_dl;
    std::vector<int> ue_bs;
    std::vector<int> sbs_mbs;                 // per BS; -1 for MBSs
    std::vector<std::vector<int>> ul_ues;     // per BS
    std::vector<std::vector<int>> dl_ues;     // per BS
    std::vector<std::vector<int>> mbs_sbs_ul; // per BS; SBSs with a UL UE
    std::vector<std::vector<int>> mbs_sbs_dl; // per BS; SBSs with a DL UE
    Point origin;
    int tagged = -1;  // serving BS of the typical UE
    int vs_mbs = -1;  // serving MBS of the virtual typical SBS

    int n_bs() const { return static_cast<int>(bs.size()); }
    Tier tier(int b) const { return b < n_mbs ? Tier::M : Tier::S; }
    double distance(const Point& a, const Point& b) const;
};

inline constexpr std::uint64_t kTypicalUeId = 1ULL << 40;
inline constexpr std::uint64_t kVirtualSbsId = (1ULL << 40) + 1;

// Device ids used for per-pair marks: BS b -> b, UE u -> n_bs + u.
inline std::uint64_t bs_id(int b) { return static_cast<std::uint64_t>(b); }
inline std::uint64_t ue_id(const NetworkRealization& r, int u) { return static_cast<std::uint64_t>(r.n_bs() + u); }

// LOS mark of the link between two devices; symmetric and fixed per drop.
bool los_mark(const NetworkParams& p, const NetworkRealization& r, std::uint64_t a, std::uint64_t b, double d);
double path_loss(const NetworkParams& p, bool los, double d);

NetworkRealization generate(const NetworkParams& p, const McConfig& c, std::uint64_t drop);

// Tier of the typical UE's serving BS only; BS points are drawn, UEs are not.
Tier typical_association(const NetworkParams& p, const McConfig& c, std::uint64_t drop);

enum class TxKind : int { DLAccess, ULAccess, DLBackhaul, ULBackhaul, PoachDL, PoachUL };

struct Transmission {
    Point pos;
    std::uint64_t id = 0;
    Device dev = Device::M;
    TxKind kind = TxKind::DLAccess;
    int cell = -1;  // owning BS: the access BS, the MBS for backhaul, the SBS for poaching
};

struct FrameSchedule {
    SubframeLayout layout;
    std::vector<int> fad;                         // per BS
    std::vector<std::vector<Transmission>> slots; // index i - 1
    std::vector<std::vector<int>> mbs_choice;     // [i - 1][b]: scheduled SBS or -1
};

FrameSchedule schedule_frame(const NetworkParams& p, const NetworkRealization& r, std::uint64_t frame);

enum class Probe : int { Typical = 0, Tagged = 1 };

struct SinrSample {
    Link link = Link::ULAccess;
    int slot = 1;
    Tier tier = Tier::M;  // tier of the serving access BS; M for backhaul links
    Probe probe = Probe::Typical;
    bool poaching = false;  // access link carried in a backhaul slot
    double sinr = 0.0;
};

// SINR of every probe link that the frame carries: typical-UE access links
// in access slots, poaching access links in backhaul slots (UAB, SBS-served),
// and backhaul links for both the virtual typical SBS and the tagged SBS.
std::vector<SinrSample> measure(const NetworkParams& p, const NetworkRealization& r, const FrameSchedule& s,
                                std::uint64_t frame, double noise);

// Empirical CCDF from sorted SINR samples in dB.
struct EmpiricalCcdf {
    std::vector<float> sorted_db;
    double mean_log2 = 0.0;  // E[log2(1 + SINR)]

    std::size_t n() const { return sorted_db.size(); }
    double at(double tau_db) const;
    double stderr_at(double tau_db) const;
};

struct McRate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

struct McResult {
    // Keys from curve_key(); access keys exist per tier "m", "s" and pooled "all".
    std::map<std::string, EmpiricalCcdf> curves;
    McRate R_ul, R_dl, R_overall;
    McRate R_ul_m, R_ul_s, R_dl_m, R_dl_s;
    double frac_mbs = 0.0;          // fraction of drops whose typical UE picks an MBS
    double sbs_per_mbs = 0.0;       // mean SBSs per MBS
    double ues_per_bs[2] = {0, 0};  // mean UEs per BS by tier
    // Empirical F_ad law across BSs by tier, for frames with F_a = F.
    std::vector<double> fad_pmf[2];
    int drops = 0;
};

std::string curve_key(Link l, int slot, std::optional<Tier> tier, Probe probe = Probe::Typical);

McResult run_mc(const NetworkParams& p, const McConfig& c);

// Fraction of drops whose typical UE associates with an MBS.
double mc_association_fraction(const NetworkParams& p, const McConfig& c);

}  // namespace mmtdd
