#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mmtdd {

// Error idiom for the whole library: validation failures throw ParamError,
// quadrature/truncation failures throw NumericError. The cli maps them to
// exit codes 2 and 3.
class ParamError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Tier : int { M = 0, S = 1 };
enum class Device : int { M = 0, S = 1, U = 2 };
enum class LinkType : int { LOS = 0, NLOS = 1 };
enum class AccessScheme : int { Static = 0, Dynamic = 1 };
enum class BackhaulScheme : int { SAB = 0, UAB = 1 };
enum class Link : int { ULAccess = 0, ULBackhaul = 1, DLAccess = 2, DLBackhaul = 3 };

// How the UL-UE activity of an interfering BS is derived under dynamic TDD.
// Marginal: P(F_ad < i) - P(N_u = 0), clamped at zero.
// Exact:   P(F_ad < i, N_u > 0) from the joint load law.
enum class UeActivityRule : int { Marginal = 0, Exact = 1 };

inline constexpr Device device_of(Tier t) { return static_cast<Device>(static_cast<int>(t)); }
inline constexpr int idx(Tier t) { return static_cast<int>(t); }
inline constexpr bool is_backhaul(Link l) { return l == Link::ULBackhaul || l == Link::DLBackhaul; }
inline constexpr int idx(Device d) { return static_cast<int>(d); }
inline constexpr int idx(LinkType m) { return static_cast<int>(m); }

const char* to_string(Tier t);
const char* to_string(Device d);
const char* to_string(LinkType m);
const char* to_string(AccessScheme w);
const char* to_string(BackhaulScheme w);
const char* to_string(Link l);
Link link_from_string(const std::string& s);
AccessScheme access_scheme_from_string(const std::string& s);
BackhaulScheme backhaul_scheme_from_string(const std::string& s);

// All quantities in SI units: densities per m^2, powers in W, gains linear,
// beamwidths in radians, distances in m, frequencies in Hz.
struct NetworkParams {
    double lambda_m = 0.0;
    double lambda_s = 0.0;
    double lambda_u = 0.0;

    std::array<double, 3> power{};      // indexed by Device
    std::array<double, 3> main_gain{};  // G
    std::array<double, 3> side_gain{};  // g
    std::array<double, 3> beamwidth{};  // Delta
    std::array<double, 2> bias{};       // indexed by Tier

    double f_c = 0.0;
    double W = 0.0;

    double p_los = 0.0;
    double d_los = 0.0;
    double alpha_l = 0.0;
    double alpha_n = 0.0;

    double eta = 0.5;
    double delta = 0.5;
    int F = 1;
    double p_ul = 1.0;
    double p_dl = 1.0;

    AccessScheme access_scheme = AccessScheme::Static;
    BackhaulScheme backhaul_scheme = BackhaulScheme::SAB;

    double lambda(Tier t) const { return t == Tier::M ? lambda_m : lambda_s; }
    double lambda_b() const { return lambda_m + lambda_s; }
    double P(Device d) const { return power[idx(d)]; }
    double P(Tier t) const { return power[idx(t)]; }
    double G(Device d) const { return main_gain[idx(d)]; }
    double G(Tier t) const { return main_gain[idx(t)]; }
    double B(Tier t) const { return bias[idx(t)]; }
    double alpha(LinkType m) const { return m == LinkType::LOS ? alpha_l : alpha_n; }
    // Biased received-power weight P_t G_t B_t used for association.
    double assoc_weight(Tier t) const { return P(t) * G(t) * B(t); }

    // Defaults of the reference deployment: 28 GHz, 200 MHz, 20 MBS + 80 SBS
    // and 200 UE per km^2.
    static NetworkParams defaults();

    // Throws ParamError naming the offending field.
    void validate() const;
};

struct ModelOptions {
    // Dynamic-TDD BS interference at the UL receiver: exact two-dimensional
    // integral around the receiver, or the one-dimensional form that drops
    // the exclusion region.
    bool exact_bs_laplace = true;
    UeActivityRule ue_activity = UeActivityRule::Marginal;
    // DL-backhaul MBS exclusion starts at rho^alpha_l by default; when set the
    // exponent follows the serving link type.
    bool dl_backhaul_linktype_exclusion = false;
    // Use the uncorrected reference forms where they differ from the
    // derived ones: P_u/Psi_mu in the DL-backhaul poaching factor, Psi_tu for DL
    // access BS interferers, no exclusion for poaching SBSs in DL access,
    // and spectral efficiency without the 1/ln2 factor.
    bool reference_forms = false;
    // Tail mass allowed when truncating load sums in rate expressions.
    double load_tail = 1e-9;
    // Multiplies every interferer activity; 0 yields noise-limited curves.
    double interference_scale = 1.0;
    // Noise power override in W; negative means derive from W.
    double noise_override = -1.0;

    void validate() const;
};

// Unit conversion helpers used at the config boundary.
double db_to_linear(double db);
double linear_to_db(double x);
double dbm_to_watt(double dbm);
double watt_to_dbm(double w);
double deg_to_rad(double deg);
double per_km2_to_per_m2(double x);
double per_m2_to_per_km2(double x);

// Stable 64-bit hash of every field, used to stamp outputs.
std::uint64_t params_hash(const NetworkParams& p, const ModelOptions& o);

}  // namespace mmtdd
