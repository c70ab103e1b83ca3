#include "mmtdd/params.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

namespace mmtdd {

const char* to_string(Tier t) { return t == Tier::M ? "m" : "s"; }

const char* to_string(Device d)
{
    switch (d) {
    case Device::M: return "m";
    case Device::S: return "s";
    case Device::U: return "u";
    }
    return "?";
}

const char* to_string(LinkType m) { return m == LinkType::LOS ? "los" : "nlos"; }
const char* to_string(AccessScheme w) { return w == AccessScheme::Static ? "static" : "dynamic"; }
const char* to_string(BackhaulScheme w) { return w == BackhaulScheme::SAB ? "sab" : "uab"; }

const char* to_string(Link l)
{
    switch (l) {
    case Link::ULAccess: return "ul_access";
    case Link::ULBackhaul: return "ul_backhaul";
    case Link::DLAccess: return "dl_access";
    case Link::DLBackhaul: return "dl_backhaul";
    }
    return "?";
}

Link link_from_string(const std::string& s)
{
    for (Link l : {Link::ULAccess, Link::ULBackhaul, Link::DLAccess, Link::DLBackhaul})
        if (s == to_string(l)) return l;
    throw ParamError("unknown link '" + s + "'");
}

AccessScheme access_scheme_from_string(const std::string& s)
{
    if (s == "static" || s == "S") return AccessScheme::Static;
    if (s == "dynamic" || s == "D") return AccessScheme::Dynamic;
    throw ParamError("access_scheme: expected static|dynamic, got '" + s + "'");
}

BackhaulScheme backhaul_scheme_from_string(const std::string& s)
{
    if (s == "sab" || s == "SAB") return BackhaulScheme::SAB;
    if (s == "uab" || s == "UAB") return BackhaulScheme::UAB;
    throw ParamError("backhaul_scheme: expected sab|uab, got '" + s + "'");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }
double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double per_km2_to_per_m2(double x) { return x * 1e-6; }
double per_m2_to_per_km2(double x) { return x * 1e6; }

NetworkParams NetworkParams::defaults()
{
    NetworkParams p;
    p.lambda_m = per_km2_to_per_m2(20.0);
    p.lambda_s = per_km2_to_per_m2(80.0);
    p.lambda_u = per_km2_to_per_m2(200.0);
    p.power = {dbm_to_watt(30.0), dbm_to_watt(30.0), dbm_to_watt(20.0)};
    p.main_gain = {db_to_linear(24.0), db_to_linear(24.0), db_to_linear(6.0)};
    p.side_gain = {db_to_linear(-4.0), db_to_linear(-4.0), db_to_linear(-14.0)};
    p.beamwidth = {deg_to_rad(10.0), deg_to_rad(10.0), deg_to_rad(60.0)};
    p.bias = {1.0, 1.0};
    p.f_c = 28e9;
    p.W = 200e6;
    p.p_los = 0.3;
    p.d_los = 200.0;
    p.alpha_l = 2.1;
    p.alpha_n = 3.4;
    p.eta = 0.5;
    p.delta = 0.5;
    p.F = 1;
    p.p_ul = 1.0;
    p.p_dl = 1.0;
    return p;
}

namespace {

void require(bool ok, const char* field, const std::string& reason)
{
    if (!ok) throw ParamError(std::string(field) + ": " + reason);
}

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }
bool unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

void NetworkParams::validate() const
{
    require(finite_pos(lambda_m), "lambda_m", "must be > 0");
    require(std::isfinite(lambda_s) && lambda_s >= 0.0, "lambda_s", "must be >= 0");
    require(finite_pos(lambda_u), "lambda_u", "must be > 0");
    static const char* pn[] = {"P_m", "P_s", "P_u"};
    static const char* gn[] = {"G_m", "G_s", "G_u"};
    static const char* sn[] = {"g_m", "g_s", "g_u"};
    static const char* bn[] = {"Delta_m", "Delta_s", "Delta_u"};
    for (int k = 0; k < 3; ++k) {
        require(finite_pos(power[k]), pn[k], "must be > 0");
        require(finite_pos(main_gain[k]), gn[k], "must be > 0");
        require(finite_pos(side_gain[k]), sn[k], "must be > 0");
        require(main_gain[k] >= side_gain[k], gn[k], "main-lobe gain below side-lobe gain");
        require(std::isfinite(beamwidth[k]) && beamwidth[k] > 0.0
                    && beamwidth[k] < 2.0 * std::numbers::pi,
                bn[k], "must lie in (0, 2pi)");
    }
    require(finite_pos(bias[0]), "B_m", "must be > 0");
    require(finite_pos(bias[1]), "B_s", "must be > 0");
    require(finite_pos(f_c), "f_c", "must be > 0");
    require(finite_pos(W), "W", "must be > 0");
    require(unit(p_los), "p_los", "must lie in [0,1]");
    require(finite_pos(d_los), "d_los", "must be > 0");
    require(std::isfinite(alpha_l) && alpha_l > 2.0, "alpha_l", "must be > 2");
    require(std::isfinite(alpha_n) && alpha_n >= alpha_l, "alpha_n", "must be >= alpha_l");
    require(unit(eta), "eta", "must lie in [0,1]");
    require(unit(delta), "delta", "must lie in [0,1]");
    require(F >= 1, "F", "must be a positive integer");
    require(unit(p_ul), "p_ul", "must lie in [0,1]");
    require(unit(p_dl), "p_dl", "must lie in [0,1]");
}

void ModelOptions::validate() const
{
    require(std::isfinite(load_tail) && load_tail > 0.0 && load_tail < 0.5, "load_tail",
            "must lie in (0, 0.5)");
    require(std::isfinite(interference_scale) && interference_scale >= 0.0,
            "interference_scale", "must be >= 0");
    require(std::isfinite(noise_override), "noise_override", "must be finite");
}

namespace {

// FNV-1a over the raw bytes of each scalar in a fixed order.
struct Fnv {
    std::uint64_t h = 1469598103934665603ULL;
    void bytes(const void* p, std::size_t n)
    {
        auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ULL;
        }
    }
    void d(double x) { bytes(&x, sizeof x); }
    void i(std::int64_t x) { bytes(&x, sizeof x); }
};

}  // namespace

std::uint64_t params_hash(const NetworkParams& p, const ModelOptions& o)
{
    Fnv f;
    for (double x : {p.lambda_m, p.lambda_s, p.lambda_u, p.f_c, p.W, p.p_los, p.d_los,
                     p.alpha_l, p.alpha_n, p.eta, p.delta, p.p_ul, p.p_dl})
        f.d(x);
    for (int k = 0; k < 3; ++k) {
        f.d(p.power[k]);
        f.d(p.main_gain[k]);
        f.d(p.side_gain[k]);
        f.d(p.beamwidth[k]);
    }
    f.d(p.bias[0]);
    f.d(p.bias[1]);
    f.i(p.F);
    f.i(static_cast<int>(p.access_scheme));
    f.i(static_cast<int>(p.backhaul_scheme));
    f.i(o.exact_bs_laplace);
    f.i(static_cast<int>(o.ue_activity));
    f.i(o.dl_backhaul_linktype_exclusion);
    f.i(o.reference_forms);
    f.d(o.load_tail);
    f.d(o.interference_scale);
    f.d(o.noise_override);
    return f.h;
}

}  // namespace mmtdd
