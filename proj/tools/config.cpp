#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace mmtdd::cli {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why)
{
    throw ParamError("config: " + field + ": " + why);
}

double number(const json& v, const std::string& field)
{
    if (!v.is_number()) fail(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field, "must be finite");
    return x;
}

int integer(const json& v, const std::string& field)
{
    if (!v.is_number_integer()) fail(field, "expected an integer");
    return v.get<int>();
}

std::string text(const json& v, const std::string& field)
{
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
}

bool boolean(const json& v, const std::string& field)
{
    if (!v.is_boolean()) fail(field, "expected true or false");
    return v.get<bool>();
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!obj.is_object()) fail(where, "expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) fail(where + "." + k, "unknown field");
}

const char* objective_name(DeltaObjective o) { return o == DeltaObjective::Overall ? "overall" : "two-hop"; }

const char* activity_name(UeActivityRule r) { return r == UeActivityRule::Marginal ? "marginal" : "exact"; }

}  // namespace

const char* to_string(RunKind k)
{
    switch (k) {
    case RunKind::Coverage: return "coverage";
    case RunKind::Rate: return "rate";
    case RunKind::OptimizeDelta: return "optimize-delta";
    case RunKind::McValidate: return "mc-validate";
    case RunKind::Sweep: return "sweep";
    }
    return "?";
}

RunKind run_kind_from_string(const std::string& s)
{
    for (RunKind k : {RunKind::Coverage, RunKind::Rate, RunKind::OptimizeDelta, RunKind::McValidate, RunKind::Sweep})
        if (s == to_string(k)) return k;
    fail("kind", "unknown run kind '" + s + "'");
}

const std::map<std::string, json>& network_defaults()
{
    static const std::map<std::string, json> d = {
        {"lambda_m_per_km2", 20.0}, {"lambda_s_per_km2", 80.0}, {"lambda_u_per_km2", 200.0},
        {"p_m_dbm", 30.0},          {"p_s_dbm", 30.0},          {"p_u_dbm", 20.0},
        {"g_m_db", 24.0},           {"g_s_db", 24.0},           {"g_u_db", 6.0},
        {"side_m_db", -4.0},        {"side_s_db", -4.0},        {"side_u_db", -14.0},
        {"delta_m_deg", 10.0},      {"delta_s_deg", 10.0},      {"delta_u_deg", 60.0},
        {"bias_m_db", 0.0},         {"bias_s_db", 0.0},         {"f_c_ghz", 28.0},
        {"w_mhz", 200.0},           {"p_los", 0.3},             {"d_los_m", 200.0},
        {"alpha_l", 2.1},           {"alpha_n", 3.4},           {"eta", 0.5},
        {"delta", 0.5},             {"frame_slots", 1},         {"p_ul", 1.0},
        {"p_dl", 1.0},              {"access_scheme", "static"}, {"backhaul_scheme", "sab"},
    };
    return d;
}

void set_network_field(std::map<std::string, json>& net, const std::string& name, const json& v)
{
    const auto& d = network_defaults();
    const auto it = d.find(name);
    const std::string field = "network." + name;
    if (it == d.end()) fail(field, "unknown field");
    if (it->second.is_string()) {
        const std::string s = text(v, field);
        try {
            if (name == "access_scheme") (void)access_scheme_from_string(s);
            else (void)backhaul_scheme_from_string(s);
        } catch (const ParamError& e) {
            fail(field, e.what());
        }
        net[name] = s;
    } else if (it->second.is_number_integer()) {
        net[name] = integer(v, field);
    } else {
        net[name] = number(v, field);
    }
}

NetworkParams network_params(const std::map<std::string, json>& net)
{
    auto f = [&](const char* k) {
        const auto it = net.find(k);
        return (it != net.end() ? it->second : network_defaults().at(k)).get<double>();
    };
    auto s = [&](const char* k) {
        const auto it = net.find(k);
        return (it != net.end() ? it->second : network_defaults().at(k)).get<std::string>();
    };
    NetworkParams p;
    p.lambda_m = per_km2_to_per_m2(f("lambda_m_per_km2"));
    p.lambda_s = per_km2_to_per_m2(f("lambda_s_per_km2"));
    p.lambda_u = per_km2_to_per_m2(f("lambda_u_per_km2"));
    const char* tag[3] = {"m", "s", "u"};
    for (int k = 0; k < 3; ++k) {
        const std::string t = tag[k];
        p.power[k] = dbm_to_watt(f(("p_" + t + "_dbm").c_str()));
        p.main_gain[k] = db_to_linear(f(("g_" + t + "_db").c_str()));
        p.side_gain[k] = db_to_linear(f(("side_" + t + "_db").c_str()));
        p.beamwidth[k] = deg_to_rad(f(("delta_" + t + "_deg").c_str()));
    }
    p.bias = {db_to_linear(f("bias_m_db")), db_to_linear(f("bias_s_db"))};
    p.f_c = f("f_c_ghz") * 1e9;
    p.W = f("w_mhz") * 1e6;
    p.p_los = f("p_los");
    p.d_los = f("d_los_m");
    p.alpha_l = f("alpha_l");
    p.alpha_n = f("alpha_n");
    p.eta = f("eta");
    p.delta = f("delta");
    p.F = static_cast<int>(f("frame_slots"));
    p.p_ul = f("p_ul");
    p.p_dl = f("p_dl");
    p.access_scheme = access_scheme_from_string(s("access_scheme"));
    p.backhaul_scheme = backhaul_scheme_from_string(s("backhaul_scheme"));
    return p;
}

NetworkParams ExperimentConfig::params() const { return network_params(network); }

ModelOptions ExperimentConfig::options() const
{
    ModelOptions o = model;
    o.noise_override = noise_dbm ? dbm_to_watt(*noise_dbm) : -1.0;
    return o;
}

ExperimentConfig parse_config(const json& j)
{
    only_keys(j, "config", {"kind", "network", "model", "run", "mc", "sweep", "output", "parallelism"});
    ExperimentConfig c;
    c.network = network_defaults();
    if (j.contains("kind")) c.kind = run_kind_from_string(text(j["kind"], "kind"));
    if (j.contains("network")) {
        if (!j["network"].is_object()) fail("network", "expected an object");
        for (const auto& [k, v] : j["network"].items()) set_network_field(c.network, k, v);
    }

    if (j.contains("model")) {
        const auto& m = j["model"];
        only_keys(m, "model",
                  {"exact_bs_laplace", "ue_activity", "dl_backhaul_linktype_exclusion", "reference_forms",
                   "load_tail", "interference_scale", "noise_dbm"});
        if (m.contains("exact_bs_laplace")) c.model.exact_bs_laplace = boolean(m["exact_bs_laplace"], "model.exact_bs_laplace");
        if (m.contains("ue_activity")) {
            const auto s = text(m["ue_activity"], "model.ue_activity");
            if (s == "marginal") c.model.ue_activity = UeActivityRule::Marginal;
            else if (s == "exact") c.model.ue_activity = UeActivityRule::Exact;
            else fail("model.ue_activity", "expected 'marginal' or 'exact'");
        }
        if (m.contains("dl_backhaul_linktype_exclusion"))
            c.model.dl_backhaul_linktype_exclusion =
                boolean(m["dl_backhaul_linktype_exclusion"], "model.dl_backhaul_linktype_exclusion");
        if (m.contains("reference_forms")) c.model.reference_forms = boolean(m["reference_forms"], "model.reference_forms");
        if (m.contains("load_tail")) c.model.load_tail = number(m["load_tail"], "model.load_tail");
        if (m.contains("interference_scale"))
            c.model.interference_scale = number(m["interference_scale"], "model.interference_scale");
        if (m.contains("noise_dbm") && !m["noise_dbm"].is_null()) c.noise_dbm = number(m["noise_dbm"], "model.noise_dbm");
    }

    if (j.contains("run")) {
        const auto& r = j["run"];
        only_keys(r, "run", {"links", "slots", "tau_db", "deltas", "objective"});
        if (r.contains("links")) {
            if (!r["links"].is_array()) fail("run.links", "expected an array");
            for (const auto& l : r["links"]) {
                try {
                    c.links.push_back(link_from_string(text(l, "run.links")));
                } catch (const ParamError& e) {
                    fail("run.links", e.what());
                }
            }
        }
        if (r.contains("slots")) {
            if (!r["slots"].is_array()) fail("run.slots", "expected an array");
            for (const auto& s : r["slots"]) c.slots.push_back(integer(s, "run.slots"));
        }
        if (r.contains("tau_db")) {
            const auto& t = r["tau_db"];
            only_keys(t, "run.tau_db", {"lo", "hi", "step"});
            if (t.contains("lo")) c.tau.lo_db = number(t["lo"], "run.tau_db.lo");
            if (t.contains("hi")) c.tau.hi_db = number(t["hi"], "run.tau_db.hi");
            if (t.contains("step")) c.tau.step_db = number(t["step"], "run.tau_db.step");
        }
        if (r.contains("deltas")) {
            if (!r["deltas"].is_array() || r["deltas"].empty()) fail("run.deltas", "expected a non-empty array");
            c.deltas.clear();
            for (const auto& d : r["deltas"]) c.deltas.push_back(number(d, "run.deltas"));
        }
        if (r.contains("objective")) {
            const auto s = text(r["objective"], "run.objective");
            if (s == "overall") c.objective = DeltaObjective::Overall;
            else if (s == "two-hop") c.objective = DeltaObjective::TwoHop;
            else fail("run.objective", "expected 'overall' or 'two-hop'");
        }
    }

    if (j.contains("mc")) {
        const auto& m = j["mc"];
        only_keys(m, "mc", {"seed", "drops", "frames", "window_m"});
        if (m.contains("seed")) {
            if (!m["seed"].is_number_unsigned() && !(m["seed"].is_number_integer() && m["seed"].get<long long>() >= 0))
                fail("mc.seed", "expected a non-negative integer");
            c.mc.seed = m["seed"].get<std::uint64_t>();
        }
        if (m.contains("drops")) c.mc.drops = integer(m["drops"], "mc.drops");
        if (m.contains("frames")) c.mc.frames = integer(m["frames"], "mc.frames");
        if (m.contains("window_m")) c.mc.window = number(m["window_m"], "mc.window_m");
    }

    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        only_keys(s, "sweep", {"axes", "inner"});
        if (s.contains("inner")) {
            c.inner = run_kind_from_string(text(s["inner"], "sweep.inner"));
            if (c.inner != RunKind::Rate && c.inner != RunKind::OptimizeDelta)
                fail("sweep.inner", "expected 'rate' or 'optimize-delta'");
        }
        if (s.contains("axes")) {
            if (!s["axes"].is_array()) fail("sweep.axes", "expected an array");
            for (const auto& a : s["axes"]) {
                only_keys(a, "sweep.axes[]", {"param", "values"});
                SweepAxis ax;
                if (a.contains("param")) ax.param = text(a["param"], "sweep.axes[].param");
                if (!a.contains("values") || !a["values"].is_array())
                    fail("sweep.axes[].values", "expected an array");
                for (const auto& v : a["values"]) ax.values.push_back(v);
                if (ax.values.empty()) fail("sweep.axes[" + ax.param + "]", "empty axis");
                // Validate every value against a scratch network block.
                auto net = c.network;
                for (const auto& v : ax.values) {
                    if (!ax.param.empty()) {
                        set_network_field(net, ax.param, v);
                    } else {
                        if (!v.is_object()) fail("sweep.axes[].values", "unnamed axis needs override objects");
                        for (const auto& [k, x] : v.items()) set_network_field(net, k, x);
                    }
                }
                c.axes.push_back(std::move(ax));
            }
        }
    }

    if (j.contains("output")) {
        only_keys(j["output"], "output", {"dir"});
        if (j["output"].contains("dir")) c.output_dir = text(j["output"]["dir"], "output.dir");
    }
    if (j.contains("parallelism")) c.parallelism = integer(j["parallelism"], "parallelism");

    // Semantic checks of the assembled block.
    if (c.parallelism < 0) fail("parallelism", "must be >= 0");
    if (c.mc.drops <= 0) fail("mc.drops", "must be > 0");
    if (c.mc.frames <= 0) fail("mc.frames", "must be > 0");
    if (!(c.tau.step_db > 0.0) || !(c.tau.hi_db > c.tau.lo_db)) fail("run.tau_db", "need lo < hi and step > 0");
    for (double d : c.deltas)
        if (!(d > 0.0 && d <= 1.0)) fail("run.deltas", "values must lie in (0, 1]");
    try {
        const auto p = c.params();
        p.validate();
        c.options().validate();
        for (int s : c.slots)
            if (s < 1 || s > p.F) fail("run.slots", "slot " + std::to_string(s) + " outside 1..frame_slots");
    } catch (const ParamError& e) {
        const std::string what = e.what();
        if (what.rfind("config:", 0) == 0) throw;
        throw ParamError("config: network: " + what);
    }
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParamError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParamError("config: '" + path + "': " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c)
{
    json j;
    j["kind"] = to_string(c.kind);
    j["network"] = json::object();
    for (const auto& [k, v] : c.network) j["network"][k] = v;
    j["model"] = {
        {"exact_bs_laplace", c.model.exact_bs_laplace},
        {"ue_activity", activity_name(c.model.ue_activity)},
        {"dl_backhaul_linktype_exclusion", c.model.dl_backhaul_linktype_exclusion},
        {"reference_forms", c.model.reference_forms},
        {"load_tail", c.model.load_tail},
        {"interference_scale", c.model.interference_scale},
        {"noise_dbm", c.noise_dbm ? json(*c.noise_dbm) : json(nullptr)},
    };
    json links = json::array();
    for (Link l : c.links) links.push_back(mmtdd::to_string(l));
    j["run"] = {
        {"links", links},
        {"slots", c.slots},
        {"tau_db", {{"lo", c.tau.lo_db}, {"hi", c.tau.hi_db}, {"step", c.tau.step_db}}},
        {"deltas", c.deltas},
        {"objective", objective_name(c.objective)},
    };
    j["mc"] = {{"seed", c.mc.seed}, {"drops", c.mc.drops}, {"frames", c.mc.frames}, {"window_m", c.mc.window}};
    json axes = json::array();
    for (const auto& a : c.axes) axes.push_back({{"param", a.param}, {"values", a.values}});
    j["sweep"] = {{"axes", axes}, {"inner", to_string(c.inner)}};
    j["output"] = {{"dir", c.output_dir}};
    j["parallelism"] = c.parallelism;
    return j;
}

std::uint64_t config_hash(const ExperimentConfig& c)
{
    // Output location and worker count do not change results.
    json j = to_json(c);
    j.erase("output");
    j.erase("parallelism");
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mmtdd::cli
