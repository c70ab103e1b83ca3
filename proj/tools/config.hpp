#pragma once

#include "mmtdd/mcsim.hpp"
#include "mmtdd/params.hpp"
#include "mmtdd/rate.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mmtdd::cli {

using nlohmann::json;

enum class RunKind { Coverage, Rate, OptimizeDelta, McValidate, Sweep };

const char* to_string(RunKind k);
RunKind run_kind_from_string(const std::string& s);

struct TauGrid {
    double lo_db = -20.0;
    double hi_db = 60.0;
    double step_db = 1.0;
};

// One sweep dimension. A named axis assigns each value to that network
// field; an unnamed axis takes objects of field overrides.
struct SweepAxis {
    std::string param;
    std::vector<json> values;
};

// Everything a run needs. Network fields are held in the units of their
// names (per km^2, dBm, dB, deg, GHz, MHz, m) so that serialization is exact.
struct ExperimentConfig {
    std::map<std::string, json> network;
    ModelOptions model;  // noise_override is derived from noise_dbm
    std::optional<double> noise_dbm;
    RunKind kind = RunKind::Coverage;
    std::vector<Link> links;  // empty: every link the frame carries
    std::vector<int> slots;   // empty: 1..F
    TauGrid tau;
    std::vector<double> deltas = default_delta_set();
    DeltaObjective objective = DeltaObjective::Overall;
    McConfig mc;
    std::vector<SweepAxis> axes;
    RunKind inner = RunKind::Rate;
    std::string output_dir = "out";
    int parallelism = 0;

    NetworkParams params() const;
    ModelOptions options() const;
};

// Names and defaults of the network block.
const std::map<std::string, json>& network_defaults();

// Applies one unit-suffixed network field; throws ParamError naming it.
void set_network_field(std::map<std::string, json>& net, const std::string& name, const json& v);
NetworkParams network_params(const std::map<std::string, json>& net);

// Throws ParamError naming the offending field.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);
json to_json(const ExperimentConfig& c);

// FNV-1a 64 of the canonical serialization.
std::uint64_t config_hash(const ExperimentConfig& c);
std::string hex64(std::uint64_t h);

}  // namespace mmtdd::cli
