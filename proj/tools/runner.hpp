#pragma once

#include "config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace mmtdd::cli {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

// From MMTDD_LOG: quiet|info|debug or 0|1|2; info when unset.
LogLevel log_level_from_env();
void set_log_level(LogLevel l);
void log(LogLevel l, const std::string& msg);

const char* tool_version();

// "# mmtdd <version> config=<hash>" followed by a newline.
void write_stamp(std::ostream& os, const ExperimentConfig& c);

void write_coverage(const ExperimentConfig& c, std::ostream& os);
void write_rate(const ExperimentConfig& c, std::ostream& os);
// Summary row of the argmax plus one rate row per candidate delta.
void write_optimize_delta(const ExperimentConfig& c, std::ostream& summary, std::ostream& sweep);

struct GapSummary {
    std::string key;
    double max_gap = 0.0;  // over tau in [-10, 30] dB
    std::size_t samples = 0;
};

// Paired analytical/empirical curves for every probe the simulator filled.
std::vector<GapSummary> write_mc_validate(const ExperimentConfig& c, std::ostream& curves, std::ostream& rates);

// Cartesian product of the axes, first axis outermost.
std::vector<std::map<std::string, json>> sweep_points(const ExperimentConfig& c);
inline constexpr std::size_t kSweepGuard = 10000;

// Runs the sweep into `dir`, resuming from dir/sweep.manifest when it was
// written for the same configuration. Returns the number of points computed.
std::size_t run_sweep(const ExperimentConfig& c, const std::string& dir);

// Dispatches on c.kind and writes into c.output_dir.
void run(const ExperimentConfig& c);

}  // namespace mmtdd::cli
