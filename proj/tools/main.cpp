#include "config.hpp"
#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

struct Overrides {
    std::string config;
    std::string output;
    std::optional<std::uint64_t> seed;
    std::optional<int> drops;
    std::optional<int> parallelism;
    bool reference_forms = false;
};

void add_common(CLI::App* sub, Overrides& o)
{
    sub->add_option("--config", o.config, "JSON experiment configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", o.output, "Output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "Monte Carlo master seed");
    sub->add_option("--drops", o.drops, "Monte Carlo drops")->check(CLI::PositiveNumber);
    sub->add_option("--parallelism", o.parallelism, "Worker threads, 0 = automatic")->check(CLI::NonNegativeNumber);
    sub->add_flag("--strict-paper", o.reference_forms,
                  "Use the uncorrected reference formulas where they differ from the derived ones");
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace mmtdd::cli;
    set_log_level(log_level_from_env());

    CLI::App app{"Coverage and rate analysis of self-backhauled mmWave TDD networks"};
    app.require_subcommand(1);
    Overrides o;
    const std::pair<const char*, RunKind> kinds[] = {
        {"coverage", RunKind::Coverage},
        {"rate", RunKind::Rate},
        {"optimize-delta", RunKind::OptimizeDelta},
        {"mc-validate", RunKind::McValidate},
        {"sweep", RunKind::Sweep},
    };
    const char* help[] = {
        "Analytical SINR coverage curves",
        "Mean UL, DL and overall rates",
        "Best access fraction delta over a candidate set",
        "Analytical curves and rates paired with Monte Carlo estimates",
        "Rates over the cartesian product of the configured axes",
    };
    std::optional<RunKind> chosen;
    for (std::size_t k = 0; k < std::size(kinds); ++k) {
        auto* sub = app.add_subcommand(kinds[k].first, help[k]);
        add_common(sub, o);
        const RunKind kind = kinds[k].second;
        sub->callback([&chosen, kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        ExperimentConfig c = load_config(o.config);
        c.kind = *chosen;
        if (!o.output.empty()) c.output_dir = o.output;
        if (o.seed) c.mc.seed = *o.seed;
        if (o.drops) c.mc.drops = *o.drops;
        if (o.parallelism) c.parallelism = *o.parallelism;
        if (o.reference_forms) c.model.reference_forms = true;
        log(LogLevel::Info, std::string(to_string(c.kind)) + " -> " + c.output_dir);
        run(c);
    } catch (const mmtdd::ParamError& e) {
        std::cerr << "mmtdd: " << e.what() << '\n';
        return kConfigError;
    } catch (const mmtdd::NumericError& e) {
        std::cerr << "mmtdd: numeric failure: " << e.what() << '\n';
        return kNumericError;
    }
    return 0;
}
