#include "runner.hpp"

#include "mmtdd/coverage.hpp"
#include "mmtdd/mcsim.hpp"
#include "mmtdd/rate.hpp"

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>

#ifndef MMTDD_VERSION
#define MMTDD_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace mmtdd::cli {

namespace {

std::atomic<int> g_level{static_cast<int>(LogLevel::Info)};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::unique_ptr<tbb::global_control> limit_threads(int n)
{
    if (n <= 0) return nullptr;
    return std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                 static_cast<std::size_t>(n));
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p);
    if (!os) throw ParamError("output: cannot write '" + p.string() + "'");
    return os;
}

std::vector<Link> links_of(const ExperimentConfig& c)
{
    if (!c.links.empty()) return c.links;
    return {Link::ULAccess, Link::DLAccess, Link::ULBackhaul, Link::DLBackhaul};
}

std::vector<int> slots_of(const ExperimentConfig& c, const NetworkParams& p)
{
    if (!c.slots.empty()) return c.slots;
    std::vector<int> s;
    for (int i = 1; i <= p.F; ++i) s.push_back(i);
    return s;
}

std::vector<std::optional<Tier>> tiers_for(Link l, const NetworkParams& p)
{
    if (is_backhaul(l)) return {std::nullopt};
    if (!(p.lambda_s > 0.0)) return {Tier::M};
    return {Tier::M, Tier::S, std::nullopt};
}

std::string value_text(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt("%.6g", v.get<double>());
    if (v.is_object()) {
        std::string s;
        for (const auto& [k, x] : v.items()) s += (s.empty() ? "" : ";") + k + "=" + value_text(x);
        return s;
    }
    return v.dump();
}

std::string axis_name(const SweepAxis& a, std::size_t k) { return a.param.empty() ? "axis" + std::to_string(k) : a.param; }

}  // namespace

LogLevel log_level_from_env()
{
    const char* e = std::getenv("MMTDD_LOG");
    if (!e) return LogLevel::Info;
    const std::string s = e;
    if (s == "quiet" || s == "0") return LogLevel::Quiet;
    if (s == "debug" || s == "2") return LogLevel::Debug;
    return LogLevel::Info;
}

void set_log_level(LogLevel l) { g_level = static_cast<int>(l); }

void log(LogLevel l, const std::string& msg)
{
    if (static_cast<int>(l) <= g_level.load()) std::cerr << "mmtdd: " << msg << '\n';
}

const char* tool_version() { return MMTDD_VERSION; }

void write_stamp(std::ostream& os, const ExperimentConfig& c)
{
    os << "# mmtdd " << tool_version() << " config=" << hex64(config_hash(c)) << '\n';
}

void write_coverage(const ExperimentConfig& c, std::ostream& os)
{
    const auto p = c.params();
    const CoverageEngine eng(p, c.options());
    const auto grid = db_grid(c.tau.lo_db, c.tau.hi_db, c.tau.step_db);
    write_stamp(os, c);
    write_csv_header(os);
    for (Link l : links_of(c))
        for (int i : slots_of(c, p))
            for (const auto& t : tiers_for(l, p)) {
                CoverageCurve cv;
                try {
                    cv = eng.curve(l, i, t, grid);
                } catch (const ParamError& e) {
                    // Slot i never carries link l in this configuration.
                    log(LogLevel::Debug, e.what());
                    continue;
                }
                write_csv_rows(os, cv);
            }
}

void write_rate(const ExperimentConfig& c, std::ostream& os)
{
    const auto r = mean_rate(c.params(), c.options());
    write_stamp(os, c);
    write_rate_csv_header(os);
    write_rate_csv_row(os, r);
}

void write_optimize_delta(const ExperimentConfig& c, std::ostream& summary, std::ostream& sweep)
{
    const auto d = optimize_delta(c.params(), c.options(), c.deltas, c.objective);
    write_stamp(summary, c);
    summary << "objective,delta_star,value,R_ul,R_dl,R_overall,R_two_hop\n";
    const double v = c.objective == DeltaObjective::Overall ? d.best.R_overall : d.best.two_hop();
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6e,%.6e,%.6e,%.6e,%.6e\n",
                  c.objective == DeltaObjective::Overall ? "overall" : "two-hop", d.delta_star, v, d.best.R_ul,
                  d.best.R_dl, d.best.R_overall, d.best.two_hop());
    summary << buf;
    write_stamp(sweep, c);
    write_rate_csv_header(sweep);
    for (const auto& r : d.sweep) write_rate_csv_row(sweep, r);
}

std::vector<GapSummary> write_mc_validate(const ExperimentConfig& c, std::ostream& curves, std::ostream& rates)
{
    const auto p = c.params();
    const auto o = c.options();
    McConfig mc = c.mc;
    mc.parallelism = c.parallelism;
    mc.noise_override = o.noise_override;
    log(LogLevel::Info, "mc-validate: " + std::to_string(mc.drops) + " drops, seed " + std::to_string(mc.seed));
    const auto res = run_mc(p, mc);
    const CoverageEngine eng(p, o);
    const auto grid = db_grid(c.tau.lo_db, c.tau.hi_db, c.tau.step_db);

    write_stamp(curves, c);
    curves << "link,scheme_a,scheme_b,slot,tier,tau_db,analytical,empirical,stderr\n";
    std::vector<GapSummary> gaps;
    const auto wanted = links_of(c);
    const auto slots = slots_of(c, p);
    for (Link l : wanted)
        for (int i : slots) {
            std::vector<std::pair<std::optional<Tier>, Probe>> probes;
            if (is_backhaul(l)) probes = {{std::nullopt, Probe::Typical}, {std::nullopt, Probe::Tagged}};
            else
                for (const auto& t : tiers_for(l, p)) probes.push_back({t, Probe::Typical});
            for (const auto& [t, pr] : probes) {
                const auto key = curve_key(l, i, t, pr);
                const auto it = res.curves.find(key);
                if (it == res.curves.end()) continue;
                CoverageCurve an;
                try {
                    an = eng.curve(l, i, t, grid);
                } catch (const ParamError&) {
                    continue;
                }
                const std::string tier = is_backhaul(l) ? (pr == Probe::Typical ? "typical" : "tagged")
                                                        : (t ? to_string(*t) : "all");
                GapSummary g{key, 0.0, it->second.n()};
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    const double e = it->second.at(grid[j]);
                    const double se = it->second.stderr_at(grid[j]);
                    char buf[256];
                    std::snprintf(buf, sizeof buf, "%s,%s,%s,%d,%s,%.6f,%.6f,%.6f,%.6f\n", to_string(l),
                                  to_string(p.access_scheme), to_string(p.backhaul_scheme), i, tier.c_str(), grid[j],
                                  an.coverage[j], e, se);
                    curves << buf;
                    if (grid[j] >= -10.0 && grid[j] <= 30.0) g.max_gap = std::max(g.max_gap, std::abs(an.coverage[j] - e));
                }
                gaps.push_back(g);
            }
        }

    const auto an = mean_rate(p, o);
    write_stamp(rates, c);
    rates << "quantity,analytical,empirical,stderr\n";
    auto row = [&](const char* q, double a, const McRate& m) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%.6e,%.6e,%.6e\n", q, a, m.mean, m.stderr_);
        rates << buf;
    };
    row("R_ul", an.R_ul, res.R_ul);
    row("R_dl", an.R_dl, res.R_dl);
    row("R_overall", an.R_overall, res.R_overall);
    row("R_ul_m", an.R_ul_m, res.R_ul_m);
    row("R_ul_s", an.R_ul_s, res.R_ul_s);
    row("R_dl_m", an.R_dl_m, res.R_dl_m);
    row("R_dl_s", an.R_dl_s, res.R_dl_s);
    return gaps;
}

std::vector<std::map<std::string, json>> sweep_points(const ExperimentConfig& c)
{
    std::size_t total = 1;
    for (const auto& a : c.axes) {
        if (a.values.empty()) throw ParamError("config: sweep axis '" + a.param + "' is empty");
        total *= a.values.size();
        if (total > kSweepGuard)
            throw ParamError("config: sweep exceeds the " + std::to_string(kSweepGuard) + "-point guard");
    }
    std::vector<std::map<std::string, json>> out;
    out.reserve(total);
    for (std::size_t n = 0; n < total; ++n) {
        auto net = c.network;
        std::size_t rest = n;
        // Last axis varies fastest.
        std::vector<std::size_t> pick(c.axes.size());
        for (std::size_t k = c.axes.size(); k-- > 0;) {
            pick[k] = rest % c.axes[k].values.size();
            rest /= c.axes[k].values.size();
        }
        for (std::size_t k = 0; k < c.axes.size(); ++k) {
            const auto& v = c.axes[k].values[pick[k]];
            if (!c.axes[k].param.empty()) set_network_field(net, c.axes[k].param, v);
            else
                for (const auto& [f, x] : v.items()) set_network_field(net, f, x);
        }
        out.push_back(std::move(net));
    }
    return out;
}

std::size_t run_sweep(const ExperimentConfig& c, const std::string& dir)
{
    const auto points = sweep_points(c);
    // Every point must be valid before any output is written.
    for (const auto& net : points) {
        try {
            network_params(net).validate();
        } catch (const ParamError& e) {
            throw ParamError(std::string("config: sweep point: ") + e.what());
        }
    }
    fs::create_directories(dir);
    const std::string stamp = "config=" + hex64(config_hash(c));
    const fs::path manifest = fs::path(dir) / "sweep.manifest";

    std::map<std::size_t, std::string> rows;
    {
        std::ifstream in(manifest);
        std::string line;
        if (in && std::getline(in, line) && line == stamp) {
            while (std::getline(in, line)) {
                const auto tab = line.find('\t');
                if (tab == std::string::npos) continue;
                const auto idx = static_cast<std::size_t>(std::stoull(line.substr(0, tab)));
                if (idx < points.size()) rows[idx] = line.substr(tab + 1);
            }
        }
    }
    const std::size_t resumed = rows.size();
    if (resumed > 0) log(LogLevel::Info, "sweep: resuming with " + std::to_string(resumed) + " completed points");
    {
        std::ofstream m(manifest, std::ios::trunc);
        m << stamp << '\n';
        for (const auto& [k, r] : rows) m << k << '\t' << r << '\n';
    }

    std::vector<std::size_t> todo;
    for (std::size_t n = 0; n < points.size(); ++n)
        if (!rows.count(n)) todo.push_back(n);

    auto cache = std::make_shared<KTableCache>();
    std::mutex mu;
    std::ofstream m(manifest, std::ios::app);
    const auto guard = limit_threads(c.parallelism);
    tbb::parallel_for(std::size_t{0}, todo.size(), [&](std::size_t j) {
        const std::size_t n = todo[j];
        const auto p = network_params(points[n]);
        std::ostringstream row;
        for (std::size_t k = 0; k < c.axes.size(); ++k) {
            const auto& ax = c.axes[k];
            if (!ax.param.empty()) row << value_text(points[n].at(ax.param)) << ',';
            else {
                // Report the override object that produced this point.
                std::size_t rest = n;
                for (std::size_t q = c.axes.size(); q-- > k + 1;) rest /= c.axes[q].values.size();
                row << value_text(ax.values[rest % ax.values.size()]) << ',';
            }
        }
        if (c.inner == RunKind::OptimizeDelta) {
            const auto d = optimize_delta(p, c.options(), c.deltas, c.objective, cache);
            row << fmt("%.6f", d.delta_star) << ',';
            std::ostringstream r;
            write_rate_csv_row(r, d.best);
            row << r.str();
        } else {
            std::ostringstream r;
            write_rate_csv_row(r, mean_rate(p, c.options(), cache));
            row << r.str();
        }
        std::string s = row.str();
        if (!s.empty() && s.back() == '\n') s.pop_back();
        std::lock_guard lock(mu);
        rows[n] = s;
        m << n << '\t' << s << '\n';
        m.flush();
        log(LogLevel::Debug, "sweep: point " + std::to_string(n) + " done");
    });
    m.close();

    auto os = open_out(fs::path(dir) / "sweep.csv");
    write_stamp(os, c);
    for (std::size_t k = 0; k < c.axes.size(); ++k) os << axis_name(c.axes[k], k) << ',';
    if (c.inner == RunKind::OptimizeDelta) os << "delta_star,";
    write_rate_csv_header(os);
    for (const auto& [k, r] : rows) os << r << '\n';
    return todo.size();
}

void run(const ExperimentConfig& c)
{
    const fs::path dir = c.output_dir;
    fs::create_directories(dir);
    const auto guard = limit_threads(c.parallelism);
    switch (c.kind) {
    case RunKind::Coverage: {
        auto os = open_out(dir / "coverage.csv");
        write_coverage(c, os);
        break;
    }
    case RunKind::Rate: {
        auto os = open_out(dir / "rate.csv");
        write_rate(c, os);
        break;
    }
    case RunKind::OptimizeDelta: {
        auto s = open_out(dir / "optimize_delta.csv");
        auto w = open_out(dir / "optimize_delta_sweep.csv");
        write_optimize_delta(c, s, w);
        break;
    }
    case RunKind::McValidate: {
        auto cv = open_out(dir / "mc_validate.csv");
        auto rt = open_out(dir / "mc_rate.csv");
        const auto gaps = write_mc_validate(c, cv, rt);
        auto sm = open_out(dir / "mc_summary.csv");
        write_stamp(sm, c);
        sm << "curve,samples,max_gap\n";
        double worst = 0.0;
        for (const auto& g : gaps) {
            sm << g.key << ',' << g.samples << ',' << fmt("%.6f", g.max_gap) << '\n';
            worst = std::max(worst, g.max_gap);
            std::cout << g.key << "  n=" << g.samples << "  max gap " << fmt("%.4f", g.max_gap) << '\n';
        }
        std::cout << "max gap over [-10, 30] dB: " << fmt("%.4f", worst) << '\n';
        break;
    }
    case RunKind::Sweep: run_sweep(c, dir.string()); break;
    }
}

}  // namespace mmtdd::cli
