#pragma once

#include "mmtdd/interference.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mmtdd {

// Thresholds in dB from lo to hi inclusive.
std::vector<double> db_grid(double lo, double hi, double step);

struct CoverageCurve {
    Link link = Link::ULAccess;
    AccessScheme scheme_a = AccessScheme::Static;
    BackhaulScheme scheme_b = BackhaulScheme::SAB;
    int slot = 1;
    std::optional<Tier> tier;  // empty: mixture over tiers
    std::vector<double> tau;   // linear
    std::vector<double> tau_db;
    std::vector<double> coverage;

    // Threshold (dB) where coverage crosses `level`, by linear interpolation
    // in dB. NaN if the curve never crosses it.
    double threshold_at(double level) const;
};

// Writes rows `link,scheme_a,scheme_b,slot,tier,tau_db,coverage`.
void write_csv_header(std::ostream& os);
void write_csv_rows(std::ostream& os, const CoverageCurve& c);

// Shot tables K_f[R][tau] keyed by everything that determines them. They
// depend on neither slot nor activity, so one table serves every slot,
// layout atom and traffic split of a deployment.
class KTableCache {
public:
    using Table = std::vector<double>;

    std::shared_ptr<const Table> find(const std::string& key) const;
    std::shared_ptr<const Table> insert(const std::string& key, Table t);
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const Table>> tables_;
};

class CoverageEngine {
public:
    // Thresholds default to -40..80 dB in 1 dB steps, wide enough that the
    // spectral-efficiency integral is truncated only where S is 1 or 0.
    CoverageEngine(const NetworkParams& p, const ModelOptions& o,
                   std::shared_ptr<KTableCache> cache = nullptr,
                   std::vector<double> tau_db = db_grid(-40.0, 80.0, 1.0));

    const InterferenceModel& model() const { return model_; }
    const NetworkParams& params() const { return model_.params(); }
    const std::vector<double>& tau_db() const { return tau_db_; }
    const std::vector<double>& tau() const { return tau_; }
    const std::shared_ptr<KTableCache>& cache() const { return cache_; }

    // Conditional coverage of a tier-t link in slot i of one layout atom, on
    // the engine grid. Backhaul links ignore t (the receiver side is fixed).
    std::vector<double> slot_coverage(Link l, int slot, const SubframeLayout& lay, Tier t) const;
    // Coverage without interference (every activity zero).
    std::vector<double> snr_coverage(Link l, Tier t) const;
    // Sum of the serving-distance weights; 1 up to quadrature error.
    double distance_mass(Link l, Tier t) const;

    // Coverage for slot i averaged over the layout atoms in which slot i
    // carries link l, on the engine grid; tier empty means the A-weighted
    // mixture (access links only). Throws ParamError if no atom carries it.
    CoverageCurve curve(Link l, int slot, std::optional<Tier> t) const;
    // Same, resampled onto thresholds in dB.
    CoverageCurve curve(Link l, int slot, std::optional<Tier> t, const std::vector<double>& tau_db) const;

private:
    struct RNodes {
        std::vector<double> R;
        std::vector<double> w;  // quadrature weight x density x exclusion / A
    };

    const RNodes& nodes(Link l, Tier t, LinkType m) const;
    double tx_scale(Link l, Tier t) const;  // C0 P G G of the serving link
    std::shared_ptr<const KTableCache::Table> table(const FactorSpec& f, Link l, Tier t, LinkType m) const;
    std::vector<double> evaluate(Link l, int slot, const SubframeLayout& lay, Tier t, bool interference) const;

    InterferenceModel model_;
    std::shared_ptr<KTableCache> cache_;
    std::vector<double> tau_db_;
    std::vector<double> tau_;
    std::string kbase_;
    RNodes nodes_[2][2][2];  // [access/backhaul][tier][link type]
};

}  // namespace mmtdd
