#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "contres/adversary.hpp"
#include "contres/config.hpp"
#include "contres/engine.hpp"
#include "contres/stats.hpp"

namespace contres {

// Per-station latencies and their maximum; max is empty (infinity flag)
// when any station never transmitted successfully.
struct LatencyReport {
    std::vector<std::int64_t> per_station;
    std::optional<std::int64_t> max;
};

LatencyReport latency_of(const TrialResult& trial);
std::int64_t energy_of(const TrialResult& trial);
// Last success minus first activation; diagnostics only.
std::optional<std::int64_t> makespan_of(const TrialResult& trial);

// Runs config.trials independent simulations with per-trial seeds
// derived from the master seed; results are index-stable regardless of
// the number of worker threads.
std::vector<TrialResult> run_trials(const ExperimentConfig& config);

double whp_fraction(std::span<const TrialResult> trials,
                    const std::function<bool(const TrialResult&)>& predicate);

struct ScalingPoint {
    std::int64_t k = 0;
    double metric = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
};

struct ScalingReport {
    std::vector<ScalingPoint> points;
    double fitted_c = 0.0; // max ratio over the grid
    double spread = 0.0;   // max ratio / min ratio
    bool within_tolerance = false;
};

// Fits the constant hidden by an O(bound(k)) claim over a k grid
// (>= 3 points, each >= 2x the previous) and reports ratio stability.
ScalingReport scaling_check(std::span<const std::int64_t> k_grid,
                            const std::function<double(std::int64_t)>& metric,
                            const std::function<double(std::int64_t)>& bound,
                            double tolerance);

// Raised when an experiment's stated hypothesis fails its deterministic
// precondition check (distinct from a configuration error).
class HypothesisFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BlockingReport {
    SigmaHatCheck verify;             // worst verification across trials
    std::int64_t per_round = 0;       // stations woken per round (r)
    std::int64_t window_end = 0;      // blocked window [1, window_end]
    double threshold = 0.0;           // gamma * log2(k)
    double zero_success_fraction = 0.0;
    int trials = 0;
};

// Blocking demo: builds the lower-bound instance for
// SublinearDecrease(b), verifies sigma_hat >= gamma*log2(k) across the
// window deterministically for every generated instance, then measures
// the fraction of trials with zero successes inside the window. Throws
// HypothesisFailure when verification fails. FrontLoaded windows default
// to [1, floor(k/r)]; TwoPhaseJk requires explicit t1, t2 and uses
// [1, t2].
BlockingReport blocking_experiment(std::int64_t k, double gamma, int b, int trials,
                                   std::uint64_t master_seed,
                                   BlockingVariant variant = BlockingVariant::FrontLoaded,
                                   std::int64_t t1 = 0, std::int64_t t2 = 0);

struct MetricSummary {
    std::string metric;
    double p50 = 0.0;
    double p90 = 0.0;
    double p99 = 0.0;
    double max = 0.0;
};

struct ExperimentSummary {
    std::vector<MetricSummary> metrics;  // latency, energy, makespan
    double completed_fraction = 0.0;
    WilsonInterval completed_ci;
    double whp_target = 0.0;             // 1 - 1/k^eta
};

ExperimentSummary summarize(const ExperimentConfig& config,
                            std::span<const TrialResult> trials);

// NDJSON emission: one config banner line, one line per trial.
void write_config_banner(std::ostream& out, const ExperimentConfig& config);
void write_trial_ndjson(std::ostream& out, std::int64_t index, const TrialResult& trial);
void write_summary_csv(std::ostream& out, const ExperimentConfig& config,
                       const ExperimentSummary& summary, double fitted_c = 0.0);

} // namespace contres
