#include "contres/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

namespace contres {

LatencyReport latency_of(const TrialResult& trial) {
    LatencyReport report;
    report.per_station.reserve(trial.stations.size());
    bool complete = true;
    std::int64_t worst = 0;
    for (const auto& s : trial.stations) {
        if (!s.first_success) {
            complete = false;
            continue;
        }
        const std::int64_t latency = *s.first_success - s.activation;
        report.per_station.push_back(latency);
        worst = std::max(worst, latency);
    }
    if (complete && !trial.stations.empty()) report.max = worst;
    return report;
}

std::int64_t energy_of(const TrialResult& trial) { return trial.total_transmissions(); }

std::optional<std::int64_t> makespan_of(const TrialResult& trial) {
    if (trial.stations.empty()) return std::nullopt;
    std::int64_t first_activation = trial.stations.front().activation;
    std::int64_t last_success = -1;
    for (const auto& s : trial.stations) {
        first_activation = std::min(first_activation, s.activation);
        if (!s.first_success) return std::nullopt;
        last_success = std::max(last_success, *s.first_success);
    }
    return last_success - first_activation;
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config) {
    config.validate();
    const int want = config.threads > 0
                         ? config.threads
                         : static_cast<int>(std::thread::hardware_concurrency());
    const int workers = std::max(1, std::min<int>(want, config.trials));

    std::vector<TrialResult> results(static_cast<std::size_t>(config.trials));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const int index = next.fetch_add(1);
            if (index >= config.trials || failed.load()) break;
            try {
                const std::uint64_t trial_seed =
                    derive_trial_seed(config.master_seed, static_cast<std::uint64_t>(index));
                RngStream adv_rng = adversary_stream(trial_seed);
                double p1 = 0.0;
                if (config.adversary.kind == AdversaryKind::Blocking) {
                    p1 = config.protocol.prob_sequence(config.k)(1);
                }
                auto source = config.adversary.make_source(config.k, p1, adv_rng);
                SimulationConfig sim;
                sim.k = config.k;
                sim.max_rounds = config.max_rounds;
                sim.record_trace = config.record_traces;
                sim.stop_when_all_delivered = config.protocol.stop_when_all_delivered();
                sim.stop_after_first_success = config.protocol.stop_after_first_success();
                results[static_cast<std::size_t>(index)] = run_simulation(
                    config.protocol.make_factory(config.k), *source, sim, trial_seed);
            } catch (const std::exception& e) {
                const std::scoped_lock lock(error_mutex);
                error = e.what();
                failed.store(true);
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw ContractViolation("trial failed: " + error);
    return results;
}

double whp_fraction(std::span<const TrialResult> trials,
                    const std::function<bool(const TrialResult&)>& predicate) {
    if (trials.empty()) throw ContractViolation("whp_fraction needs at least one trial");
    std::int64_t pass = 0;
    for (const auto& t : trials) {
        if (predicate(t)) ++pass;
    }
    return static_cast<double>(pass) / static_cast<double>(trials.size());
}

ScalingReport scaling_check(std::span<const std::int64_t> k_grid,
                            const std::function<double(std::int64_t)>& metric,
                            const std::function<double(std::int64_t)>& bound,
                            double tolerance) {
    if (k_grid.size() < 3) throw ContractViolation("scaling_check needs >= 3 grid points");
    for (std::size_t i = 1; i < k_grid.size(); ++i) {
        if (k_grid[i] < 2 * k_grid[i - 1]) {
            throw ContractViolation("scaling_check grid points must double at least");
        }
    }
    ScalingReport report;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const std::int64_t k : k_grid) {
        ScalingPoint point;
        point.k = k;
        point.metric = metric(k);
        point.bound = bound(k);
        if (point.bound <= 0.0) throw ContractViolation("scaling_check bound must be positive");
        point.ratio = point.metric / point.bound;
        lo = std::min(lo, point.ratio);
        hi = std::max(hi, point.ratio);
        report.points.push_back(point);
    }
    report.fitted_c = hi;
    report.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    report.within_tolerance = report.spread <= tolerance;
    return report;
}

BlockingReport blocking_experiment(std::int64_t k, double gamma, int b, int trials,
                                   std::uint64_t master_seed, BlockingVariant variant,
                                   std::int64_t t1, std::int64_t t2) {
    if (trials < 1) throw ContractViolation("blocking_experiment: trials must be >= 1");
    if (gamma <= 0.0) {
        throw HypothesisFailure(
            "blocking_experiment: gamma must be positive for a meaningful sigma_hat floor");
    }
    BlockingReport report;
    report.trials = trials;
    const SublinearSchedule schedule(b);
    const ProbSequence p = schedule.prob_sequence();

    BlockingInstanceConfig instance;
    instance.k = k;
    instance.gamma = gamma;
    instance.p1 = p(1);
    instance.t1 = t1;
    instance.t2 = t2;
    instance.variant = variant;
    report.per_round = instance.per_round();
    report.window_end = variant == BlockingVariant::FrontLoaded
                            ? (t1 > 0 ? t1 : k / report.per_round)
                            : t2;
    report.threshold = gamma * std::log2(static_cast<double>(k));
    if (report.window_end < 1) {
        throw HypothesisFailure("blocking_experiment: empty window (k too small for r)");
    }

    // Every generated instance must satisfy the sigma_hat floor; the
    // TwoPhaseJk spray is random, so each trial's instance is checked.
    report.verify.ok = true;
    report.verify.min_value = std::numeric_limits<double>::infinity();
    std::int64_t blocked = 0;
    const ProtocolFactory factory = make_sublinear_factory(b, AckMode::SwitchOffOnAck);
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed =
            derive_trial_seed(master_seed, static_cast<std::uint64_t>(trial));
        RngStream adv_rng = adversary_stream(trial_seed);
        const ObliviousSchedule wakeups = blocking_instance(instance, adv_rng);
        const auto check =
            verify_sigma_hat(wakeups, p, report.threshold, 1, report.window_end, k);
        if (check.min_value < report.verify.min_value) {
            report.verify.min_value = check.min_value;
            report.verify.argmin_round = check.argmin_round;
        }
        if (!check.ok) {
            report.verify.ok = false;
            throw HypothesisFailure(
                "blocking_experiment: sigma_hat drops to " +
                std::to_string(check.min_value) + " at round " +
                std::to_string(check.argmin_round) + " (needs >= " +
                std::to_string(report.threshold) + ")");
        }
        ObliviousSource source(wakeups);
        SimulationConfig sim;
        sim.k = k;
        sim.max_rounds = report.window_end; // only the blocked window matters
        const TrialResult result = run_simulation(factory, source, sim, trial_seed);
        bool any_success = false;
        for (const auto& s : result.stations) {
            if (s.first_success && *s.first_success <= report.window_end) {
                any_success = true;
                break;
            }
        }
        if (!any_success) ++blocked;
    }
    report.zero_success_fraction =
        static_cast<double>(blocked) / static_cast<double>(trials);
    return report;
}

ExperimentSummary summarize(const ExperimentConfig& config,
                            std::span<const TrialResult> trials) {
    ExperimentSummary summary;
    std::vector<double> latency;
    std::vector<double> energy;
    std::vector<double> makespan;
    std::int64_t completed = 0;
    for (const auto& trial : trials) {
        if (trial.completed) ++completed;
        if (const auto lat = latency_of(trial).max) {
            latency.push_back(static_cast<double>(*lat));
        }
        energy.push_back(static_cast<double>(energy_of(trial)));
        if (const auto mk = makespan_of(trial)) {
            makespan.push_back(static_cast<double>(*mk));
        }
    }
    auto add = [&](const std::string& name, std::vector<double> values) {
        if (values.empty()) return;
        MetricSummary m;
        m.metric = name;
        m.p50 = quantile(values, 0.5);
        m.p90 = quantile(values, 0.9);
        m.p99 = quantile(values, 0.99);
        m.max = quantile(values, 1.0);
        summary.metrics.push_back(std::move(m));
    };
    add("latency", std::move(latency));
    add("energy", std::move(energy));
    add("makespan", std::move(makespan));
    summary.completed_fraction =
        trials.empty() ? 0.0
                       : static_cast<double>(completed) / static_cast<double>(trials.size());
    summary.completed_ci = wilson_interval(completed, static_cast<std::int64_t>(trials.size()));
    summary.whp_target = 1.0 - std::pow(static_cast<double>(config.k), -config.eta);
    return summary;
}

void write_config_banner(std::ostream& out, const ExperimentConfig& config) {
    out << "{\"type\":\"config\"";
    for (const auto& [key, value] : config.resolved()) {
        const bool numeric = !value.empty() &&
                             value.find_first_not_of("0123456789.-") == std::string::npos &&
                             value.find('-', 1) == std::string::npos;
        out << ",\"" << key << "\":";
        if (numeric) {
            out << value;
        } else {
            out << '"' << value << '"';
        }
    }
    out << "}\n";
}

void write_trial_ndjson(std::ostream& out, std::int64_t index, const TrialResult& trial) {
    const auto latency = latency_of(trial);
    const auto makespan = makespan_of(trial);
    out << "{\"type\":\"trial\",\"index\":" << index
        << ",\"completed\":" << (trial.completed ? "true" : "false")
        << ",\"rounds\":" << trial.rounds_used << ",\"energy\":" << energy_of(trial)
        << ",\"max_latency\":" << (latency.max ? std::to_string(*latency.max) : "null")
        << ",\"makespan\":" << (makespan ? std::to_string(*makespan) : "null")
        << ",\"stations\":[";
    for (std::size_t i = 0; i < trial.stations.size(); ++i) {
        const auto& s = trial.stations[i];
        if (i) out << ',';
        out << "{\"id\":" << s.id << ",\"activation\":" << s.activation
            << ",\"first_success\":" << (s.first_success ? std::to_string(*s.first_success) : "null")
            << ",\"tx\":" << s.transmissions << '}';
    }
    out << "]}\n";
}

void write_summary_csv(std::ostream& out, const ExperimentConfig& config,
                       const ExperimentSummary& summary, double fitted_c) {
    out << "k,protocol,adversary,metric,p50,p90,p99,max,fraction_pass,fitted_c\n";
    for (const auto& m : summary.metrics) {
        out << config.k << ',' << config.protocol.name() << ',' << config.adversary.name()
            << ',' << m.metric << ',' << m.p50 << ',' << m.p90 << ',' << m.p99 << ','
            << m.max << ',' << summary.completed_fraction << ',' << fitted_c << '\n';
    }
}

} // namespace contres
