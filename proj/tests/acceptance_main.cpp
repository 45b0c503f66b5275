// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. Every tolerance is pinned here; seeds are fixed so the
// whole suite is reproducible.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "contres/adaptive.hpp"
#include "contres/adversary.hpp"
#include "contres/experiments.hpp"
#include "contres/oracle.hpp"
#include "contres/scripted.hpp"
#include "contres/stats.hpp"

using namespace contres;

namespace {

constexpr std::uint64_t kSeed = 20240801;

struct Outcome {
    bool passed = false;
    std::string detail;
};

ExperimentConfig make_config(const std::string& protocol, const std::string& adversary,
                             std::int64_t k, int trials, std::uint64_t seed) {
    ExperimentConfig config;
    config.protocol = ProtocolSpec::parse(protocol);
    config.adversary = AdversarySpec::parse(adversary);
    config.k = k;
    config.trials = trials;
    config.master_seed = seed;
    return config;
}

std::uint64_t cell_seed(const std::string& tag, std::int64_t k) {
    std::uint64_t h = kSeed;
    for (const char c : tag) h = RngStream::mix(h ^ static_cast<std::uint64_t>(c));
    return RngStream::mix(h ^ static_cast<std::uint64_t>(k));
}

// ---- 1. channel semantics --------------------------------------------------

Outcome channel_semantics() {
    for (const int m : {0, 1, 2, 5}) {
        std::vector<std::pair<std::int64_t, Action>> actions;
        for (int i = 0; i < m; ++i) actions.emplace_back(i, Action::transmit(Message::data(i)));
        actions.emplace_back(m, Action::listen());
        const auto outcome = arbitrate(actions);
        if (m == 0 && outcome.kind != OutcomeKind::Silence) return {false, "m=0"};
        if (m == 1 && (outcome.kind != OutcomeKind::Success || outcome.sender != 0)) {
            return {false, "m=1"};
        }
        if (m >= 2 && (outcome.kind != OutcomeKind::Collision ||
                       outcome.transmitter_count != m)) {
            return {false, "m=" + std::to_string(m)};
        }
        // listener view: collision indistinguishable from silence
        const auto fb = feedback_for(outcome, Action::listen(), false);
        if (m == 1) {
            if (fb.kind != FeedbackKind::Heard) return {false, "listener misses success"};
        } else if (fb.kind != FeedbackKind::NothingHeard) {
            return {false, "listener distinguishes m=" + std::to_string(m)};
        }
        if (m == 1) {
            if (feedback_for(outcome, actions[0].second, true).kind != FeedbackKind::Acked) {
                return {false, "sender not acked"};
            }
        }
        for (int i = 0; i < m && m >= 2; ++i) {
            if (feedback_for(outcome, actions[static_cast<std::size_t>(i)].second, false)
                    .kind != FeedbackKind::TransmittedNoAck) {
                return {false, "collider feedback"};
            }
        }
    }
    return {true, "m in {0,1,2,5} matches the model"};
}

// ---- 2. fact 3.1 -----------------------------------------------------------

Outcome fact31() {
    for (std::int64_t k = 4; k <= (1 << 20); k *= 2) {
        for (int c = 1; c <= 16; ++c) {
            if (nak_total_rounds(k, c) >= 3 * c * k) {
                return {false, "k=" + std::to_string(k) + " c=" + std::to_string(c)};
            }
        }
    }
    return {true, "schedule < 3ck on the whole grid"};
}

// ---- 3 & 4. NonAdaptiveWithK latency and energy ----------------------------

struct NakCell {
    std::int64_t k;
    std::string adversary;
    double fraction_in_schedule = 0.0;
    double median_energy = 0.0;
};

std::vector<NakCell> run_nak_cells() {
    std::vector<NakCell> cells;
    for (const std::string adversary : {"batch", "trickle:1", "wake-on-success:4"}) {
        for (const std::int64_t k : {16, 64, 256}) {
            auto config = make_config("nak", adversary, k, 200, cell_seed("nak" + adversary, k));
            config.protocol.c = 8;
            const auto trials = run_trials(config);
            NakCell cell;
            cell.k = k;
            cell.adversary = adversary;
            const std::int64_t schedule = nak_total_rounds(k, 8);
            cell.fraction_in_schedule = whp_fraction(trials, [&](const TrialResult& t) {
                if (!t.completed) return false;
                for (const auto& s : t.stations) {
                    if (!s.first_success || *s.first_success - s.activation > schedule) {
                        return false;
                    }
                }
                return true;
            });
            std::vector<double> energy;
            for (const auto& t : trials) energy.push_back(static_cast<double>(energy_of(t)));
            cell.median_energy = median(std::move(energy));
            cells.push_back(cell);
        }
    }
    return cells;
}

Outcome theorem31(const std::vector<NakCell>& cells) {
    std::ostringstream detail;
    bool ok = true;
    double worst = 1.0;
    for (const auto& cell : cells) {
        worst = std::min(worst, cell.fraction_in_schedule);
        if (cell.fraction_in_schedule < 0.99) {
            ok = false;
            detail << cell.adversary << " k=" << cell.k << " fraction="
                   << cell.fraction_in_schedule << "; ";
        }
    }
    if (ok) detail << "all 9 cells >= 0.99 (worst " << worst << ")";
    return {ok, detail.str()};
}

Outcome theorem32(const std::vector<NakCell>& cells) {
    std::ostringstream detail;
    bool ok = true;
    for (const std::string adversary : {"batch", "trickle:1", "wake-on-success:4"}) {
        double c16 = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& cell : cells) {
            if (cell.adversary != adversary) continue;
            const double bound =
                static_cast<double>(cell.k) * std::log2(static_cast<double>(cell.k));
            const double ratio = cell.median_energy / bound;
            if (cell.k == 16) c16 = ratio;
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        const double spread = hi / lo;
        detail << adversary << ": C=" << c16 << " spread=" << spread << "; ";
        if (spread > 2.0 || hi > c16 + 1e-9) ok = false;
    }
    return {ok, detail.str()};
}

// ---- 5. DecreaseSlowly wake-up ---------------------------------------------

Outcome theorem61() {
    std::ostringstream detail;
    double fitted_c = 0.0;
    bool ok = true;
    std::vector<std::pair<std::int64_t, std::vector<double>>> rounds_by_k;
    for (const std::int64_t k : {64, 256}) {
        auto config = make_config("ds", "batch", k, 500, cell_seed("ds", k));
        config.protocol.q = 2.0;
        const auto trials = run_trials(config);
        std::vector<double> rounds;
        for (const auto& t : trials) {
            rounds.push_back(t.completed ? static_cast<double>(t.rounds_used)
                                         : std::numeric_limits<double>::infinity());
        }
        rounds_by_k.emplace_back(k, std::move(rounds));
    }
    fitted_c = quantile(rounds_by_k.front().second, 0.99) /
               static_cast<double>(rounds_by_k.front().first);
    for (const auto& [k, rounds] : rounds_by_k) {
        const double bound = fitted_c * static_cast<double>(k);
        std::int64_t within = 0;
        for (const double r : rounds) {
            if (r <= bound) ++within;
        }
        const double fraction = static_cast<double>(within) / static_cast<double>(rounds.size());
        detail << "k=" << k << " fraction=" << fraction << "; ";
        if (fraction < 0.99) ok = false;
    }
    detail << "fitted C=" << fitted_c;
    return {ok, detail.str()};
}

// ---- 6. sawtooth -----------------------------------------------------------

Outcome theorem62() {
    std::ostringstream detail;
    bool ok = true;
    double fitted_c = 0.0;
    double fitted_tx = 0.0;
    for (const std::int64_t k : {16, 64, 256}) {
        auto config = make_config("sawtooth", "batch", k, 200, cell_seed("sawtooth", k));
        const auto trials = run_trials(config);
        std::vector<double> spans;
        double tx_ratio_max = 0.0;
        for (const auto& t : trials) {
            const auto span = makespan_of(t);
            spans.push_back(span ? static_cast<double>(*span)
                                 : std::numeric_limits<double>::infinity());
            const double log2t = std::log2(static_cast<double>(t.rounds_used));
            for (const auto& s : t.stations) {
                tx_ratio_max = std::max(
                    tx_ratio_max, static_cast<double>(s.transmissions) / (log2t * log2t));
            }
        }
        if (k == 16) {
            fitted_c = quantile(spans, 0.99) / static_cast<double>(k);
            fitted_tx = tx_ratio_max;
        }
        std::int64_t within = 0;
        for (const double s : spans) {
            if (s <= fitted_c * static_cast<double>(k)) ++within;
        }
        const double fraction = static_cast<double>(within) / static_cast<double>(spans.size());
        detail << "k=" << k << " fraction=" << fraction << " txC=" << tx_ratio_max << "; ";
        if (fraction < 0.99) ok = false;
        if (tx_ratio_max > fitted_tx + 1e-9) ok = false;
    }
    detail << "C=" << fitted_c << " C'=" << fitted_tx;
    return {ok, detail.str()};
}

// ---- 7. AdaptiveNoK --------------------------------------------------------

Outcome theorem63() {
    std::ostringstream detail;
    bool ok = true;
    for (const std::string adversary : {"batch", "trickle:2", "wake-on-success:4"}) {
        std::vector<double> medians;
        for (const std::int64_t k : {16, 64, 256}) {
            auto config =
                make_config("adaptive", adversary, k, 200, cell_seed("ad" + adversary, k));
            config.record_traces = true;
            const auto trials = run_trials(config);
            const double delivered = whp_fraction(trials, [](const TrialResult& t) {
                return t.completed && t.all_delivered();
            });
            std::int64_t epoch_violations = 0;
            std::vector<double> latencies;
            for (const auto& t : trials) {
                if (!t.completed) continue;
                const auto report = extract_epochs(*t.trace);
                if (!report.violations.empty()) ++epoch_violations;
                if (const auto lat = latency_of(t).max) {
                    latencies.push_back(static_cast<double>(*lat));
                }
            }
            medians.push_back(median(latencies));
            if (delivered < 0.99) {
                ok = false;
                detail << adversary << " k=" << k << " delivered=" << delivered << "; ";
            }
            if (epoch_violations > 0) {
                ok = false;
                detail << adversary << " k=" << k << " epoch-violations in "
                       << epoch_violations << " trials; ";
            }
        }
        for (std::size_t i = 1; i < medians.size(); ++i) {
            const double ratio = medians[i] / medians[i - 1];
            if (ratio > 6.0) {
                ok = false;
                detail << adversary << " median latency ratio " << ratio << " > 6; ";
            }
        }
        detail << adversary << " medians " << medians[0] << '/' << medians[1] << '/'
               << medians[2] << "; ";
    }
    return {ok, detail.str()};
}

// ---- 8 & 9. SublinearDecrease latency and energy ---------------------------

struct SublinearMode {
    std::string label;
    std::string ack;
    std::function<double(double)> bound; // of k
};

Outcome sublinear_latency_energy(bool energy_criterion) {
    std::ostringstream detail;
    bool ok = true;
    const std::vector<std::int64_t> grid{16, 64, 256};
    for (const bool with_ack : {true, false}) {
        auto latency_bound = [with_ack](std::int64_t k) {
            const double kd = static_cast<double>(k);
            const double ln = std::log(kd);
            return with_ack ? kd * ln * ln / std::log(ln) : kd * ln * ln;
        };
        auto energy_bound = [](std::int64_t k) {
            const double kd = static_cast<double>(k);
            const double lg = std::log2(kd);
            return kd * lg * lg;
        };
        std::vector<double> latency_ratios;
        std::vector<double> energy_ratios;
        std::vector<std::vector<double>> latencies_by_k;
        for (const std::int64_t k : grid) {
            auto config = make_config("sublinear", "batch", k, 200,
                                      cell_seed(with_ack ? "sd-ack" : "sd-noack", k));
            config.protocol.b = 8;
            config.protocol.ack_mode = with_ack ? AckMode::SwitchOffOnAck : AckMode::IgnoreAcks;
            const auto trials = run_trials(config);
            std::vector<double> lat;
            std::vector<double> en;
            for (const auto& t : trials) {
                const auto m = latency_of(t).max;
                lat.push_back(m ? static_cast<double>(*m)
                                : std::numeric_limits<double>::infinity());
                en.push_back(static_cast<double>(energy_of(t)));
            }
            latency_ratios.push_back(quantile(lat, 0.99) / latency_bound(k));
            energy_ratios.push_back(median(en) / energy_bound(k));
            latencies_by_k.push_back(std::move(lat));
        }
        const auto spread = [](const std::vector<double>& r) {
            double lo = r[0], hi = r[0];
            for (const double v : r) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            return hi / lo;
        };
        if (!energy_criterion) {
            const double fitted = *std::max_element(latency_ratios.begin(), latency_ratios.end());
            const double s = spread(latency_ratios);
            detail << (with_ack ? "ack" : "no-ack") << ": B=" << fitted << " spread=" << s;
            if (s > 2.0) ok = false;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                std::int64_t within = 0;
                for (const double v : latencies_by_k[i]) {
                    if (v <= fitted * latency_bound(grid[i])) ++within;
                }
                const double fraction =
                    static_cast<double>(within) / static_cast<double>(latencies_by_k[i].size());
                if (fraction < 0.99) {
                    ok = false;
                    detail << " k=" << grid[i] << " fraction=" << fraction;
                }
            }
            detail << "; ";
        } else {
            const double fitted = *std::max_element(energy_ratios.begin(), energy_ratios.end());
            const double s = spread(energy_ratios);
            detail << (with_ack ? "ack" : "no-ack") << ": C=" << fitted << " spread=" << s << "; ";
            if (s > 2.0) ok = false;
        }
    }
    if (!energy_criterion) {
        // Fact 5.1 deterministic grid rides along with the latency criterion.
        for (const int b : {1, 2, 4}) {
            const SublinearSchedule schedule(b);
            for (const std::int64_t i : {100, 1000, 10000}) {
                const double bound =
                    b * std::pow(std::log(static_cast<double>(i) / b), 2.0);
                if (!(cumulative_sum(schedule.prob_sequence(), i) < bound)) {
                    ok = false;
                    detail << "fact 5.1 fails at b=" << b << " i=" << i << "; ";
                }
            }
        }
    }
    return {ok, detail.str()};
}

// ---- 10. blocking demo -----------------------------------------------------

Outcome lemma41() {
    const auto report = blocking_experiment(8192, 3.0, 1, 100, cell_seed("blocking", 8192));
    std::ostringstream detail;
    detail << "sigma_hat min " << report.verify.min_value << " over [1," << report.window_end
           << "], zero-success fraction " << report.zero_success_fraction;
    const bool ok = report.verify.ok && report.verify.min_value >= 39.0 &&
                    report.window_end == 76 && report.zero_success_fraction >= 0.90;
    return {ok, detail.str()};
}

// ---- 11. oracle equivalence ------------------------------------------------

Outcome oracle_equivalence() {
    const std::vector<double> script{0.5, 0.5};
    const double exact_any_by_2 = enumerate_success_probability(script, true, 2, 2, 1);
    const double exact_both_by_3 = enumerate_success_probability(script, true, 2, 3, 2);

    auto config = make_config("scripted:0.5,0.5", "batch", 2, 100000, cell_seed("oracle", 2));
    config.protocol.script_hold_last = true;
    config.max_rounds = 8;
    const auto trials = run_trials(config);
    const double any_by_2 = whp_fraction(trials, [](const TrialResult& t) {
        for (const auto& s : t.stations) {
            if (s.first_success && *s.first_success <= 2) return true;
        }
        return false;
    });
    const double both_by_3 = whp_fraction(trials, [](const TrialResult& t) {
        for (const auto& s : t.stations) {
            if (!s.first_success || *s.first_success > 3) return false;
        }
        return true;
    });
    const double se1 = std::sqrt(exact_any_by_2 * (1 - exact_any_by_2) / config.trials);
    const double se2 = std::sqrt(exact_both_by_3 * (1 - exact_both_by_3) / config.trials);
    std::ostringstream detail;
    detail << "any-by-2: exact " << exact_any_by_2 << " vs " << any_by_2 << " (se " << se1
           << "); both-by-3: exact " << exact_both_by_3 << " vs " << both_by_3 << " (se "
           << se2 << ")";
    const bool ok = std::abs(any_by_2 - exact_any_by_2) <= 3 * se1 &&
                    std::abs(both_by_3 - exact_both_by_3) <= 3 * se2;
    return {ok, detail.str()};
}

// ---- 12. determinism -------------------------------------------------------

Outcome determinism() {
    auto render = []() {
        auto config = make_config("adaptive", "trickle:2", 24, 3, kSeed);
        config.record_traces = true;
        std::ostringstream out;
        write_config_banner(out, config);
        for (const auto& trial : run_trials(config)) write_trace(out, trial);
        return out.str();
    };
    const std::string first = render();
    const std::string second = render();
    return {first == second && !first.empty(),
            first == second ? "byte-identical traces" : "traces differ"};
}

} // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
    const auto nak_cells = std::make_shared<std::vector<NakCell>>();
    criteria.emplace_back("channel semantics", channel_semantics);
    criteria.emplace_back("fact 3.1 schedule length", fact31);
    criteria.emplace_back("theorem 3.1 latency within own schedule", [&]() {
        *nak_cells = run_nak_cells();
        return theorem31(*nak_cells);
    });
    criteria.emplace_back("theorem 3.2 energy O(k log k)",
                          [&]() { return theorem32(*nak_cells); });
    criteria.emplace_back("theorem 6.1 decrease-slowly wake-up O(k)", theorem61);
    criteria.emplace_back("theorem 6.2 sawtooth O(k) slots, O(log^2 T) tx", theorem62);
    criteria.emplace_back("theorem 6.3 adaptive delivery and epochs", theorem63);
    criteria.emplace_back("theorems 5.1/5.2 sublinear latency + fact 5.1",
                          []() { return sublinear_latency_energy(false); });
    criteria.emplace_back("theorem 5.4 sublinear energy O(k log^2 k)",
                          []() { return sublinear_latency_energy(true); });
    criteria.emplace_back("lemma 4.1 blocking demo", lemma41);
    criteria.emplace_back("oracle equivalence (exhaustive vs monte carlo)", oracle_equivalence);
    criteria.emplace_back("determinism / replay", determinism);

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%2zu] %s  %s", i + 1, outcome.passed ? "PASS" : "FAIL",
                    criteria[i].first.c_str());
        if (!outcome.detail.empty()) std::printf("  (%s)", outcome.detail.c_str());
        std::printf("\n");
        std::fflush(stdout);
        if (!outcome.passed) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
