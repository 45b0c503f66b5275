#include "contres/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>

namespace contres {

bool TrialResult::all_delivered() const {
    return std::all_of(stations.begin(), stations.end(),
                       [](const StationStats& s) { return s.first_success.has_value(); });
}

std::optional<std::int64_t> TrialResult::max_latency() const {
    std::int64_t worst = 0;
    for (const auto& s : stations) {
        if (!s.first_success) return std::nullopt;
        worst = std::max(worst, *s.first_success - s.activation);
    }
    return worst;
}

std::int64_t TrialResult::total_transmissions() const {
    std::int64_t total = 0;
    for (const auto& s : stations) total += s.transmissions;
    return total;
}

std::int64_t default_max_rounds(std::int64_t k) {
    std::int64_t log2_ceil = 0;
    while ((static_cast<std::int64_t>(1) << log2_ceil) < k) ++log2_ceil;
    return 64 * k * (1 + log2_ceil * log2_ceil);
}

namespace {

struct StationRuntime {
    std::int64_t id;
    std::int64_t activation;
    std::unique_ptr<StationBehavior> behavior;
    RngStream rng;
    std::optional<Feedback> prev_feedback;
    bool alive = true;
    StationStats stats;
};

ChannelObservation redact(const RoundOutcome& outcome) {
    ChannelObservation obs;
    obs.kind = outcome.kind;
    obs.transmitter_count = outcome.transmitter_count;
    if (outcome.kind == OutcomeKind::Success) {
        obs.message_kind = outcome.message.kind;
        obs.bit = outcome.message.bit;
    }
    return obs;
}

} // namespace

TrialResult run_simulation(const ProtocolFactory& factory, WakeupSource& source,
                           const SimulationConfig& config, std::uint64_t trial_seed) {
    if (config.k < 1) throw ContractViolation("run_simulation: k must be >= 1");
    const std::int64_t max_rounds =
        config.max_rounds > 0 ? config.max_rounds : default_max_rounds(config.k);
    if (source.is_oblivious() && source.total() != config.k) {
        throw ContractViolation("run_simulation: oblivious schedule total differs from k");
    }

    TrialResult result;
    if (config.record_trace) result.trace.emplace();

    std::vector<StationRuntime> stations;
    stations.reserve(static_cast<std::size_t>(config.k));
    PublicHistory history;
    std::int64_t woken_total = 0;
    std::int64_t alive_count = 0;
    std::int64_t delivered_count = 0;
    bool any_success = false;

    std::vector<std::pair<std::int64_t, Action>> actions;
    for (std::int64_t t = 1; t <= max_rounds; ++t) {
        std::int64_t woken = source.wake_at_boundary(t, history);
        if (woken < 0) throw ContractViolation("wakeup source returned a negative count");
        if (woken_total + woken > config.k) {
            if (source.is_oblivious()) {
                throw ContractViolation("oblivious schedule exceeds station budget");
            }
            woken = config.k - woken_total;
            result.budget_clamped = true;
        }
        for (std::int64_t n = 0; n < woken; ++n) {
            StationRuntime st;
            st.id = woken_total + n;
            st.activation = t - 1;
            st.behavior = factory();
            st.rng = station_stream(trial_seed, st.id);
            st.stats.id = st.id;
            st.stats.activation = st.activation;
            stations.push_back(std::move(st));
        }
        woken_total += woken;
        alive_count += woken;

        actions.clear();
        std::vector<std::int64_t> deactivated;
        for (auto& st : stations) {
            if (!st.alive) continue;
            const std::int64_t local_round = t - st.activation;
            const StepResult r = st.behavior->step(st.prev_feedback, local_round, st.rng);
            switch (r.kind) {
                case StepResult::Kind::SwitchOff:
                    st.alive = false;
                    --alive_count;
                    st.prev_feedback.reset();
                    deactivated.push_back(st.id);
                    break;
                case StepResult::Kind::TransmitData:
                    actions.emplace_back(st.id, Action::transmit(Message::data(st.id)));
                    break;
                case StepResult::Kind::TransmitControl:
                    actions.emplace_back(st.id, Action::transmit(Message::control(r.bit)));
                    break;
                case StepResult::Kind::Listen:
                    actions.emplace_back(st.id, Action::listen());
                    break;
            }
        }

        const RoundOutcome outcome = arbitrate(actions);
        if (outcome.kind == OutcomeKind::Success) any_success = true;
        for (const auto& [id, action] : actions) {
            auto& st = stations[static_cast<std::size_t>(id)];
            const bool am_sender =
                outcome.kind == OutcomeKind::Success && outcome.sender == id;
            st.prev_feedback = feedback_for(outcome, action, am_sender);
            if (action.kind == ActionKind::Transmit) ++st.stats.transmissions;
            if (am_sender && !st.stats.first_success) {
                st.stats.first_success = t;
                ++delivered_count;
            }
        }

        history.outcomes.push_back(redact(outcome));
        history.wake_counts.push_back(woken);

        if (result.trace) {
            TraceRound rec;
            rec.round = t;
            rec.woken = woken;
            rec.alive = static_cast<std::int64_t>(actions.size());
            for (const auto& [id, action] : actions) {
                if (action.kind == ActionKind::Transmit) {
                    rec.transmitters.emplace_back(id, action.message);
                }
            }
            rec.outcome = outcome;
            rec.deactivated = std::move(deactivated);
            result.trace->rounds.push_back(std::move(rec));
        }

        result.rounds_used = t;
        if (config.stop_after_first_success && any_success) {
            result.completed = true;
            break;
        }
        if (woken_total == config.k) {
            if (alive_count == 0 ||
                (config.stop_when_all_delivered && delivered_count == woken_total)) {
                result.completed = true;
                break;
            }
        }
    }

    result.stations.reserve(stations.size());
    for (auto& st : stations) {
        st.stats.alive_at_end = st.alive;
        result.stations.push_back(st.stats);
    }
    return result;
}

double sigma_hat_at(std::span<const std::int64_t> activations, const ProbSequence& p,
                    std::int64_t t) {
    double sum = 0.0;
    for (const std::int64_t tv : activations) {
        if (tv < t) sum += p(t - tv);
    }
    return sum;
}

std::vector<double> sigma_hat_series(std::span<const std::int64_t> activations,
                                     const ProbSequence& p, std::int64_t t_max) {
    std::vector<double> series(static_cast<std::size_t>(t_max) + 1, 0.0);
    for (const std::int64_t tv : activations) {
        for (std::int64_t t = tv + 1; t <= t_max; ++t) {
            series[static_cast<std::size_t>(t)] += p(t - tv);
        }
    }
    return series;
}

std::vector<double> sigma_series(const TrialResult& trial, const ProbSequence& p) {
    if (!trial.trace) throw ContractViolation("sigma_series requires a recorded trace");
    // Death round = round at which the station produced no action anymore.
    std::unordered_map<std::int64_t, std::int64_t> death;
    for (const auto& rec : trial.trace->rounds) {
        for (const std::int64_t id : rec.deactivated) death[id] = rec.round;
    }
    std::vector<double> series(static_cast<std::size_t>(trial.rounds_used) + 1, 0.0);
    for (const auto& st : trial.stations) {
        const auto it = death.find(st.id);
        const std::int64_t last_active =
            it == death.end() ? trial.rounds_used : it->second - 1;
        for (std::int64_t t = st.activation + 1; t <= last_active; ++t) {
            series[static_cast<std::size_t>(t)] += p(t - st.activation);
        }
    }
    return series;
}

void write_trace(std::ostream& out, const TrialResult& trial) {
    if (!trial.trace) throw ContractViolation("write_trace requires a recorded trace");
    for (const auto& rec : trial.trace->rounds) {
        out << "{\"type\":\"round\",\"t\":" << rec.round << ",\"woken\":" << rec.woken
            << ",\"tx\":" << rec.outcome.transmitter_count << ",\"outcome\":\""
            << to_string(rec.outcome.kind) << "\",\"sender\":"
            << (rec.outcome.kind == OutcomeKind::Success ? rec.outcome.sender : -1)
            << ",\"msg\":\"";
        if (rec.outcome.kind == OutcomeKind::Success) {
            out << to_string(rec.outcome.message.kind);
            if (rec.outcome.message.kind == MessageKind::ControlBit) {
                out << "\",\"bit\":" << rec.outcome.message.bit;
            } else {
                out << "\"";
            }
        } else {
            out << "-\"";
        }
        out << "}\n";
    }
    for (const auto& s : trial.stations) {
        out << "{\"type\":\"station\",\"id\":" << s.id << ",\"activation\":" << s.activation
            << ",\"first_success\":" << (s.first_success ? *s.first_success : -1)
            << ",\"transmissions\":" << s.transmissions << "}\n";
    }
}

} // namespace contres
