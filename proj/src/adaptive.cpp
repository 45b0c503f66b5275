#include "contres/adaptive.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace contres {

double ds_probability(std::int64_t i, double q) {
    if (q <= 0.0) throw ContractViolation("ds_probability: q must be > 0");
    if (i < 0) throw ContractViolation("ds_probability: counter must be >= 0");
    return q / (2.0 * q + static_cast<double>(i));
}

DecreaseSlowlyStation::DecreaseSlowlyStation(double q) : q_(q) {
    if (q <= 0.0) throw ContractViolation("DecreaseSlowly: q must be > 0");
}

StepResult DecreaseSlowlyStation::step(const std::optional<Feedback>& prev_feedback,
                                       std::int64_t, RngStream& rng) {
    if (prev_feedback && prev_feedback->kind == FeedbackKind::Acked) {
        is_leader_ = true;
        return StepResult::switch_off();
    }
    const double p = ds_probability(i_, q_);
    ++i_;
    return rng.bernoulli(p) ? StepResult::transmit_data() : StepResult::listen();
}

bool SawtoothState::advance(RngStream& rng) {
    if (done) return false;
    if (subwindow == 0) {
        subwindow = static_cast<std::int64_t>(1) << phase;
        pos = 0;
        chosen_slot = 1 + static_cast<std::int64_t>(rng.next_below(
                              static_cast<std::uint64_t>(subwindow)));
    } else if (pos >= subwindow) {
        std::int64_t next = subwindow / 2;
        if (next == 0) {
            ++phase;
            next = static_cast<std::int64_t>(1) << phase;
        }
        subwindow = next;
        pos = 0;
        chosen_slot = 1 + static_cast<std::int64_t>(rng.next_below(
                              static_cast<std::uint64_t>(next)));
    }
    ++pos;
    return pos == chosen_slot;
}

SawtoothStation::SawtoothStation(int initial_phase) : state_(initial_phase) {
    if (initial_phase < 1) throw ContractViolation("sawtooth: initial phase must be >= 1");
}

StepResult SawtoothStation::step(const std::optional<Feedback>& prev_feedback,
                                 std::int64_t, RngStream& rng) {
    if (prev_feedback && prev_feedback->kind == FeedbackKind::Acked) {
        state_.done = true;
        return StepResult::switch_off();
    }
    return state_.advance(rng) ? StepResult::transmit_data() : StepResult::listen();
}

AdaptiveNokStation::AdaptiveNokStation(const AdaptiveNokConfig& config)
    : config_(config), sawtooth_(config.initial_phase) {
    if (config.q <= 0.0) throw ContractViolation("AdaptiveNoK: q must be > 0");
    if (config.initial_phase < 1) throw ContractViolation("AdaptiveNoK: initial phase must be >= 1");
    if (config.control_min_exp < 1) throw ContractViolation("AdaptiveNoK: control exponent must be >= 1");
}

bool AdaptiveNokStation::control_round(std::int64_t tc) const {
    if (tc < (static_cast<std::int64_t>(1) << config_.control_min_exp)) return false;
    return (tc & (tc - 1)) == 0;
}

StepResult AdaptiveNokStation::step(const std::optional<Feedback>& prev_feedback,
                                    std::int64_t, RngStream& rng) {
    // Absorb the previous round's feedback; this may change mode.
    switch (mode_) {
        case Mode::Waiting:
            if (prev_feedback) {
                ++listened_;
                if (prev_feedback->kind == FeedbackKind::Heard) {
                    heard_any_ = true;
                    if (prev_feedback->message.kind == MessageKind::ControlBit &&
                        prev_feedback->message.bit == 1) {
                        heard_probe_ = true;
                    }
                }
                if (listened_ == 4) {
                    // Silence means no dissemination is running; a heard
                    // "anybody out there?" means it just ended. Either way
                    // the station may join the next election.
                    if (!heard_any_ || heard_probe_) {
                        mode_ = Mode::L;
                        ds_i_ = 0;
                    } else {
                        listened_ = 0;
                        heard_any_ = false;
                        heard_probe_ = false;
                    }
                }
            }
            break;
        case Mode::L:
            if (prev_feedback) {
                if (prev_feedback->kind == FeedbackKind::Acked) {
                    // Own election success: this station leads the epoch.
                    is_leader_ = true;
                    delivered_ = true;
                    mode_ = Mode::D;
                    tc_ = 0; // the success round is tc = 0
                } else if (prev_feedback->kind == FeedbackKind::Heard &&
                           prev_feedback->message.kind == MessageKind::Data) {
                    // Someone else won: follow, synchronized at tc = 0.
                    mode_ = Mode::D;
                    tc_ = 0;
                    sawtooth_ = SawtoothState(config_.initial_phase);
                }
            }
            break;
        case Mode::D:
            if (prev_feedback && prev_feedback->kind == FeedbackKind::Acked) {
                if (last_tx_ == LastTx::Data) {
                    delivered_ = true; // packet got through inside the sawtooth
                    mode_ = Mode::Off;
                } else if (last_tx_ == LastTx::Control1 && is_leader_) {
                    mode_ = Mode::Off; // leader was alone: dissemination done
                }
                // Acks on ControlBit(0) keep the leader coordinating.
            }
            break;
        case Mode::Off:
            break;
    }

    if (mode_ == Mode::Off) return StepResult::switch_off();

    last_tx_ = LastTx::None;
    switch (mode_) {
        case Mode::Waiting:
            return StepResult::listen();
        case Mode::L: {
            const double p = ds_probability(ds_i_, config_.q);
            ++ds_i_;
            if (rng.bernoulli(p)) {
                last_tx_ = LastTx::Data;
                return StepResult::transmit_data();
            }
            return StepResult::listen();
        }
        case Mode::D:
            ++tc_;
            return dissemination_action(rng);
        case Mode::Off:
            break;
    }
    return StepResult::listen();
}

StepResult AdaptiveNokStation::dissemination_action(RngStream& rng) {
    if (tc_ % 2 == 1) {
        // Odd rounds carry the sawtooth; the leader just listens.
        if (is_leader_) return StepResult::listen();
        if (sawtooth_.advance(rng)) {
            last_tx_ = LastTx::Data;
            return StepResult::transmit_data();
        }
        return StepResult::listen();
    }
    if (control_round(tc_)) {
        // Everyone still in D probes together; a lone (thus acked) leader
        // learns that every follower has switched off.
        last_tx_ = LastTx::Control1;
        return StepResult::transmit_control(1);
    }
    if (is_leader_) {
        last_tx_ = LastTx::Control0;
        return StepResult::transmit_control(0);
    }
    return StepResult::listen();
}

ProtocolFactory make_decrease_slowly_factory(double q) {
    if (q <= 0.0) throw ContractViolation("DecreaseSlowly: q must be > 0");
    return [q]() { return std::make_unique<DecreaseSlowlyStation>(q); };
}

ProtocolFactory make_sawtooth_factory(int initial_phase) {
    if (initial_phase < 1) throw ContractViolation("sawtooth: initial phase must be >= 1");
    return [initial_phase]() { return std::make_unique<SawtoothStation>(initial_phase); };
}

ProtocolFactory make_adaptive_nok_factory(const AdaptiveNokConfig& config) {
    AdaptiveNokStation probe(config); // validates
    return [config]() { return std::make_unique<AdaptiveNokStation>(config); };
}

namespace {

struct StationActivity {
    std::vector<std::int64_t> data_successes;
    std::vector<std::int64_t> cb0_tx;
    std::vector<std::int64_t> cb1_tx;
    std::int64_t last_tx = -1;
    bool tx_after_first_data_success = false;
};

bool power_of_two_at_least(std::int64_t v, std::int64_t lo) {
    return v >= lo && (v & (v - 1)) == 0;
}

} // namespace

EpochReport extract_epochs(const Trace& trace, int control_min_exp) {
    EpochReport report;
    std::map<std::int64_t, StationActivity> activity;
    // round -> acked message of that round's Success, if any
    std::map<std::int64_t, std::pair<std::int64_t, Message>> successes;

    for (const auto& rec : trace.rounds) {
        for (const auto& [id, msg] : rec.transmitters) {
            auto& a = activity[id];
            a.last_tx = rec.round;
            if (!a.data_successes.empty()) a.tx_after_first_data_success = true;
            if (msg.kind == MessageKind::ControlBit) {
                (msg.bit == 0 ? a.cb0_tx : a.cb1_tx).push_back(rec.round);
            }
        }
        if (rec.outcome.kind == OutcomeKind::Success) {
            successes[rec.round] = {rec.outcome.sender, rec.outcome.message};
            if (rec.outcome.message.kind == MessageKind::Data) {
                activity[rec.outcome.sender].data_successes.push_back(rec.round);
            }
        }
    }

    const std::int64_t min_control = static_cast<std::int64_t>(1) << control_min_exp;
    std::map<std::int64_t, Epoch> epochs_by_leader;
    for (const auto& [id, a] : activity) {
        if (a.data_successes.size() > 1) {
            std::ostringstream msg;
            msg << "station " << id << " has " << a.data_successes.size()
                << " data successes";
            report.violations.push_back(msg.str());
        }
        if (!a.tx_after_first_data_success) continue; // plain follower
        // Leaders keep transmitting after their election success. The epoch
        // is closed iff the leader's last transmission is an acknowledged
        // ControlBit(1) probe; otherwise the trace ends mid-epoch.
        Epoch e;
        e.leader = id;
        e.election_round = a.data_successes.front();
        const auto it = successes.find(a.last_tx);
        const bool closed = it != successes.end() && it->second.first == id &&
                            it->second.second.kind == MessageKind::ControlBit &&
                            it->second.second.bit == 1;
        e.end_round = closed ? a.last_tx : 0;
        epochs_by_leader[id] = e;
    }

    auto epoch_of_round = [&](std::int64_t r, const auto& pred) {
        for (const auto& [leader, e] : epochs_by_leader) {
            if (r > e.election_round && (e.end_round == 0 || r <= e.end_round) && pred(e)) {
                return leader;
            }
        }
        return static_cast<std::int64_t>(-1);
    };

    // Control-message placement checks.
    for (const auto& [id, a] : activity) {
        const auto leader_it = epochs_by_leader.find(id);
        const bool is_leader = leader_it != epochs_by_leader.end();
        for (const std::int64_t r : a.cb0_tx) {
            const bool coordinating =
                is_leader && r > leader_it->second.election_round &&
                (leader_it->second.end_round == 0 || r <= leader_it->second.end_round);
            if (!coordinating) {
                std::ostringstream msg;
                msg << "ControlBit(0) at round " << r << " from station " << id
                    << " which is not a coordinating leader there";
                report.violations.push_back(msg.str());
            }
        }
        for (const std::int64_t r : a.cb1_tx) {
            if (is_leader) {
                if (!power_of_two_at_least(r - leader_it->second.election_round,
                                           min_control)) {
                    std::ostringstream msg;
                    msg << "leader " << id << " probe at round " << r
                        << " is not at tc = 2^x";
                    report.violations.push_back(msg.str());
                }
            } else {
                const std::int64_t host = epoch_of_round(r, [&](const Epoch& e) {
                    return power_of_two_at_least(r - e.election_round, min_control);
                });
                if (host < 0) {
                    std::ostringstream msg;
                    msg << "station " << id << " probe at round " << r
                        << " aligns with no epoch's tc = 2^x";
                    report.violations.push_back(msg.str());
                }
            }
        }
    }

    // Per-epoch member checks: members deliver and go silent before the
    // leader's terminal acknowledged probe. Open epochs (trace ended
    // mid-dissemination) cannot be bounded and are skipped.
    for (auto& [leader, e] : epochs_by_leader) {
        if (e.end_round == 0) {
            report.epochs.push_back(e);
            continue;
        }
        for (const auto& [id, a] : activity) {
            if (id == leader || epochs_by_leader.count(id)) continue;
            const bool member = std::any_of(a.cb1_tx.begin(), a.cb1_tx.end(),
                                            [&](std::int64_t r) {
                                                return r > e.election_round &&
                                                       r <= e.end_round;
                                            });
            if (!member) continue;
            e.members.push_back(id);
            if (a.data_successes.empty() || a.data_successes.front() >= e.end_round) {
                std::ostringstream msg;
                msg << "member " << id << " of epoch led by " << leader
                    << " not delivered before the leader terminated";
                report.violations.push_back(msg.str());
            }
            if (a.last_tx >= e.end_round) {
                std::ostringstream msg;
                msg << "member " << id << " transmitted at/after epoch end "
                    << e.end_round;
                report.violations.push_back(msg.str());
            }
        }
        report.epochs.push_back(e);
    }

    std::sort(report.epochs.begin(), report.epochs.end(),
              [](const Epoch& a, const Epoch& b) {
                  return a.election_round < b.election_round;
              });
    for (std::size_t i = 1; i < report.epochs.size(); ++i) {
        const auto& prev = report.epochs[i - 1];
        if (prev.end_round == 0 || report.epochs[i].election_round <= prev.end_round) {
            report.disjoint = false;
        }
    }
    return report;
}

} // namespace contres
