#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "contres/channel.hpp"
#include "contres/nonadaptive.hpp"
#include "contres/protocol.hpp"

namespace contres {

// One round's channel outcome as an external observer (the adaptive
// adversary) may see it: station identities are redacted.
struct ChannelObservation {
    OutcomeKind kind = OutcomeKind::Silence;
    int transmitter_count = 0;
    MessageKind message_kind = MessageKind::Data; // Success only
    int bit = 0;                                  // Success + ControlBit only
};

// Public computation history available to adaptive wake-up strategies:
// channel outcomes and past wake counts, nothing station-internal.
struct PublicHistory {
    std::vector<ChannelObservation> outcomes; // outcomes[i] = round i+1
    std::vector<std::int64_t> wake_counts;    // wake_counts[i] = round i+1
};

// A wake-up schedule source. wake_at_boundary(t, ...) is queried once at
// the boundary of reference round t (t = 1, 2, ...) and returns how many
// stations to activate now; those stations get t_v = t - 1 and take
// their first action at round t (local round 1).
class WakeupSource {
public:
    virtual ~WakeupSource() = default;
    virtual std::int64_t total() const = 0;
    virtual std::int64_t wake_at_boundary(std::int64_t round, const PublicHistory& history) = 0;
    virtual bool is_oblivious() const = 0;
};

struct StationStats {
    std::int64_t id = -1;
    std::int64_t activation = -1; // t_v on the reference clock
    std::optional<std::int64_t> first_success;
    std::int64_t transmissions = 0;
    bool alive_at_end = false;
};

struct TraceRound {
    std::int64_t round = 0;
    std::int64_t woken = 0;
    std::int64_t alive = 0; // stations that acted this round
    std::vector<std::pair<std::int64_t, Message>> transmitters;
    RoundOutcome outcome;
    std::vector<std::int64_t> deactivated; // switched off at this round's step
};

struct Trace {
    std::vector<TraceRound> rounds;
};

// Per-run results. completed means every station was activated and the
// run's termination condition was met before the round cap.
struct TrialResult {
    std::vector<StationStats> stations;
    bool completed = false;
    std::int64_t rounds_used = 0;
    bool budget_clamped = false;
    std::optional<Trace> trace;

    bool all_delivered() const;
    // Max over stations of first_success - activation; empty if any
    // station never succeeded.
    std::optional<std::int64_t> max_latency() const;
    std::int64_t total_transmissions() const;
};

struct SimulationConfig {
    std::int64_t k = 1;
    std::int64_t max_rounds = 0; // 0 = default_max_rounds(k)
    bool record_trace = false;
    // Termination variants beyond "all woken and none alive":
    bool stop_when_all_delivered = false;  // no-acknowledgment runs
    bool stop_after_first_success = false; // wake-up problem runs
};

// 64 * k * (1 + ceil(log2 k)^2): comfortably above every bound the
// protocols are expected to meet; hitting it is a recorded failure.
std::int64_t default_max_rounds(std::int64_t k);

// Executes the slotted-channel model round by round: wake, collect
// actions, arbitrate, deliver feedback, apply transitions. Rejects an
// oblivious source whose total differs from k; clamps an adaptive one
// at the budget (recorded in budget_clamped).
TrialResult run_simulation(const ProtocolFactory& factory, WakeupSource& source,
                           const SimulationConfig& config, std::uint64_t trial_seed);

// sigma_hat[t]: sum of p(t - t_v) over every station activated before t,
// dead or alive. Rounds before the first activation give 0.
double sigma_hat_at(std::span<const std::int64_t> activations, const ProbSequence& p,
                    std::int64_t t);
std::vector<double> sigma_hat_series(std::span<const std::int64_t> activations,
                                     const ProbSequence& p, std::int64_t t_max);

// sigma[t]: same sum restricted to stations still active at t,
// reconstructed from a recorded trace. Requires trial.trace.
std::vector<double> sigma_series(const TrialResult& trial, const ProbSequence& p);

// Newline-delimited trace export: one record per round, then one
// summary record per station.
void write_trace(std::ostream& out, const TrialResult& trial);

} // namespace contres
