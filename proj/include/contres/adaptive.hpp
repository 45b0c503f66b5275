#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contres/engine.hpp"
#include "contres/protocol.hpp"

namespace contres {

// Transmission probability of DecreaseSlowly at attempt counter i >= 0:
// q / (2q + i), which starts at 1/2 and decays harmonically.
double ds_probability(std::int64_t i, double q);

// Stand-alone DecreaseSlowly station for the wake-up problem: transmits
// with ds_probability(i, q), increments i every round, and leaves the
// channel once acknowledged (it has become the leader).
class DecreaseSlowlyStation : public StationBehavior {
public:
    explicit DecreaseSlowlyStation(double q);
    StepResult step(const std::optional<Feedback>& prev_feedback,
                    std::int64_t local_round, RngStream& rng) override;
    bool is_leader() const { return is_leader_; }

private:
    double q_;
    std::int64_t i_ = 0;
    bool is_leader_ = false;
};

// Sawtooth back-on/back-off slot sequencer. Phase p walks subwindows of
// sizes 2^p, 2^(p-1), ..., 1; one uniformly chosen transmission slot per
// subwindow. advance() consumes one slot and says whether it is the
// chosen one. All participants must enter at the same slot boundary.
struct SawtoothState {
    int phase = 1;
    std::int64_t subwindow = 0;   // current window size w; 0 before first slot
    std::int64_t pos = 0;         // slots consumed in the current subwindow
    std::int64_t chosen_slot = 0; // 1..subwindow
    bool done = false;

    explicit SawtoothState(int initial_phase = 1) : phase(initial_phase) {}
    bool advance(RngStream& rng);
};

// Stand-alone sawtooth station (synchronized entry required: use a batch
// wake-up). Switches off on acknowledgement.
class SawtoothStation : public StationBehavior {
public:
    explicit SawtoothStation(int initial_phase = 1);
    StepResult step(const std::optional<Feedback>& prev_feedback,
                    std::int64_t local_round, RngStream& rng) override;

private:
    SawtoothState state_;
};

struct AdaptiveNokConfig {
    double q = 2.0;            // DecreaseSlowly constant
    int initial_phase = 1;     // sawtooth starting phase
    int control_min_exp = 1;   // "anybody out there" rounds at tc = 2^x, x >= this
};

// The two-mode adaptive protocol: Waiting (4-round listen window) ->
// L (leader election via DecreaseSlowly) -> D (leader-coordinated
// dissemination: sawtooth on odd tc, control bits on even tc) -> Off.
class AdaptiveNokStation : public StationBehavior {
public:
    enum class Mode { Waiting, L, D, Off };

    explicit AdaptiveNokStation(const AdaptiveNokConfig& config);
    StepResult step(const std::optional<Feedback>& prev_feedback,
                    std::int64_t local_round, RngStream& rng) override;

    Mode mode() const { return mode_; }
    bool is_leader() const { return is_leader_; }
    bool delivered() const { return delivered_; }

private:
    enum class LastTx { None, Data, Control0, Control1 };

    StepResult dissemination_action(RngStream& rng);
    bool control_round(std::int64_t tc) const;

    AdaptiveNokConfig config_;
    Mode mode_ = Mode::Waiting;
    // Waiting window
    int listened_ = 0;
    bool heard_any_ = false;
    bool heard_probe_ = false; // ControlBit(1)
    // L mode
    std::int64_t ds_i_ = 0;
    // D mode
    std::int64_t tc_ = 0;
    SawtoothState sawtooth_;
    bool is_leader_ = false;
    bool delivered_ = false;
    LastTx last_tx_ = LastTx::None;
};

ProtocolFactory make_decrease_slowly_factory(double q);
ProtocolFactory make_sawtooth_factory(int initial_phase);
ProtocolFactory make_adaptive_nok_factory(const AdaptiveNokConfig& config);

// --- Epoch extraction (verification aid) -----------------------------------

// One leader-election + dissemination interval reconstructed from a
// trace: election at the leader's Data success, end at its final
// ControlBit(1) acknowledgement.
struct Epoch {
    std::int64_t leader = -1;
    std::int64_t election_round = 0;
    std::int64_t end_round = 0;             // 0 if the epoch never terminated
    std::vector<std::int64_t> members;      // non-leader D participants
};

struct EpochReport {
    std::vector<Epoch> epochs;
    std::vector<std::string> violations; // empty = all checked invariants hold
    bool disjoint = true;                // epoch intervals pairwise disjoint
};

// Scans an AdaptiveNoK trace and checks: every ControlBit(0) success is
// sent by a current leader, control transmissions sit on tc = 2^x rounds
// of their epoch, members deliver and fall silent before their leader
// terminates, and every station has exactly one Data success.
EpochReport extract_epochs(const Trace& trace, int control_min_exp = 1);

} // namespace contres
