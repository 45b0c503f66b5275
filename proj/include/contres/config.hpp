#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "contres/adaptive.hpp"
#include "contres/adversary.hpp"
#include "contres/nonadaptive.hpp"
#include "contres/protocol.hpp"

namespace contres {

enum class ProtocolFamily { NonAdaptiveWithK, SublinearDecrease, DecreaseSlowly, Sawtooth, AdaptiveNoK, Scripted };

struct ProtocolSpec {
    ProtocolFamily family = ProtocolFamily::SublinearDecrease;
    int c = 8;                 // NonAdaptiveWithK
    int b = 8;                 // SublinearDecrease
    AckMode ack_mode = AckMode::SwitchOffOnAck;
    double q = 2.0;            // DecreaseSlowly / AdaptiveNoK
    int sawtooth_initial_phase = 1;
    int control_min_exp = 1;   // AdaptiveNoK probe rounds at tc = 2^x, x >= this
    std::vector<double> script;
    bool script_hold_last = false;

    static ProtocolSpec parse(const std::string& name);
    std::string name() const;
    bool requires_k() const { return family == ProtocolFamily::NonAdaptiveWithK; }
    bool non_adaptive() const;
    // p(i) for non-adaptive families; throws otherwise.
    ProbSequence prob_sequence(std::int64_t k) const;
    ProtocolFactory make_factory(std::int64_t k) const;
    // Engine termination/run flags implied by the protocol.
    bool stop_when_all_delivered() const {
        return family == ProtocolFamily::SublinearDecrease && ack_mode == AckMode::IgnoreAcks;
    }
    bool stop_after_first_success() const { return family == ProtocolFamily::DecreaseSlowly; }
};

enum class AdversaryKind { Batch, Trickle, Uniform, Blocking, WakeOnSuccess };

struct AdversarySpec {
    AdversaryKind kind = AdversaryKind::Batch;
    std::int64_t gap = 1;      // trickle
    std::int64_t horizon = 1;  // uniform
    std::int64_t burst = 1;    // wake-on-success
    BlockingVariant variant = BlockingVariant::FrontLoaded;
    double gamma = 3.0;
    std::int64_t t1 = 0;
    std::int64_t t2 = 0;

    // Textual form: batch | trickle:<gap> | uniform:<horizon> |
    // blocking:<variant>,<gamma>[,<t1>,<t2>] | wake-on-success:<burst>
    static AdversarySpec parse(const std::string& text);
    std::string name() const;
    bool is_batch() const;
    // p1 is the attacked protocol's first-round probability (blocking only).
    std::unique_ptr<WakeupSource> make_source(std::int64_t k, double p1, RngStream& rng) const;
};

struct ExperimentConfig {
    ProtocolSpec protocol;
    AdversarySpec adversary;
    std::int64_t k = 16;
    int trials = 200;
    std::uint64_t master_seed = 1;
    std::int64_t max_rounds = 0; // 0 = engine default
    double eta = 1.0;            // whp target exponent for reporting
    bool record_traces = false;
    int threads = 0;             // 0 = hardware concurrency

    void validate() const;
    // Resolved flat key=value view (the reproducibility banner).
    std::map<std::string, std::string> resolved() const;
};

// Flat key = value file; '#' starts a comment. Unknown keys are rejected
// at application time by apply_config_entry.
std::map<std::string, std::string> parse_flat_config(const std::string& path);

// Applies one key to the config; throws ContractViolation on unknown
// keys or bad values.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

} // namespace contres
