#pragma once

#include <utility>
#include <vector>

#include "contres/nonadaptive.hpp"
#include "contres/protocol.hpp"

namespace contres {

// Test/benchmark protocol with an explicit per-round probability vector.
// Past the end of the script the station either holds the last value or
// goes silent. Probability 1.0 rounds make the behavior deterministic.
class ScriptedStation : public StationBehavior {
public:
    ScriptedStation(std::vector<double> probabilities, bool hold_last, AckMode ack_mode)
        : probabilities_(std::move(probabilities)),
          hold_last_(hold_last),
          ack_mode_(ack_mode) {
        if (probabilities_.empty()) {
            throw ContractViolation("scripted protocol needs at least one probability");
        }
    }

    StepResult step(const std::optional<Feedback>& prev_feedback,
                    std::int64_t local_round, RngStream& rng) override {
        if (ack_mode_ == AckMode::SwitchOffOnAck && prev_feedback &&
            prev_feedback->kind == FeedbackKind::Acked) {
            return StepResult::switch_off();
        }
        const auto n = static_cast<std::int64_t>(probabilities_.size());
        double p = 0.0;
        if (local_round <= n) {
            p = probabilities_[static_cast<std::size_t>(local_round - 1)];
        } else if (hold_last_) {
            p = probabilities_.back();
        }
        if (p >= 1.0) return StepResult::transmit_data();
        if (p <= 0.0) return StepResult::listen();
        return rng.bernoulli(p) ? StepResult::transmit_data() : StepResult::listen();
    }

private:
    std::vector<double> probabilities_;
    bool hold_last_;
    AckMode ack_mode_;
};

inline ProtocolFactory make_scripted_factory(std::vector<double> probabilities,
                                             bool hold_last = false,
                                             AckMode ack_mode = AckMode::SwitchOffOnAck) {
    return [probabilities = std::move(probabilities), hold_last, ack_mode]() {
        return std::make_unique<ScriptedStation>(probabilities, hold_last, ack_mode);
    };
}

} // namespace contres
