#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>

#include "contres/protocol.hpp"

namespace contres {

// p(i): transmission probability at local round i >= 1. A non-adaptive
// protocol is fully described by such a sequence.
using ProbSequence = std::function<double(std::int64_t)>;

enum class AckMode { SwitchOffOnAck, IgnoreAcks };

// --- NonAdaptiveWithK(k, c) ------------------------------------------------
//
// Block l = 0..L runs for c * phi(l) rounds at probability 2^l / (2k),
// where L = ceil(log2 log2 k). Requires k >= 4 so that L >= 1 and every
// probability stays within (0, 1/2].

// Number of blocks minus one: L = ceil(log2 log2 k).
int nak_top_block(std::int64_t k);

// Block length phi(l): ceil(k / 2^l) for l < L, and k for l = L.
std::int64_t phi(int l, std::int64_t k);

// Schedule length: sum of c*phi(l) over l = 0..L. Strictly below 3*c*k.
std::int64_t nak_total_rounds(std::int64_t k, int c);

// Probability for local round i in [1, nak_total_rounds(k, c)].
// Throws ContractViolation outside the schedule.
double nak_probability(std::int64_t i, std::int64_t k, int c);

struct NakSchedule {
    std::int64_t k;
    int c;

    NakSchedule(std::int64_t k, int c);
    std::int64_t total_rounds() const { return nak_total_rounds(k, c); }
    double probability(std::int64_t i) const { return nak_probability(i, k, c); }
    ProbSequence prob_sequence() const;
};

// --- SublinearDecrease(b) ---------------------------------------------------
//
// Round i uses probability ln(j)/j with j = 3 + floor((i-1)/b); the
// schedule is unbounded, strictly positive and non-increasing.

double sublinear_probability(std::int64_t i, int b);

struct SublinearSchedule {
    int b;
    AckMode ack_mode = AckMode::SwitchOffOnAck;

    explicit SublinearSchedule(int b, AckMode ack = AckMode::SwitchOffOnAck);
    double probability(std::int64_t i) const { return sublinear_probability(i, b); }
    ProbSequence prob_sequence() const;
};

// s(i) = sum_{j=1..i} p(j); s(0) = 0.
double cumulative_sum(const ProbSequence& p, std::int64_t i);

// --- Station behavior -------------------------------------------------------
//
// Bernoulli(p(i)) data transmission per round; with SwitchOffOnAck the
// station terminates on the round after its acknowledgement. A station
// whose (finite) schedule is exhausted without an ack stays alive but
// silent; the trial is then recorded as incomplete by the engine cap.
class ScheduleStation : public StationBehavior {
public:
    ScheduleStation(ProbSequence p, std::int64_t schedule_length, AckMode ack_mode);
    StepResult step(const std::optional<Feedback>& prev_feedback,
                    std::int64_t local_round, RngStream& rng) override;

private:
    ProbSequence p_;
    std::int64_t schedule_length_; // 0 = unbounded
    AckMode ack_mode_;
};

ProtocolFactory make_nak_factory(std::int64_t k, int c);
ProtocolFactory make_sublinear_factory(int b, AckMode ack_mode);

// (i, p(i)) rows for cross-implementation conformance checks.
void export_schedule_csv(std::ostream& out, const ProbSequence& p, std::int64_t rounds);

} // namespace contres
