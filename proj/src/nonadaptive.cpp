#include "contres/nonadaptive.hpp"

#include <cmath>
#include <ostream>

namespace contres {

int nak_top_block(std::int64_t k) {
    if (k < 4) throw ContractViolation("NonAdaptiveWithK requires k >= 4");
    // ceil(log2 log2 k) computed on integers: smallest L with 2^(2^L) >= k.
    int l = 0;
    while (true) {
        const std::int64_t exponent = static_cast<std::int64_t>(1) << l;
        if (exponent >= 63) break; // 2^(2^l) already exceeds any int64 k
        if ((static_cast<std::int64_t>(1) << exponent) >= k) break;
        ++l;
    }
    return l;
}

std::int64_t phi(int l, std::int64_t k) {
    const int top = nak_top_block(k);
    if (l < 0 || l > top) throw ContractViolation("phi: block index out of range");
    if (l == top) return k;
    return (k + (static_cast<std::int64_t>(1) << l) - 1) >> l; // ceil(k / 2^l)
}

std::int64_t nak_total_rounds(std::int64_t k, int c) {
    if (c < 1) throw ContractViolation("NonAdaptiveWithK requires c >= 1");
    const int top = nak_top_block(k);
    std::int64_t total = 0;
    for (int l = 0; l <= top; ++l) total += c * phi(l, k);
    return total;
}

double nak_probability(std::int64_t i, std::int64_t k, int c) {
    if (c < 1) throw ContractViolation("NonAdaptiveWithK requires c >= 1");
    if (i < 1) throw ContractViolation("nak_probability: local round must be >= 1");
    const int top = nak_top_block(k);
    std::int64_t boundary = 0;
    for (int l = 0; l <= top; ++l) {
        boundary += c * phi(l, k);
        if (i <= boundary) {
            return static_cast<double>(static_cast<std::int64_t>(1) << l) /
                   (2.0 * static_cast<double>(k));
        }
    }
    throw ContractViolation("nak_probability: local round beyond schedule");
}

NakSchedule::NakSchedule(std::int64_t k, int c) : k(k), c(c) {
    nak_top_block(k); // validates k
    if (c < 1) throw ContractViolation("NonAdaptiveWithK requires c >= 1");
}

ProbSequence NakSchedule::prob_sequence() const {
    const std::int64_t kk = k;
    const int cc = c;
    const std::int64_t len = total_rounds();
    return [kk, cc, len](std::int64_t i) {
        return i <= len ? nak_probability(i, kk, cc) : 0.0;
    };
}

double sublinear_probability(std::int64_t i, int b) {
    if (i < 1) throw ContractViolation("sublinear_probability: local round must be >= 1");
    if (b < 1) throw ContractViolation("SublinearDecrease requires b >= 1");
    const double j = static_cast<double>(3 + (i - 1) / b);
    return std::log(j) / j;
}

SublinearSchedule::SublinearSchedule(int b, AckMode ack) : b(b), ack_mode(ack) {
    if (b < 1) throw ContractViolation("SublinearDecrease requires b >= 1");
}

ProbSequence SublinearSchedule::prob_sequence() const {
    const int bb = b;
    return [bb](std::int64_t i) { return sublinear_probability(i, bb); };
}

double cumulative_sum(const ProbSequence& p, std::int64_t i) {
    double s = 0.0;
    for (std::int64_t j = 1; j <= i; ++j) s += p(j);
    return s;
}

ScheduleStation::ScheduleStation(ProbSequence p, std::int64_t schedule_length, AckMode ack_mode)
    : p_(std::move(p)), schedule_length_(schedule_length), ack_mode_(ack_mode) {}

StepResult ScheduleStation::step(const std::optional<Feedback>& prev_feedback,
                                 std::int64_t local_round, RngStream& rng) {
    if (ack_mode_ == AckMode::SwitchOffOnAck && prev_feedback &&
        prev_feedback->kind == FeedbackKind::Acked) {
        return StepResult::switch_off();
    }
    if (schedule_length_ > 0 && local_round > schedule_length_) {
        // Schedule exhausted: stay silent (still non-adaptive), let the
        // engine cap record the failure.
        return StepResult::listen();
    }
    return rng.bernoulli(p_(local_round)) ? StepResult::transmit_data()
                                          : StepResult::listen();
}

ProtocolFactory make_nak_factory(std::int64_t k, int c) {
    NakSchedule schedule(k, c);
    return [schedule]() {
        return std::make_unique<ScheduleStation>(schedule.prob_sequence(),
                                                 schedule.total_rounds(),
                                                 AckMode::SwitchOffOnAck);
    };
}

ProtocolFactory make_sublinear_factory(int b, AckMode ack_mode) {
    SublinearSchedule schedule(b, ack_mode);
    return [schedule]() {
        return std::make_unique<ScheduleStation>(schedule.prob_sequence(), 0,
                                                 schedule.ack_mode);
    };
}

void export_schedule_csv(std::ostream& out, const ProbSequence& p, std::int64_t rounds) {
    out << "i,p\n";
    for (std::int64_t i = 1; i <= rounds; ++i) {
        out << i << ',' << p(i) << '\n';
    }
}

} // namespace contres
