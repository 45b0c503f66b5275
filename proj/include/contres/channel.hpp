#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace contres {

// Raised when a documented operation precondition is violated.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class MessageKind { Data, ControlBit };

// A transmission payload: either a data packet, tracked by a
// station-unique opaque tag assigned at activation, or a one-bit
// control message (used by the adaptive protocol only).
struct Message {
    MessageKind kind = MessageKind::Data;
    std::int64_t payload_tag = -1; // Data only
    int bit = 0;                   // ControlBit only: 0 or 1

    static Message data(std::int64_t tag) { return {MessageKind::Data, tag, 0}; }
    static Message control(int bit) { return {MessageKind::ControlBit, -1, bit}; }

    bool operator==(const Message&) const = default;
};

enum class ActionKind { Transmit, Listen };

struct Action {
    ActionKind kind = ActionKind::Listen;
    Message message; // Transmit only

    static Action transmit(Message m) { return {ActionKind::Transmit, std::move(m)}; }
    static Action listen() { return {ActionKind::Listen, {}}; }
};

enum class OutcomeKind { Silence, Success, Collision };

// Channel arbitration result for one round.
struct RoundOutcome {
    OutcomeKind kind = OutcomeKind::Silence;
    std::int64_t sender = -1;   // Success only (internal bookkeeping id)
    Message message;            // Success only
    int transmitter_count = 0;  // 0 / 1 / >= 2

    static RoundOutcome silence() { return {OutcomeKind::Silence, -1, {}, 0}; }
    static RoundOutcome success(std::int64_t sender, Message m) {
        return {OutcomeKind::Success, sender, std::move(m), 1};
    }
    static RoundOutcome collision(int count) {
        return {OutcomeKind::Collision, -1, {}, count};
    }
};

enum class FeedbackKind { Acked, TransmittedNoAck, Heard, NothingHeard };

// What one station perceives after a round. Listeners cannot tell a
// collision from silence; only the unique transmitter of a Success
// round learns anything beyond what it heard.
struct Feedback {
    FeedbackKind kind = FeedbackKind::NothingHeard;
    Message message; // Heard only

    static Feedback acked() { return {FeedbackKind::Acked, {}}; }
    static Feedback transmitted_no_ack() { return {FeedbackKind::TransmittedNoAck, {}}; }
    static Feedback heard(Message m) { return {FeedbackKind::Heard, std::move(m)}; }
    static Feedback nothing() { return {FeedbackKind::NothingHeard, {}}; }
};

// Counts transmitters m and resolves the round: Silence (m = 0),
// Success with the lone sender (m = 1), Collision(m) otherwise.
RoundOutcome arbitrate(std::span<const std::pair<std::int64_t, Action>> actions);

// Feedback delivered to one participant of an arbitrated round.
// am_sender must be true iff outcome is a Success with this station as
// sender; a listener can never be the sender.
Feedback feedback_for(const RoundOutcome& outcome, const Action& my_action, bool am_sender);

std::string to_string(OutcomeKind k);
std::string to_string(MessageKind k);
std::string to_string(FeedbackKind k);

} // namespace contres
