#include "contres/channel.hpp"

namespace contres {

RoundOutcome arbitrate(std::span<const std::pair<std::int64_t, Action>> actions) {
    int transmitters = 0;
    std::int64_t sender = -1;
    const Message* message = nullptr;
    for (const auto& [id, action] : actions) {
        if (action.kind == ActionKind::Transmit) {
            ++transmitters;
            sender = id;
            message = &action.message;
        }
    }
    if (transmitters == 0) return RoundOutcome::silence();
    if (transmitters == 1) return RoundOutcome::success(sender, *message);
    return RoundOutcome::collision(transmitters);
}

Feedback feedback_for(const RoundOutcome& outcome, const Action& my_action, bool am_sender) {
    if (am_sender && my_action.kind != ActionKind::Transmit) {
        throw ContractViolation("feedback_for: am_sender requires a Transmit action");
    }
    if (am_sender && outcome.kind != OutcomeKind::Success) {
        throw ContractViolation("feedback_for: am_sender requires a Success outcome");
    }
    if (my_action.kind == ActionKind::Transmit) {
        return am_sender ? Feedback::acked() : Feedback::transmitted_no_ack();
    }
    // Listener: a successful message is heard; silence and collision are
    // indistinguishable.
    if (outcome.kind == OutcomeKind::Success) {
        return Feedback::heard(outcome.message);
    }
    return Feedback::nothing();
}

std::string to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Silence: return "silence";
        case OutcomeKind::Success: return "success";
        case OutcomeKind::Collision: return "collision";
    }
    return "?";
}

std::string to_string(MessageKind k) {
    switch (k) {
        case MessageKind::Data: return "data";
        case MessageKind::ControlBit: return "control";
    }
    return "?";
}

std::string to_string(FeedbackKind k) {
    switch (k) {
        case FeedbackKind::Acked: return "acked";
        case FeedbackKind::TransmittedNoAck: return "transmitted-no-ack";
        case FeedbackKind::Heard: return "heard";
        case FeedbackKind::NothingHeard: return "nothing-heard";
    }
    return "?";
}

} // namespace contres
