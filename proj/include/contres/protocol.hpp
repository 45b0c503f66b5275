#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "contres/channel.hpp"
#include "contres/rng.hpp"

namespace contres {

// What a station asks the engine to do in one round. Stations are
// anonymous: they request a data transmission without knowing their own
// payload tag; the engine attaches it. SwitchOff terminates the station
// before any action this round.
struct StepResult {
    enum class Kind { TransmitData, TransmitControl, Listen, SwitchOff };
    Kind kind = Kind::Listen;
    int bit = 0; // TransmitControl only

    static StepResult transmit_data() { return {Kind::TransmitData, 0}; }
    static StepResult transmit_control(int bit) { return {Kind::TransmitControl, bit}; }
    static StepResult listen() { return {Kind::Listen, 0}; }
    static StepResult switch_off() { return {Kind::SwitchOff, 0}; }
};

// Per-station protocol state machine. The engine calls step() once per
// round while the station is alive, passing only what the model lets a
// station observe: its local round (1, 2, ...), the feedback from its
// previous action (empty at local round 1), and its private random
// stream. Internal ids and the reference clock are never exposed.
class StationBehavior {
public:
    virtual ~StationBehavior() = default;
    virtual StepResult step(const std::optional<Feedback>& prev_feedback,
                            std::int64_t local_round, RngStream& rng) = 0;
};

// Builds a fresh, independent protocol state per station.
using ProtocolFactory = std::function<std::unique_ptr<StationBehavior>()>;

} // namespace contres
