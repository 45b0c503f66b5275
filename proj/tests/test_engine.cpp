#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "contres/adversary.hpp"
#include "contres/engine.hpp"
#include "contres/scripted.hpp"

using namespace contres;
using doctest::Approx;

namespace {

// Builds stations from a list of scripts, one per activation in order.
ProtocolFactory script_per_station(std::vector<std::vector<double>> scripts) {
    auto next = std::make_shared<std::size_t>(0);
    return [scripts = std::move(scripts), next]() -> std::unique_ptr<StationBehavior> {
        const std::size_t i = std::min(*next, scripts.size() - 1);
        ++*next;
        return std::make_unique<ScriptedStation>(scripts[i], false, AckMode::SwitchOffOnAck);
    };
}

} // namespace

TEST_CASE("default round cap") {
    CHECK(default_max_rounds(1) == 64);
    CHECK(default_max_rounds(16) == 64 * 16 * (1 + 16));
    CHECK(default_max_rounds(256) == 64 * 256 * (1 + 64));
}

TEST_CASE("lone station with positive probability eventually succeeds") {
    ObliviousSource source(batch_schedule(1));
    SimulationConfig config;
    config.k = 1;
    const auto trial = run_simulation(make_scripted_factory({0.5}, true), source, config, 42);
    REQUIRE(trial.completed);
    REQUIRE(trial.stations.size() == 1);
    REQUIRE(trial.stations[0].first_success.has_value());
    CHECK(*trial.stations[0].first_success - trial.stations[0].activation >= 1);
}

TEST_CASE("perpetual collision never completes") {
    ObliviousSource source(batch_schedule(2));
    SimulationConfig config;
    config.k = 2;
    config.max_rounds = 128;
    config.record_trace = true;
    const auto trial = run_simulation(make_scripted_factory({1.0}, true), source, config, 1);
    CHECK_FALSE(trial.completed);
    CHECK(trial.rounds_used == 128);
    for (const auto& s : trial.stations) CHECK_FALSE(s.first_success.has_value());
    for (const auto& rec : trial.trace->rounds) {
        CHECK(rec.outcome.kind == OutcomeKind::Collision);
        CHECK(rec.outcome.transmitter_count == 2);
    }
}

TEST_CASE("two deterministic schedules complete by round 2") {
    // Station 0 transmits at local round 1, station 1 at local round 2.
    ObliviousSource source(batch_schedule(2));
    SimulationConfig config;
    config.k = 2;
    const auto trial =
        run_simulation(script_per_station({{1.0}, {0.0, 1.0}}), source, config, 7);
    REQUIRE(trial.completed);
    CHECK(trial.stations[0].first_success == 1);
    CHECK(trial.stations[1].first_success == 2);
    CHECK(trial.rounds_used == 3); // both off at the step after their acks
}

TEST_CASE("stations act from local round 1") {
    // Wake at rounds 0 and 3; both transmit deterministically at local round 1.
    ObliviousSource source(trickle_schedule(2, 3));
    SimulationConfig config;
    config.k = 2;
    const auto trial = run_simulation(make_scripted_factory({1.0}, false), source, config, 3);
    REQUIRE(trial.completed);
    CHECK(trial.stations[0].activation == 0);
    CHECK(trial.stations[0].first_success == 1);
    CHECK(trial.stations[1].activation == 3);
    CHECK(trial.stations[1].first_success == 4);
    // latency measured on the local clock is 1 for both
    CHECK(*trial.stations[1].first_success - trial.stations[1].activation == 1);
}

TEST_CASE("oblivious schedule must total k") {
    ObliviousSource source(batch_schedule(3));
    SimulationConfig config;
    config.k = 2;
    CHECK_THROWS_AS(run_simulation(make_scripted_factory({0.5}, true), source, config, 1),
                    ContractViolation);
}

TEST_CASE("trace rounds are consecutive and bounded") {
    ObliviousSource source(batch_schedule(4));
    SimulationConfig config;
    config.k = 4;
    config.max_rounds = 200;
    config.record_trace = true;
    const auto trial = run_simulation(make_scripted_factory({0.3}, true), source, config, 9);
    REQUIRE(trial.trace.has_value());
    CHECK(static_cast<std::int64_t>(trial.trace->rounds.size()) == trial.rounds_used);
    CHECK(trial.trace->rounds.size() <= 200);
    std::int64_t expected = 1;
    for (const auto& rec : trial.trace->rounds) {
        CHECK(rec.round == expected);
        ++expected;
    }
}

TEST_CASE("every success acknowledges exactly one station") {
    ObliviousSource source(trickle_schedule(6, 1));
    SimulationConfig config;
    config.k = 6;
    config.record_trace = true;
    const auto trial = run_simulation(make_scripted_factory({0.4}, true), source, config, 21);
    REQUIRE(trial.completed);
    std::int64_t successes = 0;
    for (const auto& rec : trial.trace->rounds) {
        if (rec.outcome.kind == OutcomeKind::Success) {
            ++successes;
            CHECK(rec.outcome.transmitter_count == 1);
        }
    }
    std::int64_t delivered = 0;
    for (const auto& s : trial.stations) {
        if (s.first_success) ++delivered;
    }
    // switch-off on ack: one success round per delivered station
    CHECK(successes == delivered);
}

TEST_CASE("sigma_hat sums p over all activated stations") {
    const SublinearSchedule schedule(1);
    const auto p = schedule.prob_sequence();
    const std::vector<std::int64_t> activations{0, 2};
    // sigma_hat[3] = p(3) + p(1) = ln5/5 + ln3/3
    CHECK(sigma_hat_at(activations, p, 3) == Approx(0.6880916787095233));
    CHECK(sigma_hat_at(activations, p, 1) == Approx(std::log(3.0) / 3.0));
    // before any activation
    const std::vector<std::int64_t> late{5, 6};
    CHECK(sigma_hat_at(late, p, 3) == 0.0);
    const auto series = sigma_hat_series(activations, p, 3);
    CHECK(series[3] == Approx(sigma_hat_at(activations, p, 3)));
}

TEST_CASE("sigma equals sigma_hat while every station is alive") {
    // IgnoreAcks keeps all stations alive, so A[t] = Ahat[t].
    ObliviousSource source(trickle_schedule(5, 2));
    SimulationConfig config;
    config.k = 5;
    config.max_rounds = 40;
    config.record_trace = true;
    const SublinearSchedule schedule(2);
    const auto trial = run_simulation(
        [&]() {
            return std::make_unique<ScheduleStation>(schedule.prob_sequence(), 0,
                                                     AckMode::IgnoreAcks);
        },
        source, config, 5);
    std::vector<std::int64_t> activations;
    for (const auto& s : trial.stations) activations.push_back(s.activation);
    const auto sigma = sigma_series(trial, schedule.prob_sequence());
    const auto sigma_hat = sigma_hat_series(activations, schedule.prob_sequence(),
                                            trial.rounds_used);
    for (std::int64_t t = 1; t <= trial.rounds_used; ++t) {
        CHECK(sigma[static_cast<std::size_t>(t)] ==
              Approx(sigma_hat[static_cast<std::size_t>(t)]));
    }
}

TEST_CASE("sigma_hat dominates sigma once stations die") {
    ObliviousSource source(batch_schedule(6));
    SimulationConfig config;
    config.k = 6;
    config.record_trace = true;
    const SublinearSchedule schedule(1);
    const auto trial = run_simulation(
        [&]() {
            return std::make_unique<ScheduleStation>(schedule.prob_sequence(), 0,
                                                     AckMode::SwitchOffOnAck);
        },
        source, config, 8);
    REQUIRE(trial.completed);
    std::vector<std::int64_t> activations;
    for (const auto& s : trial.stations) activations.push_back(s.activation);
    const auto sigma = sigma_series(trial, schedule.prob_sequence());
    const auto sigma_hat = sigma_hat_series(activations, schedule.prob_sequence(),
                                            trial.rounds_used);
    bool strictly_dominates_somewhere = false;
    for (std::int64_t t = 1; t <= trial.rounds_used; ++t) {
        CHECK(sigma_hat[static_cast<std::size_t>(t)] >=
              sigma[static_cast<std::size_t>(t)] - 1e-12);
        if (sigma_hat[static_cast<std::size_t>(t)] >
            sigma[static_cast<std::size_t>(t)] + 1e-9) {
            strictly_dominates_somewhere = true;
        }
    }
    CHECK(strictly_dominates_somewhere);
}

TEST_CASE("identical seeds give bit-identical traces") {
    auto render = [](std::uint64_t seed) {
        ObliviousSource source(trickle_schedule(8, 1));
        SimulationConfig config;
        config.k = 8;
        config.record_trace = true;
        const SublinearSchedule schedule(1);
        const auto trial = run_simulation(
            [&]() {
                return std::make_unique<ScheduleStation>(schedule.prob_sequence(), 0,
                                                         AckMode::SwitchOffOnAck);
            },
            source, config, seed);
        std::ostringstream out;
        write_trace(out, trial);
        return out.str();
    };
    CHECK(render(77) == render(77));
    CHECK(render(77) != render(78));
}

TEST_CASE("wake-on-success interacts with the engine") {
    // No successes ever: only the first station is woken.
    auto silent_source = make_wake_on_success_source(4, 3);
    SimulationConfig config;
    config.k = 4;
    config.max_rounds = 50;
    const auto trial = run_simulation(make_scripted_factory({0.0}, true),
                                      *silent_source, config, 1);
    CHECK_FALSE(trial.completed);
    CHECK(trial.stations.size() == 1);

    // A deterministic lone transmitter triggers the burst.
    auto burst_source = make_wake_on_success_source(4, 3);
    const auto trial2 = run_simulation(make_scripted_factory({1.0, 0.0}, false),
                                       *burst_source, config, 1);
    // Station 0 succeeds at round 1; the other three wake at round 2 and
    // all transmit at their local round 1 (round 3): collision forever.
    CHECK(trial2.stations.size() == 4);
    CHECK(trial2.stations[0].first_success == 1);
    CHECK(trial2.stations[1].activation == 1);
}
