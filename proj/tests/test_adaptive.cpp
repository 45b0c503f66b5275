#include <doctest.h>

#include <cmath>

#include "contres/adaptive.hpp"
#include "contres/adversary.hpp"

using namespace contres;
using doctest::Approx;

TEST_CASE("decrease-slowly probabilities") {
    CHECK(ds_probability(0, 2.0) == Approx(0.5));
    CHECK(ds_probability(0, 0.7) == Approx(0.5));
    CHECK(ds_probability(1, 2.0) == Approx(0.4));
    CHECK(ds_probability(8, 2.0) == Approx(1.0 / 6.0));
    CHECK_THROWS_AS(ds_probability(-1, 2.0), ContractViolation);
    CHECK_THROWS_AS(ds_probability(0, 0.0), ContractViolation);
}

TEST_CASE("decrease-slowly station becomes leader on ack") {
    RngStream rng(1);
    DecreaseSlowlyStation station(2.0);
    CHECK_FALSE(station.is_leader());
    station.step(std::nullopt, 1, rng);
    const auto r = station.step(Feedback::acked(), 2, rng);
    CHECK(r.kind == StepResult::Kind::SwitchOff);
    CHECK(station.is_leader());
}

TEST_CASE("lone decrease-slowly station wakes up") {
    // Product of (1 - q/(2q+i)) goes to 0, so a lone station succeeds.
    ObliviousSource source(batch_schedule(1));
    SimulationConfig config;
    config.k = 1;
    config.stop_after_first_success = true;
    const auto trial =
        run_simulation(make_decrease_slowly_factory(2.0), source, config, 77);
    CHECK(trial.completed);
    CHECK(trial.stations[0].first_success.has_value());
}

TEST_CASE("sawtooth subwindow layout") {
    // phase 1: [2, 1] (3 slots); phase 2: [4, 2, 1]; phase 3: [8, 4, 2, 1].
    RngStream rng(5);
    SawtoothState state(1);
    std::vector<std::int64_t> expected_sizes;
    for (int phase = 1; phase <= 5; ++phase) {
        for (std::int64_t w = static_cast<std::int64_t>(1) << phase; w >= 1; w /= 2) {
            expected_sizes.push_back(w);
        }
    }
    // phase 3 alone spans 15 slots
    CHECK(((1 << 4) - 1) == 15);
    for (const std::int64_t w : expected_sizes) {
        int transmissions = 0;
        for (std::int64_t s = 0; s < w; ++s) {
            if (state.advance(rng)) ++transmissions;
        }
        CHECK(state.subwindow == w);
        CHECK(transmissions == 1); // exactly one slot chosen per subwindow
    }
}

TEST_CASE("lone synchronized sawtooth station delivers in its first subwindow") {
    ObliviousSource source(batch_schedule(1));
    SimulationConfig config;
    config.k = 1;
    const auto trial = run_simulation(make_sawtooth_factory(1), source, config, 13);
    REQUIRE(trial.completed);
    REQUIRE(trial.stations[0].first_success.has_value());
    CHECK(*trial.stations[0].first_success <= 2); // first subwindow has 2 slots
    CHECK(trial.stations[0].transmissions == 1);
}

TEST_CASE("adaptive station exits Waiting only on silence or a heard probe") {
    RngStream rng(3);
    AdaptiveNokConfig cfg;

    SUBCASE("four silent rounds enter L") {
        AdaptiveNokStation station(cfg);
        CHECK(station.step(std::nullopt, 1, rng).kind == StepResult::Kind::Listen);
        for (int i = 2; i <= 4; ++i) {
            CHECK(station.step(Feedback::nothing(), i, rng).kind ==
                  StepResult::Kind::Listen);
            CHECK(station.mode() == AdaptiveNokStation::Mode::Waiting);
        }
        station.step(Feedback::nothing(), 5, rng);
        CHECK(station.mode() == AdaptiveNokStation::Mode::L);
    }
    SUBCASE("a heard D-mode marker restarts the window") {
        AdaptiveNokStation station(cfg);
        station.step(std::nullopt, 1, rng);
        station.step(Feedback::heard(Message::control(0)), 2, rng);
        station.step(Feedback::nothing(), 3, rng);
        station.step(Feedback::nothing(), 4, rng);
        station.step(Feedback::nothing(), 5, rng);
        CHECK(station.mode() == AdaptiveNokStation::Mode::Waiting);
    }
    SUBCASE("a heard data message keeps the station waiting") {
        AdaptiveNokStation station(cfg);
        station.step(std::nullopt, 1, rng);
        station.step(Feedback::heard(Message::data(9)), 2, rng);
        station.step(Feedback::nothing(), 3, rng);
        station.step(Feedback::nothing(), 4, rng);
        station.step(Feedback::nothing(), 5, rng);
        CHECK(station.mode() == AdaptiveNokStation::Mode::Waiting);
    }
    SUBCASE("a heard 'anybody out there' probe releases the station") {
        AdaptiveNokStation station(cfg);
        station.step(std::nullopt, 1, rng);
        station.step(Feedback::heard(Message::control(0)), 2, rng);
        station.step(Feedback::heard(Message::control(1)), 3, rng);
        station.step(Feedback::nothing(), 4, rng);
        station.step(Feedback::nothing(), 5, rng);
        CHECK(station.mode() == AdaptiveNokStation::Mode::L);
    }
}

TEST_CASE("waiting stations never transmit") {
    RngStream rng(9);
    AdaptiveNokStation station(AdaptiveNokConfig{});
    auto r = station.step(std::nullopt, 1, rng);
    CHECK(r.kind == StepResult::Kind::Listen);
    for (int i = 2; i <= 40; ++i) {
        // keep feeding data so the station stays in Waiting
        r = station.step(Feedback::heard(Message::data(1)), i, rng);
        CHECK(r.kind == StepResult::Kind::Listen);
        CHECK(station.mode() == AdaptiveNokStation::Mode::Waiting);
    }
}

TEST_CASE("follower enters dissemination synchronized at tc = 1") {
    RngStream rng(11);
    AdaptiveNokConfig cfg;
    AdaptiveNokStation station(cfg);
    station.step(std::nullopt, 1, rng);
    for (int i = 2; i <= 5; ++i) station.step(Feedback::nothing(), i, rng);
    REQUIRE(station.mode() == AdaptiveNokStation::Mode::L);
    // Someone else wins the election: we heard their packet.
    station.step(Feedback::heard(Message::data(3)), 6, rng);
    CHECK(station.mode() == AdaptiveNokStation::Mode::D);
    CHECK_FALSE(station.is_leader());
    // tc = 2 is the first probe round (x >= 1): every D station transmits bit 1.
    const auto r = station.step(Feedback::nothing(), 7, rng);
    CHECK(r.kind == StepResult::Kind::TransmitControl);
    CHECK(r.bit == 1);
}

TEST_CASE("lone adaptive station: one epoch ending at the first probe") {
    ObliviousSource source(batch_schedule(1));
    SimulationConfig config;
    config.k = 1;
    config.record_trace = true;
    const auto trial =
        run_simulation(make_adaptive_nok_factory(AdaptiveNokConfig{}), source, config, 21);
    REQUIRE(trial.completed);
    const auto report = extract_epochs(*trial.trace);
    CHECK(report.violations.empty());
    REQUIRE(report.epochs.size() == 1);
    const auto& epoch = report.epochs[0];
    CHECK(epoch.members.empty());
    // D mode ends at the first control round, tc = 2
    CHECK(epoch.end_round - epoch.election_round == 2);
    CHECK(trial.stations[0].first_success == epoch.election_round);
}

TEST_CASE("batch adaptive run forms one clean epoch") {
    ObliviousSource source(batch_schedule(8));
    SimulationConfig config;
    config.k = 8;
    config.record_trace = true;
    const auto trial =
        run_simulation(make_adaptive_nok_factory(AdaptiveNokConfig{}), source, config, 33);
    REQUIRE(trial.completed);
    CHECK(trial.all_delivered());
    const auto report = extract_epochs(*trial.trace);
    CHECK(report.violations.empty());
    CHECK(report.disjoint);
    REQUIRE(report.epochs.size() == 1);
    CHECK(report.epochs[0].members.size() == 7);
}

TEST_CASE("trickle arrivals spanning epochs stay disjoint") {
    // Wide gaps: each station finishes its epoch before the next wakes.
    ObliviousSource source(trickle_schedule(3, 40));
    SimulationConfig config;
    config.k = 3;
    config.record_trace = true;
    const auto trial =
        run_simulation(make_adaptive_nok_factory(AdaptiveNokConfig{}), source, config, 5);
    REQUIRE(trial.completed);
    const auto report = extract_epochs(*trial.trace);
    CHECK(report.violations.empty());
    CHECK(report.disjoint);
    CHECK(report.epochs.size() == 3);
}

TEST_CASE("probe cadence follows the configured exponent") {
    // control_min_exp = 2 makes tc = 2 an ordinary leader round.
    RngStream rng(17);
    AdaptiveNokConfig cfg;
    cfg.control_min_exp = 2;
    AdaptiveNokStation station(cfg);
    station.step(std::nullopt, 1, rng);
    for (int i = 2; i <= 5; ++i) station.step(Feedback::nothing(), i, rng);
    station.step(Feedback::heard(Message::data(3)), 6, rng); // follower, tc = 1
    const auto at_tc2 = station.step(Feedback::nothing(), 7, rng);
    CHECK(at_tc2.kind == StepResult::Kind::Listen); // followers idle on plain even rounds
    station.step(Feedback::nothing(), 8, rng);      // tc = 3: sawtooth slot
    const auto at_tc4 = station.step(Feedback::nothing(), 9, rng);
    CHECK(at_tc4.kind == StepResult::Kind::TransmitControl);
    CHECK(at_tc4.bit == 1);
}
