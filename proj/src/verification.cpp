#include "contres/verification.hpp"

#include <cmath>
#include <sstream>

#include "contres/adaptive.hpp"
#include "contres/adversary.hpp"
#include "contres/engine.hpp"
#include "contres/experiments.hpp"
#include "contres/oracle.hpp"
#include "contres/scripted.hpp"

namespace contres {

namespace {

CheckResult check(const std::string& name, bool passed, const std::string& detail = "") {
    return {name, passed, detail};
}

CheckResult channel_table() {
    bool ok = true;
    std::ostringstream detail;
    // m = 0
    std::vector<std::pair<std::int64_t, Action>> none{{0, Action::listen()},
                                                      {1, Action::listen()}};
    ok &= arbitrate(none).kind == OutcomeKind::Silence;
    // m = 1
    std::vector<std::pair<std::int64_t, Action>> one{
        {0, Action::transmit(Message::data(0))}, {1, Action::listen()}};
    const auto success = arbitrate(one);
    ok &= success.kind == OutcomeKind::Success && success.sender == 0;
    // m in {2, 5}
    for (int m : {2, 5}) {
        std::vector<std::pair<std::int64_t, Action>> many;
        for (int i = 0; i < m; ++i) {
            many.emplace_back(i, Action::transmit(Message::data(i)));
        }
        many.emplace_back(m, Action::listen());
        const auto outcome = arbitrate(many);
        ok &= outcome.kind == OutcomeKind::Collision && outcome.transmitter_count == m;
        // listener feedback identical to silence
        const auto fb = feedback_for(outcome, Action::listen(), false);
        const auto fb_silent = feedback_for(RoundOutcome::silence(), Action::listen(), false);
        ok &= fb.kind == fb_silent.kind && fb.kind == FeedbackKind::NothingHeard;
    }
    ok &= feedback_for(success, one[0].second, true).kind == FeedbackKind::Acked;
    ok &= feedback_for(success, Action::listen(), false).kind == FeedbackKind::Heard;
    return check("channel arbitration/feedback table", ok);
}

CheckResult fact31_grid() {
    for (std::int64_t k = 4; k <= (1 << 20); k *= 2) {
        for (int c = 1; c <= 16; ++c) {
            if (nak_total_rounds(k, c) >= 3 * c * k) {
                return check("fact 3.1 schedule length", false,
                             "violated at k=" + std::to_string(k) + " c=" + std::to_string(c));
            }
        }
    }
    for (std::int64_t k = 4; k <= 4096; ++k) {
        if (nak_total_rounds(k, 1) >= 3 * k) {
            return check("fact 3.1 schedule length", false,
                         "violated at k=" + std::to_string(k));
        }
    }
    return check("fact 3.1 schedule length", true);
}

CheckResult probability_ranges() {
    for (const std::int64_t k : {4, 16, 100, 1024}) {
        double prev = 0.0;
        const std::int64_t total = nak_total_rounds(k, 2);
        for (std::int64_t i = 1; i <= total; ++i) {
            const double p = nak_probability(i, k, 2);
            if (p <= 0.0 || p > 0.5 || p < prev) {
                return check("nak probabilities in (0,1/2], non-decreasing", false,
                             "k=" + std::to_string(k) + " i=" + std::to_string(i));
            }
            prev = p;
        }
    }
    double prev = 1.0;
    for (std::int64_t i = 1; i <= 5000; ++i) {
        const double p = sublinear_probability(i, 3);
        if (p <= 0.0 || p > prev) {
            return check("sublinear probabilities positive, non-increasing", false,
                         "i=" + std::to_string(i));
        }
        prev = p;
    }
    return check("probability schedule ranges", true);
}

CheckResult fact51_grid() {
    for (const int b : {1, 2, 4}) {
        const SublinearSchedule schedule(b);
        const auto p = schedule.prob_sequence();
        for (const std::int64_t i : {100, 1000, 10000}) {
            const double s = cumulative_sum(p, i);
            const double bound = b * std::pow(std::log(static_cast<double>(i) / b), 2);
            if (!(s < bound)) {
                return check("fact 5.1 cumulative bound", false,
                             "b=" + std::to_string(b) + " i=" + std::to_string(i));
            }
        }
    }
    return check("fact 5.1 cumulative bound", true);
}

CheckResult sigma_domination(std::uint64_t seed) {
    ExperimentConfig config;
    config.protocol = ProtocolSpec::parse("sublinear");
    config.protocol.b = 2;
    config.adversary = AdversarySpec::parse("trickle:3");
    config.k = 12;
    config.trials = 1;
    config.master_seed = seed;
    config.record_traces = true;
    const auto trials = run_trials(config);
    const auto& trial = trials.front();
    const auto p = config.protocol.prob_sequence(config.k);
    std::vector<std::int64_t> activations;
    for (const auto& s : trial.stations) activations.push_back(s.activation);
    const auto sigma = sigma_series(trial, p);
    const auto sigma_hat = sigma_hat_series(activations, p, trial.rounds_used);
    for (std::int64_t t = 1; t <= trial.rounds_used; ++t) {
        if (sigma_hat[static_cast<std::size_t>(t)] <
            sigma[static_cast<std::size_t>(t)] - 1e-12) {
            return check("sigma_hat dominates sigma", false, "round " + std::to_string(t));
        }
    }
    return check("sigma_hat dominates sigma", true);
}

CheckResult no_transmission_after_ack(std::uint64_t seed) {
    ExperimentConfig config;
    config.protocol = ProtocolSpec::parse("sublinear");
    config.protocol.b = 1;
    config.adversary = AdversarySpec::parse("batch");
    config.k = 8;
    config.trials = 4;
    config.master_seed = seed;
    config.record_traces = true;
    for (const auto& trial : run_trials(config)) {
        for (const auto& rec : trial.trace->rounds) {
            for (const auto& [id, msg] : rec.transmitters) {
                const auto& st = trial.stations[static_cast<std::size_t>(id)];
                if (st.first_success && rec.round > *st.first_success) {
                    return check("switch-off after acknowledgement", false,
                                 "station " + std::to_string(id) + " transmitted at round " +
                                     std::to_string(rec.round));
                }
            }
        }
    }
    return check("switch-off after acknowledgement", true);
}

CheckResult determinism(std::uint64_t seed) {
    ExperimentConfig config;
    config.protocol = ProtocolSpec::parse("adaptive");
    config.adversary = AdversarySpec::parse("trickle:2");
    config.k = 10;
    config.trials = 2;
    config.master_seed = seed;
    config.record_traces = true;
    auto render = [&]() {
        std::ostringstream out;
        for (const auto& trial : run_trials(config)) write_trace(out, trial);
        return out.str();
    };
    const std::string a = render();
    const std::string b = render();
    return check("determinism: identical seeds give identical traces", a == b);
}

CheckResult blocking_verify() {
    const SublinearSchedule schedule(1);
    BlockingInstanceConfig cfg;
    cfg.k = 8192;
    cfg.gamma = 3.0;
    cfg.p1 = schedule.probability(1);
    RngStream rng(7);
    const auto instance = blocking_instance(cfg, rng);
    const std::int64_t t1 = cfg.k / cfg.per_round();
    const auto result = verify_sigma_hat(instance, schedule.prob_sequence(),
                                         3.0 * std::log2(8192.0), 1, t1, cfg.k);
    std::ostringstream detail;
    detail << "min sigma_hat = " << result.min_value << " at round " << result.argmin_round;
    return check("blocking instance sigma_hat floor", result.ok, detail.str());
}

CheckResult oracle_agreement(std::uint64_t seed) {
    const std::vector<double> script{0.5, 0.5};
    const double exact = enumerate_success_probability(script, true, 2, 2, 1);
    const int trials = 20000;
    ExperimentConfig config;
    config.protocol.family = ProtocolFamily::Scripted;
    config.protocol.script = script;
    config.protocol.script_hold_last = true;
    config.adversary = AdversarySpec::parse("batch");
    config.k = 2;
    config.trials = trials;
    config.master_seed = seed;
    config.max_rounds = 2;
    const auto results = run_trials(config);
    const double measured = whp_fraction(results, [](const TrialResult& trial) {
        for (const auto& s : trial.stations) {
            if (s.first_success && *s.first_success <= 2) return true;
        }
        return false;
    });
    const double se = std::sqrt(exact * (1.0 - exact) / trials);
    std::ostringstream detail;
    detail << "exact " << exact << ", measured " << measured << ", se " << se;
    return check("Monte Carlo matches exhaustive enumeration",
                 std::abs(measured - exact) <= 4.0 * se, detail.str());
}

CheckResult always_transmit_never_succeeds(std::uint64_t seed) {
    ExperimentConfig config;
    config.protocol.family = ProtocolFamily::Scripted;
    config.protocol.script = {1.0};
    config.protocol.script_hold_last = true;
    config.adversary = AdversarySpec::parse("batch");
    config.k = 2;
    config.trials = 1;
    config.master_seed = seed;
    config.max_rounds = 64;
    const auto trial = run_trials(config).front();
    return check("perpetual collision never completes",
                 !trial.completed && !trial.all_delivered() &&
                     trial.rounds_used == 64);
}

CheckResult adaptive_epochs(std::uint64_t seed) {
    ExperimentConfig config;
    config.protocol = ProtocolSpec::parse("adaptive");
    config.adversary = AdversarySpec::parse("batch");
    config.k = 8;
    config.trials = 8;
    config.master_seed = seed;
    config.record_traces = true;
    for (const auto& trial : run_trials(config)) {
        if (!trial.completed) {
            return check("adaptive epochs", false, "trial did not complete");
        }
        const auto report = extract_epochs(*trial.trace);
        if (!report.violations.empty()) {
            return check("adaptive epochs", false, report.violations.front());
        }
        if (report.epochs.size() != 1 || !report.disjoint) {
            return check("adaptive epochs", false, "batch run should form one epoch");
        }
    }
    return check("adaptive epochs", true);
}

} // namespace

std::vector<CheckResult> run_verification_suite(std::uint64_t seed) {
    std::vector<CheckResult> results;
    results.push_back(channel_table());
    results.push_back(fact31_grid());
    results.push_back(probability_ranges());
    results.push_back(fact51_grid());
    results.push_back(sigma_domination(seed));
    results.push_back(no_transmission_after_ack(seed + 1));
    results.push_back(determinism(seed + 2));
    results.push_back(blocking_verify());
    results.push_back(oracle_agreement(seed + 3));
    results.push_back(always_transmit_never_succeeds(seed + 4));
    results.push_back(adaptive_epochs(seed + 5));
    return results;
}

} // namespace contres
