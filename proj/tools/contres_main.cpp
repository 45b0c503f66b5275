// contres: contention-resolution protocol simulator for the anonymous
// multiple-access channel without collision detection.
//
// Subcommands: run (Monte Carlo batch), sweep (scaling table over a k
// grid), lowerbound (blocking-instance demo), verify (invariant suite),
// replay (byte-wise trace reproduction).

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "contres/adaptive.hpp"
#include "contres/config.hpp"
#include "contres/experiments.hpp"
#include "contres/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssert = 1;
constexpr int kExitConfig = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitReplayDiff = 4;

struct CommonFlags {
    std::string protocol = "sublinear";
    std::string adversary = "batch";
    std::int64_t k = 16;
    int c = 8;
    int b = 8;
    double q = 2.0;
    std::string ack = "on";
    int trials = 200;
    std::uint64_t seed = 1;
    std::int64_t max_rounds = 0;
    double eta = 1.0;
    int threads = 0;
    std::string config_file;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--protocol", f.protocol, "nak | sublinear | ds | sawtooth | adaptive | scripted:p1,p2,...");
    cmd->add_option("--adversary", f.adversary,
                    "batch | trickle:gap | uniform:horizon | blocking:variant,gamma[,t1,t2] | wake-on-success:burst");
    cmd->add_option("--k", f.k, "number of stations");
    cmd->add_option("--c", f.c, "NonAdaptiveWithK constant");
    cmd->add_option("--b", f.b, "SublinearDecrease constant");
    cmd->add_option("--q", f.q, "DecreaseSlowly constant");
    cmd->add_option("--ack", f.ack, "acknowledgements: on | off");
    cmd->add_option("--trials", f.trials, "Monte Carlo trials");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--max-rounds", f.max_rounds, "engine round cap (0 = default)");
    cmd->add_option("--eta", f.eta, "whp target exponent");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    cmd->add_option("--config", f.config_file, "flat key = value config file (flags override)");
}

// Defaults, then config file, then explicit flags.
contres::ExperimentConfig resolve(const CLI::App* cmd, const CommonFlags& f) {
    contres::ExperimentConfig config;
    if (!f.config_file.empty()) {
        for (const auto& [key, value] : contres::parse_flat_config(f.config_file)) {
            contres::apply_config_entry(config, key, value);
        }
    }
    auto flag_given = [cmd](const std::string& name) { return cmd->count(name) > 0; };
    if (flag_given("--protocol")) contres::apply_config_entry(config, "protocol", f.protocol);
    if (flag_given("--adversary")) config.adversary = contres::AdversarySpec::parse(f.adversary);
    if (flag_given("--k")) config.k = f.k;
    if (flag_given("--c")) config.protocol.c = f.c;
    if (flag_given("--b")) config.protocol.b = f.b;
    if (flag_given("--q")) config.protocol.q = f.q;
    if (flag_given("--ack")) {
        contres::apply_config_entry(config, "ack", f.ack);
    }
    if (flag_given("--trials")) config.trials = f.trials;
    if (flag_given("--seed")) config.master_seed = f.seed;
    if (flag_given("--max-rounds")) config.max_rounds = f.max_rounds;
    if (flag_given("--eta")) config.eta = f.eta;
    if (flag_given("--threads")) config.threads = f.threads;
    return config;
}

void require_explicit_k(const CLI::App* cmd, const contres::ExperimentConfig& config,
                        const std::string& config_file) {
    if (!config.protocol.requires_k()) return;
    const bool from_flag = cmd->count("--k") > 0;
    bool from_file = false;
    if (!config_file.empty()) {
        from_file = contres::parse_flat_config(config_file).count("k") > 0;
    }
    if (!from_flag && !from_file) {
        throw contres::ContractViolation("protocol nak requires an explicit --k");
    }
}

std::string render_trace_file(const contres::ExperimentConfig& config,
                              const std::vector<contres::TrialResult>& results) {
    std::ostringstream out;
    contres::write_config_banner(out, config);
    for (std::size_t i = 0; i < results.size(); ++i) {
        out << "{\"type\":\"trial-start\",\"index\":" << i << "}\n";
        contres::write_trace(out, results[i]);
    }
    return out.str();
}

int cmd_run(const CLI::App* cmd, const CommonFlags& f, const std::string& output,
            const std::string& summary_path, bool record_traces,
            const std::string& trace_out, double assert_fraction,
            const std::string& export_schedule, std::int64_t export_rounds,
            const std::string& export_wakeup) {
    contres::ExperimentConfig config = resolve(cmd, f);
    require_explicit_k(cmd, config, f.config_file);
    config.record_traces = record_traces || !trace_out.empty();
    config.validate();

    if (!export_schedule.empty()) {
        std::ofstream out(export_schedule);
        const auto p = config.protocol.prob_sequence(config.k);
        std::int64_t rounds = export_rounds;
        if (rounds <= 0) {
            rounds = config.protocol.family == contres::ProtocolFamily::NonAdaptiveWithK
                         ? contres::nak_total_rounds(config.k, config.protocol.c)
                         : 512;
        }
        contres::export_schedule_csv(out, p, rounds);
    }
    if (!export_wakeup.empty()) {
        if (config.adversary.kind == contres::AdversaryKind::WakeOnSuccess) {
            throw contres::ContractViolation("wake-on-success has no static schedule to export");
        }
        const std::uint64_t trial_seed = contres::derive_trial_seed(config.master_seed, 0);
        contres::RngStream rng = contres::adversary_stream(trial_seed);
        double p1 = 0.0;
        if (config.adversary.kind == contres::AdversaryKind::Blocking) {
            p1 = config.protocol.prob_sequence(config.k)(1);
        }
        contres::BlockingInstanceConfig bc;
        std::ofstream out(export_wakeup);
        switch (config.adversary.kind) {
            case contres::AdversaryKind::Batch:
                contres::export_schedule_csv(out, contres::batch_schedule(config.k));
                break;
            case contres::AdversaryKind::Trickle:
                contres::export_schedule_csv(
                    out, contres::trickle_schedule(config.k, config.adversary.gap));
                break;
            case contres::AdversaryKind::Uniform:
                contres::export_schedule_csv(
                    out, contres::uniform_random_schedule(config.k, config.adversary.horizon, rng));
                break;
            case contres::AdversaryKind::Blocking:
                bc.k = config.k;
                bc.gamma = config.adversary.gamma;
                bc.p1 = p1;
                bc.t1 = config.adversary.t1;
                bc.t2 = config.adversary.t2;
                bc.variant = config.adversary.variant;
                contres::export_schedule_csv(out, contres::blocking_instance(bc, rng));
                break;
            case contres::AdversaryKind::WakeOnSuccess:
                break;
        }
    }

    const auto results = contres::run_trials(config);
    const auto summary = contres::summarize(config, results);

    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!output.empty() && output != "-") {
        file_out.open(output);
        if (!file_out) throw contres::ContractViolation("cannot open output '" + output + "'");
        out = &file_out;
    }
    contres::write_config_banner(*out, config);
    for (std::size_t i = 0; i < results.size(); ++i) {
        contres::write_trial_ndjson(*out, static_cast<std::int64_t>(i), results[i]);
    }
    if (!summary_path.empty()) {
        std::ofstream sout(summary_path);
        contres::write_summary_csv(sout, config, summary);
    }
    if (!trace_out.empty()) {
        std::ofstream tout(trace_out, std::ios::binary);
        tout << render_trace_file(config, results);
    }
    std::cerr << "completed " << summary.completed_fraction * 100.0 << "% of "
              << config.trials << " trials (whp target " << summary.whp_target << ")\n";
    if (assert_fraction >= 0.0 && summary.completed_fraction < assert_fraction) {
        std::cerr << "assertion failed: completed fraction "
                  << summary.completed_fraction << " < " << assert_fraction << "\n";
        return kExitAssert;
    }
    return kExitOk;
}

int cmd_sweep(const CLI::App* cmd, const CommonFlags& f, const std::string& grid_text,
              const std::string& metric_name, double tolerance) {
    contres::ExperimentConfig base = resolve(cmd, f);
    std::vector<std::int64_t> grid;
    {
        std::istringstream in(grid_text);
        std::string item;
        while (std::getline(in, item, ',')) grid.push_back(std::stoll(item));
    }

    using Spec = contres::ProtocolFamily;
    auto latency_bound = [&](std::int64_t k) -> double {
        const double kd = static_cast<double>(k);
        switch (base.protocol.family) {
            case Spec::NonAdaptiveWithK: return kd;
            case Spec::AdaptiveNoK: return kd;
            case Spec::DecreaseSlowly: return kd;
            case Spec::Sawtooth: return kd;
            case Spec::SublinearDecrease: {
                const double ln = std::log(kd);
                return base.protocol.ack_mode == contres::AckMode::SwitchOffOnAck
                           ? kd * ln * ln / std::log(ln)
                           : kd * ln * ln;
            }
            case Spec::Scripted: return kd;
        }
        return kd;
    };
    auto energy_bound = [&](std::int64_t k) -> double {
        const double kd = static_cast<double>(k);
        const double lg = std::log2(kd);
        switch (base.protocol.family) {
            case Spec::NonAdaptiveWithK: return kd * lg;
            case Spec::SublinearDecrease: return kd * lg * lg;
            case Spec::AdaptiveNoK: return kd * lg * lg;
            default: return kd * lg;
        }
    };

    auto metric = [&](std::int64_t k) -> double {
        contres::ExperimentConfig config = base;
        config.k = k;
        config.master_seed = contres::RngStream::mix(base.master_seed ^ static_cast<std::uint64_t>(k));
        const auto results = contres::run_trials(config);
        std::vector<double> values;
        values.reserve(results.size());
        for (const auto& trial : results) {
            if (metric_name == "energy") {
                values.push_back(static_cast<double>(contres::energy_of(trial)));
            } else {
                const auto lat = contres::latency_of(trial).max;
                values.push_back(lat ? static_cast<double>(*lat)
                                     : std::numeric_limits<double>::infinity());
            }
        }
        return contres::median(std::move(values));
    };

    const auto report = contres::scaling_check(
        grid, metric,
        metric_name == "energy" ? std::function<double(std::int64_t)>(energy_bound)
                                : std::function<double(std::int64_t)>(latency_bound),
        tolerance);
    std::cout << "protocol " << base.protocol.name() << ", adversary "
              << base.adversary.name() << ", metric " << metric_name << " (median)\n";
    std::cout << "k,metric,bound,ratio\n";
    for (const auto& point : report.points) {
        std::cout << point.k << ',' << point.metric << ',' << point.bound << ','
                  << point.ratio << '\n';
    }
    std::cout << "fitted_C=" << report.fitted_c << " spread=" << report.spread
              << " tolerance=" << tolerance
              << (report.within_tolerance ? " OK" : " EXCEEDED") << '\n';
    return kExitOk;
}

int cmd_lowerbound(std::int64_t k, double gamma, int b, int trials, std::uint64_t seed,
                   const std::string& variant, std::int64_t t1, std::int64_t t2) {
    const contres::BlockingVariant v = variant == "twophase"
                                           ? contres::BlockingVariant::TwoPhaseJk
                                           : contres::BlockingVariant::FrontLoaded;
    const auto report = contres::blocking_experiment(k, gamma, b, trials, seed, v, t1, t2);
    std::cout << "variant=" << variant << " k=" << k << " gamma=" << gamma << " b=" << b
              << " r=" << report.per_round << " window=[1," << report.window_end << "]\n";
    std::cout << "sigma_hat_min=" << report.verify.min_value << " at round "
              << report.verify.argmin_round << " (threshold " << report.threshold << ")\n";
    std::cout << "zero_success_fraction=" << report.zero_success_fraction << " over "
              << report.trials << " trials\n";
    return kExitOk;
}

int cmd_verify(std::uint64_t seed) {
    bool all = true;
    for (const auto& result : contres::run_verification_suite(seed)) {
        std::cout << (result.passed ? "[PASS] " : "[FAIL] ") << result.name;
        if (!result.detail.empty()) std::cout << " — " << result.detail;
        std::cout << '\n';
        all &= result.passed;
    }
    return all ? kExitOk : kExitAssert;
}

int cmd_replay(const std::string& input) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw contres::ContractViolation("cannot open trace file '" + input + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string stored = buffer.str();

    std::istringstream first_line(stored.substr(0, stored.find('\n')));
    std::string banner;
    std::getline(first_line, banner);
    if (banner.find("{\"type\":\"config\"") != 0) {
        throw contres::ContractViolation("trace file does not start with a config banner");
    }
    // The banner is flat key:value JSON produced by ourselves; strip the
    // braces and re-apply each entry through the config parser.
    contres::ExperimentConfig config;
    std::string body = banner.substr(banner.find(',') + 1);
    body.pop_back(); // trailing '}'
    std::istringstream fields(body);
    std::string field;
    while (std::getline(fields, field, ',')) {
        const auto colon = field.find(':');
        std::string key = field.substr(0, colon);
        std::string value = field.substr(colon + 1);
        auto strip = [](std::string& s) {
            if (!s.empty() && s.front() == '"') s = s.substr(1, s.size() - 2);
        };
        strip(key);
        strip(value);
        contres::apply_config_entry(config, key, value);
    }
    config.record_traces = true;
    config.validate();

    const auto results = contres::run_trials(config);
    const std::string regenerated = render_trace_file(config, results);
    if (regenerated != stored) {
        std::cerr << "replay mismatch: regenerated trace differs from stored trace\n";
        return kExitReplayDiff;
    }
    std::cout << "replay ok: " << results.size() << " trial(s), byte-identical\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contention resolution simulator for the shared channel"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string run_output;
    std::string run_summary;
    bool run_record_traces = false;
    std::string run_trace_out;
    double run_assert = -1.0;
    std::string run_export_schedule;
    std::int64_t run_export_rounds = 0;
    std::string run_export_wakeup;
    auto* run = app.add_subcommand("run", "run one Monte Carlo experiment");
    add_common(run, run_flags);
    run->add_option("--output", run_output, "NDJSON output path (default stdout)");
    run->add_option("--summary", run_summary, "summary CSV path");
    run->add_flag("--record-traces", run_record_traces, "keep full traces in memory");
    run->add_option("--trace-out", run_trace_out, "write a replayable trace file");
    run->add_option("--assert", run_assert, "exit 1 unless completed fraction >= this");
    run->add_option("--export-schedule", run_export_schedule, "write (i, p(i)) CSV");
    run->add_option("--export-rounds", run_export_rounds, "rows for --export-schedule");
    run->add_option("--export-wakeup", run_export_wakeup, "write (round, count) CSV");

    CommonFlags sweep_flags;
    std::string sweep_grid = "16,64,256";
    std::string sweep_metric = "latency";
    double sweep_tolerance = 2.0;
    auto* sweep = app.add_subcommand("sweep", "scaling check over a k grid");
    add_common(sweep, sweep_flags);
    sweep->add_option("--k-grid", sweep_grid, "comma-separated k values (>= 3, doubling)");
    sweep->add_option("--metric", sweep_metric, "latency | energy");
    sweep->add_option("--tolerance", sweep_tolerance, "max allowed ratio spread");

    std::int64_t lb_k = 8192;
    double lb_gamma = 3.0;
    int lb_b = 1;
    int lb_trials = 100;
    std::uint64_t lb_seed = 1;
    std::string lb_variant = "frontloaded";
    std::int64_t lb_t1 = 0;
    std::int64_t lb_t2 = 0;
    auto* lower = app.add_subcommand("lowerbound", "blocking-instance demo");
    lower->add_option("--k", lb_k, "stations");
    lower->add_option("--gamma", lb_gamma, "threshold multiplier");
    lower->add_option("--b", lb_b, "SublinearDecrease constant");
    lower->add_option("--trials", lb_trials, "trials");
    lower->add_option("--seed", lb_seed, "master seed");
    lower->add_option("--variant", lb_variant, "frontloaded | twophase");
    lower->add_option("--t1", lb_t1, "phase-1 horizon");
    lower->add_option("--t2", lb_t2, "phase-2 horizon (twophase)");

    std::uint64_t verify_seed = 2024;
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_option("--seed", verify_seed, "suite seed");

    std::string replay_input;
    auto* replay = app.add_subcommand("replay", "re-execute a stored trace file and diff");
    replay->add_option("--input", replay_input, "trace file from run --trace-out")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(run, run_flags, run_output, run_summary, run_record_traces,
                           run_trace_out, run_assert, run_export_schedule,
                           run_export_rounds, run_export_wakeup);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep, sweep_flags, sweep_grid, sweep_metric, sweep_tolerance);
        }
        if (lower->parsed()) {
            return cmd_lowerbound(lb_k, lb_gamma, lb_b, lb_trials, lb_seed, lb_variant,
                                  lb_t1, lb_t2);
        }
        if (verify->parsed()) return cmd_verify(verify_seed);
        if (replay->parsed()) return cmd_replay(replay_input);
    } catch (const contres::HypothesisFailure& e) {
        std::cerr << "hypothesis not met: " << e.what() << '\n';
        return kExitHypothesis;
    } catch (const contres::ContractViolation& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
