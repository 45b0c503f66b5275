#include "contres/config.hpp"

#include <fstream>
#include <sstream>

#include "contres/scripted.hpp"

namespace contres {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ContractViolation("invalid integer for " + what + ": '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ContractViolation("invalid number for " + what + ": '" + s + "'");
    }
}

} // namespace

ProtocolSpec ProtocolSpec::parse(const std::string& name) {
    ProtocolSpec spec;
    if (name == "nak") {
        spec.family = ProtocolFamily::NonAdaptiveWithK;
    } else if (name == "sublinear") {
        spec.family = ProtocolFamily::SublinearDecrease;
    } else if (name == "ds" || name == "decrease-slowly") {
        spec.family = ProtocolFamily::DecreaseSlowly;
    } else if (name == "sawtooth") {
        spec.family = ProtocolFamily::Sawtooth;
    } else if (name == "adaptive") {
        spec.family = ProtocolFamily::AdaptiveNoK;
    } else if (name.rfind("scripted:", 0) == 0) {
        spec.family = ProtocolFamily::Scripted;
        for (const auto& piece : split(name.substr(9), ',')) {
            spec.script.push_back(parse_double(piece, "scripted probability"));
        }
    } else {
        throw ContractViolation("unknown protocol '" + name + "'");
    }
    return spec;
}

std::string ProtocolSpec::name() const {
    switch (family) {
        case ProtocolFamily::NonAdaptiveWithK: return "nak";
        case ProtocolFamily::SublinearDecrease: return "sublinear";
        case ProtocolFamily::DecreaseSlowly: return "ds";
        case ProtocolFamily::Sawtooth: return "sawtooth";
        case ProtocolFamily::AdaptiveNoK: return "adaptive";
        case ProtocolFamily::Scripted: {
            std::ostringstream out;
            out << "scripted:";
            for (std::size_t i = 0; i < script.size(); ++i) {
                if (i) out << ',';
                out << script[i];
            }
            return out.str();
        }
    }
    return "?";
}

bool ProtocolSpec::non_adaptive() const {
    return family == ProtocolFamily::NonAdaptiveWithK ||
           family == ProtocolFamily::SublinearDecrease ||
           family == ProtocolFamily::Scripted;
}

ProbSequence ProtocolSpec::prob_sequence(std::int64_t k) const {
    switch (family) {
        case ProtocolFamily::NonAdaptiveWithK: return NakSchedule(k, c).prob_sequence();
        case ProtocolFamily::SublinearDecrease: return SublinearSchedule(b).prob_sequence();
        case ProtocolFamily::Scripted: {
            auto s = script;
            const bool hold = script_hold_last;
            return [s, hold](std::int64_t i) -> double {
                if (i < 1) throw ContractViolation("p(i) needs i >= 1");
                const auto n = static_cast<std::int64_t>(s.size());
                if (i <= n) return s[static_cast<std::size_t>(i - 1)];
                return hold ? s.back() : 0.0;
            };
        }
        default:
            throw ContractViolation("protocol '" + name() + "' has no non-adaptive p(i)");
    }
}

ProtocolFactory ProtocolSpec::make_factory(std::int64_t k) const {
    switch (family) {
        case ProtocolFamily::NonAdaptiveWithK: return make_nak_factory(k, c);
        case ProtocolFamily::SublinearDecrease: return make_sublinear_factory(b, ack_mode);
        case ProtocolFamily::DecreaseSlowly: return make_decrease_slowly_factory(q);
        case ProtocolFamily::Sawtooth: return make_sawtooth_factory(sawtooth_initial_phase);
        case ProtocolFamily::AdaptiveNoK: {
            AdaptiveNokConfig cfg;
            cfg.q = q;
            cfg.initial_phase = sawtooth_initial_phase;
            cfg.control_min_exp = control_min_exp;
            return make_adaptive_nok_factory(cfg);
        }
        case ProtocolFamily::Scripted:
            return make_scripted_factory(script, script_hold_last, ack_mode);
    }
    throw ContractViolation("unreachable protocol family");
}

AdversarySpec AdversarySpec::parse(const std::string& text) {
    AdversarySpec spec;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "batch") {
        spec.kind = AdversaryKind::Batch;
        if (!args.empty()) throw ContractViolation("batch takes no arguments");
    } else if (head == "trickle") {
        spec.kind = AdversaryKind::Trickle;
        spec.gap = args.empty() ? 1 : parse_int(args, "trickle gap");
    } else if (head == "uniform") {
        spec.kind = AdversaryKind::Uniform;
        if (args.empty()) throw ContractViolation("uniform needs a horizon");
        spec.horizon = parse_int(args, "uniform horizon");
    } else if (head == "wake-on-success") {
        spec.kind = AdversaryKind::WakeOnSuccess;
        spec.burst = args.empty() ? 1 : parse_int(args, "burst");
    } else if (head == "blocking") {
        spec.kind = AdversaryKind::Blocking;
        const auto parts = split(args, ',');
        if (parts.empty()) throw ContractViolation("blocking needs a variant");
        if (parts[0] == "frontloaded") {
            spec.variant = BlockingVariant::FrontLoaded;
        } else if (parts[0] == "twophase") {
            spec.variant = BlockingVariant::TwoPhaseJk;
        } else {
            throw ContractViolation("unknown blocking variant '" + parts[0] + "'");
        }
        if (parts.size() > 1) spec.gamma = parse_double(parts[1], "gamma");
        if (parts.size() > 2) spec.t1 = parse_int(parts[2], "t1");
        if (parts.size() > 3) spec.t2 = parse_int(parts[3], "t2");
        if (parts.size() > 4) throw ContractViolation("too many blocking arguments");
        if (spec.variant == BlockingVariant::TwoPhaseJk && (spec.t1 < 1 || spec.t2 < 1)) {
            throw ContractViolation("blocking:twophase needs t1 and t2");
        }
    } else {
        throw ContractViolation("unknown adversary '" + text + "'");
    }
    return spec;
}

std::string AdversarySpec::name() const {
    std::ostringstream out;
    switch (kind) {
        case AdversaryKind::Batch: return "batch";
        case AdversaryKind::Trickle: out << "trickle:" << gap; break;
        case AdversaryKind::Uniform: out << "uniform:" << horizon; break;
        case AdversaryKind::WakeOnSuccess: out << "wake-on-success:" << burst; break;
        case AdversaryKind::Blocking:
            out << "blocking:"
                << (variant == BlockingVariant::FrontLoaded ? "frontloaded" : "twophase")
                << ',' << gamma;
            if (t1 > 0 || t2 > 0) out << ',' << t1 << ',' << t2;
            break;
    }
    return out.str();
}

bool AdversarySpec::is_batch() const {
    return kind == AdversaryKind::Batch ||
           (kind == AdversaryKind::Trickle && gap == 0) ||
           (kind == AdversaryKind::Uniform && horizon == 1);
}

std::unique_ptr<WakeupSource> AdversarySpec::make_source(std::int64_t k, double p1,
                                                         RngStream& rng) const {
    switch (kind) {
        case AdversaryKind::Batch:
            return std::make_unique<ObliviousSource>(batch_schedule(k));
        case AdversaryKind::Trickle:
            return std::make_unique<ObliviousSource>(trickle_schedule(k, gap));
        case AdversaryKind::Uniform:
            return std::make_unique<ObliviousSource>(uniform_random_schedule(k, horizon, rng));
        case AdversaryKind::WakeOnSuccess:
            return make_wake_on_success_source(k, burst);
        case AdversaryKind::Blocking: {
            BlockingInstanceConfig cfg;
            cfg.k = k;
            cfg.gamma = gamma;
            cfg.p1 = p1;
            cfg.t1 = t1;
            cfg.t2 = t2;
            cfg.variant = variant;
            return std::make_unique<ObliviousSource>(blocking_instance(cfg, rng));
        }
    }
    throw ContractViolation("unreachable adversary kind");
}

void ExperimentConfig::validate() const {
    if (k < 1) throw ContractViolation("k must be >= 1");
    if (trials < 1) throw ContractViolation("trials must be >= 1");
    if (eta <= 0.0) throw ContractViolation("eta must be > 0");
    if (max_rounds < 0) throw ContractViolation("max-rounds must be >= 0");
    if (protocol.requires_k() && k < 4) {
        throw ContractViolation("protocol nak requires k >= 4");
    }
    if (protocol.family == ProtocolFamily::Sawtooth && !adversary.is_batch()) {
        throw ContractViolation(
            "sawtooth requires synchronized (batch) entry; use adversary=batch");
    }
}

std::map<std::string, std::string> ExperimentConfig::resolved() const {
    std::map<std::string, std::string> out;
    out["protocol"] = protocol.name();
    out["adversary"] = adversary.name();
    out["k"] = std::to_string(k);
    out["trials"] = std::to_string(trials);
    out["seed"] = std::to_string(master_seed);
    out["max-rounds"] = std::to_string(max_rounds);
    out["eta"] = std::to_string(eta);
    out["record-traces"] = record_traces ? "1" : "0";
    switch (protocol.family) {
        case ProtocolFamily::NonAdaptiveWithK:
            out["c"] = std::to_string(protocol.c);
            break;
        case ProtocolFamily::SublinearDecrease:
            out["b"] = std::to_string(protocol.b);
            out["ack"] = protocol.ack_mode == AckMode::SwitchOffOnAck ? "on" : "off";
            break;
        case ProtocolFamily::DecreaseSlowly:
            out["q"] = std::to_string(protocol.q);
            break;
        case ProtocolFamily::Sawtooth:
            out["sawtooth-initial-phase"] = std::to_string(protocol.sawtooth_initial_phase);
            break;
        case ProtocolFamily::AdaptiveNoK:
            out["q"] = std::to_string(protocol.q);
            out["sawtooth-initial-phase"] = std::to_string(protocol.sawtooth_initial_phase);
            out["control-min-exp"] = std::to_string(protocol.control_min_exp);
            break;
        case ProtocolFamily::Scripted:
            break;
    }
    return out;
}

std::map<std::string, std::string> parse_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("cannot open config file '" + path + "'");
    std::map<std::string, std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ContractViolation("config line is not key = value: '" + text + "'");
        }
        entries[trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
    }
    return entries;
}

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "protocol") {
        // Selects the family; numeric knobs (c, b, q, ...) are independent
        // keys and survive in whatever order they arrive.
        const ProtocolSpec parsed = ProtocolSpec::parse(value);
        config.protocol.family = parsed.family;
        config.protocol.script = parsed.script;
    } else if (key == "adversary") {
        config.adversary = AdversarySpec::parse(value);
    } else if (key == "k") {
        config.k = parse_int(value, key);
    } else if (key == "c") {
        config.protocol.c = static_cast<int>(parse_int(value, key));
    } else if (key == "b") {
        config.protocol.b = static_cast<int>(parse_int(value, key));
    } else if (key == "q") {
        config.protocol.q = parse_double(value, key);
    } else if (key == "ack") {
        if (value == "on") {
            config.protocol.ack_mode = AckMode::SwitchOffOnAck;
        } else if (value == "off") {
            config.protocol.ack_mode = AckMode::IgnoreAcks;
        } else {
            throw ContractViolation("ack must be 'on' or 'off'");
        }
    } else if (key == "sawtooth-initial-phase") {
        config.protocol.sawtooth_initial_phase = static_cast<int>(parse_int(value, key));
    } else if (key == "control-min-exp") {
        config.protocol.control_min_exp = static_cast<int>(parse_int(value, key));
    } else if (key == "trials") {
        config.trials = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
        config.master_seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "max-rounds") {
        config.max_rounds = parse_int(value, key);
    } else if (key == "eta") {
        config.eta = parse_double(value, key);
    } else if (key == "record-traces") {
        config.record_traces = value == "1" || value == "true";
    } else if (key == "threads") {
        config.threads = static_cast<int>(parse_int(value, key));
    } else {
        throw ContractViolation("unknown config key '" + key + "'");
    }
}

} // namespace contres
