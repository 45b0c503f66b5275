#include "contres/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace contres {

std::int64_t ObliviousSchedule::total() const {
    std::int64_t sum = 0;
    for (const auto& [round, count] : entries) sum += count;
    return sum;
}

void ObliviousSchedule::validate() const {
    std::int64_t prev = -1;
    for (const auto& [round, count] : entries) {
        if (round < 0) throw ContractViolation("schedule round must be >= 0");
        if (count < 1) throw ContractViolation("schedule count must be >= 1");
        if (round < prev) throw ContractViolation("schedule rounds must be non-decreasing");
        prev = round;
    }
}

std::vector<std::int64_t> ObliviousSchedule::activation_rounds() const {
    std::vector<std::int64_t> rounds;
    rounds.reserve(static_cast<std::size_t>(total()));
    for (const auto& [round, count] : entries) {
        for (std::int64_t i = 0; i < count; ++i) rounds.push_back(round);
    }
    return rounds;
}

ObliviousSchedule batch_schedule(std::int64_t k) {
    if (k < 1) throw ContractViolation("batch_schedule: k must be >= 1");
    return {{{0, k}}};
}

ObliviousSchedule trickle_schedule(std::int64_t k, std::int64_t gap) {
    if (k < 1) throw ContractViolation("trickle_schedule: k must be >= 1");
    if (gap < 0) throw ContractViolation("trickle_schedule: gap must be >= 0");
    if (gap == 0) return batch_schedule(k);
    ObliviousSchedule schedule;
    schedule.entries.reserve(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) schedule.entries.emplace_back(i * gap, 1);
    return schedule;
}

ObliviousSchedule uniform_random_schedule(std::int64_t k, std::int64_t horizon, RngStream& rng) {
    if (k < 1) throw ContractViolation("uniform_random_schedule: k must be >= 1");
    if (horizon < 1) throw ContractViolation("uniform_random_schedule: horizon must be >= 1");
    std::map<std::int64_t, std::int64_t> counts;
    for (std::int64_t i = 0; i < k; ++i) {
        ++counts[static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(horizon)))];
    }
    ObliviousSchedule schedule;
    schedule.entries.assign(counts.begin(), counts.end());
    return schedule;
}

std::int64_t BlockingInstanceConfig::per_round() const {
    if (k < 2) throw ContractViolation("blocking instance: k must be >= 2");
    if (p1 <= 0.0 || p1 > 1.0) throw ContractViolation("blocking instance: p1 must be in (0, 1]");
    if (gamma < 0.0) throw ContractViolation("blocking instance: gamma must be >= 0");
    const double r = std::ceil(gamma * std::log2(static_cast<double>(k)) / p1);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(r));
}

ObliviousSchedule blocking_instance(const BlockingInstanceConfig& config, RngStream& rng) {
    const std::int64_t r = config.per_round();
    ObliviousSchedule schedule;
    if (config.variant == BlockingVariant::FrontLoaded) {
        const std::int64_t t1 = config.t1 > 0 ? config.t1 : config.k / r;
        if (t1 < 1) {
            throw ContractViolation("blocking instance: budget k too small for one full round");
        }
        if (r * t1 > config.k) {
            throw ContractViolation("blocking instance: phase-1 budget exceeds k");
        }
        const std::int64_t leftover = config.k - r * t1;
        for (std::int64_t t = 0; t < t1; ++t) {
            schedule.entries.emplace_back(t, r + (t == t1 - 1 ? leftover : 0));
        }
        return schedule;
    }
    // TwoPhaseJk: phase-1 front load, phase-2 uniform spray over [0, t2).
    if (config.t1 < 1 || config.t2 < 1) {
        throw ContractViolation("blocking instance: TwoPhaseJk requires explicit t1 and t2");
    }
    if (2 * r * config.t1 > config.k) {
        throw ContractViolation("blocking instance: TwoPhaseJk needs r*t1 <= k/2");
    }
    std::map<std::int64_t, std::int64_t> counts;
    for (std::int64_t t = 0; t < config.t1; ++t) counts[t] += r;
    const std::int64_t remaining = config.k - r * config.t1;
    for (std::int64_t i = 0; i < remaining; ++i) {
        ++counts[static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(config.t2)))];
    }
    schedule.entries.assign(counts.begin(), counts.end());
    return schedule;
}

SigmaHatCheck verify_sigma_hat(const ObliviousSchedule& schedule, const ProbSequence& p,
                               double threshold, std::int64_t window_lo,
                               std::int64_t window_hi, std::int64_t k) {
    if (window_lo < 1 || window_hi < window_lo) {
        throw ContractViolation("verify_sigma_hat: bad window");
    }
    if (window_hi > k * k) {
        throw ContractViolation("verify_sigma_hat: window beyond k^2");
    }
    SigmaHatCheck check;
    check.min_value = std::numeric_limits<double>::infinity();
    for (std::int64_t t = window_lo; t <= window_hi; ++t) {
        double sum = 0.0;
        for (const auto& [round, count] : schedule.entries) {
            if (round < t) sum += static_cast<double>(count) * p(t - round);
        }
        if (sum < check.min_value) {
            check.min_value = sum;
            check.argmin_round = t;
        }
    }
    if (schedule.entries.empty()) {
        check.min_value = 0.0;
        check.argmin_round = window_lo;
    }
    check.ok = check.min_value >= threshold;
    return check;
}

ObliviousSource::ObliviousSource(ObliviousSchedule schedule) : schedule_(std::move(schedule)) {
    schedule_.validate();
    total_ = schedule_.total();
}

std::int64_t ObliviousSource::wake_at_boundary(std::int64_t round, const PublicHistory&) {
    // Entries with t_v == round - 1 activate now.
    std::int64_t woken = 0;
    while (next_entry_ < schedule_.entries.size() &&
           schedule_.entries[next_entry_].first == round - 1) {
        woken += schedule_.entries[next_entry_].second;
        ++next_entry_;
    }
    return woken;
}

namespace {

class WakeOnSuccessSource : public WakeupSource {
public:
    WakeOnSuccessSource(std::int64_t k, std::int64_t burst) : k_(k), burst_(burst) {
        if (k < 1) throw ContractViolation("wake_on_success: k must be >= 1");
        if (burst < 1) throw ContractViolation("wake_on_success: burst must be >= 1");
    }

    std::int64_t total() const override { return k_; }
    bool is_oblivious() const override { return false; }

    std::int64_t wake_at_boundary(std::int64_t round, const PublicHistory& history) override {
        std::int64_t want = 0;
        if (round == 1) want = 1;
        if (!history.outcomes.empty() &&
            history.outcomes.back().kind == OutcomeKind::Success) {
            want += burst_;
        }
        const std::int64_t grant = std::min(want, k_ - woken_);
        woken_ += grant;
        return grant;
    }

private:
    std::int64_t k_;
    std::int64_t burst_;
    std::int64_t woken_ = 0;
};

} // namespace

std::unique_ptr<WakeupSource> make_wake_on_success_source(std::int64_t k, std::int64_t burst) {
    return std::make_unique<WakeOnSuccessSource>(k, burst);
}

void export_schedule_csv(std::ostream& out, const ObliviousSchedule& schedule) {
    out << "round,count\n";
    for (const auto& [round, count] : schedule.entries) {
        out << round << ',' << count << '\n';
    }
}

} // namespace contres
