#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "contres/engine.hpp"
#include "contres/rng.hpp"

namespace contres {

// A wake-up schedule fixed before execution: (reference round t_v >= 0,
// count >= 1) entries with non-decreasing rounds summing to exactly k.
struct ObliviousSchedule {
    std::vector<std::pair<std::int64_t, std::int64_t>> entries;

    std::int64_t total() const;
    void validate() const; // throws ContractViolation on malformed schedules
    std::vector<std::int64_t> activation_rounds() const; // one t_v per station
};

ObliviousSchedule batch_schedule(std::int64_t k);
// Station i wakes at round (i-1)*gap; gap 0 degenerates to batch.
ObliviousSchedule trickle_schedule(std::int64_t k, std::int64_t gap);
// k activation rounds drawn independently uniform on [0, horizon).
ObliviousSchedule uniform_random_schedule(std::int64_t k, std::int64_t horizon, RngStream& rng);

enum class BlockingVariant { FrontLoaded, TwoPhaseJk };

// Lower-bound instance generator: wake r = ceil(gamma*log2(k)/p1)
// stations per round to pin sigma_hat above gamma*log2(k).
struct BlockingInstanceConfig {
    std::int64_t k = 0;
    double gamma = 3.0;
    double p1 = 0.0;     // the attacked protocol's first-round probability
    std::int64_t t1 = 0; // phase-1 horizon; FrontLoaded: 0 = floor(k/r)
    std::int64_t t2 = 0; // phase-2 horizon (TwoPhaseJk only)
    BlockingVariant variant = BlockingVariant::FrontLoaded;

    std::int64_t per_round() const; // r, clamped to >= 1
};

// FrontLoaded: r stations at each round of [0, T1), remainder folded
// into round T1-1. TwoPhaseJk: r per round over [0, t1), then the
// remaining >= k/2 stations uniform over [0, t2). Throws on budget
// violations.
ObliviousSchedule blocking_instance(const BlockingInstanceConfig& config, RngStream& rng);

struct SigmaHatCheck {
    bool ok = false;
    double min_value = 0.0;
    std::int64_t argmin_round = 0;
};

// Deterministically evaluates sigma_hat over [window_lo, window_hi]
// (window within [1, k^2]) and reports the minimum against threshold.
SigmaHatCheck verify_sigma_hat(const ObliviousSchedule& schedule, const ProbSequence& p,
                               double threshold, std::int64_t window_lo,
                               std::int64_t window_hi, std::int64_t k);

class ObliviousSource : public WakeupSource {
public:
    explicit ObliviousSource(ObliviousSchedule schedule);
    std::int64_t total() const override { return total_; }
    std::int64_t wake_at_boundary(std::int64_t round, const PublicHistory&) override;
    bool is_oblivious() const override { return true; }

private:
    ObliviousSchedule schedule_;
    std::int64_t total_ = 0;
    std::size_t next_entry_ = 0;
};

// Online strategy: one station at round 0, then `burst` more the round
// after every observed Success, until the budget runs out.
std::unique_ptr<WakeupSource> make_wake_on_success_source(std::int64_t k, std::int64_t burst);

// (round, count) rows.
void export_schedule_csv(std::ostream& out, const ObliviousSchedule& schedule);

} // namespace contres
