#pragma once

#include <span>

namespace contres {

// Exact probability that at least `target` distinct stations transmit
// successfully within `horizon` rounds, for k batch-started stations
// running a fixed per-round probability script with switch-off on
// acknowledgement. Computed by exhaustive enumeration of the per-round
// outcome distribution; deliberately independent of the simulation
// engine so it can serve as its oracle.
double enumerate_success_probability(std::span<const double> script, bool hold_last,
                                     int k, int horizon, int target);

} // namespace contres
