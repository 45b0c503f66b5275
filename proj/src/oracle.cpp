#include "contres/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace contres {

namespace {

double round_probability(std::span<const double> script, bool hold_last, int round) {
    const auto n = static_cast<int>(script.size());
    if (round <= n) return script[static_cast<std::size_t>(round - 1)];
    return hold_last ? script.back() : 0.0;
}

double binomial(int n, int j) {
    double c = 1.0;
    for (int i = 0; i < j; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return c;
}

// Stations are anonymous and batch-synchronized, so the full outcome
// tree collapses to (round, still-contending count, successes so far).
double recurse(std::span<const double> script, bool hold_last, int horizon, int target,
               int round, int contending, int successes) {
    if (successes >= target) return 1.0;
    if (round > horizon || contending == 0) return 0.0;
    const double p = round_probability(script, hold_last, round);
    double total = 0.0;
    for (int j = 0; j <= contending; ++j) {
        const double weight = binomial(contending, j) * std::pow(p, j) *
                              std::pow(1.0 - p, contending - j);
        if (weight == 0.0) continue;
        const bool success = j == 1;
        total += weight * recurse(script, hold_last, horizon, target, round + 1,
                                  contending - (success ? 1 : 0),
                                  successes + (success ? 1 : 0));
    }
    return total;
}

} // namespace

double enumerate_success_probability(std::span<const double> script, bool hold_last,
                                     int k, int horizon, int target) {
    if (script.empty()) throw std::invalid_argument("oracle: empty script");
    if (k < 1 || horizon < 1 || target < 0) {
        throw std::invalid_argument("oracle: bad parameters");
    }
    return recurse(script, hold_last, horizon, target, 1, k, 0);
}

} // namespace contres
