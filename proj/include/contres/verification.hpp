#pragma once

#include <string>
#include <vector>

namespace contres {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// The deterministic + small-Monte-Carlo invariant suite behind the
// `verify` subcommand. Every entry is self-contained and seeded.
std::vector<CheckResult> run_verification_suite(std::uint64_t seed);

} // namespace contres
