#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <agentprint/corpus.hpp>

namespace agentprint {

// Generator for the bundled fixture corpus. Every agent shares the same
// style distributions except for one injected signature feature.
struct SyntheticConfig {
    ClassCounts counts = {1000, 500, 500, 300, 200};
    std::uint64_t seed = 42;
};

/// Feature name each agent's records were built to stand out on.
const std::map<Agent, std::string>& synthetic_signatures();

/// Deterministic for a given config on every platform (the generator does
/// not use the implementation-defined standard distributions).
std::vector<PullRequestRecord> generate_synthetic_corpus(const SyntheticConfig& config = {});

} // namespace agentprint
