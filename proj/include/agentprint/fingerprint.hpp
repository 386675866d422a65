#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <agentprint/corpus.hpp>
#include <agentprint/features.hpp>
#include <agentprint/learn.hpp>

namespace agentprint {

struct AgentFingerprint {
    Agent agent = Agent::OpenAICodex;
    std::vector<FeatureShare> top_features; // descending share, truncated to top_k
    double share_total = 0.0;               // sum over all features before truncation
    std::string model_ref;                  // SHA-256 of the one-vs-rest model JSON
};

struct RankShift {
    std::string feature;
    std::optional<std::size_t> global_rank; // 1-based; none when absent globally
    std::size_t ovr_rank = 0;               // 1-based

    /// global_rank - ovr_rank; positive means the feature is buried in the
    /// global ranking.
    std::optional<long> shift() const;
};

struct CorpusSummary {
    std::size_t rows = 0;
    std::vector<std::string> feature_names;
    std::map<Agent, std::size_t> class_counts;
};

struct FingerprintReport {
    std::vector<FeatureShare> global_ranking;
    std::string global_model_ref;
    std::map<Agent, AgentFingerprint> per_agent;
    std::map<Agent, std::vector<RankShift>> rank_shifts;
    std::optional<std::string> generated_at;
    CorpusSummary corpus;
    GbmConfig config;
    std::size_t top_k = 3;
};

/// One multi-class model for the global ranking plus one one-vs-rest model
/// per class present. The one-vs-rest fits run on up to `jobs` threads.
/// Training errors are rethrown as std::runtime_error naming the agent.
FingerprintReport build_fingerprints(const FeatureMatrix& matrix, const GbmConfig& config, std::size_t top_k = 3, int jobs = 1);

/// Global rank of each of the agent's top features.
std::vector<RankShift> rank_shift(const std::vector<FeatureShare>& global, const AgentFingerprint& agent_fp);

nlohmann::json fingerprint_to_json(const FingerprintReport& report);

/// `feature,share` rows for one agent.
void write_fingerprint_csv(std::ostream& out, const AgentFingerprint& fp);

} // namespace agentprint
