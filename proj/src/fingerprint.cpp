#include <agentprint/fingerprint.hpp>

#include <agentprint/hash.hpp>
#include <agentprint/parallel.hpp>

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace agentprint {

std::optional<long> RankShift::shift() const
{
    if (!global_rank)
        return std::nullopt;
    return static_cast<long>(*global_rank) - static_cast<long>(ovr_rank);
}

FingerprintReport build_fingerprints(const FeatureMatrix& matrix, const GbmConfig& config, std::size_t top_k, int jobs)
{
    if (top_k == 0)
        throw std::invalid_argument("top_k must be >= 1");

    FingerprintReport report;
    report.config = config;
    report.top_k = top_k;
    report.corpus.rows = matrix.n_rows();
    report.corpus.feature_names = matrix.feature_names();
    for (Agent a : matrix.labels())
        ++report.corpus.class_counts[a];

    TreeEnsembleModel global = train_gbm(matrix, config, jobs);
    report.global_ranking = importance(global);
    report.global_model_ref = sha256_hex(model_to_json(global).dump());

    std::vector<Agent> agents;
    for (const auto& [agent, count] : report.corpus.class_counts)
        agents.push_back(agent);

    std::vector<AgentFingerprint> fps(agents.size());
    parallel_for(agents.size(), jobs, [&](std::size_t i) {
        try {
            TreeEnsembleModel model = train_one_vs_rest(matrix, agents[i], config);
            auto shares = importance(model);
            AgentFingerprint& fp = fps[i];
            fp.agent = agents[i];
            for (const auto& s : shares)
                fp.share_total += s.share;
            if (shares.size() > top_k)
                shares.resize(top_k);
            fp.top_features = std::move(shares);
            fp.model_ref = sha256_hex(model_to_json(model).dump());
        } catch (const std::exception& e) {
            throw std::runtime_error("one-vs-rest for " + std::string(agent_name(agents[i])) + ": " + e.what());
        }
    });

    for (auto& fp : fps) {
        report.rank_shifts[fp.agent] = rank_shift(report.global_ranking, fp);
        report.per_agent[fp.agent] = std::move(fp);
    }
    return report;
}

std::vector<RankShift> rank_shift(const std::vector<FeatureShare>& global, const AgentFingerprint& agent_fp)
{
    std::vector<RankShift> out;
    for (std::size_t i = 0; i < agent_fp.top_features.size(); ++i) {
        RankShift rs;
        rs.feature = agent_fp.top_features[i].feature;
        rs.ovr_rank = i + 1;
        auto it = std::find_if(global.begin(), global.end(), [&](const FeatureShare& s) { return s.feature == rs.feature; });
        if (it != global.end())
            rs.global_rank = static_cast<std::size_t>(it - global.begin()) + 1;
        out.push_back(std::move(rs));
    }
    return out;
}

namespace {

nlohmann::json shares_to_json(const std::vector<FeatureShare>& shares)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : shares)
        out.push_back({{"feature", s.feature}, {"gain_share", s.share}});
    return out;
}

} // namespace

nlohmann::json fingerprint_to_json(const FingerprintReport& report)
{
    using nlohmann::json;
    json per_agent = json::object();
    for (const auto& [agent, fp] : report.per_agent) {
        json shifts = json::array();
        for (const auto& rs : report.rank_shifts.at(agent)) {
            shifts.push_back({
                {"feature", rs.feature},
                {"ovr_rank", rs.ovr_rank},
                {"global_rank", rs.global_rank ? json(*rs.global_rank) : json(nullptr)},
                {"shift", rs.shift() ? json(*rs.shift()) : json(nullptr)},
            });
        }
        per_agent[std::string(agent_name(agent))] = {
            {"top_features", shares_to_json(fp.top_features)},
            {"share_total", fp.share_total},
            {"model_ref", fp.model_ref},
            {"rank_shift", shifts},
        };
    }
    json counts = json::object();
    for (const auto& [agent, n] : report.corpus.class_counts)
        counts[std::string(agent_name(agent))] = n;

    return {
        {"global_ranking", shares_to_json(report.global_ranking)},
        {"global_model_ref", report.global_model_ref},
        {"per_agent", per_agent},
        {"top_k", report.top_k},
        {"generated_at", report.generated_at ? json(*report.generated_at) : json(nullptr)},
        {"corpus", {
            {"rows", report.corpus.rows},
            {"feature_names", report.corpus.feature_names},
            {"class_counts", counts},
        }},
        {"learner", config_to_json(report.config)},
    };
}

void write_fingerprint_csv(std::ostream& out, const AgentFingerprint& fp)
{
    out << "feature,share\n";
    for (const auto& s : fp.top_features)
        out << s.feature << ',' << format_number(s.share) << '\n';
}

} // namespace agentprint
