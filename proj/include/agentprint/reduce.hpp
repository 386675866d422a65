#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include <agentprint/corpus.hpp>
#include <agentprint/features.hpp>

namespace agentprint {

struct ReductionConfig {
    double correlation_threshold = 0.70;
    double r2_threshold = 0.90;
    double epv_minimum = 10.0;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// Pearson correlation between columns. Constant columns correlate 0 with
/// everything else and 1 with themselves. Requires at least two rows.
Eigen::MatrixXd correlation_matrix(const FeatureMatrix& matrix);

struct FeatureCluster {
    std::vector<std::size_t> members; // column indices, ascending
    std::size_t representative = 0;

    bool operator==(const FeatureCluster&) const = default;
};

/// Average-linkage agglomerative clustering on |rho|: the two clusters
/// with the highest mean cross-pair |rho| are merged while that mean is
/// >= threshold (dendrogram cut at distance 1 - threshold). Ties go to the
/// pair with the lowest first-member indices. Clusters are returned in
/// order of their first member; representative is left unset.
std::vector<std::vector<std::size_t>> cluster_features(const Eigen::MatrixXd& corr, double threshold);

/// Mean |rho| between two member sets.
double average_linkage(const Eigen::MatrixXd& corr, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

struct RepresentativeSelection {
    std::vector<FeatureCluster> clusters;
    std::vector<std::size_t> kept;    // ascending column order
    std::vector<std::size_t> dropped; // ascending column order
};

/// Keeps, per cluster, the member with the lowest mean |rho| to every
/// feature outside the cluster; ties resolve to the lowest column index.
RepresentativeSelection select_representatives(const std::vector<std::vector<std::size_t>>& clusters, const Eigen::MatrixXd& corr);

struct R2Result {
    std::map<std::string, double> r2_scores; // R^2 at drop time for dropped features, final for kept
    std::vector<std::string> dropped;        // in drop order
    std::vector<std::string> kept;           // input order
};

/// R^2 of each column regressed (OLS with intercept, ridge 1e-8 on the
/// normal equations) on all other columns of `matrix`.
std::vector<double> r2_scores(const FeatureMatrix& matrix);

/// Greedy elimination: while the highest R^2 exceeds `threshold`, drop that
/// feature and refit. Scores within 1e-9 of the highest count as tied and
/// the last tied column goes. Throws std::invalid_argument when rows <= columns + 1
/// or every column is constant.
R2Result r2_redundancy(const FeatureMatrix& matrix, double threshold);

struct EpvEntry {
    std::size_t samples = 0;
    double epv = 0.0;
    bool flagged = false; // epv < minimum
};

using EpvTable = std::map<Agent, EpvEntry>;

/// samples / n_features for every agent; throws for n_features == 0.
EpvTable epv_check(const ClassCounts& counts, std::size_t n_features, double epv_minimum = 10.0);

struct ReductionReport {
    ReductionConfig config;
    std::vector<std::string> features; // input feature order
    std::vector<std::vector<std::string>> clusters;
    std::vector<std::string> representatives; // parallel to clusters
    std::vector<std::string> dropped_step1;
    std::map<std::string, double> r2_scores;
    std::vector<std::string> dropped_step2;
    std::vector<std::string> kept;
    EpvTable epv_table;
};

ReductionReport reduce_features(const FeatureMatrix& matrix, const ReductionConfig& config);

nlohmann::json report_to_json(const ReductionReport& report);
ReductionReport report_from_json(const nlohmann::json& j);

} // namespace agentprint
