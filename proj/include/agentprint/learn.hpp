#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <agentprint/corpus.hpp>
#include <agentprint/features.hpp>

namespace agentprint {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    bool default_left = true; // inputs are never missing; kept for the file format
    double value = 0.0;       // leaf score (boosting) or class slot (forest)
    double gain = 0.0;        // realised split gain

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

/// Flat binary tree; node 0 is the root. Rows with x[feature] < threshold
/// go left.
struct Tree {
    std::vector<TreeNode> nodes;

    std::size_t leaf_for(std::span<const double> x) const;
    double predict(std::span<const double> x) const { return nodes[leaf_for(x)].value; }
    int depth() const;
    bool operator==(const Tree&) const = default;
};

struct GbmConfig {
    int n_rounds = 100;
    int max_depth = 6;
    double learning_rate = 0.3;
    double min_child_weight = 1.0;
    double l2_reg = 1.0;
    std::uint64_t seed = 42;

    void validate() const;
    bool operator==(const GbmConfig&) const = default;
};

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 10;
    int features_per_split = 0; // 0 = floor(sqrt(p))
    bool bootstrap = true;
    std::uint64_t seed = 42;

    void validate() const;
    bool operator==(const ForestConfig&) const = default;
};

using LearnerConfig = std::variant<GbmConfig, ForestConfig>;

enum class EnsembleKind { GradientBoosted, RandomForest };
enum class Objective { Softmax, Logistic, Vote };

struct TreeEnsembleModel {
    EnsembleKind kind = EnsembleKind::GradientBoosted;
    Objective objective = Objective::Softmax;
    // Softmax/Vote: one slot per class. Logistic: the single positive class;
    // outputs are {P(positive), P(rest)}.
    std::vector<Agent> classes;
    std::vector<std::string> feature_names;
    // Softmax: trees[class][round]. Logistic: trees[0][round].
    // Forest: trees[0][tree] with leaf values holding a class slot.
    std::vector<std::vector<Tree>> trees;
    std::vector<double> class_priors; // training frequencies per slot
    std::map<std::string, double> gain_totals;
    LearnerConfig config;
    std::vector<double> training_loss; // boosting: log-loss after each round
    std::optional<double> oob_accuracy;

    std::size_t n_outputs() const;
    std::vector<std::string> output_names() const;
    bool operator==(const TreeEnsembleModel&) const = default;
};

/// Multi-class softmax boosting with second-order (gradient + hessian)
/// regression trees and exact greedy split search.
TreeEnsembleModel train_gbm(const FeatureMatrix& matrix, const GbmConfig& config, int jobs = 1);

/// CART trees on bootstrap samples with Gini splits over a random feature
/// subset per node; prediction by vote share.
TreeEnsembleModel train_forest(const FeatureMatrix& matrix, const ForestConfig& config, int jobs = 1);

/// Binary logistic boosting of `target` against every other class.
TreeEnsembleModel train_one_vs_rest(const FeatureMatrix& matrix, Agent target, const GbmConfig& config);

TreeEnsembleModel train(const FeatureMatrix& matrix, const LearnerConfig& config, int jobs = 1);

/// Probability per output slot; sums to 1. Throws std::invalid_argument on
/// a width mismatch.
std::vector<double> predict(const TreeEnsembleModel& model, std::span<const double> x);

/// Arg-max class for softmax and forest models. Ties resolve to the higher
/// class prior (forest only), then registry order.
Agent predict_class(const TreeEnsembleModel& model, std::span<const double> x);

/// Mean multi-class (or binary) log-loss of the model on a matrix.
double log_loss(const TreeEnsembleModel& model, const FeatureMatrix& matrix);

struct FeatureShare {
    std::string feature;
    double share = 0.0;

    bool operator==(const FeatureShare&) const = default;
};

/// Gain totals normalised to sum 1, descending, ties in feature order.
/// Features without realised gain are omitted; top_k == 0 keeps all.
/// Throws std::logic_error for a model without trees.
std::vector<FeatureShare> importance(const TreeEnsembleModel& model, std::size_t top_k = 0);

/// Split gains accumulated along the decision paths of `x`, restricted to
/// the trees of `output` for softmax models. Normalised like importance().
std::vector<FeatureShare> path_contributions(const TreeEnsembleModel& model, std::span<const double> x, std::size_t output, std::size_t top_k = 0);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const TreeEnsembleModel& model);
/// Throws SchemaError on a malformed or unsupported document.
TreeEnsembleModel model_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const LearnerConfig& config);

} // namespace agentprint
