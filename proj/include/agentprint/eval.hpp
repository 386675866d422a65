#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include <agentprint/corpus.hpp>
#include <agentprint/features.hpp>
#include <agentprint/learn.hpp>

namespace agentprint {

struct FoldPlan {
    int k = 5;
    std::vector<int> assignments; // row -> fold id in [0, k)
    std::uint64_t seed = 42;

    std::vector<std::size_t> test_rows(int fold) const;
    std::vector<std::size_t> train_rows(int fold) const;
    bool operator==(const FoldPlan&) const = default;
};

/// Per class in registry order: shuffle that class's rows with the shared
/// seeded generator, then deal them round-robin. Each class starts dealing
/// where the previous one stopped so overall fold sizes stay balanced too.
/// Throws std::invalid_argument when k < 2 or a present class has fewer
/// than k rows.
FoldPlan stratified_folds(const std::vector<Agent>& labels, int k, std::uint64_t seed);

struct ConfusionMatrix {
    std::vector<Agent> classes;                   // registry order
    std::vector<std::vector<std::size_t>> counts; // [true][predicted]

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::vector<Agent> classes);

    void add(Agent truth, Agent predicted, std::size_t n = 1);
    std::size_t total() const;
    std::size_t index_of(Agent a) const;
    bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
    // Set when the metric had a zero denominator and was reported as 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

struct AverageMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct Metrics {
    std::vector<Agent> classes;
    std::vector<ClassMetrics> per_class; // parallel to classes
    AverageMetrics macro;                // over classes with support or predictions
    AverageMetrics weighted;             // support-weighted
    double accuracy = 0.0;
    std::vector<std::string> warnings;

    const ClassMetrics& of(Agent a) const;
};

/// Throws std::invalid_argument for an empty matrix.
Metrics metrics_from_confusion(const ConfusionMatrix& confusion);

struct EvaluationReport {
    Metrics metrics;
    ConfusionMatrix confusion;
    std::vector<double> per_fold_f1; // weighted F1 per fold, by fold id
    double f1_spread = 0.0;
    int k = 5;
    std::uint64_t seed = 42;
    std::size_t n_rows = 0;
    std::vector<std::string> feature_names;
    LearnerConfig learner;
};

/// Trains on k-1 folds and predicts the held-out fold, for every fold;
/// predictions are pooled into one confusion matrix. Folds run on up to
/// `jobs` threads. Training failures are rethrown as std::runtime_error
/// naming the fold.
EvaluationReport cross_validate(const FeatureMatrix& matrix, const LearnerConfig& learner, const FoldPlan& plan, int jobs = 1);

struct FeatureSetComparison {
    double f1_full = 0.0;
    double f1_reduced = 0.0;
    double delta = 0.0; // f1_full - f1_reduced
    std::size_t features_full = 0;
    std::size_t features_reduced = 0;
};

/// Throws std::invalid_argument when the matrices disagree on rows.
FeatureSetComparison compare_feature_sets(const FeatureMatrix& full, const FeatureMatrix& reduced,
    const LearnerConfig& learner, const FoldPlan& plan, int jobs = 1);

nlohmann::json metrics_to_json(const Metrics& metrics);
nlohmann::json confusion_to_json(const ConfusionMatrix& confusion);
nlohmann::json report_to_json(const EvaluationReport& report);
nlohmann::json comparison_to_json(const FeatureSetComparison& comparison);

/// `true\predicted` header row followed by one row per true class.
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& confusion);
/// Right-aligned grid for terminals.
std::string confusion_to_text(const ConfusionMatrix& confusion);

} // namespace agentprint
