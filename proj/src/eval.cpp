#include <agentprint/eval.hpp>

#include <agentprint/parallel.hpp>

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace agentprint {

std::vector<std::size_t> FoldPlan::test_rows(int fold) const
{
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < assignments.size(); ++r) {
        if (assignments[r] == fold)
            rows.push_back(r);
    }
    return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const
{
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < assignments.size(); ++r) {
        if (assignments[r] != fold)
            rows.push_back(r);
    }
    return rows;
}

FoldPlan stratified_folds(const std::vector<Agent>& labels, int k, std::uint64_t seed)
{
    if (k < 2)
        throw std::invalid_argument("fold count must be >= 2");
    std::array<std::vector<std::size_t>, kAgentCount> by_class;
    for (std::size_t r = 0; r < labels.size(); ++r)
        by_class[agent_index(labels[r])].push_back(r);
    for (Agent a : kAllAgents) {
        auto n = by_class[agent_index(a)].size();
        if (n > 0 && n < static_cast<std::size_t>(k))
            throw std::invalid_argument("class " + std::string(agent_name(a)) + " has " + std::to_string(n)
                + " rows, fewer than " + std::to_string(k) + " folds");
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(labels.size(), -1);
    std::mt19937_64 rng(seed);
    std::size_t dealt = 0;
    for (auto& rows : by_class) {
        std::shuffle(rows.begin(), rows.end(), rng);
        for (std::size_t i = 0; i < rows.size(); ++i)
            plan.assignments[rows[i]] = static_cast<int>((dealt + i) % static_cast<std::size_t>(k));
        dealt += rows.size();
    }
    return plan;
}

ConfusionMatrix::ConfusionMatrix(std::vector<Agent> cls)
    : classes(std::move(cls))
    , counts(classes.size(), std::vector<std::size_t>(classes.size(), 0))
{
}

std::size_t ConfusionMatrix::index_of(Agent a) const
{
    auto it = std::find(classes.begin(), classes.end(), a);
    if (it == classes.end())
        throw std::invalid_argument("class " + std::string(agent_name(a)) + " is not in the confusion matrix");
    return static_cast<std::size_t>(it - classes.begin());
}

void ConfusionMatrix::add(Agent truth, Agent predicted, std::size_t n)
{
    counts[index_of(truth)][index_of(predicted)] += n;
}

std::size_t ConfusionMatrix::total() const
{
    std::size_t t = 0;
    for (const auto& row : counts) {
        for (auto c : row)
            t += c;
    }
    return t;
}

const ClassMetrics& Metrics::of(Agent a) const
{
    auto it = std::find(classes.begin(), classes.end(), a);
    if (it == classes.end())
        throw std::invalid_argument("no metrics for " + std::string(agent_name(a)));
    return per_class[static_cast<std::size_t>(it - classes.begin())];
}

Metrics metrics_from_confusion(const ConfusionMatrix& confusion)
{
    const std::size_t k = confusion.classes.size();
    const std::size_t total = confusion.total();
    if (k == 0 || total == 0)
        throw std::invalid_argument("metrics of an empty confusion matrix");

    Metrics m;
    m.classes = confusion.classes;
    m.per_class.resize(k);
    std::size_t correct = 0;
    std::size_t macro_classes = 0;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t row = 0, col = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row += confusion.counts[i][j];
            col += confusion.counts[j][i];
        }
        const auto tp = static_cast<double>(confusion.counts[i][i]);
        correct += confusion.counts[i][i];
        ClassMetrics& c = m.per_class[i];
        c.support = row;
        const std::string name(agent_name(confusion.classes[i]));
        if (col == 0) {
            c.precision_undefined = true;
            m.warnings.push_back(name + ": precision undefined (no predictions), reported as 0");
        } else {
            c.precision = tp / static_cast<double>(col);
        }
        if (row == 0) {
            c.recall_undefined = true;
            m.warnings.push_back(name + ": recall undefined (no support), reported as 0");
        } else {
            c.recall = tp / static_cast<double>(row);
        }
        if (c.precision + c.recall > 0.0) {
            c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
        } else {
            c.f1_undefined = true;
            m.warnings.push_back(name + ": F1 undefined, reported as 0");
        }

        if (row > 0 || col > 0) {
            ++macro_classes;
            m.macro.precision += c.precision;
            m.macro.recall += c.recall;
            m.macro.f1 += c.f1;
        }
        const auto w = static_cast<double>(row);
        m.weighted.precision += w * c.precision;
        m.weighted.recall += w * c.recall;
        m.weighted.f1 += w * c.f1;
    }
    const auto n = static_cast<double>(total);
    m.macro.precision /= static_cast<double>(macro_classes);
    m.macro.recall /= static_cast<double>(macro_classes);
    m.macro.f1 /= static_cast<double>(macro_classes);
    m.weighted.precision /= n;
    m.weighted.recall /= n;
    m.weighted.f1 /= n;
    m.accuracy = static_cast<double>(correct) / n;
    return m;
}

namespace {

std::vector<Agent> classes_present(const FeatureMatrix& matrix)
{
    std::array<bool, kAgentCount> seen{};
    for (Agent a : matrix.labels())
        seen[agent_index(a)] = true;
    std::vector<Agent> out;
    for (Agent a : kAllAgents) {
        if (seen[agent_index(a)])
            out.push_back(a);
    }
    return out;
}

} // namespace

EvaluationReport cross_validate(const FeatureMatrix& matrix, const LearnerConfig& learner, const FoldPlan& plan, int jobs)
{
    if (plan.assignments.size() != matrix.n_rows())
        throw std::invalid_argument("fold plan covers " + std::to_string(plan.assignments.size()) + " rows, matrix has "
            + std::to_string(matrix.n_rows()));
    for (int f : plan.assignments) {
        if (f < 0 || f >= plan.k)
            throw std::invalid_argument("fold plan has an out-of-range fold id");
    }

    const auto classes = classes_present(matrix);
    const auto k = static_cast<std::size_t>(plan.k);
    std::vector<ConfusionMatrix> fold_confusion(k, ConfusionMatrix(classes));

    parallel_for(k, jobs, [&](std::size_t fold) {
        try {
            auto train_rows = plan.train_rows(static_cast<int>(fold));
            auto test_rows = plan.test_rows(static_cast<int>(fold));
            TreeEnsembleModel model = train(matrix.rows_subset(train_rows), learner, 1);
            for (auto r : test_rows)
                fold_confusion[fold].add(matrix.labels()[r], predict_class(model, matrix.row(r)));
        } catch (const std::exception& e) {
            throw std::runtime_error("fold " + std::to_string(fold) + ": " + e.what());
        }
    });

    EvaluationReport report;
    report.k = plan.k;
    report.seed = plan.seed;
    report.n_rows = matrix.n_rows();
    report.feature_names = matrix.feature_names();
    report.learner = learner;
    report.confusion = ConfusionMatrix(classes);
    for (std::size_t fold = 0; fold < k; ++fold) {
        const auto& fc = fold_confusion[fold];
        for (std::size_t i = 0; i < classes.size(); ++i) {
            for (std::size_t j = 0; j < classes.size(); ++j)
                report.confusion.counts[i][j] += fc.counts[i][j];
        }
        report.per_fold_f1.push_back(fc.total() == 0 ? 0.0 : metrics_from_confusion(fc).weighted.f1);
    }
    report.metrics = metrics_from_confusion(report.confusion);
    auto [lo, hi] = std::minmax_element(report.per_fold_f1.begin(), report.per_fold_f1.end());
    report.f1_spread = *hi - *lo;
    return report;
}

FeatureSetComparison compare_feature_sets(const FeatureMatrix& full, const FeatureMatrix& reduced,
    const LearnerConfig& learner, const FoldPlan& plan, int jobs)
{
    if (full.n_rows() != reduced.n_rows())
        throw std::invalid_argument("feature sets cover different rows (" + std::to_string(full.n_rows()) + " vs "
            + std::to_string(reduced.n_rows()) + ")");
    if (full.labels() != reduced.labels())
        throw std::invalid_argument("feature sets disagree on row labels");
    FeatureSetComparison c;
    c.f1_full = cross_validate(full, learner, plan, jobs).metrics.weighted.f1;
    c.f1_reduced = cross_validate(reduced, learner, plan, jobs).metrics.weighted.f1;
    c.delta = c.f1_full - c.f1_reduced;
    c.features_full = full.n_features();
    c.features_reduced = reduced.n_features();
    return c;
}

nlohmann::json confusion_to_json(const ConfusionMatrix& confusion)
{
    nlohmann::json classes = nlohmann::json::array();
    for (Agent a : confusion.classes)
        classes.push_back(std::string(agent_name(a)));
    return {{"classes", classes}, {"counts", confusion.counts}, {"total", confusion.total()}};
}

nlohmann::json metrics_to_json(const Metrics& metrics)
{
    using nlohmann::json;
    json per_class = json::object();
    for (std::size_t i = 0; i < metrics.classes.size(); ++i) {
        const auto& c = metrics.per_class[i];
        per_class[std::string(agent_name(metrics.classes[i]))] = {
            {"precision", c.precision},
            {"recall", c.recall},
            {"f1", c.f1},
            {"support", c.support},
        };
    }
    auto avg = [](const AverageMetrics& a) { return json{{"precision", a.precision}, {"recall", a.recall}, {"f1", a.f1}}; };
    return {
        {"per_class", per_class},
        {"macro", avg(metrics.macro)},
        {"weighted", avg(metrics.weighted)},
        {"accuracy", metrics.accuracy},
        {"warnings", metrics.warnings},
    };
}

nlohmann::json report_to_json(const EvaluationReport& report)
{
    auto j = metrics_to_json(report.metrics);
    j["confusion"] = confusion_to_json(report.confusion);
    j["per_fold_f1"] = report.per_fold_f1;
    j["f1_spread"] = report.f1_spread;
    j["folds"] = report.k;
    j["fold_seed"] = report.seed;
    j["n_rows"] = report.n_rows;
    j["feature_names"] = report.feature_names;
    j["learner"] = config_to_json(report.learner);
    return j;
}

nlohmann::json comparison_to_json(const FeatureSetComparison& c)
{
    return {
        {"f1_full", c.f1_full},
        {"f1_reduced", c.f1_reduced},
        {"delta", c.delta},
        {"features_full", c.features_full},
        {"features_reduced", c.features_reduced},
    };
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& confusion)
{
    out << "true\\predicted";
    for (Agent a : confusion.classes)
        out << ',' << agent_name(a);
    out << '\n';
    for (std::size_t i = 0; i < confusion.classes.size(); ++i) {
        out << agent_name(confusion.classes[i]);
        for (auto c : confusion.counts[i])
            out << ',' << c;
        out << '\n';
    }
}

std::string confusion_to_text(const ConfusionMatrix& confusion)
{
    std::size_t width = std::string_view("true\\pred").size();
    for (Agent a : confusion.classes)
        width = std::max(width, agent_name(a).size());
    for (const auto& row : confusion.counts) {
        for (auto c : row)
            width = std::max(width, std::to_string(c).size());
    }
    std::ostringstream out;
    out << std::setw(static_cast<int>(width)) << "true\\pred";
    for (Agent a : confusion.classes)
        out << "  " << std::setw(static_cast<int>(width)) << agent_name(a);
    out << '\n';
    for (std::size_t i = 0; i < confusion.classes.size(); ++i) {
        out << std::setw(static_cast<int>(width)) << agent_name(confusion.classes[i]);
        for (auto c : confusion.counts[i])
            out << "  " << std::setw(static_cast<int>(width)) << c;
        out << '\n';
    }
    return out.str();
}

} // namespace agentprint
