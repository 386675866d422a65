#include <agentprint/eval.hpp>

#include <doctest.h>

#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace agentprint;

namespace {

std::vector<std::vector<std::size_t>> per_fold_class_counts(const std::vector<Agent>& labels, const FoldPlan& plan)
{
    std::vector<std::vector<std::size_t>> c(kAgentCount, std::vector<std::size_t>(static_cast<std::size_t>(plan.k), 0));
    for (std::size_t r = 0; r < labels.size(); ++r)
        ++c[static_cast<std::size_t>(labels[r])][static_cast<std::size_t>(plan.assignments[r])];
    return c;
}

GbmConfig rounds(int n)
{
    GbmConfig c;
    c.n_rounds = n;
    return c;
}

FeatureMatrix drop_column(const FeatureMatrix& m, std::size_t col)
{
    auto names = m.feature_names();
    names.erase(names.begin() + static_cast<std::ptrdiff_t>(col));
    FeatureMatrix out(names);
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        auto row = m.row(r);
        std::vector<double> v(row.begin(), row.end());
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(col));
        out.add_row(v, m.labels()[r], m.pr_ids()[r]);
    }
    return out;
}

} // namespace

TEST_CASE("fold examples")
{
    std::vector<Agent> labels;
    for (int i = 0; i < 5; ++i)
        labels.push_back(Agent::Devin);
    for (int i = 0; i < 5; ++i)
        labels.push_back(Agent::Cursor);
    auto plan = stratified_folds(labels, 5, 42);
    auto c = per_fold_class_counts(labels, plan);
    for (int f = 0; f < 5; ++f) {
        CHECK(c[static_cast<std::size_t>(Agent::Devin)][static_cast<std::size_t>(f)] == 1);
        CHECK(c[static_cast<std::size_t>(Agent::Cursor)][static_cast<std::size_t>(f)] == 1);
        CHECK(plan.test_rows(f).size() == 2);
        CHECK(plan.train_rows(f).size() == 8);
    }

    std::vector<Agent> seven(7, Agent::OpenAICodex);
    auto p7 = stratified_folds(seven, 5, 1);
    auto c7 = per_fold_class_counts(seven, p7)[0];
    for (auto n : c7)
        CHECK((n == 1 || n == 2));

    CHECK(stratified_folds(labels, 5, 42) == plan);
    CHECK_THROWS_AS(stratified_folds(labels, 1, 42), std::invalid_argument);
    CHECK_THROWS_AS(stratified_folds(seven, 8, 42), std::invalid_argument);
}

TEST_CASE("fold balance property")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> count(0, 60);
    std::uniform_int_distribution<int> kdist(2, 10);
    for (int trial = 0; trial < 200; ++trial) {
        int k = kdist(rng);
        std::vector<Agent> labels;
        for (Agent a : kAllAgents) {
            std::size_t n = count(rng);
            if (n > 0 && n < static_cast<std::size_t>(k))
                n = static_cast<std::size_t>(k);
            labels.insert(labels.end(), n, a);
        }
        if (labels.empty())
            continue;
        std::shuffle(labels.begin(), labels.end(), rng);
        auto plan = stratified_folds(labels, k, rng());
        REQUIRE(plan.assignments.size() == labels.size());
        for (const auto& row : per_fold_class_counts(labels, plan)) {
            auto [lo, hi] = std::minmax_element(row.begin(), row.end());
            CHECK(*hi - *lo <= 1);
        }
        std::size_t covered = 0;
        for (int f = 0; f < k; ++f)
            covered += plan.test_rows(f).size();
        CHECK(covered == labels.size());
    }
}

TEST_CASE("identity confusion")
{
    ConfusionMatrix c({Agent::OpenAICodex, Agent::Copilot, Agent::Devin});
    c.add(Agent::OpenAICodex, Agent::OpenAICodex, 4);
    c.add(Agent::Copilot, Agent::Copilot, 2);
    c.add(Agent::Devin, Agent::Devin, 9);
    auto m = metrics_from_confusion(c);
    for (const auto& k : m.per_class) {
        CHECK(k.precision == 1.0);
        CHECK(k.recall == 1.0);
        CHECK(k.f1 == 1.0);
    }
    CHECK(m.macro.f1 == 1.0);
    CHECK(m.weighted.f1 == 1.0);
    CHECK(m.accuracy == 1.0);
    CHECK(m.warnings.empty());
}

TEST_CASE("hand-computed three-class averages")
{
    // rows = true, columns = predicted
    ConfusionMatrix c({Agent::OpenAICodex, Agent::Copilot, Agent::Devin});
    c.counts = {{5, 1, 0}, {2, 3, 1}, {0, 0, 4}};
    auto m = metrics_from_confusion(c);
    // F1 = 2 tp / (support + predicted)
    const double f1[] = {10.0 / 13.0, 6.0 / 10.0, 8.0 / 9.0};
    const double prec[] = {5.0 / 7.0, 3.0 / 4.0, 4.0 / 5.0};
    const double rec[] = {5.0 / 6.0, 3.0 / 6.0, 4.0 / 4.0};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(m.per_class[i].f1 - f1[i]) <= 1e-12);
        CHECK(std::abs(m.per_class[i].precision - prec[i]) <= 1e-12);
        CHECK(std::abs(m.per_class[i].recall - rec[i]) <= 1e-12);
    }
    CHECK(std::abs(m.macro.f1 - (f1[0] + f1[1] + f1[2]) / 3.0) <= 1e-12);
    CHECK(std::abs(m.macro.precision - (prec[0] + prec[1] + prec[2]) / 3.0) <= 1e-12);
    CHECK(std::abs(m.weighted.f1 - (6 * f1[0] + 6 * f1[1] + 4 * f1[2]) / 16.0) <= 1e-12);
    CHECK(std::abs(m.weighted.recall - 12.0 / 16.0) <= 1e-12); // weighted recall is accuracy
    CHECK(std::abs(m.accuracy - 12.0 / 16.0) <= 1e-12);
}

TEST_CASE("claude row: precision 0.82, recall 0.57")
{
    // tp 4674 over 5700 predicted and 8200 actual: precision 0.82, recall 0.57
    ConfusionMatrix c({Agent::OpenAICodex, Agent::ClaudeCode});
    c.add(Agent::ClaudeCode, Agent::ClaudeCode, 4674);
    c.add(Agent::ClaudeCode, Agent::OpenAICodex, 3526);
    c.add(Agent::OpenAICodex, Agent::ClaudeCode, 1026);
    c.add(Agent::OpenAICodex, Agent::OpenAICodex, 20000);
    auto k = metrics_from_confusion(c).of(Agent::ClaudeCode);
    CHECK(k.precision == doctest::Approx(0.82).epsilon(1e-12));
    CHECK(k.recall == doctest::Approx(0.57).epsilon(1e-12));
    CHECK(std::abs(k.f1 - 0.67) <= 0.005);
    CHECK(k.f1 == doctest::Approx(2 * 0.82 * 0.57 / 1.39));
}

TEST_CASE("single class all correct")
{
    ConfusionMatrix c({Agent::OpenAICodex, Agent::Devin});
    c.add(Agent::OpenAICodex, Agent::OpenAICodex, 10);
    auto m = metrics_from_confusion(c);
    CHECK(m.of(Agent::OpenAICodex).f1 == 1.0);
    const auto& d = m.of(Agent::Devin);
    CHECK(d.f1 == 0.0);
    CHECK(d.precision_undefined);
    CHECK(d.recall_undefined);
    CHECK(d.f1_undefined);
    CHECK(m.warnings.size() == 3);
    CHECK(m.macro.f1 == 1.0); // Devin has neither support nor predictions
    CHECK_THROWS_AS(metrics_from_confusion(ConfusionMatrix({Agent::Devin})), std::invalid_argument);
    CHECK_THROWS_AS(c.add(Agent::Cursor, Agent::Devin), std::invalid_argument);
}

TEST_CASE("metrics are invariant under class permutation")
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> cell(0, 50);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Agent> classes(kAllAgents.begin(), kAllAgents.end());
        ConfusionMatrix a(classes);
        for (auto& row : a.counts)
            for (auto& x : row)
                x = cell(rng);
        std::vector<Agent> shuffled = classes;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        ConfusionMatrix b(shuffled);
        for (Agent t : classes)
            for (Agent p : classes)
                b.add(t, p, a.counts[a.index_of(t)][a.index_of(p)]);
        auto ma = metrics_from_confusion(a);
        auto mb = metrics_from_confusion(b);
        for (Agent x : classes) {
            CHECK(ma.of(x).f1 == mb.of(x).f1);
            CHECK(ma.of(x).precision == mb.of(x).precision);
        }
        CHECK(ma.weighted.f1 == doctest::Approx(mb.weighted.f1).epsilon(1e-12));
        CHECK(ma.macro.f1 == doctest::Approx(mb.macro.f1).epsilon(1e-12));

        double weighted = 0;
        for (std::size_t i = 0; i < ma.per_class.size(); ++i)
            weighted += static_cast<double>(ma.per_class[i].support) * ma.per_class[i].f1;
        CHECK(std::abs(ma.weighted.f1 - weighted / static_cast<double>(a.total())) <= 1e-12);
    }
}

TEST_CASE("separable corpus scores perfectly")
{
    auto m = generators::one_feature_per_class(5);
    auto plan = stratified_folds(m.labels(), 5, 42);
    auto report = cross_validate(m, rounds(20), plan);
    CHECK(report.metrics.weighted.f1 == 1.0);
    CHECK(report.confusion.total() == m.n_rows());
    CHECK(report.per_fold_f1.size() == 5);
    CHECK(report.f1_spread == 0.0);
}

TEST_CASE("shuffled labels score at chance")
{
    auto m = generators::random_labels(11, 1000, 5, 6);
    auto report = cross_validate(m, GbmConfig{}, stratified_folds(m.labels(), 5, 42));
    CHECK(std::abs(report.metrics.weighted.f1 - 0.2) <= 0.05);
    auto [lo, hi] = std::minmax_element(report.per_fold_f1.begin(), report.per_fold_f1.end());
    CHECK(report.f1_spread == doctest::Approx(*hi - *lo));
}

TEST_CASE("cross validation is thread-count independent")
{
    auto m = generators::separable_three_class(9, 150);
    auto plan = stratified_folds(m.labels(), 5, 1);
    ForestConfig forest;
    forest.n_trees = 15;
    auto a = cross_validate(m, forest, plan, 1);
    auto b = cross_validate(m, forest, plan, 3);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
}

TEST_CASE("fold failures name the fold")
{
    auto m = generators::separable_three_class(9, 60);
    FeatureMatrix bad(m.feature_names());
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        auto row = m.row(r);
        std::vector<double> v(row.begin(), row.end());
        if (r == 0)
            v[0] = std::nan("");
        bad.add_row(v, m.labels()[r], m.pr_ids()[r]);
    }
    auto plan = stratified_folds(bad.labels(), 3, 1);
    try {
        cross_validate(bad, rounds(2), plan);
        FAIL("expected a failure");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).rfind("fold ", 0) == 0);
    }
}

TEST_CASE("feature set comparison")
{
    auto m = generators::separable_three_class(13, 150);
    FeatureMatrix with_const(
        [&] {
            auto n = m.feature_names();
            n.push_back("flat");
            return n;
        }());
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        auto row = m.row(r);
        std::vector<double> v(row.begin(), row.end());
        v.push_back(4.0);
        with_const.add_row(v, m.labels()[r], m.pr_ids()[r]);
    }
    auto plan = stratified_folds(m.labels(), 5, 42);
    auto same = compare_feature_sets(m, m, rounds(10), plan);
    CHECK(same.delta == 0.0);
    auto minus_const = compare_feature_sets(with_const, m, rounds(10), plan);
    CHECK(minus_const.delta == 0.0);
    CHECK(minus_const.features_full == 6);
    CHECK(minus_const.features_reduced == 5);

    auto fewer = drop_column(m, 0).rows_subset(std::vector<std::size_t>{0, 1, 2});
    CHECK_THROWS_AS(compare_feature_sets(m, fewer, rounds(10), plan), std::invalid_argument);
    auto j = comparison_to_json(minus_const);
    CHECK(j.at("delta") == 0.0);
}

TEST_CASE("report rendering")
{
    ConfusionMatrix c({Agent::OpenAICodex, Agent::ClaudeCode});
    c.counts = {{7, 1}, {2, 12}};
    std::ostringstream csv;
    write_confusion_csv(csv, c);
    CHECK(csv.str() == "true\\predicted,OpenAICodex,ClaudeCode\nOpenAICodex,7,1\nClaudeCode,2,12\n");
    auto text = confusion_to_text(c);
    CHECK(text.find("ClaudeCode") != std::string::npos);
    CHECK(text.find("12") != std::string::npos);
    auto j = metrics_to_json(metrics_from_confusion(c));
    CHECK(j.contains("weighted"));
    CHECK(confusion_to_json(c).at("counts")[1][1] == 12);
}
