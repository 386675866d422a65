#include <agentprint/learn.hpp>

#include <doctest.h>

#include "generators.hpp"
#include "split_oracle.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace agentprint;

namespace {

double accuracy(const TreeEnsembleModel& model, const FeatureMatrix& m)
{
    std::size_t ok = 0;
    for (std::size_t r = 0; r < m.n_rows(); ++r)
        ok += predict_class(model, m.row(r)) == m.labels()[r];
    return static_cast<double>(ok) / static_cast<double>(m.n_rows());
}

GbmConfig rounds(int n)
{
    GbmConfig c;
    c.n_rounds = n;
    return c;
}

ForestConfig trees(int n, std::uint64_t seed = 42)
{
    ForestConfig c;
    c.n_trees = n;
    c.seed = seed;
    return c;
}

FeatureMatrix two_class_separable(std::uint64_t seed, std::size_t rows)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    FeatureMatrix m(generators::names(4));
    for (std::size_t r = 0; r < rows; ++r) {
        bool b = r % 2 == 1;
        std::vector<double> v = {(b ? 2.0 : -2.0) + z(rng), z(rng), z(rng), (b ? 1.0 : -1.0) + z(rng)};
        m.add_row(v, b ? Agent::Cursor : Agent::Copilot, "r" + std::to_string(r));
    }
    return m;
}

} // namespace

TEST_CASE("config validation")
{
    CHECK_NOTHROW(GbmConfig{}.validate());
    CHECK_NOTHROW(rounds(0).validate());
    GbmConfig bad;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.max_depth = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(trees(0).validate(), std::invalid_argument);
}

TEST_CASE("training preconditions")
{
    FeatureMatrix empty(generators::names(2));
    CHECK_THROWS_AS(train_gbm(empty, rounds(1)), std::invalid_argument);
    FeatureMatrix one(generators::names(1));
    one.add_row(std::vector<double>{1.0}, Agent::Devin, "a");
    one.add_row(std::vector<double>{2.0}, Agent::Devin, "b");
    CHECK_THROWS_AS(train_gbm(one, rounds(1)), std::invalid_argument);
    FeatureMatrix nan(generators::names(1));
    nan.add_row(std::vector<double>{std::nan("")}, Agent::Devin, "a");
    nan.add_row(std::vector<double>{1.0}, Agent::Cursor, "b");
    CHECK_THROWS_AS(train_gbm(nan, rounds(1)), std::invalid_argument);
}

TEST_CASE("root split equals the exhaustive best split")
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> rows(4, 20), feats(1, 5), classes(2, 5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::size_t exact = 0, tied = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = rows(rng), p = feats(rng), k = std::min(classes(rng), n);
        FeatureMatrix m(generators::names(p));
        for (std::size_t r = 0; r < n; ++r) {
            std::vector<double> v(p);
            for (auto& x : v)
                x = trial % 2 ? std::round(u(rng)) : u(rng); // half the trials have value ties
            m.add_row(v, generators::cycle_label(r, k), "r");
        }
        GbmConfig cfg = rounds(1);
        auto model = train_gbm(m, cfg);
        auto stats = split_oracle::first_round_stats(m, 0, model.classes);
        auto best = split_oracle::best_root_split(m, stats, cfg);
        const TreeNode& root = model.trees[0][0].nodes[0];
        CAPTURE(trial);
        if (!best) {
            CHECK(root.is_leaf());
            continue;
        }
        REQUIRE_FALSE(root.is_leaf());
        if (static_cast<std::size_t>(root.feature) == best->feature && root.threshold == best->threshold) {
            ++exact;
            CHECK(root.gain == doctest::Approx(best->gain).epsilon(1e-12));
        } else {
            // Equal-gain alternative: accept only if the oracle agrees it is optimal.
            bool ok = false;
            double g = split_oracle::split_gain(m, stats, static_cast<std::size_t>(root.feature), root.threshold, cfg, ok);
            CHECK(ok);
            CHECK(std::abs(g - best->gain) <= 1e-12 * std::max(1.0, best->gain));
            ++tied;
        }
    }
    MESSAGE("exact matches " << exact << ", equal-gain ties " << tied);
}

TEST_CASE("gbm fits a separable three-class set")
{
    auto m = generators::separable_three_class(8);
    auto model = train_gbm(m, rounds(50));
    CHECK(accuracy(model, m) >= 0.95);
    CHECK(model.training_loss.size() == 50);
    for (std::size_t i = 1; i < model.training_loss.size(); ++i)
        CHECK(model.training_loss[i] <= model.training_loss[i - 1] + 1e-12);
    CHECK(log_loss(model, m) == doctest::Approx(model.training_loss.back()).epsilon(1e-9));
    for (const auto& group : model.trees)
        for (const auto& t : group)
            CHECK(t.depth() <= 6);
    for (const auto& [name, gain] : model.gain_totals)
        CHECK(std::find(m.feature_names().begin(), m.feature_names().end(), name) != m.feature_names().end());
}

TEST_CASE("constant features give all-leaf trees and prior probabilities")
{
    FeatureMatrix m(generators::names(3));
    for (std::size_t r = 0; r < 100; ++r)
        m.add_row(std::vector<double>{1.0, 2.0, 3.0}, r < 70 ? Agent::OpenAICodex : Agent::Devin, "r");
    auto model = train_gbm(m, rounds(100));
    for (const auto& group : model.trees)
        for (const auto& t : group)
            CHECK(t.nodes.size() == 1);
    auto p = predict(model, m.row(0));
    CHECK(p[0] == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(importance(model).empty());
}

TEST_CASE("zero rounds predicts uniform")
{
    auto m = generators::separable_three_class(1, 30);
    auto model = train_gbm(m, rounds(0));
    auto p = predict(model, m.row(0));
    for (double x : p)
        CHECK(x == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(importance(model), std::logic_error);
}

TEST_CASE("predictions are distributions")
{
    auto m = generators::separable_three_class(3, 90);
    std::vector<TreeEnsembleModel> models = {train_gbm(m, rounds(10)), train_forest(m, trees(10))};
    std::mt19937_64 rng(4);
    std::normal_distribution<double> z(0.0, 5.0);
    for (const auto& model : models) {
        for (int i = 0; i < 200; ++i) {
            std::vector<double> x(5);
            for (auto& v : x)
                v = z(rng);
            auto p = predict(model, x);
            double sum = std::accumulate(p.begin(), p.end(), 0.0);
            CHECK(std::abs(sum - 1.0) <= 1e-9);
            for (double v : p)
                CHECK(v >= 0.0);
        }
        CHECK_THROWS_AS(predict(model, std::vector<double>(4)), std::invalid_argument);
    }
}

TEST_CASE("argmax is stable under a column permutation of the model")
{
    auto m = generators::separable_three_class(5, 120);
    auto model = train_gbm(m, rounds(15));
    const std::vector<std::size_t> perm = {3, 0, 4, 1, 2}; // new column j holds old column perm[j]
    std::vector<int> inverse(5);
    for (std::size_t j = 0; j < perm.size(); ++j)
        inverse[perm[j]] = static_cast<int>(j);

    TreeEnsembleModel permuted = model;
    for (std::size_t j = 0; j < perm.size(); ++j)
        permuted.feature_names[j] = model.feature_names[perm[j]];
    for (auto& group : permuted.trees)
        for (auto& t : group)
            for (auto& n : t.nodes)
                if (!n.is_leaf())
                    n.feature = inverse[static_cast<std::size_t>(n.feature)];

    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        auto row = m.row(r);
        std::vector<double> x(5);
        for (std::size_t j = 0; j < 5; ++j)
            x[j] = row[perm[j]];
        CHECK(predict_class(permuted, x) == predict_class(model, row));
    }
}

TEST_CASE("forest on single-class data is all single leaves")
{
    FeatureMatrix m(generators::names(2));
    for (int r = 0; r < 20; ++r)
        m.add_row(std::vector<double>{static_cast<double>(r), 1.0}, Agent::Cursor, "r");
    auto model = train_forest(m, trees(7));
    REQUIRE(model.trees[0].size() == 7);
    for (const auto& t : model.trees[0]) {
        REQUIRE(t.nodes.size() == 1);
        CHECK(t.nodes[0].value == 0.0);
    }
    CHECK(predict_class(model, m.row(0)) == Agent::Cursor);
    CHECK(predict(model, m.row(0))[0] == 1.0);
}

TEST_CASE("forest of identical leaves votes unanimously")
{
    TreeEnsembleModel model;
    model.kind = EnsembleKind::RandomForest;
    model.objective = Objective::Vote;
    model.classes = {Agent::OpenAICodex, Agent::Devin, Agent::ClaudeCode};
    model.class_priors = {0.5, 0.3, 0.2};
    model.feature_names = {"x"};
    Tree leaf;
    leaf.nodes.push_back(TreeNode{});
    leaf.nodes[0].value = 2.0;
    model.trees = {std::vector<Tree>(4, leaf)};
    auto p = predict(model, std::vector<double>{0.0});
    CHECK(p == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(predict_class(model, std::vector<double>{0.0}) == Agent::ClaudeCode);

    // An even split between two classes goes to the higher prior.
    Tree other = leaf;
    other.nodes[0].value = 1.0;
    model.trees = {{leaf, other}};
    CHECK(predict_class(model, std::vector<double>{0.0}) == Agent::Devin);
}

TEST_CASE("forest is deterministic and thread-count independent")
{
    auto m = generators::separable_three_class(6, 150);
    auto a = train_forest(m, trees(20, 9), 1);
    auto b = train_forest(m, trees(20, 9), 4);
    CHECK(model_to_json(a).dump() == model_to_json(b).dump());
    auto c = train_forest(m, trees(20, 10), 1);
    CHECK(model_to_json(a).dump() != model_to_json(c).dump());
    for (const auto& t : a.trees[0])
        CHECK(t.depth() <= 10);
}

TEST_CASE("gbm is thread-count independent")
{
    auto m = generators::separable_three_class(6, 150);
    CHECK(model_to_json(train_gbm(m, rounds(10), 1)).dump() == model_to_json(train_gbm(m, rounds(10), 3)).dump());
}

TEST_CASE("forest out-of-bag accuracy on a separable set")
{
    auto m = two_class_separable(12, 400);
    auto model = train_forest(m, trees(50));
    REQUIRE(model.oob_accuracy.has_value());
    CHECK(*model.oob_accuracy > 0.9);
}

TEST_CASE("monotone transforms leave forest votes unchanged")
{
    auto m = generators::separable_three_class(21, 150);
    FeatureMatrix t(m.feature_names());
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        std::vector<double> v;
        for (double x : m.row(r))
            v.push_back(std::exp(x / 4.0) * 10.0 + 3.0);
        t.add_row(v, m.labels()[r], m.pr_ids()[r]);
    }
    auto a = train_forest(m, trees(25));
    auto b = train_forest(t, trees(25));
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        CHECK(predict_class(a, m.row(r)) == predict_class(b, t.row(r)));
        CHECK(predict(a, m.row(r)) == predict(b, t.row(r)));
    }
}

TEST_CASE("one-vs-rest marker feature takes nearly all gain")
{
    auto m = generators::one_feature_per_class(3);
    auto model = train_one_vs_rest(m, Agent::Devin, rounds(30));
    CHECK(model.objective == Objective::Logistic);
    CHECK(model.output_names() == std::vector<std::string>{"Devin", "rest"});
    auto shares = importance(model);
    REQUIRE_FALSE(shares.empty());
    CHECK(shares[0].feature == "marker2");
    CHECK(shares[0].share >= 0.99);
    auto p = predict(model, m.row(80)); // first Devin row
    CHECK(p[0] > 0.9);
    CHECK(p[0] + p[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(predict_class(model, m.row(0)), std::logic_error);

    FeatureMatrix no_cursor = m.rows_subset(std::vector<std::size_t>{0, 1, 40, 41});
    CHECK_THROWS_AS(train_one_vs_rest(no_cursor, Agent::Cursor, rounds(5)), std::invalid_argument);
}

TEST_CASE("one-vs-rest on random labels spreads gain")
{
    auto m = generators::random_labels(77, 1000, 2, 5);
    auto model = train_one_vs_rest(m, Agent::OpenAICodex, GbmConfig{});
    for (const auto& s : importance(model))
        CHECK(s.share <= 2.0 / 5.0);
}

TEST_CASE("importance normalisation")
{
    TreeEnsembleModel model;
    model.classes = {Agent::OpenAICodex, Agent::Devin};
    model.feature_names = {"a", "b", "c"};
    Tree leaf;
    leaf.nodes.push_back(TreeNode{});
    model.trees = {{leaf}, {leaf}};
    model.gain_totals = {{"a", 3.0}, {"b", 1.0}};
    auto shares = importance(model);
    CHECK(shares == std::vector<FeatureShare>{{"a", 0.75}, {"b", 0.25}});
    CHECK(importance(model, 1).size() == 1);

    model.gain_totals = {{"c", 1.0}, {"a", 1.0}};
    auto tie = importance(model);
    CHECK(tie[0].feature == "a"); // feature order breaks ties
    CHECK(tie[1].feature == "c");

    model.gain_totals.clear();
    CHECK(importance(model).empty());
}

TEST_CASE("path contributions are normalised")
{
    auto m = generators::separable_three_class(2, 120);
    auto model = train_gbm(m, rounds(10));
    auto c = path_contributions(model, m.row(0), 0);
    double sum = 0;
    for (const auto& s : c)
        sum += s.share;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(path_contributions(model, m.row(0), 0, 2).size() <= 2);
}

TEST_CASE("model json round trip")
{
    auto m = generators::separable_three_class(4, 120);
    for (const auto& model : {train_gbm(m, rounds(8)), train_forest(m, trees(8)), train_one_vs_rest(m, Agent::Copilot, rounds(5))}) {
        auto j = model_to_json(model);
        auto back = model_from_json(nlohmann::json::parse(j.dump()));
        CHECK(back == model);
        CHECK(model_to_json(back).dump() == j.dump());
        for (std::size_t r = 0; r < m.n_rows(); ++r)
            CHECK(predict(back, m.row(r)) == predict(model, m.row(r)));
    }
}

TEST_CASE("model json validation")
{
    auto m = generators::separable_three_class(4, 60);
    auto j = model_to_json(train_gbm(m, rounds(2)));
    auto bad = j;
    bad["format_version"] = 99;
    CHECK_THROWS_AS(model_from_json(bad), SchemaError);
    bad = j;
    bad.erase("trees");
    CHECK_THROWS_AS(model_from_json(bad), SchemaError);
    bad = j;
    bad["classes"] = {"Gemini", "Devin", "Cursor"};
    CHECK_THROWS_AS(model_from_json(bad), SchemaError);
    bad = j;
    bad["trees"][0][0] = {{"feature", 17}, {"threshold", 1.0}, {"left", {{"leaf", 0.0}}}, {"right", {{"leaf", 0.0}}}};
    CHECK_THROWS_AS(model_from_json(bad), SchemaError);
    CHECK_THROWS_AS(model_from_json(nlohmann::json::array()), SchemaError);
}
