#include <agentprint/learn.hpp>

#include <agentprint/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace agentprint {

namespace {

// Splits whose loss reduction does not exceed this are treated as
// non-positive (same tolerance as the reference boosting library).
constexpr double kMinSplitGain = 1e-6;
constexpr double kMinHessian = 1e-16;
constexpr double kMinImpurityDecrease = 1e-12;

struct ColumnData {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> values;                     // column-major
    std::vector<std::vector<std::uint32_t>> sorted; // rows by ascending value, ties by row

    double v(std::size_t f, std::size_t r) const { return values[f * n + r]; }
};

ColumnData make_columns(const FeatureMatrix& m)
{
    ColumnData d;
    d.n = m.n_rows();
    d.p = m.n_features();
    d.values.resize(d.n * d.p);
    for (std::size_t r = 0; r < d.n; ++r) {
        for (std::size_t f = 0; f < d.p; ++f) {
            double x = m.at(r, f);
            if (!std::isfinite(x))
                throw std::invalid_argument("non-finite value in feature '" + m.feature_names()[f] + "'");
            d.values[f * d.n + r] = x;
        }
    }
    d.sorted.resize(d.p);
    for (std::size_t f = 0; f < d.p; ++f) {
        auto& ord = d.sorted[f];
        ord.resize(d.n);
        std::iota(ord.begin(), ord.end(), 0u);
        std::stable_sort(ord.begin(), ord.end(), [&](std::uint32_t a, std::uint32_t b) { return d.v(f, a) < d.v(f, b); });
    }
    return d;
}

// Midpoint strictly above `lo` so that lo goes left and hi goes right.
double split_threshold(double lo, double hi)
{
    double mid = lo + (hi - lo) / 2.0;
    return mid > lo ? mid : hi;
}

struct PresentClasses {
    std::vector<Agent> classes;
    std::vector<std::size_t> slot_of_row;
    std::vector<double> priors;
};

PresentClasses present_classes(const FeatureMatrix& m, std::size_t min_classes)
{
    if (m.n_rows() == 0)
        throw std::invalid_argument("cannot train on an empty matrix");
    std::array<std::size_t, kAgentCount> counts{};
    for (Agent a : m.labels())
        ++counts[agent_index(a)];
    PresentClasses pc;
    std::array<std::size_t, kAgentCount> slot{};
    for (Agent a : kAllAgents) {
        if (counts[agent_index(a)] > 0) {
            slot[agent_index(a)] = pc.classes.size();
            pc.classes.push_back(a);
            pc.priors.push_back(static_cast<double>(counts[agent_index(a)]) / static_cast<double>(m.n_rows()));
        }
    }
    if (pc.classes.size() < min_classes)
        throw std::invalid_argument("training needs at least two classes");
    for (Agent a : m.labels())
        pc.slot_of_row.push_back(slot[agent_index(a)]);
    return pc;
}

struct GradPair {
    double g = 0.0;
    double h = 0.0;
};

// Exact greedy second-order regression tree. Each feature keeps its own
// row ordering; a node owns the same [begin, end) segment in every ordering
// and splits are applied by stable partitioning all of them.
class BoostTreeBuilder {
public:
    BoostTreeBuilder(const ColumnData& data, const GbmConfig& config)
        : m_data(data)
        , m_config(config)
        , m_go_left(data.n)
        , m_scratch(data.n)
    {
    }

    Tree build(std::span<const GradPair> gp, std::vector<double>& gains)
    {
        m_order = m_data.sorted;
        m_gp = gp;
        m_gains = &gains;
        Tree tree;
        grow(tree, 0, m_data.n, 0);
        return tree;
    }

private:
    struct Split {
        std::size_t feature = 0;
        std::size_t left_count = 0;
        double threshold = 0.0;
        double gain = 0.0;
    };

    int grow(Tree& tree, std::size_t begin, std::size_t end, int depth)
    {
        double g_sum = 0.0, h_sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& gp = m_gp[m_order[0][i]];
            g_sum += gp.g;
            h_sum += gp.h;
        }

        const int index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[static_cast<std::size_t>(index)].value = -g_sum / (h_sum + m_config.l2_reg) * m_config.learning_rate;

        if (depth >= m_config.max_depth)
            return index;
        Split best = find_split(begin, end, g_sum, h_sum);
        if (!(best.gain > kMinSplitGain))
            return index;

        partition(best, begin, end);
        (*m_gains)[best.feature] += best.gain;
        const std::size_t mid = begin + best.left_count;
        int left = grow(tree, begin, mid, depth + 1);
        int right = grow(tree, mid, end, depth + 1);

        TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
        node.feature = static_cast<int>(best.feature);
        node.threshold = best.threshold;
        node.gain = best.gain;
        node.left = left;
        node.right = right;
        node.value = 0.0;
        return index;
    }

    Split find_split(std::size_t begin, std::size_t end, double g_sum, double h_sum) const
    {
        const double lambda = m_config.l2_reg;
        const double mcw = m_config.min_child_weight;
        const double parent = g_sum * g_sum / (h_sum + lambda);
        Split best;
        for (std::size_t f = 0; f < m_data.p; ++f) {
            const auto& ord = m_order[f];
            double gl = 0.0, hl = 0.0;
            for (std::size_t i = begin; i + 1 < end; ++i) {
                const auto& gp = m_gp[ord[i]];
                gl += gp.g;
                hl += gp.h;
                double x = m_data.v(f, ord[i]);
                double next = m_data.v(f, ord[i + 1]);
                if (x == next)
                    continue;
                double hr = h_sum - hl;
                if (hl < mcw || hr < mcw)
                    continue;
                double gr = g_sum - gl;
                double gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent);
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = f;
                    best.left_count = i + 1 - begin;
                    best.threshold = split_threshold(x, next);
                }
            }
        }
        return best;
    }

    void partition(const Split& split, std::size_t begin, std::size_t end)
    {
        const auto& chosen = m_order[split.feature];
        for (std::size_t i = begin; i < end; ++i)
            m_go_left[chosen[i]] = i < begin + split.left_count ? 1 : 0;
        for (std::size_t f = 0; f < m_data.p; ++f) {
            if (f == split.feature)
                continue;
            auto& ord = m_order[f];
            std::size_t l = begin;
            std::size_t r = 0;
            for (std::size_t i = begin; i < end; ++i) {
                std::uint32_t row = ord[i];
                if (m_go_left[row])
                    ord[l++] = row;
                else
                    m_scratch[r++] = row;
            }
            std::copy(m_scratch.begin(), m_scratch.begin() + static_cast<std::ptrdiff_t>(r), ord.begin() + static_cast<std::ptrdiff_t>(l));
        }
    }

    const ColumnData& m_data;
    const GbmConfig& m_config;
    std::vector<std::vector<std::uint32_t>> m_order;
    std::vector<std::uint8_t> m_go_left;
    std::vector<std::uint32_t> m_scratch;
    std::span<const GradPair> m_gp;
    std::vector<double>* m_gains = nullptr;
};

double tree_predict_column(const Tree& tree, const ColumnData& d, std::size_t row)
{
    std::size_t i = 0;
    while (!tree.nodes[i].is_leaf()) {
        const TreeNode& n = tree.nodes[i];
        i = static_cast<std::size_t>(d.v(static_cast<std::size_t>(n.feature), row) < n.threshold ? n.left : n.right);
    }
    return tree.nodes[i].value;
}

void softmax_inplace(std::span<double> z)
{
    double hi = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - hi);
        sum += v;
    }
    for (double& v : z)
        v /= sum;
}

double sigmoid(double z)
{
    return 1.0 / (1.0 + std::exp(-z));
}

std::map<std::string, double> named_gains(const std::vector<double>& gains, const std::vector<std::string>& names)
{
    std::map<std::string, double> out;
    for (std::size_t f = 0; f < gains.size(); ++f) {
        if (gains[f] > 0.0)
            out[names[f]] = gains[f];
    }
    return out;
}

constexpr double kProbFloor = 1e-15;

// Boosting core shared by the softmax and logistic objectives. `outputs`
// is the number of trees per round; `targets[r]` is the positive slot for
// softmax or 1/0 for logistic.
TreeEnsembleModel boost(const FeatureMatrix& matrix, const GbmConfig& config, Objective objective,
    const std::vector<std::size_t>& targets, std::size_t outputs, int jobs)
{
    config.validate();
    ColumnData data = make_columns(matrix);
    const std::size_t n = data.n;

    TreeEnsembleModel model;
    model.kind = EnsembleKind::GradientBoosted;
    model.objective = objective;
    model.feature_names = matrix.feature_names();
    model.config = config;
    model.trees.assign(outputs, {});

    std::vector<BoostTreeBuilder> builders;
    builders.reserve(outputs);
    for (std::size_t k = 0; k < outputs; ++k)
        builders.emplace_back(data, config);

    std::vector<double> margin(n * outputs, 0.0);
    std::vector<double> prob(n * outputs, 0.0);
    std::vector<std::vector<GradPair>> grads(outputs, std::vector<GradPair>(n));
    std::vector<std::vector<double>> round_gains(outputs, std::vector<double>(data.p, 0.0));
    std::vector<double> gains(data.p, 0.0);
    std::vector<Tree> round_trees(outputs);

    auto refresh_probabilities = [&] {
        for (std::size_t r = 0; r < n; ++r) {
            std::span<double> pr(prob.data() + r * outputs, outputs);
            std::copy_n(margin.begin() + static_cast<std::ptrdiff_t>(r * outputs), outputs, pr.begin());
            if (objective == Objective::Softmax)
                softmax_inplace(pr);
            else
                pr[0] = sigmoid(pr[0]);
        }
    };
    auto training_loss = [&] {
        double loss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double p = objective == Objective::Softmax
                ? prob[r * outputs + targets[r]]
                : (targets[r] == 1 ? prob[r] : 1.0 - prob[r]);
            loss -= std::log(std::max(p, kProbFloor));
        }
        return loss / static_cast<double>(n);
    };

    refresh_probabilities();
    for (int round = 0; round < config.n_rounds; ++round) {
        parallel_for(outputs, jobs, [&](std::size_t k) {
            auto& gk = grads[k];
            for (std::size_t r = 0; r < n; ++r) {
                double p = prob[r * outputs + k];
                double y = objective == Objective::Softmax ? (targets[r] == k ? 1.0 : 0.0) : static_cast<double>(targets[r]);
                gk[r] = {p - y, std::max(p * (1.0 - p), kMinHessian)};
            }
            std::fill(round_gains[k].begin(), round_gains[k].end(), 0.0);
            round_trees[k] = builders[k].build(gk, round_gains[k]);
            for (std::size_t r = 0; r < n; ++r)
                margin[r * outputs + k] += tree_predict_column(round_trees[k], data, r);
        });
        for (std::size_t k = 0; k < outputs; ++k) {
            for (std::size_t f = 0; f < data.p; ++f)
                gains[f] += round_gains[k][f];
            model.trees[k].push_back(std::move(round_trees[k]));
        }
        refresh_probabilities();
        model.training_loss.push_back(training_loss());
    }

    model.gain_totals = named_gains(gains, model.feature_names);
    return model;
}

// ---------------------------------------------------------------------------
// Random forest

class CartBuilder {
public:
    CartBuilder(const ColumnData& data, const std::vector<std::size_t>& slots, const std::vector<double>& priors,
        const ForestConfig& config, std::size_t mtry, std::mt19937_64& rng, std::vector<double>& weights, std::vector<double>& gains)
        : m_data(data)
        , m_slots(slots)
        , m_priors(priors)
        , m_config(config)
        , m_mtry(mtry)
        , m_rng(rng)
        , m_weights(weights)
        , m_gains(gains)
    {
    }

    Tree build(std::vector<std::uint32_t> rows)
    {
        Tree tree;
        grow(tree, rows, 0);
        return tree;
    }

private:
    std::vector<double> class_weights(const std::vector<std::uint32_t>& rows) const
    {
        std::vector<double> w(m_priors.size(), 0.0);
        for (auto r : rows)
            w[m_slots[r]] += m_weights[r];
        return w;
    }

    std::size_t majority(const std::vector<double>& w) const
    {
        std::size_t best = 0;
        for (std::size_t k = 1; k < w.size(); ++k) {
            if (w[k] > w[best] || (w[k] == w[best] && m_priors[k] > m_priors[best]))
                best = k;
        }
        return best;
    }

    static double weighted_impurity(const std::vector<double>& w, double total)
    {
        // total * gini = total - sum(w^2) / total
        if (total <= 0.0)
            return 0.0;
        double sq = 0.0;
        for (double c : w)
            sq += c * c;
        return total - sq / total;
    }

    int grow(Tree& tree, std::vector<std::uint32_t>& rows, int depth)
    {
        const auto w = class_weights(rows);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        const int index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[static_cast<std::size_t>(index)].value = static_cast<double>(majority(w));

        const bool pure = std::count_if(w.begin(), w.end(), [](double c) { return c > 0.0; }) <= 1;
        if (depth >= m_config.max_depth || pure || rows.size() < 2)
            return index;

        const double parent = weighted_impurity(w, total);
        std::vector<std::size_t> features(m_data.p);
        std::iota(features.begin(), features.end(), std::size_t{0});
        std::shuffle(features.begin(), features.end(), m_rng);

        double best_decrease = kMinImpurityDecrease;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;
        std::size_t evaluated = 0;
        std::vector<std::uint32_t> sorted(rows);
        std::vector<double> left(w.size());
        std::vector<double> right(w.size());

        for (std::size_t f : features) {
            if (evaluated == m_mtry)
                break;
            std::sort(sorted.begin(), sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
                double va = m_data.v(f, a), vb = m_data.v(f, b);
                return va < vb || (va == vb && a < b);
            });
            if (m_data.v(f, sorted.front()) == m_data.v(f, sorted.back()))
                continue;
            ++evaluated;

            std::fill(left.begin(), left.end(), 0.0);
            double left_total = 0.0;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                auto r = sorted[i];
                left[m_slots[r]] += m_weights[r];
                left_total += m_weights[r];
                double x = m_data.v(f, r);
                double next = m_data.v(f, sorted[i + 1]);
                if (x == next)
                    continue;
                for (std::size_t k = 0; k < w.size(); ++k)
                    right[k] = w[k] - left[k];
                double decrease = parent - weighted_impurity(left, left_total) - weighted_impurity(right, total - left_total);
                if (decrease > best_decrease) {
                    best_decrease = decrease;
                    best_feature = f;
                    best_threshold = split_threshold(x, next);
                    found = true;
                }
            }
        }
        if (!found)
            return index;

        std::vector<std::uint32_t> left_rows, right_rows;
        for (auto r : rows)
            (m_data.v(best_feature, r) < best_threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        m_gains[best_feature] += best_decrease;

        int l = grow(tree, left_rows, depth + 1);
        int r = grow(tree, right_rows, depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
        node.feature = static_cast<int>(best_feature);
        node.threshold = best_threshold;
        node.gain = best_decrease;
        node.left = l;
        node.right = r;
        node.value = 0.0;
        return index;
    }

    const ColumnData& m_data;
    const std::vector<std::size_t>& m_slots;
    const std::vector<double>& m_priors;
    const ForestConfig& m_config;
    std::size_t m_mtry;
    std::mt19937_64& m_rng;
    const std::vector<double>& m_weights;
    std::vector<double>& m_gains;
};

std::size_t arg_max(std::span<const double> probs, const std::vector<double>& priors, bool prior_tiebreak)
{
    std::size_t best = 0;
    for (std::size_t k = 1; k < probs.size(); ++k) {
        if (probs[k] > probs[best])
            best = k;
        else if (prior_tiebreak && probs[k] == probs[best] && k < priors.size() && priors[k] > priors[best])
            best = k;
    }
    return best;
}

} // namespace

// ---------------------------------------------------------------------------

std::size_t Tree::leaf_for(std::span<const double> x) const
{
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& n = nodes[i];
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
    }
    return i;
}

int Tree::depth() const
{
    if (nodes.empty())
        return 0;
    std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
    int deepest = 0;
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (!nodes[i].is_leaf()) {
            stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
        }
    }
    return deepest;
}

void GbmConfig::validate() const
{
    if (n_rounds < 0)
        throw std::invalid_argument("n_rounds must be >= 0");
    if (max_depth < 1)
        throw std::invalid_argument("max_depth must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
        throw std::invalid_argument("learning_rate must be in (0, 1]");
    if (!(min_child_weight >= 0.0) || !(l2_reg >= 0.0))
        throw std::invalid_argument("min_child_weight and l2_reg must be non-negative");
}

void ForestConfig::validate() const
{
    if (n_trees < 1)
        throw std::invalid_argument("n_trees must be >= 1");
    if (max_depth < 1)
        throw std::invalid_argument("max_depth must be >= 1");
    if (features_per_split < 0)
        throw std::invalid_argument("features_per_split must be >= 0");
}

std::size_t TreeEnsembleModel::n_outputs() const
{
    return objective == Objective::Logistic ? 2 : classes.size();
}

std::vector<std::string> TreeEnsembleModel::output_names() const
{
    std::vector<std::string> names;
    for (Agent a : classes)
        names.emplace_back(agent_name(a));
    if (objective == Objective::Logistic)
        names.emplace_back("rest");
    return names;
}

TreeEnsembleModel train_gbm(const FeatureMatrix& matrix, const GbmConfig& config, int jobs)
{
    config.validate();
    PresentClasses pc = present_classes(matrix, 2);
    TreeEnsembleModel model = boost(matrix, config, Objective::Softmax, pc.slot_of_row, pc.classes.size(), jobs);
    model.classes = pc.classes;
    model.class_priors = pc.priors;
    return model;
}

TreeEnsembleModel train_one_vs_rest(const FeatureMatrix& matrix, Agent target, const GbmConfig& config)
{
    config.validate();
    std::vector<std::size_t> y(matrix.n_rows());
    std::size_t positives = 0;
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        y[r] = matrix.labels()[r] == target ? 1 : 0;
        positives += y[r];
    }
    if (positives == 0)
        throw std::invalid_argument("target class " + std::string(agent_name(target)) + " is absent from the matrix");
    if (positives == matrix.n_rows())
        throw std::invalid_argument("one-vs-rest needs at least one row outside " + std::string(agent_name(target)));
    TreeEnsembleModel model = boost(matrix, config, Objective::Logistic, y, 1, 1);
    model.classes = {target};
    double share = static_cast<double>(positives) / static_cast<double>(matrix.n_rows());
    model.class_priors = {share, 1.0 - share};
    return model;
}

TreeEnsembleModel train_forest(const FeatureMatrix& matrix, const ForestConfig& config, int jobs)
{
    config.validate();
    // A single-class forest is allowed: every tree is one leaf.
    PresentClasses pc = present_classes(matrix, 1);
    ColumnData data = make_columns(matrix);
    const std::size_t n = data.n;
    const std::size_t mtry = config.features_per_split > 0
        ? std::min<std::size_t>(static_cast<std::size_t>(config.features_per_split), data.p)
        : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(data.p)))));

    const auto n_trees = static_cast<std::size_t>(config.n_trees);
    std::vector<Tree> trees(n_trees);
    std::vector<std::vector<double>> tree_gains(n_trees, std::vector<double>(data.p, 0.0));
    std::vector<std::vector<double>> in_bag(n_trees);

    parallel_for(n_trees, jobs, [&](std::size_t t) {
        std::mt19937_64 rng(config.seed + t);
        auto& weights = in_bag[t];
        weights.assign(n, config.bootstrap ? 0.0 : 1.0);
        if (config.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t i = 0; i < n; ++i)
                weights[pick(rng)] += 1.0;
        }
        std::vector<std::uint32_t> rows;
        for (std::size_t r = 0; r < n; ++r) {
            if (weights[r] > 0.0)
                rows.push_back(static_cast<std::uint32_t>(r));
        }
        CartBuilder builder(data, pc.slot_of_row, pc.priors, config, mtry, rng, weights, tree_gains[t]);
        trees[t] = builder.build(std::move(rows));
    });

    TreeEnsembleModel model;
    model.kind = EnsembleKind::RandomForest;
    model.objective = Objective::Vote;
    model.classes = pc.classes;
    model.class_priors = pc.priors;
    model.feature_names = matrix.feature_names();
    model.config = config;
    model.trees = {std::move(trees)};

    std::vector<double> gains(data.p, 0.0);
    for (const auto& tg : tree_gains) {
        for (std::size_t f = 0; f < data.p; ++f)
            gains[f] += tg[f];
    }
    model.gain_totals = named_gains(gains, model.feature_names);

    if (config.bootstrap) {
        std::size_t scored = 0, correct = 0;
        std::vector<double> votes(pc.classes.size());
        for (std::size_t r = 0; r < n; ++r) {
            std::fill(votes.begin(), votes.end(), 0.0);
            bool any = false;
            for (std::size_t t = 0; t < n_trees; ++t) {
                if (in_bag[t][r] > 0.0)
                    continue;
                votes[static_cast<std::size_t>(tree_predict_column(model.trees[0][t], data, r))] += 1.0;
                any = true;
            }
            if (!any)
                continue;
            ++scored;
            correct += arg_max(votes, pc.priors, true) == pc.slot_of_row[r];
        }
        if (scored > 0)
            model.oob_accuracy = static_cast<double>(correct) / static_cast<double>(scored);
    }
    return model;
}

TreeEnsembleModel train(const FeatureMatrix& matrix, const LearnerConfig& config, int jobs)
{
    return std::visit(
        [&](const auto& cfg) -> TreeEnsembleModel {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, GbmConfig>)
                return train_gbm(matrix, cfg, jobs);
            else
                return train_forest(matrix, cfg, jobs);
        },
        config);
}

std::vector<double> predict(const TreeEnsembleModel& model, std::span<const double> x)
{
    if (x.size() != model.feature_names.size())
        throw std::invalid_argument("input has " + std::to_string(x.size()) + " features, model expects "
            + std::to_string(model.feature_names.size()));

    switch (model.objective) {
    case Objective::Softmax: {
        std::vector<double> scores(model.classes.size(), 0.0);
        for (std::size_t k = 0; k < scores.size() && k < model.trees.size(); ++k) {
            for (const auto& t : model.trees[k])
                scores[k] += t.predict(x);
        }
        softmax_inplace(scores);
        return scores;
    }
    case Objective::Logistic: {
        double margin = 0.0;
        if (!model.trees.empty()) {
            for (const auto& t : model.trees[0])
                margin += t.predict(x);
        }
        double p = sigmoid(margin);
        return {p, 1.0 - p};
    }
    case Objective::Vote: {
        std::vector<double> votes(model.classes.size(), 0.0);
        if (model.trees.empty() || model.trees[0].empty()) {
            std::fill(votes.begin(), votes.end(), 1.0 / static_cast<double>(votes.size()));
            return votes;
        }
        for (const auto& t : model.trees[0])
            votes[static_cast<std::size_t>(t.predict(x))] += 1.0;
        for (double& v : votes)
            v /= static_cast<double>(model.trees[0].size());
        return votes;
    }
    }
    return {};
}

Agent predict_class(const TreeEnsembleModel& model, std::span<const double> x)
{
    if (model.objective == Objective::Logistic)
        throw std::logic_error("predict_class is undefined for one-vs-rest models");
    auto probs = predict(model, x);
    return model.classes[arg_max(probs, model.class_priors, model.objective == Objective::Vote)];
}

double log_loss(const TreeEnsembleModel& model, const FeatureMatrix& matrix)
{
    double loss = 0.0;
    for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        auto probs = predict(model, matrix.row(r));
        Agent truth = matrix.labels()[r];
        double p = 0.0;
        if (model.objective == Objective::Logistic) {
            p = truth == model.classes.front() ? probs[0] : probs[1];
        } else {
            auto it = std::find(model.classes.begin(), model.classes.end(), truth);
            if (it != model.classes.end())
                p = probs[static_cast<std::size_t>(it - model.classes.begin())];
        }
        loss -= std::log(std::max(p, kProbFloor));
    }
    return matrix.n_rows() == 0 ? 0.0 : loss / static_cast<double>(matrix.n_rows());
}

namespace {

std::vector<FeatureShare> normalise(const std::map<std::string, double>& gains, const std::vector<std::string>& order, std::size_t top_k)
{
    double total = 0.0;
    for (const auto& [name, g] : gains)
        total += g;
    std::vector<FeatureShare> out;
    if (!(total > 0.0))
        return out;
    for (const auto& name : order) {
        auto it = gains.find(name);
        if (it != gains.end() && it->second > 0.0)
            out.push_back({name, it->second / total});
    }
    std::stable_sort(out.begin(), out.end(), [](const FeatureShare& a, const FeatureShare& b) { return a.share > b.share; });
    if (top_k > 0 && out.size() > top_k)
        out.resize(top_k);
    return out;
}

bool has_trees(const TreeEnsembleModel& model)
{
    return std::any_of(model.trees.begin(), model.trees.end(), [](const auto& v) { return !v.empty(); });
}

} // namespace

std::vector<FeatureShare> importance(const TreeEnsembleModel& model, std::size_t top_k)
{
    if (!has_trees(model))
        throw std::logic_error("importance requested for an untrained model");
    return normalise(model.gain_totals, model.feature_names, top_k);
}

std::vector<FeatureShare> path_contributions(const TreeEnsembleModel& model, std::span<const double> x, std::size_t output, std::size_t top_k)
{
    if (x.size() != model.feature_names.size())
        throw std::invalid_argument("input width does not match the model");
    std::map<std::string, double> gains;
    auto walk = [&](const Tree& tree) {
        std::size_t i = 0;
        while (!tree.nodes[i].is_leaf()) {
            const TreeNode& n = tree.nodes[i];
            gains[model.feature_names[static_cast<std::size_t>(n.feature)]] += n.gain;
            i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
        }
    };
    if (model.objective == Objective::Softmax) {
        if (output < model.trees.size()) {
            for (const auto& t : model.trees[output])
                walk(t);
        }
    } else {
        for (const auto& group : model.trees) {
            for (const auto& t : group)
                walk(t);
        }
    }
    return normalise(gains, model.feature_names, top_k);
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

using nlohmann::json;

json node_to_json(const Tree& tree, std::size_t i)
{
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf())
        return {{"leaf", n.value}};
    return {
        {"feature", n.feature},
        {"threshold", n.threshold},
        {"gain", n.gain},
        {"default_left", n.default_left},
        {"left", node_to_json(tree, static_cast<std::size_t>(n.left))},
        {"right", node_to_json(tree, static_cast<std::size_t>(n.right))},
    };
}

int node_from_json(const json& j, Tree& tree, std::size_t n_features, int depth)
{
    if (depth > 64)
        throw SchemaError("model tree nesting too deep");
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (j.contains("leaf")) {
        tree.nodes.back().value = j.at("leaf").get<double>();
        return index;
    }
    TreeNode node;
    node.feature = j.at("feature").get<int>();
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= n_features)
        throw SchemaError("split feature index out of range");
    node.threshold = j.at("threshold").get<double>();
    if (!std::isfinite(node.threshold))
        throw SchemaError("non-finite split threshold");
    node.gain = j.value("gain", 0.0);
    node.default_left = j.value("default_left", true);
    node.left = node_from_json(j.at("left"), tree, n_features, depth + 1);
    node.right = node_from_json(j.at("right"), tree, n_features, depth + 1);
    tree.nodes[static_cast<std::size_t>(index)] = node;
    return index;
}

std::string objective_name(Objective o)
{
    switch (o) {
    case Objective::Softmax:
        return "softmax";
    case Objective::Logistic:
        return "logistic";
    case Objective::Vote:
        return "vote";
    }
    return "softmax";
}

} // namespace

json config_to_json(const LearnerConfig& config)
{
    return std::visit(
        [](const auto& c) -> json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, GbmConfig>) {
                return {
                    {"learner", "gbm"},
                    {"n_rounds", c.n_rounds},
                    {"max_depth", c.max_depth},
                    {"learning_rate", c.learning_rate},
                    {"min_child_weight", c.min_child_weight},
                    {"l2_reg", c.l2_reg},
                    {"seed", c.seed},
                };
            } else {
                return {
                    {"learner", "forest"},
                    {"n_trees", c.n_trees},
                    {"max_depth", c.max_depth},
                    {"features_per_split", c.features_per_split},
                    {"bootstrap", c.bootstrap},
                    {"seed", c.seed},
                };
            }
        },
        config);
}

json model_to_json(const TreeEnsembleModel& model)
{
    json classes = json::array();
    for (Agent a : model.classes)
        classes.push_back(std::string(agent_name(a)));
    json trees = json::array();
    for (const auto& group : model.trees) {
        json g = json::array();
        for (const auto& t : group)
            g.push_back(node_to_json(t, 0));
        trees.push_back(std::move(g));
    }
    json gains = json::object();
    for (const auto& [name, value] : model.gain_totals)
        gains[name] = value;
    json out = {
        {"format_version", kModelFormatVersion},
        {"kind", model.kind == EnsembleKind::GradientBoosted ? "gbm" : "forest"},
        {"objective", objective_name(model.objective)},
        {"config", config_to_json(model.config)},
        {"classes", classes},
        {"class_priors", model.class_priors},
        {"feature_names", model.feature_names},
        {"trees", trees},
        {"gain_totals", gains},
        {"training_loss", model.training_loss},
    };
    out["oob_accuracy"] = model.oob_accuracy ? json(*model.oob_accuracy) : json(nullptr);
    return out;
}

TreeEnsembleModel model_from_json(const json& j)
{
    try {
        if (!j.is_object())
            throw SchemaError("model document is not an object");
        int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw SchemaError("unsupported model format_version " + std::to_string(version));

        TreeEnsembleModel m;
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "gbm")
            m.kind = EnsembleKind::GradientBoosted;
        else if (kind == "forest")
            m.kind = EnsembleKind::RandomForest;
        else
            throw SchemaError("unknown model kind '" + kind + "'");

        std::string objective = j.at("objective").get<std::string>();
        if (objective == "softmax")
            m.objective = Objective::Softmax;
        else if (objective == "logistic")
            m.objective = Objective::Logistic;
        else if (objective == "vote")
            m.objective = Objective::Vote;
        else
            throw SchemaError("unknown objective '" + objective + "'");

        const json& cfg = j.at("config");
        if (cfg.at("learner").get<std::string>() == "gbm") {
            GbmConfig c;
            c.n_rounds = cfg.at("n_rounds").get<int>();
            c.max_depth = cfg.at("max_depth").get<int>();
            c.learning_rate = cfg.at("learning_rate").get<double>();
            c.min_child_weight = cfg.at("min_child_weight").get<double>();
            c.l2_reg = cfg.at("l2_reg").get<double>();
            c.seed = cfg.at("seed").get<std::uint64_t>();
            m.config = c;
        } else {
            ForestConfig c;
            c.n_trees = cfg.at("n_trees").get<int>();
            c.max_depth = cfg.at("max_depth").get<int>();
            c.features_per_split = cfg.at("features_per_split").get<int>();
            c.bootstrap = cfg.at("bootstrap").get<bool>();
            c.seed = cfg.at("seed").get<std::uint64_t>();
            m.config = c;
        }

        for (const auto& c : j.at("classes")) {
            auto a = parse_agent(c.get<std::string>());
            if (!a)
                throw SchemaError("unknown class '" + c.get<std::string>() + "'");
            m.classes.push_back(*a);
        }
        m.class_priors = j.at("class_priors").get<std::vector<double>>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        for (const auto& group : j.at("trees")) {
            std::vector<Tree> trees;
            for (const auto& t : group) {
                Tree tree;
                node_from_json(t, tree, m.feature_names.size(), 0);
                trees.push_back(std::move(tree));
            }
            m.trees.push_back(std::move(trees));
        }
        for (const auto& [name, value] : j.at("gain_totals").items())
            m.gain_totals[name] = value.get<double>();
        m.training_loss = j.value("training_loss", std::vector<double>{});
        if (j.contains("oob_accuracy") && !j.at("oob_accuracy").is_null())
            m.oob_accuracy = j.at("oob_accuracy").get<double>();

        const std::size_t expected_groups = m.objective == Objective::Softmax ? m.classes.size() : 1;
        if (m.trees.size() != expected_groups)
            throw SchemaError("tree groups do not match the model objective");
        const std::size_t min_classes = m.objective == Objective::Softmax ? 2 : 1;
        if (m.classes.size() < min_classes || (m.objective == Objective::Logistic && m.classes.size() != 1))
            throw SchemaError("class list does not match the model objective");
        if (m.objective == Objective::Vote) {
            for (const auto& t : m.trees[0]) {
                for (const auto& n : t.nodes) {
                    if (n.is_leaf() && (n.value < 0 || n.value >= static_cast<double>(m.classes.size())))
                        throw SchemaError("forest leaf holds an invalid class slot");
                }
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed model document: ") + e.what());
    }
}

} // namespace agentprint
