#include <agentprint/reduce.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace agentprint {

namespace {

constexpr double kRidge = 1e-8;

bool column_constant(const FeatureMatrix& m, std::size_t c)
{
    if (m.n_rows() == 0)
        return true;
    double first = m.at(0, c);
    for (std::size_t r = 1; r < m.n_rows(); ++r) {
        if (m.at(r, c) != first)
            return false;
    }
    return true;
}

// Column-centred copy of the matrix; constant columns are exactly zero.
Eigen::MatrixXd centred(const FeatureMatrix& m, std::vector<bool>& constant)
{
    const auto n = static_cast<Eigen::Index>(m.n_rows());
    const auto p = static_cast<Eigen::Index>(m.n_features());
    Eigen::MatrixXd x(n, p);
    constant.assign(m.n_features(), false);
    for (Eigen::Index c = 0; c < p; ++c) {
        constant[static_cast<std::size_t>(c)] = column_constant(m, static_cast<std::size_t>(c));
        double mean = 0.0;
        for (Eigen::Index r = 0; r < n; ++r)
            mean += m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        mean /= static_cast<double>(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            x(r, c) = constant[static_cast<std::size_t>(c)]
                ? 0.0
                : m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) - mean;
        }
    }
    return x;
}

} // namespace

void ReductionConfig::validate() const
{
    if (!(correlation_threshold > 0.0 && correlation_threshold <= 1.0))
        throw std::invalid_argument("correlation threshold must be in (0, 1]");
    if (!(r2_threshold > 0.0 && r2_threshold <= 1.0))
        throw std::invalid_argument("R^2 threshold must be in (0, 1]");
    if (!(epv_minimum > 0.0))
        throw std::invalid_argument("EPV minimum must be positive");
}

Eigen::MatrixXd correlation_matrix(const FeatureMatrix& matrix)
{
    if (matrix.n_rows() < 2)
        throw std::invalid_argument("correlation needs at least 2 rows");
    std::vector<bool> constant;
    Eigen::MatrixXd x = centred(matrix, constant);
    Eigen::MatrixXd s = x.transpose() * x;
    const Eigen::Index p = s.rows();
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            double rho = 0.0;
            if (!constant[static_cast<std::size_t>(i)] && !constant[static_cast<std::size_t>(j)])
                rho = std::clamp(s(i, j) / std::sqrt(s(i, i) * s(j, j)), -1.0, 1.0);
            corr(i, j) = rho;
            corr(j, i) = rho;
        }
    }
    return corr;
}

double average_linkage(const Eigen::MatrixXd& corr, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b)
{
    double sum = 0.0;
    for (std::size_t i : a) {
        for (std::size_t j : b)
            sum += std::abs(corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    return sum / static_cast<double>(a.size() * b.size());
}

std::vector<std::vector<std::size_t>> cluster_features(const Eigen::MatrixXd& corr, double threshold)
{
    const auto p = static_cast<std::size_t>(corr.rows());
    std::vector<std::vector<std::size_t>> clusters(p);
    for (std::size_t i = 0; i < p; ++i)
        clusters[i] = {i};

    // Cluster-level similarity, maintained with the Lance-Williams update
    // for average linkage.
    Eigen::MatrixXd sim = corr.cwiseAbs();

    while (clusters.size() > 1) {
        std::size_t best_a = 0, best_b = 0;
        double best = -1.0;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                double s = sim(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (s > best) {
                    best = s;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best < threshold)
            break;

        const double na = static_cast<double>(clusters[best_a].size());
        const double nb = static_cast<double>(clusters[best_b].size());
        for (std::size_t k = 0; k < clusters.size(); ++k) {
            if (k == best_a || k == best_b)
                continue;
            auto ka = static_cast<Eigen::Index>(k);
            double merged = (na * sim(ka, static_cast<Eigen::Index>(best_a)) + nb * sim(ka, static_cast<Eigen::Index>(best_b))) / (na + nb);
            sim(ka, static_cast<Eigen::Index>(best_a)) = merged;
            sim(static_cast<Eigen::Index>(best_a), ka) = merged;
        }

        auto& target = clusters[best_a];
        target.insert(target.end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(target.begin(), target.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));

        // Drop row/column best_b from the similarity matrix.
        const auto n = sim.rows();
        const auto drop = static_cast<Eigen::Index>(best_b);
        Eigen::MatrixXd next(n - 1, n - 1);
        for (Eigen::Index i = 0, ni = 0; i < n; ++i) {
            if (i == drop)
                continue;
            for (Eigen::Index j = 0, nj = 0; j < n; ++j) {
                if (j == drop)
                    continue;
                next(ni, nj++) = sim(i, j);
            }
            ++ni;
        }
        sim = std::move(next);
    }
    return clusters;
}

RepresentativeSelection select_representatives(const std::vector<std::vector<std::size_t>>& clusters, const Eigen::MatrixXd& corr)
{
    const auto p = static_cast<std::size_t>(corr.rows());
    RepresentativeSelection out;
    for (const auto& members : clusters) {
        FeatureCluster cluster;
        cluster.members = members;
        std::sort(cluster.members.begin(), cluster.members.end());
        cluster.representative = cluster.members.front();

        if (cluster.members.size() > 1) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t m : cluster.members) {
                double sum = 0.0;
                std::size_t outside = 0;
                for (std::size_t o = 0; o < p; ++o) {
                    if (std::binary_search(cluster.members.begin(), cluster.members.end(), o))
                        continue;
                    sum += std::abs(corr(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(o)));
                    ++outside;
                }
                double mean = outside == 0 ? 0.0 : sum / static_cast<double>(outside);
                if (mean < best) {
                    best = mean;
                    cluster.representative = m;
                }
            }
        }

        out.kept.push_back(cluster.representative);
        for (std::size_t m : cluster.members) {
            if (m != cluster.representative)
                out.dropped.push_back(m);
        }
        out.clusters.push_back(std::move(cluster));
    }
    std::sort(out.kept.begin(), out.kept.end());
    std::sort(out.dropped.begin(), out.dropped.end());
    return out;
}

std::vector<double> r2_scores(const FeatureMatrix& matrix)
{
    std::vector<bool> constant;
    Eigen::MatrixXd x = centred(matrix, constant);
    Eigen::MatrixXd s = x.transpose() * x;
    const Eigen::Index p = s.rows();
    std::vector<double> scores(static_cast<std::size_t>(p), 0.0);
    if (p < 2)
        return scores;

    for (Eigen::Index f = 0; f < p; ++f) {
        const double sst = s(f, f);
        if (constant[static_cast<std::size_t>(f)] || sst <= 0.0)
            continue;
        std::vector<Eigen::Index> others;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (j != f)
                others.push_back(j);
        }
        const auto q = static_cast<Eigen::Index>(others.size());
        Eigen::MatrixXd a(q, q);
        Eigen::VectorXd b(q);
        for (Eigen::Index i = 0; i < q; ++i) {
            b(i) = s(others[static_cast<std::size_t>(i)], f);
            for (Eigen::Index j = 0; j < q; ++j)
                a(i, j) = s(others[static_cast<std::size_t>(i)], others[static_cast<std::size_t>(j)]);
        }
        Eigen::MatrixXd damped = a;
        damped.diagonal().array() += kRidge;
        Eigen::VectorXd beta = damped.ldlt().solve(b);
        // Residual sum of squares of the centred fit.
        double sse = sst - 2.0 * beta.dot(b) + beta.dot(a * beta);
        double r2 = 1.0 - sse / sst;
        scores[static_cast<std::size_t>(f)] = std::clamp(r2, 0.0, 1.0);
    }
    return scores;
}

R2Result r2_redundancy(const FeatureMatrix& matrix, double threshold)
{
    constexpr double kR2TieTolerance = 1e-9;
    if (matrix.n_rows() <= matrix.n_features() + 1)
        throw std::invalid_argument("R^2 redundancy needs more rows than features + 1");
    bool all_constant = true;
    for (std::size_t c = 0; c < matrix.n_features(); ++c)
        all_constant = all_constant && column_constant(matrix, c);
    if (all_constant)
        throw std::invalid_argument("R^2 redundancy on a degenerate matrix: every feature is constant");

    R2Result result;
    std::vector<std::string> remaining = matrix.feature_names();
    while (true) {
        FeatureMatrix current = matrix.select(remaining);
        std::vector<double> scores = r2_scores(current);
        std::size_t worst = 0;
        for (std::size_t i = 1; i < scores.size(); ++i) {
            if (scores[i] > scores[worst])
                worst = i;
        }
        // Exactly collinear features all score 1 up to rounding; take the
        // last of the tied ones so the choice does not follow the noise.
        for (std::size_t i = scores.size(); i-- > worst + 1;) {
            if (scores[i] >= scores[worst] - kR2TieTolerance) {
                worst = i;
                break;
            }
        }
        if (scores.empty() || !(scores[worst] > threshold)) {
            for (std::size_t i = 0; i < remaining.size(); ++i)
                result.r2_scores[remaining[i]] = scores[i];
            break;
        }
        result.r2_scores[remaining[worst]] = scores[worst];
        result.dropped.push_back(remaining[worst]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(worst));
        if (remaining.size() < 2) {
            for (const auto& name : remaining)
                result.r2_scores[name] = 0.0;
            break;
        }
    }
    result.kept = remaining;
    return result;
}

EpvTable epv_check(const ClassCounts& counts, std::size_t n_features, double epv_minimum)
{
    if (n_features == 0)
        throw std::invalid_argument("EPV needs at least one feature");
    EpvTable table;
    for (Agent a : kAllAgents) {
        EpvEntry e;
        e.samples = counts[agent_index(a)];
        e.epv = static_cast<double>(e.samples) / static_cast<double>(n_features);
        e.flagged = e.epv < epv_minimum;
        table[a] = e;
    }
    return table;
}

ReductionReport reduce_features(const FeatureMatrix& matrix, const ReductionConfig& config)
{
    config.validate();
    ReductionReport report;
    report.config = config;
    report.features = matrix.feature_names();
    const auto& names = matrix.feature_names();

    Eigen::MatrixXd corr = correlation_matrix(matrix);
    auto selection = select_representatives(cluster_features(corr, config.correlation_threshold), corr);
    std::vector<std::string> kept_step1;
    for (std::size_t i : selection.kept)
        kept_step1.push_back(names[i]);
    for (std::size_t i : selection.dropped)
        report.dropped_step1.push_back(names[i]);
    for (const auto& c : selection.clusters) {
        if (c.members.size() < 2)
            continue;
        std::vector<std::string> members;
        for (std::size_t m : c.members)
            members.push_back(names[m]);
        report.clusters.push_back(std::move(members));
        report.representatives.push_back(names[c.representative]);
    }

    R2Result r2 = r2_redundancy(matrix.select(kept_step1), config.r2_threshold);
    report.r2_scores = std::move(r2.r2_scores);
    report.dropped_step2 = std::move(r2.dropped);
    report.kept = std::move(r2.kept);

    ClassCounts counts{};
    for (Agent a : matrix.labels())
        ++counts[agent_index(a)];
    report.epv_table = epv_check(counts, report.kept.size(), config.epv_minimum);
    return report;
}

nlohmann::json report_to_json(const ReductionReport& report)
{
    using nlohmann::json;
    json clusters = json::array();
    std::size_t pairs = 0, larger = 0;
    for (std::size_t i = 0; i < report.clusters.size(); ++i) {
        clusters.push_back({{"members", report.clusters[i]}, {"representative", report.representatives[i]}});
        (report.clusters[i].size() == 2 ? pairs : larger) += 1;
    }
    json r2 = json::object();
    for (const auto& [name, value] : report.r2_scores)
        r2[name] = value;
    json epv = json::object();
    for (const auto& [agent, e] : report.epv_table)
        epv[std::string(agent_name(agent))] = {{"samples", e.samples}, {"epv", e.epv}, {"flagged", e.flagged}};
    double max_r2 = 0.0;
    for (const auto& name : report.kept)
        max_r2 = std::max(max_r2, report.r2_scores.at(name));
    return {
        {"config", {
            {"correlation_threshold", report.config.correlation_threshold},
            {"r2_threshold", report.config.r2_threshold},
            {"epv_minimum", report.config.epv_minimum},
        }},
        {"features", report.features},
        {"clusters", clusters},
        {"dropped_step1", report.dropped_step1},
        {"r2_scores", r2},
        {"dropped_step2", report.dropped_step2},
        {"kept", report.kept},
        {"epv_table", epv},
        {"summary", {
            {"input_features", report.features.size()},
            {"kept_features", report.kept.size()},
            {"pair_clusters", pairs},
            {"larger_clusters", larger},
            {"max_kept_r2", max_r2},
        }},
    };
}

ReductionReport report_from_json(const nlohmann::json& j)
{
    ReductionReport r;
    const auto& cfg = j.at("config");
    r.config.correlation_threshold = cfg.at("correlation_threshold").get<double>();
    r.config.r2_threshold = cfg.at("r2_threshold").get<double>();
    r.config.epv_minimum = cfg.at("epv_minimum").get<double>();
    r.features = j.at("features").get<std::vector<std::string>>();
    for (const auto& c : j.at("clusters")) {
        r.clusters.push_back(c.at("members").get<std::vector<std::string>>());
        r.representatives.push_back(c.at("representative").get<std::string>());
    }
    r.dropped_step1 = j.at("dropped_step1").get<std::vector<std::string>>();
    for (const auto& [name, value] : j.at("r2_scores").items())
        r.r2_scores[name] = value.get<double>();
    r.dropped_step2 = j.at("dropped_step2").get<std::vector<std::string>>();
    r.kept = j.at("kept").get<std::vector<std::string>>();
    for (const auto& [name, e] : j.at("epv_table").items()) {
        auto agent = parse_agent(name);
        if (!agent)
            throw std::invalid_argument("unknown agent in EPV table: " + name);
        r.epv_table[*agent] = {e.at("samples").get<std::size_t>(), e.at("epv").get<double>(), e.at("flagged").get<bool>()};
    }
    return r;
}

} // namespace agentprint
