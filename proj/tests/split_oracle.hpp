#pragma once

// Brute-force root split for the first softmax boosting tree: every
// feature, every midpoint between consecutive distinct values, gradient
// statistics summed directly from the row set.

#include <agentprint/learn.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace split_oracle {

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

struct RootStats {
    std::vector<double> g;
    std::vector<double> h;
};

// Gradients of class slot `k` at the zero initial margin.
inline RootStats first_round_stats(const agentprint::FeatureMatrix& m, std::size_t k, const std::vector<agentprint::Agent>& classes)
{
    const double p = 1.0 / static_cast<double>(classes.size());
    RootStats s;
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        double y = m.labels()[r] == classes[k] ? 1.0 : 0.0;
        s.g.push_back(p - y);
        s.h.push_back(std::max(p * (1.0 - p), 1e-16));
    }
    return s;
}

inline double split_gain(const agentprint::FeatureMatrix& m, const RootStats& s, std::size_t f, double threshold,
    const agentprint::GbmConfig& cfg, bool& admissible)
{
    double gl = 0, hl = 0, g = 0, h = 0;
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        g += s.g[r];
        h += s.h[r];
        if (m.at(r, f) < threshold) {
            gl += s.g[r];
            hl += s.h[r];
        }
    }
    double gr = g - gl, hr = h - hl;
    admissible = hl >= cfg.min_child_weight && hr >= cfg.min_child_weight && hl > 0 && hr > 0;
    const double lambda = cfg.l2_reg;
    return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - g * g / (h + lambda));
}

inline std::optional<Split> best_root_split(const agentprint::FeatureMatrix& m, const RootStats& s, const agentprint::GbmConfig& cfg)
{
    std::optional<Split> best;
    for (std::size_t f = 0; f < m.n_features(); ++f) {
        auto col = m.column(f);
        std::set<double> distinct(col.begin(), col.end());
        std::vector<double> v(distinct.begin(), distinct.end());
        for (std::size_t i = 0; i + 1 < v.size(); ++i) {
            double t = v[i] + (v[i + 1] - v[i]) / 2.0;
            if (!(t > v[i]))
                t = v[i + 1];
            bool ok = false;
            double gain = split_gain(m, s, f, t, cfg, ok);
            if (ok && gain > 1e-6 && (!best || gain > best->gain))
                best = Split{f, t, gain};
        }
    }
    return best;
}

} // namespace split_oracle
