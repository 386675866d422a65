#pragma once

// Closed-form oracles shared by the unit tests and the acceptance run.

#include <cmath>
#include <vector>

namespace oracles {

// Mean absolute difference over all ordered pairs.
inline double gini(const std::vector<double>& x)
{
    double sum = 0.0, diff = 0.0;
    for (double a : x) {
        sum += a;
        for (double b : x)
            diff += std::abs(a - b);
    }
    if (x.empty() || sum == 0.0)
        return 0.0;
    return diff / (2.0 * static_cast<double>(x.size()) * sum);
}

} // namespace oracles
