#pragma once

// Contingency-table chi-square computed from scratch: bins found by walking
// explicit edges, expected counts from the margins, p-value from Boost.

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "lus/dataset.hpp"

namespace lus::oracle {

inline std::pair<double, double> chi2(const std::vector<double>& x, const std::vector<Label>& y) {
    const double lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end());
    if (lo == hi) return {0.0, 1.0};
    std::map<std::pair<int, int>, double> cells;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < x.size(); ++i) {
        int bin = 0;
        while (bin < 9 && (x[i] - lo) * 10.0 / (hi - lo) >= bin + 1) ++bin;
        const int c = static_cast<int>(y[i]);
        cells[{bin, c}] += 1;
        rows[bin] += 1;
        cols[c] += 1;
    }
    const double n = static_cast<double>(x.size());
    double stat = 0;
    for (auto [b, rb] : rows)
        for (auto [c, cc] : cols) {
            const double e = rb * cc / n;
            const auto it = cells.find({b, c});
            const double o = it == cells.end() ? 0.0 : it->second;
            stat += (o - e) * (o - e) / e;
        }
    const double dof = static_cast<double>((rows.size() - 1) * (cols.size() - 1));
    return {stat, stat > 0 ? boost::math::gamma_q(dof / 2, stat / 2) : 1.0};
}

} // namespace lus::oracle
