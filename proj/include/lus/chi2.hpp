#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "special_functions.hpp"

namespace lus {

inline constexpr std::size_t kChi2Bins = 10;

/// Result of univariate chi-square screening. `p_values` and `statistics`
/// align with `candidates`; `order` lists table feature indices, most
/// class-dependent first.
struct FeatureRanking {
    std::vector<std::size_t> candidates;
    std::vector<double> p_values;
    std::vector<double> statistics;
    std::vector<double> dof;
    std::vector<std::size_t> order;
};

/// Pearson chi-square test of one feature against class labels.
struct Chi2Test {
    double statistic = 0;
    double dof = 0;
    double p_value = 1;
};

/// Bins `values` into 10 equal-width bins over their observed range and tests
/// independence from `classes` (dense 0..n_classes-1). Constant input gives p = 1.
inline Chi2Test chi2_test(std::span<const double> values, std::span<const int> classes, std::size_t n_classes) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo) || n_classes < 2) return {};
    std::vector<double> table(kChi2Bins * n_classes, 0.0);
    const double scale = static_cast<double>(kChi2Bins) / (hi - lo);
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bin = static_cast<std::size_t>((values[i] - lo) * scale);
        bin = std::min(bin, kChi2Bins - 1);
        table[bin * n_classes + static_cast<std::size_t>(classes[i])] += 1.0;
    }
    std::vector<double> row(kChi2Bins, 0.0), col(n_classes, 0.0);
    for (std::size_t b = 0; b < kChi2Bins; ++b)
        for (std::size_t c = 0; c < n_classes; ++c) {
            row[b] += table[b * n_classes + c];
            col[c] += table[b * n_classes + c];
        }
    const double n = static_cast<double>(values.size());
    double stat = 0.0;
    std::size_t nonempty = 0;
    for (std::size_t b = 0; b < kChi2Bins; ++b) {
        if (row[b] == 0.0) continue;
        ++nonempty;
        for (std::size_t c = 0; c < n_classes; ++c) {
            if (col[c] == 0.0) continue;
            const double expected = row[b] * col[c] / n;
            const double d = table[b * n_classes + c] - expected;
            stat += d * d / expected;
        }
    }
    Chi2Test t;
    t.statistic = stat;
    t.dof = static_cast<double>((nonempty - 1) * (n_classes - 1));
    t.p_value = chi_square_sf(stat, t.dof);
    return t;
}

/// Ranks candidate features on the given table rows by ascending p-value,
/// then descending statistic, then index.
inline FeatureRanking chi2_rank(const FeatureTable& table, std::span<const std::size_t> rows,
                                std::span<const std::size_t> candidates) {
    if (rows.empty()) throw EvaluationError("chi2_rank: no rows");
    // Dense class ids over the classes present in `rows`.
    std::array<int, kLabelCount> dense{};
    dense.fill(-1);
    for (std::size_t r : rows) dense[static_cast<std::size_t>(table.records.at(r).label)] = 0;
    std::size_t n_classes = 0;
    for (auto& d : dense)
        if (d == 0) d = static_cast<int>(n_classes++);
    if (n_classes < 2) throw EvaluationError("chi2_rank: need at least two classes");

    std::vector<int> classes(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        classes[i] = dense[static_cast<std::size_t>(table.records[rows[i]].label)];

    FeatureRanking out;
    out.candidates.assign(candidates.begin(), candidates.end());
    out.p_values.resize(candidates.size());
    out.statistics.resize(candidates.size());
    out.dof.resize(candidates.size());
    std::vector<double> column(rows.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const std::size_t f = candidates[k];
        if (f >= table.feature_count()) throw InputError("chi2_rank: feature index out of range");
        for (std::size_t i = 0; i < rows.size(); ++i) column[i] = table.records[rows[i]].features[f];
        const auto t = chi2_test(column, classes, n_classes);
        out.p_values[k] = t.p_value;
        out.statistics[k] = t.statistic;
        out.dof[k] = t.dof;
    }
    std::vector<std::size_t> pos(candidates.size());
    std::iota(pos.begin(), pos.end(), 0);
    std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
        if (out.p_values[a] != out.p_values[b]) return out.p_values[a] < out.p_values[b];
        if (out.statistics[a] != out.statistics[b]) return out.statistics[a] > out.statistics[b];
        return out.candidates[a] < out.candidates[b];
    });
    out.order.reserve(pos.size());
    for (std::size_t p : pos) out.order.push_back(out.candidates[p]);
    return out;
}

/// All rows, all features.
inline FeatureRanking chi2_rank(const FeatureTable& table) {
    std::vector<std::size_t> rows(table.size()), cand(table.feature_count());
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cand.begin(), cand.end(), 0);
    return chi2_rank(table, rows, cand);
}

} // namespace lus
