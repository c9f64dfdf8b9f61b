#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "chi2.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "lda.hpp"

namespace lus {

// ---------------------------------------------------------------------------
// Confusion matrix
// ---------------------------------------------------------------------------

/// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
    std::vector<Label> classes;
    std::vector<std::size_t> counts;  ///< row-major classes x classes

    explicit ConfusionMatrix(std::vector<Label> cls = {})
        : classes(std::move(cls)), counts(classes.size() * classes.size(), 0) {}

    std::size_t n() const noexcept { return classes.size(); }
    std::size_t& at(std::size_t t, std::size_t p) { return counts[t * n() + p]; }
    std::size_t at(std::size_t t, std::size_t p) const { return counts[t * n() + p]; }

    std::size_t index_of(Label l) const {
        const auto it = std::find(classes.begin(), classes.end(), l);
        if (it == classes.end()) throw EvaluationError(std::string("label ") + label_name(l) + " not in confusion matrix");
        return static_cast<std::size_t>(it - classes.begin());
    }
    void add(Label truth, Label predicted) { ++at(index_of(truth), index_of(predicted)); }

    std::size_t total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
    std::size_t correct() const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n(); ++i) c += at(i, i);
        return c;
    }
    std::size_t row_total(std::size_t t) const {
        std::size_t s = 0;
        for (std::size_t p = 0; p < n(); ++p) s += at(t, p);
        return s;
    }
    double row_percent(std::size_t t, std::size_t p) const {
        const auto rt = row_total(t);
        return rt ? 100.0 * static_cast<double>(at(t, p)) / static_cast<double>(rt) : 0.0;
    }
    /// Percent correct over all evaluated samples.
    double accuracy() const {
        const auto t = total();
        return t ? 100.0 * static_cast<double>(correct()) / static_cast<double>(t) : 0.0;
    }
};

/// Labels present in the table, in canonical order.
inline std::vector<Label> present_labels(const FeatureTable& t) {
    std::array<bool, kLabelCount> seen{};
    for (const auto& r : t.records) seen[static_cast<std::size_t>(r.label)] = true;
    std::vector<Label> out;
    for (std::size_t c = 0; c < kLabelCount; ++c)
        if (seen[c]) out.push_back(static_cast<Label>(c));
    return out;
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

enum class CvMode { LeaveOneOut, LeaveOneSubjectOut };

inline const char* cv_name(CvMode m) { return m == CvMode::LeaveOneOut ? "loo" : "loso"; }

struct CvOptions {
    std::size_t k = 15;  ///< top-ranked DTCWT features per fold
    Priors priors = Priors::Equal;
    bool with_clinical = true;
    unsigned threads = 1;  ///< fold workers; 0 = hardware concurrency
    /// Called once per fold with the rows handed to feature ranking and the
    /// held-out rows. May run on worker threads.
    std::function<void(std::span<const std::size_t> ranking_rows, std::span<const std::size_t> test_rows)> on_rank;
};

struct CvResult {
    ConfusionMatrix matrix;
    double accuracy = 0;             ///< percent
    std::vector<Label> predictions;  ///< per table row
    std::size_t folds = 0;
};

struct Fold {
    std::string name;
    std::vector<std::size_t> test;
    std::vector<std::size_t> train;
};

inline std::vector<Fold> make_folds(const FeatureTable& t, CvMode mode) {
    std::vector<Fold> folds;
    if (mode == CvMode::LeaveOneOut) {
        for (std::size_t i = 0; i < t.size(); ++i) folds.push_back({"row " + std::to_string(i + 1), {i}, {}});
    } else {
        std::map<std::string, std::size_t> fold_of;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const auto& s = t.records[i].subject_id;
            auto [it, inserted] = fold_of.emplace(s, folds.size());
            if (inserted) folds.push_back({"subject " + s, {}, {}});
            folds[it->second].test.push_back(i);
        }
    }
    for (auto& f : folds) {
        std::size_t next = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (next < f.test.size() && f.test[next] == i) {
                ++next;
                continue;
            }
            f.train.push_back(i);
        }
    }
    return folds;
}

namespace detail {

inline void check_cv_preconditions(const FeatureTable& t, CvMode mode, std::size_t k_max) {
    validate_table(t);
    if (t.size() < 2) throw InputError("cross-validation needs at least 2 records");
    if (k_max < 1) throw InputError("k must be >= 1");
    if (k_max > t.feature_count())
        throw InputError("k = " + std::to_string(k_max) + " exceeds the " + std::to_string(t.feature_count()) +
                         " available features");
    const auto labels = present_labels(t);
    if (labels.size() < 2) throw EvaluationError("cross-validation needs at least two classes");
    if (mode == CvMode::LeaveOneSubjectOut) {
        std::array<std::map<std::string, int>, kLabelCount> subjects;
        for (const auto& r : t.records) subjects[static_cast<std::size_t>(r.label)][r.subject_id] = 1;
        for (Label l : labels)
            if (subjects[static_cast<std::size_t>(l)].size() < 2)
                throw EvaluationError(std::string("LOSO: class ") + label_name(l) +
                                      " is represented by a single subject");
    }
}

// Predictions for each k in `ks`, per table row.
inline std::vector<std::vector<Label>> run_folds(const FeatureTable& t, CvMode mode, std::span<const std::size_t> ks,
                                                 const CvOptions& opt, std::size_t& n_folds) {
    const auto folds = make_folds(t, mode);
    n_folds = folds.size();
    const auto labels = present_labels(t);
    std::vector<std::size_t> candidates(t.feature_count());
    std::iota(candidates.begin(), candidates.end(), 0);

    std::vector<std::vector<Label>> predictions(ks.size(), std::vector<Label>(t.size()));
    std::vector<std::string> errors(folds.size());
    parallel_for(folds.size(), opt.threads, [&](std::size_t fi) {
        const auto& fold = folds[fi];
        try {
            std::array<bool, kLabelCount> kept{};
            for (std::size_t r : fold.train) kept[static_cast<std::size_t>(t.records[r].label)] = true;
            for (Label l : labels)
                if (!kept[static_cast<std::size_t>(l)])
                    throw EvaluationError(std::string("training fold loses class ") + label_name(l));

            if (opt.on_rank) opt.on_rank(fold.train, fold.test);
            const auto ranking = chi2_rank(t, fold.train, candidates);
            for (std::size_t ki = 0; ki < ks.size(); ++ki) {
                const std::span<const std::size_t> top(ranking.order.data(), ks[ki]);
                const auto model = lda_train(t, fold.train, top, opt.with_clinical, opt.priors);
                const auto x = design_matrix(t, fold.test, top, opt.with_clinical);
                for (std::size_t j = 0; j < fold.test.size(); ++j) {
                    const Eigen::VectorXd row = x.row(static_cast<Eigen::Index>(j)).transpose();
                    predictions[ki][fold.test[j]] =
                        lda_predict(model, std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))).label;
                }
            }
        } catch (const std::exception& e) {
            errors[fi] = fold.name + ": " + e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw EvaluationError(std::string(cv_name(mode)) + " fold failed, " + e);
    return predictions;
}

inline CvResult tally(const FeatureTable& t, std::vector<Label> predictions, std::size_t folds) {
    CvResult res;
    res.matrix = ConfusionMatrix(present_labels(t));
    for (std::size_t i = 0; i < t.size(); ++i) res.matrix.add(t.records[i].label, predictions[i]);
    res.accuracy = res.matrix.accuracy();
    res.predictions = std::move(predictions);
    res.folds = folds;
    return res;
}

} // namespace detail

/// Cross-validation with chi-square selection inside every fold: rank on the
/// training rows, keep the top k, append clinical values, fit LDA, predict the
/// held-out rows. Accuracy is counted per image.
inline CvResult cross_validate(const FeatureTable& t, CvMode mode, const CvOptions& opt) {
    detail::check_cv_preconditions(t, mode, opt.k);
    const std::size_t ks[] = {opt.k};
    std::size_t folds = 0;
    auto preds = detail::run_folds(t, mode, ks, opt, folds);
    return detail::tally(t, std::move(preds[0]), folds);
}

inline CvResult loo_cv(const FeatureTable& t, const CvOptions& opt) {
    return cross_validate(t, CvMode::LeaveOneOut, opt);
}

inline CvResult loso_cv(const FeatureTable& t, const CvOptions& opt) {
    return cross_validate(t, CvMode::LeaveOneSubjectOut, opt);
}

struct SweepPoint {
    std::size_t k = 0;
    double accuracy = 0;
};

struct SweepCurve {
    std::vector<SweepPoint> points;
    std::size_t best_k = 0;  ///< smallest k reaching the maximum accuracy
    double best_accuracy = 0;
};

/// Cross-validated accuracy for k = 1..k_max. Each fold is ranked once and
/// reused for every k, so each point equals a standalone run at that k.
inline SweepCurve sweep_feature_count(const FeatureTable& t, std::size_t k_max, CvMode mode, CvOptions opt) {
    detail::check_cv_preconditions(t, mode, k_max);
    std::vector<std::size_t> ks(k_max);
    std::iota(ks.begin(), ks.end(), 1);
    std::size_t folds = 0;
    auto preds = detail::run_folds(t, mode, ks, opt, folds);
    SweepCurve curve;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        const auto res = detail::tally(t, std::move(preds[ki]), folds);
        curve.points.push_back({ks[ki], res.accuracy});
        if (ki == 0 || res.accuracy > curve.best_accuracy) {
            curve.best_accuracy = res.accuracy;
            curve.best_k = ks[ki];
        }
    }
    return curve;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
} // namespace detail

/// CSV with one row per true class: counts then row percentages.
inline void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m) {
    out << "true_class";
    for (Label l : m.classes) out << ",count_" << label_name(l);
    for (Label l : m.classes) out << ",pct_" << label_name(l);
    out << '\n';
    for (std::size_t t = 0; t < m.n(); ++t) {
        out << label_name(m.classes[t]);
        for (std::size_t p = 0; p < m.n(); ++p) out << ',' << m.at(t, p);
        for (std::size_t p = 0; p < m.n(); ++p) out << ',' << detail::fixed2(m.row_percent(t, p));
        out << '\n';
    }
}

/// Plain-text table of row percentages, true class down, predicted across.
inline void write_confusion_text(std::ostream& out, const ConfusionMatrix& m, const std::string& title) {
    constexpr int w = 9;
    char cell[64];
    out << title << '\n';
    out << "overall per-image accuracy: " << detail::fixed2(m.accuracy()) << "% (" << m.correct() << '/' << m.total()
        << ")\n";
    std::snprintf(cell, sizeof cell, "%-8s%-8s", "", "");
    out << cell << "Predicted class\n";
    std::snprintf(cell, sizeof cell, "%-8s%-8s", "", "");
    out << cell;
    for (Label l : m.classes) {
        std::snprintf(cell, sizeof cell, "%*s", w, label_name(l));
        out << cell;
    }
    out << '\n';
    for (std::size_t t = 0; t < m.n(); ++t) {
        std::snprintf(cell, sizeof cell, "%-8s%-8s", t == 0 ? "True" : "", label_name(m.classes[t]));
        out << cell;
        for (std::size_t p = 0; p < m.n(); ++p) {
            std::snprintf(cell, sizeof cell, "%*s", w, (detail::fixed2(m.row_percent(t, p)) + "%").c_str());
            out << cell;
        }
        out << '\n';
    }
}

/// Writes `<base>.csv` and `<base>.txt`. Every class row must be non-empty.
inline void report(const ConfusionMatrix& m, const std::filesystem::path& base, const std::string& title) {
    for (std::size_t t = 0; t < m.n(); ++t)
        if (m.row_total(t) == 0)
            throw EvaluationError(std::string("report: class ") + label_name(m.classes[t]) + " has no samples");
    auto csv_path = base;
    csv_path += ".csv";
    auto txt_path = base;
    txt_path += ".txt";
    std::ofstream c(csv_path, std::ios::binary), x(txt_path, std::ios::binary);
    if (!c) throw InputError("cannot write " + csv_path.string());
    if (!x) throw InputError("cannot write " + txt_path.string());
    write_confusion_csv(c, m);
    write_confusion_text(x, m, title);
    if (!c || !x) throw InputError("failed writing report " + base.string());
}

inline void write_sweep_csv(std::ostream& out, const SweepCurve& curve) {
    out << "k,accuracy\n";
    for (const auto& p : curve.points) out << p.k << ',' << detail::fixed2(p.accuracy) << '\n';
}

} // namespace lus
