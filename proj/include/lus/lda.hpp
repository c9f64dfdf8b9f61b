#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "error.hpp"

namespace lus {

enum class Priors { Equal, Proportional };

inline const char* priors_name(Priors p) { return p == Priors::Equal ? "equal" : "proportional"; }

/// Trace-relative ridge added to the pooled covariance before inversion.
inline constexpr double kLdaRidge = 1e-6;

/// Linear discriminant with one pooled covariance. Immutable after training.
struct LdaModel {
    std::vector<Label> classes;    ///< canonical label order
    Eigen::MatrixXd means;         ///< classes x dim
    Eigen::MatrixXd cov_inverse;   ///< dim x dim, symmetric
    Eigen::VectorXd log_priors;    ///< per class

    std::size_t dim() const noexcept { return static_cast<std::size_t>(means.cols()); }
};

struct LdaPrediction {
    Label label = Label::Normal;
    std::vector<double> scores;  ///< aligned with LdaModel::classes
};

/// Fits class means, the pooled within-class covariance (divisor n - C) and
/// priors. Rows of `x` are samples. A class may have a single sample as long
/// as n > C.
inline LdaModel lda_train(const Eigen::MatrixXd& x, std::span<const Label> labels, Priors priors) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = x.cols();
    if (labels.size() != n) throw InputError("lda_train: label count does not match rows");
    if (d == 0) throw InputError("lda_train: empty feature subset");

    std::array<std::size_t, kLabelCount> counts{};
    for (Label l : labels) ++counts[static_cast<std::size_t>(l)];
    LdaModel m;
    for (std::size_t c = 0; c < kLabelCount; ++c) {
        if (counts[c] == 0) continue;
        m.classes.push_back(static_cast<Label>(c));
    }
    if (m.classes.size() < 2) throw EvaluationError("lda_train: need at least two classes");
    const auto n_classes = static_cast<Eigen::Index>(m.classes.size());
    if (n <= m.classes.size()) throw EvaluationError("lda_train: too few samples for pooled covariance");

    std::array<Eigen::Index, kLabelCount> slot{};
    for (Eigen::Index k = 0; k < n_classes; ++k) slot[static_cast<std::size_t>(m.classes[static_cast<std::size_t>(k)])] = k;

    m.means = Eigen::MatrixXd::Zero(n_classes, d);
    for (std::size_t i = 0; i < n; ++i) m.means.row(slot[static_cast<std::size_t>(labels[i])]) += x.row(static_cast<Eigen::Index>(i));
    for (Eigen::Index k = 0; k < n_classes; ++k)
        m.means.row(k) /= static_cast<double>(counts[static_cast<std::size_t>(m.classes[static_cast<std::size_t>(k)])]);

    Eigen::MatrixXd centered(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i)
        centered.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(i)) - m.means.row(slot[static_cast<std::size_t>(labels[i])]);
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - m.classes.size());

    const double trace = cov.trace();
    if (!(trace > 0.0)) throw EvaluationError("lda_train: pooled covariance has zero trace (identical rows)");
    cov.diagonal().array() += kLdaRidge * trace / static_cast<double>(d);

    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw EvaluationError("lda_train: pooled covariance not positive definite");
    m.cov_inverse = llt.solve(Eigen::MatrixXd::Identity(d, d));
    m.cov_inverse = 0.5 * (m.cov_inverse + m.cov_inverse.transpose()).eval();

    m.log_priors.resize(n_classes);
    for (Eigen::Index k = 0; k < n_classes; ++k) {
        const double p = priors == Priors::Equal
                             ? 1.0 / static_cast<double>(n_classes)
                             : static_cast<double>(counts[static_cast<std::size_t>(m.classes[static_cast<std::size_t>(k)])]) /
                                   static_cast<double>(n);
        m.log_priors(k) = std::log(p);
    }
    return m;
}

/// Design matrix of `features` (table columns) for `rows`, optionally with
/// the three clinical values appended.
inline Eigen::MatrixXd design_matrix(const FeatureTable& table, std::span<const std::size_t> rows,
                                     std::span<const std::size_t> features, bool with_clinical) {
    const auto d = static_cast<Eigen::Index>(features.size() + (with_clinical ? kClinicalNames.size() : 0));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& rec = table.records.at(rows[i]);
        Eigen::Index j = 0;
        for (std::size_t f : features) x(static_cast<Eigen::Index>(i), j++) = rec.features.at(f);
        if (with_clinical)
            for (double v : rec.clinical.values()) x(static_cast<Eigen::Index>(i), j++) = v;
    }
    return x;
}

inline LdaModel lda_train(const FeatureTable& table, std::span<const std::size_t> rows,
                          std::span<const std::size_t> features, bool with_clinical, Priors priors) {
    if (features.empty() && !with_clinical) throw InputError("lda_train: empty feature subset");
    std::vector<Label> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) labels.push_back(table.records.at(r).label);
    return lda_train(design_matrix(table, rows, features, with_clinical), labels, priors);
}

/// argmax_c  x' S^-1 mu_c - mu_c' S^-1 mu_c / 2 + log pi_c; ties go to the
/// earlier class.
inline LdaPrediction lda_predict(const LdaModel& m, std::span<const double> x) {
    if (x.size() != m.dim())
        throw InputError("lda_predict: expected " + std::to_string(m.dim()) + " values, got " + std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw InputError("lda_predict: non-finite input");
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    LdaPrediction p;
    p.scores.resize(m.classes.size());
    std::size_t best = 0;
    for (std::size_t k = 0; k < m.classes.size(); ++k) {
        const Eigen::VectorXd mu = m.means.row(static_cast<Eigen::Index>(k)).transpose();
        const Eigen::VectorXd w = m.cov_inverse * mu;
        p.scores[k] = xv.dot(w) - 0.5 * mu.dot(w) + m.log_priors(static_cast<Eigen::Index>(k));
        if (p.scores[k] > p.scores[best]) best = k;
    }
    p.label = m.classes[best];
    return p;
}

// ---------------------------------------------------------------------------
// Plain-text model files
// ---------------------------------------------------------------------------

inline constexpr const char* kLdaMagic = "lus-lda";
inline constexpr int kLdaFormatVersion = 1;

inline void save_lda(std::ostream& out, const LdaModel& m) {
    out << kLdaMagic << ' ' << kLdaFormatVersion << '\n';
    out << "classes " << m.classes.size();
    for (Label l : m.classes) out << ' ' << label_name(l);
    out << "\ndim " << m.dim() << "\nlog_priors";
    for (Eigen::Index k = 0; k < m.log_priors.size(); ++k) out << ' ' << csv::format_double(m.log_priors(k));
    out << '\n';
    for (Eigen::Index k = 0; k < m.means.rows(); ++k) {
        out << "mean";
        for (Eigen::Index j = 0; j < m.means.cols(); ++j) out << ' ' << csv::format_double(m.means(k, j));
        out << '\n';
    }
    for (Eigen::Index i = 0; i < m.cov_inverse.rows(); ++i) {
        out << "cov_inverse";
        for (Eigen::Index j = 0; j < m.cov_inverse.cols(); ++j) out << ' ' << csv::format_double(m.cov_inverse(i, j));
        out << '\n';
    }
}

inline LdaModel load_lda(std::istream& in) {
    auto fail = [](const std::string& what) -> LdaModel { throw InputError("LDA model file: " + what); };
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != kLdaMagic) return fail("bad magic");
    if (version != kLdaFormatVersion) return fail("unsupported version " + std::to_string(version));
    LdaModel m;
    std::size_t n_classes = 0, dim = 0;
    if (!(in >> word >> n_classes) || word != "classes" || n_classes < 2) return fail("bad classes line");
    for (std::size_t k = 0; k < n_classes; ++k) {
        if (!(in >> word)) return fail("truncated class list");
        const auto l = parse_label(word);
        if (!l) return fail("unknown label " + word);
        m.classes.push_back(*l);
    }
    if (!(in >> word >> dim) || word != "dim" || dim == 0) return fail("bad dim line");
    auto read_number = [&](double& v) {
        if (!(in >> word)) return false;
        const auto p = csv::parse_double(word);
        if (!p) return false;
        v = *p;
        return true;
    };
    const auto C = static_cast<Eigen::Index>(n_classes), D = static_cast<Eigen::Index>(dim);
    m.log_priors.resize(C);
    if (!(in >> word) || word != "log_priors") return fail("missing log_priors");
    for (Eigen::Index k = 0; k < C; ++k)
        if (!read_number(m.log_priors(k))) return fail("bad log_priors");
    m.means.resize(C, D);
    for (Eigen::Index k = 0; k < C; ++k) {
        if (!(in >> word) || word != "mean") return fail("missing mean row");
        for (Eigen::Index j = 0; j < D; ++j)
            if (!read_number(m.means(k, j))) return fail("bad mean value");
    }
    m.cov_inverse.resize(D, D);
    for (Eigen::Index i = 0; i < D; ++i) {
        if (!(in >> word) || word != "cov_inverse") return fail("missing cov_inverse row");
        for (Eigen::Index j = 0; j < D; ++j)
            if (!read_number(m.cov_inverse(i, j))) return fail("bad cov_inverse value");
    }
    return m;
}

inline void save_lda(const std::filesystem::path& path, const LdaModel& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    save_lda(out, m);
}

inline LdaModel load_lda(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return load_lda(in);
}

} // namespace lus
