#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "error.hpp"
#include "features.hpp"
#include "image_io.hpp"
#include "preprocess.hpp"

namespace lus {

// ---------------------------------------------------------------------------
// Labels and records
// ---------------------------------------------------------------------------

enum class Label : int { Normal = 0, CLD, CON, PTX, RDS, TTN };

inline constexpr std::size_t kLabelCount = 6;
inline constexpr std::array<const char*, kLabelCount> kLabelNames = {"Normal", "CLD", "CON", "PTX", "RDS", "TTN"};

inline const char* label_name(Label l) { return kLabelNames[static_cast<std::size_t>(l)]; }

inline std::optional<Label> parse_label(std::string_view s) {
    for (std::size_t i = 0; i < kLabelCount; ++i)
        if (s == kLabelNames[i]) return static_cast<Label>(i);
    return std::nullopt;
}

struct ClinicalFeatures {
    double ga = 0;     ///< gestational age, weeks
    double cgats = 0;  ///< corrected gestational age at scan, weeks
    double dol = 0;    ///< days of life
    std::array<double, 3> values() const { return {ga, cgats, dol}; }
};

inline constexpr std::array<const char*, 3> kClinicalNames = {"ga_weeks", "cgats_weeks", "dol_days"};

struct SampleRecord {
    std::vector<double> features;  ///< ordered as FeatureTable::feature_names
    ClinicalFeatures clinical;
    Label label = Label::Normal;
    std::string subject_id;
    std::string video_id;
};

struct FeatureTable {
    std::vector<std::string> feature_names;
    std::vector<SampleRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    std::size_t feature_count() const noexcept { return feature_names.size(); }
};

/// Throws unless every record matches the shared feature ordering and carries
/// a subject id and finite, non-negative clinical values.
inline void validate_table(const FeatureTable& t) {
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        const auto& r = t.records[i];
        if (r.features.size() != t.feature_names.size())
            throw InputError("record " + std::to_string(i + 1) + " has " + std::to_string(r.features.size()) +
                             " features, table has " + std::to_string(t.feature_names.size()));
        if (r.subject_id.empty()) throw InputError("record " + std::to_string(i + 1) + " has empty subject_id");
        for (double v : r.clinical.values())
            if (!std::isfinite(v) || v < 0) throw InputError("record " + std::to_string(i + 1) + " has invalid clinical value");
    }
}

// ---------------------------------------------------------------------------
// CSV helpers
// ---------------------------------------------------------------------------

namespace csv {

/// Splits one line on commas; double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline std::string quote(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    const auto t = trim(s);
    double v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) return std::nullopt;
    return v;
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
    const auto t = trim(s);
    std::size_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) return std::nullopt;
    return v;
}

/// Reads non-empty lines, stripping a UTF-8 BOM and trailing CR.
inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        first = false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

} // namespace csv

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

struct ManifestRow {
    std::size_t row = 0;  ///< 1-based data row number
    std::filesystem::path image_path;
    std::string subject_id;
    std::string video_id;
    Label label = Label::Normal;
    ClinicalFeatures clinical;
    std::optional<RoiRect> roi;
};

inline constexpr std::array<const char*, 7> kManifestColumns = {
    "image_path", "subject_id", "video_id", "label", "ga_weeks", "cgats_weeks", "dol_days"};
inline constexpr std::array<const char*, 4> kRoiColumns = {"roi_top", "roi_left", "roi_bottom", "roi_right"};

/// Parses the manifest CSV. Relative image paths resolve against the
/// manifest's directory. All malformed rows are reported together.
inline std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw InputError("manifest not found: " + path.string());
    auto lines = csv::read_lines(path);
    while (!lines.empty() && csv::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw InputError(path.string() + ": no records (missing header)");

    const auto header = csv::split(lines[0]);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[csv::trim(header[i])] = i;
    for (const char* name : kManifestColumns)
        if (!col.count(name)) throw InputError(path.string() + ": manifest header lacks column '" + name + "'");
    std::size_t roi_cols = 0;
    for (const char* name : kRoiColumns) roi_cols += col.count(name);
    if (roi_cols != 0 && roi_cols != kRoiColumns.size())
        throw InputError(path.string() + ": roi columns must be given all four or none");

    const auto base = path.parent_path();
    std::vector<ManifestRow> rows;
    std::vector<std::string> errors;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (csv::trim(lines[li]).empty()) continue;
        const std::size_t row_no = li;
        const auto f = csv::split(lines[li]);
        auto fail = [&](const std::string& msg) { errors.push_back("row " + std::to_string(row_no) + ": " + msg); };
        if (f.size() < header.size()) {
            fail("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
            continue;
        }
        auto field = [&](const char* name) { return csv::trim(f[col.at(name)]); };
        ManifestRow r;
        r.row = row_no;
        r.image_path = field("image_path");
        if (r.image_path.empty()) {
            fail("empty image_path");
            continue;
        }
        if (r.image_path.is_relative()) r.image_path = base / r.image_path;
        r.subject_id = field("subject_id");
        r.video_id = field("video_id");
        if (r.subject_id.empty()) {
            fail("empty subject_id");
            continue;
        }
        const auto label = parse_label(field("label"));
        if (!label) {
            fail("unknown label '" + field("label") + "'");
            continue;
        }
        r.label = *label;
        bool ok = true;
        std::array<double, 3> clin{};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto v = csv::parse_double(field(kClinicalNames[k]));
            if (!v || !std::isfinite(*v) || *v < 0) {
                fail(std::string("invalid ") + kClinicalNames[k] + " '" + field(kClinicalNames[k]) + "'");
                ok = false;
                break;
            }
            clin[k] = *v;
        }
        if (!ok) continue;
        r.clinical = {clin[0], clin[1], clin[2]};
        if (roi_cols) {
            std::array<std::string, 4> raw;
            std::size_t present = 0;
            for (std::size_t k = 0; k < 4; ++k) {
                raw[k] = field(kRoiColumns[k]);
                present += !raw[k].empty();
            }
            if (present == 4) {
                std::array<std::size_t, 4> v{};
                for (std::size_t k = 0; k < 4 && ok; ++k) {
                    const auto p = csv::parse_index(raw[k]);
                    if (!p) {
                        fail(std::string("invalid ") + kRoiColumns[k] + " '" + raw[k] + "'");
                        ok = false;
                    } else {
                        v[k] = *p;
                    }
                }
                if (!ok) continue;
                r.roi = RoiRect{v[0], v[1], v[2], v[3]};
            } else if (present != 0) {
                fail("roi must have all four values or none");
                continue;
            }
        }
        rows.push_back(std::move(r));
    }
    if (!errors.empty()) {
        std::string msg = path.string() + ": " + std::to_string(errors.size()) + " malformed row(s)";
        for (const auto& e : errors) msg += "\n  " + e;
        throw InputError(msg);
    }
    if (rows.empty()) throw InputError(path.string() + ": no records");
    return rows;
}

/// Load, artifact removal (when the row has a roi), size normalization.
inline GrayImage preprocess_row(const ManifestRow& row) {
    GrayImage img = load_image(row.image_path);
    if (row.roi) img = remove_artifacts(img, *row.roi);
    return normalize_size(img);
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware concurrency).
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
}

/// Manifest -> feature table, preserving row order. Any row failure aborts
/// with every failing row listed.
inline FeatureTable build_dataset(const std::filesystem::path& manifest, const FeatureConfig& cfg = {},
                                  unsigned threads = 0) {
    const auto rows = read_manifest(manifest);
    FeatureTable table;
    table.feature_names = feature_names(cfg);
    table.records.resize(rows.size());
    std::vector<std::string> errors(rows.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        const auto& row = rows[i];
        try {
            auto fv = extract_features(preprocess_row(row), cfg);
            table.records[i] = SampleRecord{std::move(fv.values), row.clinical, row.label, row.subject_id, row.video_id};
        } catch (const std::exception& e) {
            errors[i] = "row " + std::to_string(row.row) + ": " + e.what();
        }
    });
    std::string msg;
    std::size_t failed = 0;
    for (const auto& e : errors)
        if (!e.empty()) {
            msg += "\n  " + e;
            ++failed;
        }
    if (failed) throw InputError(manifest.string() + ": " + std::to_string(failed) + " row(s) failed" + msg);
    return table;
}

// ---------------------------------------------------------------------------
// Feature CSV
// ---------------------------------------------------------------------------

/// Header: feature names, clinical columns, label, subject_id.
inline void write_feature_csv(std::ostream& out, const FeatureTable& t) {
    for (const auto& n : t.feature_names) out << csv::quote(n) << ',';
    for (const char* n : kClinicalNames) out << n << ',';
    out << "label,subject_id\n";
    for (const auto& r : t.records) {
        for (double v : r.features) out << csv::format_double(v) << ',';
        for (double v : r.clinical.values()) out << csv::format_double(v) << ',';
        out << label_name(r.label) << ',' << csv::quote(r.subject_id) << '\n';
    }
}

inline void write_feature_csv(const std::filesystem::path& path, const FeatureTable& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    write_feature_csv(out, t);
    if (!out) throw InputError("failed writing " + path.string());
}

inline FeatureTable read_feature_csv(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw InputError("feature CSV not found: " + path.string());
    auto lines = csv::read_lines(path);
    while (!lines.empty() && csv::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw InputError(path.string() + ": no records (missing header)");
    const auto header = csv::split(lines[0]);
    const std::size_t tail = kClinicalNames.size() + 2;
    if (header.size() < tail + 1 || header[header.size() - 2] != "label" || header.back() != "subject_id")
        throw InputError(path.string() + ": not a feature CSV (expected trailing label,subject_id columns)");
    const std::size_t nf = header.size() - tail;
    for (std::size_t k = 0; k < kClinicalNames.size(); ++k)
        if (header[nf + k] != kClinicalNames[k])
            throw InputError(path.string() + ": expected column '" + kClinicalNames[k] + "'");
    FeatureTable t;
    t.feature_names.assign(header.begin(), header.begin() + static_cast<std::ptrdiff_t>(nf));
    std::vector<std::string> errors;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (csv::trim(lines[li]).empty()) continue;
        const auto f = csv::split(lines[li]);
        auto fail = [&](const std::string& m) { errors.push_back("row " + std::to_string(li) + ": " + m); };
        if (f.size() != header.size()) {
            fail("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
            continue;
        }
        SampleRecord r;
        r.features.resize(nf);
        bool ok = true;
        for (std::size_t k = 0; k < nf && ok; ++k) {
            const auto v = csv::parse_double(f[k]);
            if (!v || !std::isfinite(*v)) {
                fail("non-numeric value in column " + t.feature_names[k]);
                ok = false;
            } else {
                r.features[k] = *v;
            }
        }
        std::array<double, 3> clin{};
        for (std::size_t k = 0; k < 3 && ok; ++k) {
            const auto v = csv::parse_double(f[nf + k]);
            if (!v || !std::isfinite(*v) || *v < 0) {
                fail(std::string("invalid ") + kClinicalNames[k]);
                ok = false;
            } else {
                clin[k] = *v;
            }
        }
        if (!ok) continue;
        r.clinical = {clin[0], clin[1], clin[2]};
        const auto label = parse_label(csv::trim(f[nf + 3]));
        if (!label) {
            fail("unknown label '" + f[nf + 3] + "'");
            continue;
        }
        r.label = *label;
        r.subject_id = csv::trim(f[nf + 4]);
        if (r.subject_id.empty()) {
            fail("empty subject_id");
            continue;
        }
        t.records.push_back(std::move(r));
    }
    if (!errors.empty()) {
        std::string msg = path.string() + ": " + std::to_string(errors.size()) + " malformed row(s)";
        for (const auto& e : errors) msg += "\n  " + e;
        throw InputError(msg);
    }
    if (t.records.empty()) throw InputError(path.string() + ": no records");
    return t;
}

} // namespace lus
