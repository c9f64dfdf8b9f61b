#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "image.hpp"
#include "image_io.hpp"

namespace lus {

/// Synthetic stand-in for a lung-ultrasound dataset. Each class has a pattern
/// recipe built from horizontal lines (A-lines), vertical streaks (B-lines),
/// a bright pleura band and blotchy consolidation.
struct SynthSpec {
    std::size_t subjects_per_class = 4;
    std::size_t images_per_subject = 30;
    std::size_t videos_per_subject = 3;
    std::uint64_t seed = 2024;
    double noise = 0.06;
    std::size_t height = kResizeHeight;
    std::size_t width = kResizeWidth;

    void validate() const {
        if (subjects_per_class < 1 || images_per_subject < 1 || videos_per_subject < 1)
            throw InputError("synth: counts must be >= 1");
        if (!(noise >= 0.0) || !std::isfinite(noise)) throw InputError("synth: noise must be >= 0");
        if (height < 64 || width < 64) throw InputError("synth: images must be at least 64x64");
    }
    std::size_t image_count() const { return kLabelCount * subjects_per_class * images_per_subject; }
};

namespace synth_detail {

// Portable draws on top of mt19937_64, whose output sequence is fixed by the
// standard (the std distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0;
        while (u <= 0) u = uniform();
        const double v = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u));
        spare_ = rad * std::sin(2 * std::numbers::pi * v);
        has_spare_ = true;
        return rad * std::cos(2 * std::numbers::pi * v);
    }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0;
    bool has_spare_ = false;
};

// Subject-level nuisance, shared by every image of one subject.
struct Subject {
    double gain;
    double pleura_depth;  // fraction of height
    double line_width;    // px
    double background;
    int bline_bias;
    double ga_weeks;
};

// Clinical ranges per class: gestational age (weeks) and days of life.
struct ClinicalRange {
    double ga_lo, ga_hi, dol_lo, dol_hi;
};
inline constexpr std::array<ClinicalRange, kLabelCount> kClinicalRanges = {{
    {30, 40, 1, 30},   // Normal
    {24, 30, 28, 90},  // CLD
    {28, 40, 2, 30},   // CON
    {32, 40, 0, 7},    // PTX
    {26, 34, 0, 3},    // RDS
    {35, 40, 0, 2},    // TTN
}};

inline double gauss(double d, double sigma) { return std::exp(-d * d / (2 * sigma * sigma)); }

inline GrayImage render(Label label, const Subject& s, const SynthSpec& spec, Rng& rng) {
    const std::size_t H = spec.height, W = spec.width;
    const double h = static_cast<double>(H), w = static_cast<double>(W);
    std::vector<double> depth_profile(H, 0.0), column_profile(W, 0.0), bline_depth(H, 0.0);
    GrayImage img(H, W);

    const double pleura = s.pleura_depth * h + rng.uniform(-4, 4);
    const double lw = s.line_width * rng.uniform(0.9, 1.1);
    bool irregular_pleura = false;
    double a_amp = 0, a_sigma = lw;
    int a_count = 0;
    double a_spacing = pleura;
    int blines = 0;
    double bline_start = pleura;
    double bline_amp = 0;
    int blobs = 0;

    switch (label) {
    case Label::Normal:
        a_amp = 0.45, a_count = 3;
        break;
    case Label::CLD:
        irregular_pleura = true;
        a_amp = 0.15, a_count = 2;
        blines = 3 + s.bline_bias, bline_amp = 0.35;
        break;
    case Label::CON:
        blobs = 45;
        break;
    case Label::PTX:
        a_amp = 0.7, a_count = 6, a_spacing = 0.55 * pleura, a_sigma = 0.7 * lw;
        break;
    case Label::RDS:
        blines = 14 + 2 * s.bline_bias, bline_amp = 0.3;
        break;
    case Label::TTN:
        a_amp = 0.35, a_count = 2;
        blines = 9 + s.bline_bias, bline_amp = 0.4, bline_start = 0.58 * h;
        break;
    }

    // A-line echoes below the pleura.
    for (std::size_t r = 0; r < H; ++r) {
        const double y = static_cast<double>(r);
        double v = 0;
        for (int k = 1; k <= a_count; ++k)
            v += a_amp * std::pow(0.8, k - 1) * gauss(y - pleura - k * a_spacing, a_sigma);
        depth_profile[r] = v;
        bline_depth[r] = y < bline_start ? 0.0 : std::exp(-(y - bline_start) / (1.5 * h));
    }
    // Vertical streaks.
    for (int b = 0; b < blines; ++b) {
        const double x0 = rng.uniform(0.05, 0.95) * w;
        const double sig = rng.uniform(0.6, 1.4) * lw;
        const double amp = bline_amp * rng.uniform(0.7, 1.3);
        for (std::size_t c = 0; c < W; ++c) column_profile[c] += amp * gauss(static_cast<double>(c) - x0, sig);
    }
    const double wobble_phase = rng.uniform(0, 2 * std::numbers::pi);
    const double wobble_period = rng.uniform(40, 70);

    for (std::size_t r = 0; r < H; ++r) {
        const double y = static_cast<double>(r);
        const double atten = s.background * std::exp(-1.2 * y / h);
        for (std::size_t c = 0; c < W; ++c) {
            const double shift =
                irregular_pleura ? 6.0 * std::sin(2 * std::numbers::pi * static_cast<double>(c) / wobble_period + wobble_phase)
                                 : 0.0;
            img(r, c) = atten + depth_profile[r] + column_profile[c] * bline_depth[r] +
                        0.75 * gauss(y - pleura - shift, irregular_pleura ? 2.2 * lw : lw);
        }
    }
    // Consolidation blotches below the pleura.
    for (int b = 0; b < blobs; ++b) {
        const double cy = rng.uniform(pleura + 3 * lw, 0.9 * h);
        const double cx = rng.uniform(0, w);
        const double rad = rng.uniform(8, 22);
        const double amp = rng.uniform(0.15, 0.4);
        const auto r0 = static_cast<std::size_t>(std::max(0.0, cy - 3 * rad));
        const auto r1 = static_cast<std::size_t>(std::min(h, cy + 3 * rad));
        const auto c0 = static_cast<std::size_t>(std::max(0.0, cx - 3 * rad));
        const auto c1 = static_cast<std::size_t>(std::min(w, cx + 3 * rad));
        for (std::size_t r = r0; r < r1; ++r)
            for (std::size_t c = c0; c < c1; ++c) {
                const double dy = static_cast<double>(r) - cy, dx = static_cast<double>(c) - cx;
                img(r, c) += amp * std::exp(-(dy * dy + dx * dx) / (2 * rad * rad));
            }
    }
    for (auto& p : img.pixels()) p = std::clamp(s.gain * p + spec.noise * rng.normal(), 0.0, 1.0);
    return img;
}

} // namespace synth_detail

struct SynthOutput {
    std::filesystem::path manifest;
    std::size_t images = 0;
};

/// Writes `images/*.pgm` and `manifest.csv` under out_dir. Output depends only
/// on `spec`.
inline SynthOutput synthesize(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "images", ec);
    if (ec) throw InputError("cannot create " + (out_dir / "images").string() + ": " + ec.message());

    SynthOutput result;
    result.manifest = out_dir / "manifest.csv";
    std::ofstream manifest(result.manifest, std::ios::binary);
    if (!manifest) throw InputError("cannot write " + result.manifest.string());
    manifest << "image_path,subject_id,video_id,label,ga_weeks,cgats_weeks,dol_days\n";

    synth_detail::Rng master(spec.seed);
    for (std::size_t cls = 0; cls < kLabelCount; ++cls) {
        const auto label = static_cast<Label>(cls);
        const auto& range = synth_detail::kClinicalRanges[cls];
        for (std::size_t si = 0; si < spec.subjects_per_class; ++si) {
            synth_detail::Rng rng(master.next());
            const synth_detail::Subject subject{
                rng.uniform(0.85, 1.15), rng.uniform(0.14, 0.2), rng.uniform(2.5, 4.0),
                rng.uniform(0.1, 0.2),   rng.integer(-1, 1),     rng.uniform(range.ga_lo, range.ga_hi)};
            const std::string subject_id = std::string(label_name(label)) + "_s" + std::to_string(si + 1);
            std::vector<double> video_dol(spec.videos_per_subject);
            for (auto& d : video_dol) d = std::round(rng.uniform(range.dol_lo, range.dol_hi));
            for (std::size_t ii = 0; ii < spec.images_per_subject; ++ii) {
                const std::size_t video = ii * spec.videos_per_subject / spec.images_per_subject;
                const GrayImage img = synth_detail::render(label, subject, spec, rng);
                const std::string rel = "images/" + subject_id + "_" + std::to_string(ii + 1) + ".pgm";
                write_pgm(out_dir / rel, img);
                const double dol = video_dol[video];
                manifest << rel << ',' << subject_id << ',' << subject_id << "_v" << (video + 1) << ','
                         << label_name(label) << ',' << csv::format_double(std::round(subject.ga_weeks * 10) / 10)
                         << ',' << csv::format_double(std::round((subject.ga_weeks + dol / 7.0) * 10) / 10) << ','
                         << csv::format_double(dol) << '\n';
                ++result.images;
            }
        }
    }
    if (!manifest) throw InputError("failed writing " + result.manifest.string());
    return result;
}

} // namespace lus
