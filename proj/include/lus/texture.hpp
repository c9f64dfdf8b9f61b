#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "image.hpp"

namespace lus {

inline constexpr int kGrayLevels = 8;
inline constexpr std::size_t kHistogramBins = 256;

// ---------------------------------------------------------------------------
// First-order statistics
// ---------------------------------------------------------------------------

/// How the entropy term of the first-order statistics is evaluated.
enum class EntropyMode {
    Histogram,  ///< -sum p log2 p over a 256-bin intensity histogram
    PixelWise,  ///< -sum I log2 I over raw pixel intensities, 0 log 0 = 0
};

struct StatFeatures {
    double mean = 0, sd = 0, skewness = 0, kurtosis = 0, entropy = 0;
    std::array<double, 5> values() const { return {mean, sd, skewness, kurtosis, entropy}; }
};

inline constexpr std::array<const char*, 5> kStatNames = {"mean", "sd", "skewness", "kurtosis", "entropy"};

inline double histogram_entropy(const GrayImage& img) {
    std::array<std::size_t, kHistogramBins> hist{};
    for (double p : img.pixels()) {
        const auto bin = static_cast<std::size_t>(std::clamp(p, 0.0, 1.0) * static_cast<double>(kHistogramBins));
        ++hist[std::min(bin, kHistogramBins - 1)];
    }
    const double n = static_cast<double>(img.size());
    double h = 0.0;
    for (std::size_t count : hist) {
        if (count == 0) continue;
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h == 0.0 ? 0.0 : h;  // no -0
}

/// Mean, population SD, skewness, excess kurtosis and entropy over all pixels.
/// Skewness and kurtosis are 0 when the image is constant.
inline StatFeatures stat_features(const GrayImage& img, EntropyMode mode = EntropyMode::Histogram) {
    if (img.empty()) throw InputError("stat_features of empty image");
    const auto px = img.pixels();
    const double n = static_cast<double>(px.size());
    StatFeatures f;
    double sum = 0.0;
    for (double p : px) sum += p;
    f.mean = sum / n;

    const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
    if (*lo != *hi) {
        double m2 = 0, m3 = 0, m4 = 0;
        for (double p : px) {
            const double d = p - f.mean, d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        f.sd = std::sqrt(m2 / n);
        if (f.sd > 0.0) {
            f.skewness = m3 / (n * f.sd * f.sd * f.sd);
            f.kurtosis = m4 / (n * f.sd * f.sd * f.sd * f.sd) - 3.0;
        }
    }

    if (mode == EntropyMode::Histogram) {
        f.entropy = histogram_entropy(img);
    } else {
        double h = 0.0;
        for (double p : px)
            if (p > 0.0) h -= p * std::log2(p);
        f.entropy = h == 0.0 ? 0.0 : h;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------

/// Eight equal-width bins over [0,1]; level = min(floor(8p) + 1, 8).
inline LevelImage quantize8(const GrayImage& img) {
    if (img.empty()) throw InputError("quantize8 of empty image");
    LevelImage q(img.height(), img.width());
    auto out = q.pixels();
    auto in = img.pixels();
    for (std::size_t i = 0; i < in.size(); ++i) {
        const int level = static_cast<int>(std::floor(std::clamp(in[i], 0.0, 1.0) * kGrayLevels)) + 1;
        out[i] = std::min(level, kGrayLevels);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Gray-level co-occurrence
// ---------------------------------------------------------------------------

struct GlcmOffset {
    int dr = 0;
    int dc = 1;
    friend bool operator==(const GlcmOffset&, const GlcmOffset&) = default;
};

inline constexpr std::array<GlcmOffset, 6> kGlcmOffsets = {
    GlcmOffset{0, 1}, GlcmOffset{1, 0}, GlcmOffset{0, 2}, GlcmOffset{2, 0}, GlcmOffset{1, 1}, GlcmOffset{2, 2}};

inline constexpr std::array<const char*, 5> kGlcmNames = {"contrast", "correlation", "energy", "homogeneity",
                                                          "entropy"};

/// Directed co-occurrence counts G(i,j) for levels 1..8 (stored 0-based),
/// plus the mean and variance of the quantized region.
struct Glcm {
    std::array<std::array<double, kGrayLevels>, kGrayLevels> counts{};
    GlcmOffset offset;
    double level_mean = 0.0;
    double level_variance = 0.0;

    double total() const {
        double t = 0;
        for (const auto& row : counts)
            for (double v : row) t += v;
        return t;
    }
    double at(int i, int j) const { return counts[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }
};

inline Glcm glcm_compute(const LevelImage& q, GlcmOffset offset) {
    if (offset.dr < 0 || offset.dc < 0 || (offset.dr == 0 && offset.dc == 0))
        throw InputError("GLCM offset must be non-negative and non-zero");
    const auto dr = static_cast<std::size_t>(offset.dr), dc = static_cast<std::size_t>(offset.dc);
    if (q.height() <= dr || q.width() <= dc)
        throw InputError("image " + dims_string(q.height(), q.width()) + " smaller than GLCM offset span");
    Glcm g;
    g.offset = offset;
    for (std::size_t r = 0; r + dr < q.height(); ++r)
        for (std::size_t c = 0; c + dc < q.width(); ++c) {
            const int a = q(r, c), b = q(r + dr, c + dc);
            g.counts[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] += 1.0;
        }
    double sum = 0;
    for (int v : q.pixels()) sum += v;
    const double n = static_cast<double>(q.size());
    g.level_mean = sum / n;
    double var = 0;
    for (int v : q.pixels()) var += (v - g.level_mean) * (v - g.level_mean);
    g.level_variance = var / n;
    return g;
}

/// Contrast, correlation, energy, homogeneity, entropy on the normalized matrix.
inline std::array<double, 5> glcm_features(const Glcm& g) {
    const double total = g.total();
    if (!(total > 0.0)) throw InputError("GLCM has no counted pairs");
    double contrast = 0, corr = 0, energy = 0, homog = 0, entropy = 0;
    for (int i = 1; i <= kGrayLevels; ++i)
        for (int j = 1; j <= kGrayLevels; ++j) {
            const double p = g.at(i, j) / total;
            if (p == 0.0) continue;
            const double d2 = static_cast<double>((i - j) * (i - j));
            contrast += d2 * p;
            corr += (i - g.level_mean) * (j - g.level_mean) * p;
            energy += p * p;
            homog += p / (1.0 + d2);
            entropy -= p * std::log2(p);
        }
    corr = g.level_variance > 0.0 ? corr / g.level_variance : 0.0;
    return {contrast, corr, energy, homog, entropy == 0.0 ? 0.0 : entropy};
}

// ---------------------------------------------------------------------------
// Gray-level run length
// ---------------------------------------------------------------------------

enum class RunDirection { Deg0 = 0, Deg45 = 45, Deg90 = 90, Deg135 = 135 };

inline constexpr std::array<RunDirection, 4> kRunDirections = {RunDirection::Deg0, RunDirection::Deg45,
                                                               RunDirection::Deg90, RunDirection::Deg135};

inline constexpr std::array<const char*, 11> kGlrlmNames = {"lre",  "sre",   "gln",   "rln",   "rp",   "lgre",
                                                            "hgre", "srlge", "srhge", "lrlge", "lrhge"};

/// Run counts R(level, length), level 1..8 and length 1..max_run.
struct Glrlm {
    RunDirection direction = RunDirection::Deg0;
    std::size_t max_run = 0;
    std::size_t n_pixels = 0;
    std::vector<double> counts;  ///< row-major kGrayLevels x max_run

    double at(int level, std::size_t length) const {
        return counts[static_cast<std::size_t>(level - 1) * max_run + (length - 1)];
    }
    double total_runs() const {
        double t = 0;
        for (double v : counts) t += v;
        return t;
    }
};

/// Maximal equal-level runs along the direction's collinear lines.
/// 0 deg: along a row; 90 deg: down a column; 45 deg: towards the upper right;
/// 135 deg: towards the lower right.
inline Glrlm glrlm_compute(const LevelImage& q, RunDirection direction) {
    if (q.empty()) throw InputError("glrlm_compute of empty image");
    const auto H = static_cast<std::ptrdiff_t>(q.height()), W = static_cast<std::ptrdiff_t>(q.width());
    Glrlm g;
    g.direction = direction;
    g.max_run = static_cast<std::size_t>(std::max(H, W));
    g.n_pixels = q.size();
    g.counts.assign(static_cast<std::size_t>(kGrayLevels) * g.max_run, 0.0);

    std::ptrdiff_t sr = 0, sc = 1;  // step
    switch (direction) {
        case RunDirection::Deg0: sr = 0; sc = 1; break;
        case RunDirection::Deg45: sr = -1; sc = 1; break;
        case RunDirection::Deg90: sr = 1; sc = 0; break;
        case RunDirection::Deg135: sr = 1; sc = 1; break;
    }
    auto inside = [&](std::ptrdiff_t r, std::ptrdiff_t c) { return r >= 0 && r < H && c >= 0 && c < W; };
    auto level_at = [&](std::ptrdiff_t r, std::ptrdiff_t c) {
        return q(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    };
    // A line starts at every pixel whose predecessor along the step is outside.
    for (std::ptrdiff_t r0 = 0; r0 < H; ++r0)
        for (std::ptrdiff_t c0 = 0; c0 < W; ++c0) {
            if (inside(r0 - sr, c0 - sc)) continue;
            std::ptrdiff_t r = r0, c = c0;
            while (inside(r, c)) {
                const int level = level_at(r, c);
                std::size_t len = 0;
                while (inside(r, c) && level_at(r, c) == level) {
                    ++len;
                    r += sr;
                    c += sc;
                }
                g.counts[static_cast<std::size_t>(level - 1) * g.max_run + (len - 1)] += 1.0;
            }
        }
    return g;
}

/// The eleven run-length ratios; every ratio except RP is normalized by the
/// total run count, RP divides it by the pixel count.
inline std::array<double, 11> glrlm_features(const Glrlm& g) {
    const double runs = g.total_runs();
    if (!(runs > 0.0)) throw InputError("GLRLM has no runs");
    double lre = 0, sre = 0, lgre = 0, hgre = 0, srlge = 0, srhge = 0, lrlge = 0, lrhge = 0;
    std::array<double, kGrayLevels> per_level{};
    std::vector<double> per_length(g.max_run, 0.0);
    for (int i = 1; i <= kGrayLevels; ++i)
        for (std::size_t j = 1; j <= g.max_run; ++j) {
            const double r = g.at(i, j);
            if (r == 0.0) continue;
            const double i2 = static_cast<double>(i * i);
            const double j2 = static_cast<double>(j) * static_cast<double>(j);
            lre += j2 * r;
            sre += r / j2;
            lgre += r / i2;
            hgre += i2 * r;
            srlge += r / (i2 * j2);
            srhge += i2 * r / j2;
            lrlge += j2 * r / i2;
            lrhge += i2 * j2 * r;
            per_level[static_cast<std::size_t>(i - 1)] += r;
            per_length[j - 1] += r;
        }
    double gln = 0, rln = 0;
    for (double v : per_level) gln += v * v;
    for (double v : per_length) rln += v * v;
    return {lre / runs,   sre / runs,   gln / runs,   rln / runs,   runs / static_cast<double>(g.n_pixels),
            lgre / runs,  hgre / runs,  srlge / runs, srhge / runs, lrlge / runs,
            lrhge / runs};
}

// ---------------------------------------------------------------------------
// Local binary patterns
// ---------------------------------------------------------------------------

inline constexpr std::size_t kLbpBins = 10;

/// Rotation-invariant uniform (riu2) LBP histogram over interior pixels.
/// Bins 0..8 count uniform patterns by their number of ones; bin 9 collects
/// the rest.
struct LbpHistogram {
    std::array<double, kLbpBins> bins{};
    double total() const {
        double t = 0;
        for (double b : bins) t += b;
        return t;
    }
};

/// riu2 label of an 8-bit neighbour code.
inline constexpr int lbp_riu2_label(std::uint8_t code) {
    const std::uint8_t rotated = static_cast<std::uint8_t>((code >> 1) | (code << 7));
    const int transitions = std::popcount(static_cast<unsigned>(code ^ rotated));
    return transitions <= 2 ? std::popcount(static_cast<unsigned>(code)) : 9;
}

inline LbpHistogram lbp_riu2_histogram(const GrayImage& img) {
    if (img.height() < 3 || img.width() < 3)
        throw InputError("LBP needs at least 3x3, got " + dims_string(img.height(), img.width()));
    // East first, then counter-clockwise.
    static constexpr std::array<std::array<int, 2>, 8> ring = {
        {{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}}};
    LbpHistogram h;
    for (std::size_t r = 1; r + 1 < img.height(); ++r)
        for (std::size_t c = 1; c + 1 < img.width(); ++c) {
            const double centre = img(r, c);
            std::uint8_t code = 0;
            for (std::size_t k = 0; k < ring.size(); ++k) {
                const double v = img(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(r) + ring[k][0]),
                                     static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + ring[k][1]));
                if (v >= centre) code = static_cast<std::uint8_t>(code | (1u << k));
            }
            h.bins[static_cast<std::size_t>(lbp_riu2_label(code))] += 1.0;
        }
    return h;
}

} // namespace lus
