#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dtcwt.hpp"
#include "error.hpp"
#include "image.hpp"
#include "preprocess.hpp"
#include "texture.hpp"

namespace lus {

/// Which parts of the DTCWT feature block are produced.
struct FeatureConfig {
    int levels = 1;
    bool include_lowpass = true;
    bool stat = true;
    bool glcm = true;
    bool glrlm = true;
    bool lbp = true;
    EntropyMode entropy = EntropyMode::Histogram;

    std::size_t features_per_half() const {
        return (stat ? kStatNames.size() : 0) + (glcm ? kGlcmOffsets.size() * kGlcmNames.size() : 0) +
               (glrlm ? kRunDirections.size() * kGlrlmNames.size() : 0) + (lbp ? kLbpBins : 0);
    }
    std::size_t bands_per_level() const { return include_lowpass ? 7 : 6; }
    /// Length of the DTCWT feature vector.
    std::size_t feature_count() const {
        return static_cast<std::size_t>(levels) * bands_per_level() * 2 * features_per_half();
    }
};

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;
};

namespace detail {

inline constexpr std::array<const char*, 7> kBandTags = {"lp", "p15", "p45", "p75", "m75", "m45", "m15"};
inline constexpr std::array<const char*, 2> kHalfTags = {"top", "bot"};

inline std::string glcm_offset_tag(GlcmOffset o) { return "d" + std::to_string(o.dr) + std::to_string(o.dc); }

inline std::string run_direction_tag(RunDirection d) { return "a" + std::to_string(static_cast<int>(d)); }

// Feature suffixes ("{family}_{feature}") for one half, in extraction order.
inline std::vector<std::string> half_feature_suffixes(const FeatureConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.stat)
        for (const char* n : kStatNames) out.push_back(std::string("stat_") + n);
    if (cfg.glcm)
        for (const auto& o : kGlcmOffsets)
            for (const char* n : kGlcmNames) out.push_back("glcm_" + glcm_offset_tag(o) + "_" + n);
    if (cfg.glrlm)
        for (auto d : kRunDirections)
            for (const char* n : kGlrlmNames) out.push_back("glrlm_" + run_direction_tag(d) + "_" + n);
    if (cfg.lbp)
        for (std::size_t b = 0; b < kLbpBins; ++b) out.push_back("lbp_bin" + std::to_string(b));
    return out;
}

inline void append_half_features(const GrayImage& half, const FeatureConfig& cfg, std::vector<double>& out) {
    if (cfg.stat)
        for (double v : stat_features(half, cfg.entropy).values()) out.push_back(v);
    if (cfg.glcm || cfg.glrlm) {
        const auto q = quantize8(half);
        if (cfg.glcm)
            for (const auto& o : kGlcmOffsets)
                for (double v : glcm_features(glcm_compute(q, o))) out.push_back(v);
        if (cfg.glrlm)
            for (auto d : kRunDirections)
                for (double v : glrlm_features(glrlm_compute(q, d))) out.push_back(v);
    }
    if (cfg.lbp)
        for (double v : lbp_riu2_histogram(half).bins) out.push_back(v);
}

} // namespace detail

/// Names `L{level}_{band}_{half}_{family}_{feature}` in extraction order.
inline std::vector<std::string> feature_names(const FeatureConfig& cfg) {
    const auto suffixes = detail::half_feature_suffixes(cfg);
    std::vector<std::string> names;
    names.reserve(cfg.feature_count());
    for (int level = 1; level <= cfg.levels; ++level)
        for (std::size_t b = cfg.include_lowpass ? 0 : 1; b < detail::kBandTags.size(); ++b)
            for (const char* half : detail::kHalfTags)
                for (const auto& s : suffixes)
                    names.push_back("L" + std::to_string(level) + "_" + detail::kBandTags[b] + "_" + half + "_" + s);
    return names;
}

/// DTCWT decomposition, magnitude subimages split into top and bottom halves,
/// and the four texture families on every half.
inline FeatureVector extract_features(const GrayImage& img, const FeatureConfig& cfg = {}) {
    if (cfg.features_per_half() == 0) throw InputError("feature configuration enables no feature family");
    const auto pyr = dtcwt_forward(img, cfg.levels);
    FeatureVector fv;
    fv.names = feature_names(cfg);
    fv.values.reserve(fv.names.size());
    for (int level = 1; level <= cfg.levels; ++level) {
        const auto subimages = magnitude_subimages(pyr, level);
        for (std::size_t b = cfg.include_lowpass ? 0 : 1; b < subimages.size(); ++b) {
            const auto& sub = subimages[b];
            if (sub.height() < 6 || sub.width() < 3)
                throw InputError("level " + std::to_string(level) + " subimage " +
                                 dims_string(sub.height(), sub.width()) + " too small for texture features");
            const auto [top, bottom] = split_halves(sub);
            detail::append_half_features(top, cfg, fv.values);
            detail::append_half_features(bottom, cfg, fv.values);
        }
    }
    for (std::size_t i = 0; i < fv.values.size(); ++i)
        if (!std::isfinite(fv.values[i])) throw InputError("feature " + fv.names[i] + " is not finite");
    return fv;
}

} // namespace lus
