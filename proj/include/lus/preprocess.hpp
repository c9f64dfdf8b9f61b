#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "error.hpp"
#include "image.hpp"

namespace lus {

inline constexpr std::size_t kResizeHeight = 520;
inline constexpr std::size_t kResizeWidth = 420;
inline constexpr std::size_t kBorderCrop = 10;

/// Median with the even-count convention of averaging the two middle values.
inline double median(std::vector<double> values) {
    if (values.empty()) throw InputError("median of empty sample");
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

/// Replaces overlay artifacts inside `roi` with the roi median.
///
/// Pixels brighter than half the roi maximum are selected together with their
/// 8-connected neighbours (clipped to the roi). All selected pixels take the
/// median of the original roi intensities; pixels outside the roi are untouched.
inline GrayImage remove_artifacts(const GrayImage& img, const RoiRect& roi) {
    if (!roi.fits(img.height(), img.width()))
        throw InputError("roi " + dims_string(roi.bottom, roi.right) + " outside image " +
                         dims_string(img.height(), img.width()));
    double peak = 0.0;
    std::vector<double> roi_values;
    roi_values.reserve((roi.bottom - roi.top + 1) * (roi.right - roi.left + 1));
    for (std::size_t r = roi.top; r <= roi.bottom; ++r)
        for (std::size_t c = roi.left; c <= roi.right; ++c) {
            peak = std::max(peak, img(r, c));
            roi_values.push_back(img(r, c));
        }
    if (peak <= 0.0) return img;

    const double threshold = 0.5 * peak;
    Image<unsigned char> selected(img.height(), img.width(), 0);
    for (std::size_t r = roi.top; r <= roi.bottom; ++r)
        for (std::size_t c = roi.left; c <= roi.right; ++c) {
            if (!(img(r, c) > threshold)) continue;
            const std::size_t r0 = r > roi.top ? r - 1 : r;
            const std::size_t r1 = std::min(r + 1, roi.bottom);
            const std::size_t c0 = c > roi.left ? c - 1 : c;
            const std::size_t c1 = std::min(c + 1, roi.right);
            for (std::size_t rr = r0; rr <= r1; ++rr)
                for (std::size_t cc = c0; cc <= c1; ++cc) selected(rr, cc) = 1;
        }

    const double fill = median(std::move(roi_values));
    GrayImage out = img;
    for (std::size_t r = roi.top; r <= roi.bottom; ++r)
        for (std::size_t c = roi.left; c <= roi.right; ++c)
            if (selected(r, c)) out(r, c) = fill;
    return out;
}

/// Bilinear resize with pixel-centre alignment; identity when sizes match.
inline GrayImage resize_bilinear(const GrayImage& img, std::size_t height, std::size_t width) {
    if (img.empty() || height == 0 || width == 0) throw InputError("resize of empty image");
    struct Tap {
        std::size_t lo, hi;
        double w;
    };
    auto taps = [](std::size_t src_n, std::size_t dst_n) {
        std::vector<Tap> t(dst_n);
        const double scale = static_cast<double>(src_n) / static_cast<double>(dst_n);
        for (std::size_t i = 0; i < dst_n; ++i) {
            double s = (static_cast<double>(i) + 0.5) * scale - 0.5;
            s = std::clamp(s, 0.0, static_cast<double>(src_n - 1));
            const auto lo = static_cast<std::size_t>(std::floor(s));
            const std::size_t hi = std::min(lo + 1, src_n - 1);
            t[i] = {lo, hi, s - static_cast<double>(lo)};
        }
        return t;
    };
    const auto ty = taps(img.height(), height);
    const auto tx = taps(img.width(), width);
    GrayImage out(height, width);
    for (std::size_t r = 0; r < height; ++r) {
        const auto& y = ty[r];
        for (std::size_t c = 0; c < width; ++c) {
            const auto& x = tx[c];
            const double a = img(y.lo, x.lo), b = img(y.lo, x.hi);
            const double d = img(y.hi, x.lo), e = img(y.hi, x.hi);
            const double top = a + x.w * (b - a);
            const double bot = d + x.w * (e - d);
            out(r, c) = std::clamp(top + y.w * (bot - top), 0.0, 1.0);
        }
    }
    return out;
}

/// Crops `border` pixels from every side.
inline GrayImage crop_border(const GrayImage& img, std::size_t border) {
    if (img.height() <= 2 * border || img.width() <= 2 * border)
        throw InputError("image too small to crop border of " + std::to_string(border));
    GrayImage out(img.height() - 2 * border, img.width() - 2 * border);
    for (std::size_t r = 0; r < out.height(); ++r)
        for (std::size_t c = 0; c < out.width(); ++c) out(r, c) = img(r + border, c + border);
    return out;
}

/// Resize to 520x420 then drop a 10 px border: always 500x400.
inline GrayImage normalize_size(const GrayImage& img) {
    if (img.height() < 2 || img.width() < 2)
        throw InputError("normalize_size needs at least 2x2, got " + dims_string(img.height(), img.width()));
    return crop_border(resize_bilinear(img, kResizeHeight, kResizeWidth), kBorderCrop);
}

/// Top rows [0, h/2) and bottom rows [h/2, h).
inline std::pair<GrayImage, GrayImage> split_halves(const GrayImage& img) {
    if (img.height() < 2) throw InputError("split_halves needs height >= 2");
    const std::size_t mid = img.height() / 2;
    return {img.rows(0, mid), img.rows(mid, img.height())};
}

} // namespace lus
