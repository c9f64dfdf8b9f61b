#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "error.hpp"
#include "image.hpp"

namespace lus {

/// Separable 2-D DWT with the orthonormal Haar pair, used as the
/// shift-variant baseline against the dual-tree transform.
///
/// Odd dimensions are extended by repeating the last row/column before
/// decimation, so each level has ceil(parent/2) rows and columns.
struct DwtPyramid {
    struct Details {
        Image<double> horizontal;  ///< lowpass over rows index, highpass over columns
        Image<double> vertical;    ///< highpass over rows index, lowpass over columns
        Image<double> diagonal;    ///< highpass over both
    };

    int levels = 0;
    Image<double> approx;
    std::vector<Details> details;             ///< details[0] is the finest level
    std::vector<std::array<std::size_t, 2>> shapes;  ///< input shape of each level
};

namespace detail {

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Haar analysis along rows index (axis 0): returns (low, high), each ceil(h/2) rows.
inline std::array<Image<double>, 2> haar_split_rows(const Image<double>& x) {
    const std::size_t h = (x.height() + 1) / 2;
    Image<double> lo(h, x.width()), hi(h, x.width());
    for (std::size_t r = 0; r < h; ++r) {
        const auto a = x.row(2 * r);
        const auto b = x.row(std::min(2 * r + 1, x.height() - 1));
        for (std::size_t c = 0; c < x.width(); ++c) {
            lo(r, c) = (a[c] + b[c]) * kInvSqrt2;
            hi(r, c) = (a[c] - b[c]) * kInvSqrt2;
        }
    }
    return {std::move(lo), std::move(hi)};
}

inline Image<double> haar_merge_rows(const Image<double>& lo, const Image<double>& hi, std::size_t out_h) {
    Image<double> x(out_h, lo.width());
    for (std::size_t r = 0; r < lo.height(); ++r)
        for (std::size_t c = 0; c < lo.width(); ++c) {
            const double even = (lo(r, c) + hi(r, c)) * kInvSqrt2;
            const double odd = (lo(r, c) - hi(r, c)) * kInvSqrt2;
            x(2 * r, c) = even;
            if (2 * r + 1 < out_h) x(2 * r + 1, c) = odd;
        }
    return x;
}

} // namespace detail

inline DwtPyramid dwt2_forward(const Image<double>& img, int levels) {
    if (levels < 1) throw InputError("decomposition depth must be >= 1");
    if (levels > 30 || std::min(img.height(), img.width()) < (std::size_t{1} << levels))
        throw InputError("image " + dims_string(img.height(), img.width()) + " too small for " +
                         std::to_string(levels) + " levels");
    DwtPyramid pyr;
    pyr.levels = levels;
    Image<double> a = img;
    for (int l = 0; l < levels; ++l) {
        pyr.shapes.push_back({a.height(), a.width()});
        auto [lo_r, hi_r] = detail::haar_split_rows(a);
        auto [ll, lh] = detail::haar_split_rows(lo_r.transposed());
        auto [hl, hh] = detail::haar_split_rows(hi_r.transposed());
        pyr.details.push_back({lh.transposed(), hl.transposed(), hh.transposed()});
        a = ll.transposed();
    }
    pyr.approx = std::move(a);
    return pyr;
}

inline Image<double> dwt2_inverse(const DwtPyramid& pyr) {
    if (pyr.levels < 1 || pyr.details.size() != static_cast<std::size_t>(pyr.levels) ||
        pyr.shapes.size() != pyr.details.size())
        throw InputError("malformed DWT pyramid");
    Image<double> a = pyr.approx;
    for (int l = pyr.levels - 1; l >= 0; --l) {
        const auto& d = pyr.details[static_cast<std::size_t>(l)];
        const auto [h, w] = pyr.shapes[static_cast<std::size_t>(l)];
        const auto lo_r = detail::haar_merge_rows(a.transposed(), d.horizontal.transposed(), w).transposed();
        const auto hi_r = detail::haar_merge_rows(d.vertical.transposed(), d.diagonal.transposed(), w).transposed();
        a = detail::haar_merge_rows(lo_r, hi_r, h);
    }
    return a;
}

} // namespace lus
