#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "image.hpp"
#include "wavelet_filters.hpp"

namespace lus {

using ComplexImage = Image<std::complex<double>>;

/// Subband orientations in storage order. Angles give the direction of the
/// wavelet's oscillation (its passband centre), so a horizontal line excites
/// the +/-75 degree bands.
enum class Orientation : int { P15 = 0, P45, P75, M75, M45, M15 };

inline constexpr std::array<int, 6> kOrientationDegrees = {15, 45, 75, -75, -45, -15};
inline constexpr std::array<const char*, 6> kOrientationTags = {"p15", "p45", "p75", "m75", "m45", "m15"};

struct DtcwtPyramid {
    int levels = 0;
    std::size_t height = 0;  ///< input rows
    std::size_t width = 0;   ///< input columns
    /// Scaling image after each level, both trees interleaved as 2x2 quads.
    std::vector<Image<double>> lowpass;
    /// Six complex subbands per level, indexed by Orientation.
    std::vector<std::array<ComplexImage, 6>> subbands;

    const ComplexImage& band(int level, Orientation o) const {
        return subbands.at(static_cast<std::size_t>(level - 1))[static_cast<std::size_t>(o)];
    }
};

namespace detail {

// Half-sample symmetric reflection into [0, n): ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
    const auto period = static_cast<std::ptrdiff_t>(2 * n);
    std::ptrdiff_t m = i % period;
    if (m < 0) m += period;
    if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
    return static_cast<std::size_t>(m);
}

// out.row(dst[i]) (+)= sum_k h[k] * x.row(src[i + m - 1 - k]) for i in [0, src.size() - m].
// The 'valid' part of the convolution of a gathered row sequence with h.
inline void convolve_rows(const Image<double>& x, const std::vector<std::size_t>& src,
                          const std::vector<double>& h, Image<double>& out, std::size_t dst_start,
                          std::size_t dst_step, bool accumulate) {
    const std::size_t m = h.size();
    const std::size_t n_out = src.size() + 1 - m;
    const std::size_t w = x.width();
    for (std::size_t i = 0; i < n_out; ++i) {
        auto o = out.row(dst_start + i * dst_step);
        if (!accumulate) std::fill(o.begin(), o.end(), 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const double coef = h[k];
            if (coef == 0.0) continue;
            const auto in = x.row(src[i + m - 1 - k]);
            for (std::size_t c = 0; c < w; ++c) o[c] += coef * in[c];
        }
    }
}

inline std::vector<double> every_other(const std::vector<double>& h, std::size_t start) {
    std::vector<double> out;
    for (std::size_t i = start; i < h.size(); i += 2) out.push_back(h[i]);
    return out;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

/// Filters the columns of x with h, no decimation, symmetric extension.
/// Odd-length h keeps the row count.
inline Image<double> colfilter(const Image<double>& x, const std::vector<double>& h) {
    const std::size_t r = x.height();
    const auto m2 = static_cast<std::ptrdiff_t>(h.size() / 2);
    std::vector<std::size_t> xe;
    for (std::ptrdiff_t k = -m2; k < static_cast<std::ptrdiff_t>(r) + m2; ++k) xe.push_back(reflect_index(k, r));
    Image<double> y(xe.size() + 1 - h.size(), x.width());
    convolve_rows(x, xe, h, y, 0, 1, false);
    return y;
}

/// Decimating column filter for q-shift levels. `ha` runs on one tree, `hb` on
/// the other; outputs interleave. Rows must be a multiple of 4.
inline Image<double> coldfilt(const Image<double>& x, const std::vector<double>& ha, const std::vector<double>& hb) {
    const std::size_t r = x.height();
    if (r % 4 != 0) throw InputError("coldfilt: row count must be a multiple of 4");
    const auto m = static_cast<std::ptrdiff_t>(ha.size());
    std::vector<std::size_t> xe;
    for (std::ptrdiff_t k = -m; k < static_cast<std::ptrdiff_t>(r) + m; ++k) xe.push_back(reflect_index(k, r));
    const auto hao = every_other(ha, 0), hae = every_other(ha, 1);
    const auto hbo = every_other(hb, 0), hbe = every_other(hb, 1);

    std::vector<std::size_t> t1, t3, t0, t2;  // xe[t-1], xe[t-3], xe[t], xe[t-2]
    for (std::ptrdiff_t t = 5; t < static_cast<std::ptrdiff_t>(r) + 2 * m - 2; t += 4) {
        t1.push_back(xe[static_cast<std::size_t>(t - 1)]);
        t3.push_back(xe[static_cast<std::size_t>(t - 3)]);
        t0.push_back(xe[static_cast<std::size_t>(t)]);
        t2.push_back(xe[static_cast<std::size_t>(t - 2)]);
    }
    Image<double> y(r / 2, x.width());
    const bool a_even = dot(ha, hb) > 0;
    const std::size_t s1 = a_even ? 0 : 1, s2 = a_even ? 1 : 0;
    convolve_rows(x, t1, hao, y, s1, 2, false);
    convolve_rows(x, t3, hae, y, s1, 2, true);
    convolve_rows(x, t0, hbo, y, s2, 2, false);
    convolve_rows(x, t2, hbe, y, s2, 2, true);
    return y;
}

/// Interpolating column filter (inverse of coldfilt): doubles the row count.
inline Image<double> colifilt(const Image<double>& x, const std::vector<double>& ha, const std::vector<double>& hb) {
    const std::size_t r = x.height();
    if (r % 2 != 0) throw InputError("colifilt: row count must be even");
    const std::size_t m = ha.size();
    const auto m2 = static_cast<std::ptrdiff_t>(m / 2);
    Image<double> y(2 * r, x.width(), 0.0);
    std::vector<std::size_t> xe;
    for (std::ptrdiff_t k = -m2; k < static_cast<std::ptrdiff_t>(r) + m2; ++k) xe.push_back(reflect_index(k, r));
    const auto hao = every_other(ha, 0), hae = every_other(ha, 1);
    const auto hbo = every_other(hb, 0), hbe = every_other(hb, 1);
    const bool a_first = dot(ha, hb) > 0;

    auto gather = [&](std::ptrdiff_t first, std::ptrdiff_t last_excl, std::ptrdiff_t shift) {
        std::vector<std::size_t> idx;
        for (std::ptrdiff_t t = first; t < last_excl; t += 2) {
            const std::ptrdiff_t ta = a_first ? t : t - 1;
            idx.push_back(xe[static_cast<std::size_t>(ta + shift)]);
        }
        return idx;
    };
    auto gather_b = [&](std::ptrdiff_t first, std::ptrdiff_t last_excl, std::ptrdiff_t shift) {
        std::vector<std::size_t> idx;
        for (std::ptrdiff_t t = first; t < last_excl; t += 2) {
            const std::ptrdiff_t tb = a_first ? t - 1 : t;
            idx.push_back(xe[static_cast<std::size_t>(tb + shift)]);
        }
        return idx;
    };

    if (m2 % 2 == 0) {
        const auto end = static_cast<std::ptrdiff_t>(r + m);
        convolve_rows(x, gather_b(3, end, -2), hae, y, 0, 4, false);
        convolve_rows(x, gather(3, end, -2), hbe, y, 1, 4, false);
        convolve_rows(x, gather_b(3, end, 0), hao, y, 2, 4, false);
        convolve_rows(x, gather(3, end, 0), hbo, y, 3, 4, false);
    } else {
        const auto end = static_cast<std::ptrdiff_t>(r + m - 1);
        convolve_rows(x, gather_b(2, end, 0), hao, y, 0, 4, false);
        convolve_rows(x, gather(2, end, 0), hbo, y, 1, 4, false);
        convolve_rows(x, gather_b(2, end, 0), hae, y, 2, 4, false);
        convolve_rows(x, gather(2, end, 0), hbe, y, 3, 4, false);
    }
    return y;
}

inline Image<double> add(Image<double> a, const Image<double>& b) {
    auto pa = a.pixels();
    auto pb = b.pixels();
    for (std::size_t i = 0; i < pa.size(); ++i) pa[i] += pb[i];
    return a;
}

/// 2x2 quads of tree outputs -> a pair of complex subbands (first, second).
inline std::pair<ComplexImage, ComplexImage> quads_to_complex(const Image<double>& y) {
    const std::size_t h = y.height() / 2, w = y.width() / 2;
    const double s = std::sqrt(0.5);
    ComplexImage first(h, w), second(h, w);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            const double a = y(2 * r, 2 * c), b = y(2 * r, 2 * c + 1);
            const double cc = y(2 * r + 1, 2 * c), d = y(2 * r + 1, 2 * c + 1);
            const std::complex<double> p(a * s, b * s);
            const std::complex<double> q(d * s, -cc * s);
            first(r, c) = p - q;
            second(r, c) = p + q;
        }
    return {std::move(first), std::move(second)};
}

inline Image<double> complex_to_quads(const ComplexImage& first, const ComplexImage& second) {
    const double s = std::sqrt(0.5);
    Image<double> x(first.height() * 2, first.width() * 2);
    for (std::size_t r = 0; r < first.height(); ++r)
        for (std::size_t c = 0; c < first.width(); ++c) {
            const auto p = first(r, c) * s + second(r, c) * s;
            const auto q = first(r, c) * s - second(r, c) * s;
            x(2 * r, 2 * c) = p.real();
            x(2 * r, 2 * c + 1) = p.imag();
            x(2 * r + 1, 2 * c) = q.imag();
            x(2 * r + 1, 2 * c + 1) = -q.real();
        }
    return x;
}

// Reference subband order is (+15,+45,+75,-75,-45,-15) measured on the wavelet
// ridges; our labels follow the oscillation direction, a quarter turn away.
inline constexpr std::size_t ridge_slot(std::size_t ridge_index) { return (ridge_index + 3) % 6; }

inline void store_pair(std::array<ComplexImage, 6>& bands, std::size_t ridge_first, std::size_t ridge_second,
                       std::pair<ComplexImage, ComplexImage> pair) {
    bands[ridge_slot(ridge_first)] = std::move(pair.first);
    bands[ridge_slot(ridge_second)] = std::move(pair.second);
}

inline void check_depth(std::size_t h, std::size_t w, int levels) {
    if (levels < 1) throw InputError("decomposition depth must be >= 1");
    if (levels > 30 || std::min(h, w) < (std::size_t{1} << levels))
        throw InputError("image " + dims_string(h, w) + " too small for " + std::to_string(levels) + " levels");
}

} // namespace detail

/// Forward 2-D dual-tree complex wavelet transform.
inline DtcwtPyramid dtcwt_forward(const Image<double>& img, int levels,
                                  const FilterBank& fb = FilterBank::near_sym_b_qshift_b()) {
    using namespace detail;
    check_depth(img.height(), img.width(), levels);

    Image<double> x = img;
    if (x.height() % 2 != 0) {  // duplicate last row
        Image<double> e(x.height() + 1, x.width());
        for (std::size_t r = 0; r < e.height(); ++r) {
            const auto src = x.row(std::min(r, x.height() - 1));
            std::copy(src.begin(), src.end(), e.row(r).begin());
        }
        x = std::move(e);
    }
    if (x.width() % 2 != 0) {  // duplicate last column
        Image<double> e(x.height(), x.width() + 1);
        for (std::size_t r = 0; r < e.height(); ++r)
            for (std::size_t c = 0; c < e.width(); ++c) e(r, c) = x(r, std::min(c, x.width() - 1));
        x = std::move(e);
    }

    DtcwtPyramid pyr;
    pyr.levels = levels;
    pyr.height = img.height();
    pyr.width = img.width();

    // Level 1: odd-length biorthogonal filters, undecimated; quads hold the four trees.
    Image<double> lo = colfilter(x, fb.h0o).transposed();
    Image<double> hi = colfilter(x, fb.h1o).transposed();
    Image<double> lolo = colfilter(lo, fb.h0o).transposed();
    {
        std::array<ComplexImage, 6> bands;
        store_pair(bands, 0, 5, quads_to_complex(colfilter(hi, fb.h0o).transposed()));
        store_pair(bands, 2, 3, quads_to_complex(colfilter(lo, fb.h1o).transposed()));
        store_pair(bands, 1, 4, quads_to_complex(colfilter(hi, fb.h1o).transposed()));
        pyr.subbands.push_back(std::move(bands));
        pyr.lowpass.push_back(lolo);
    }

    for (int level = 2; level <= levels; ++level) {
        if (lolo.height() % 4 != 0) {  // extend by one row at each end
            Image<double> e(lolo.height() + 2, lolo.width());
            for (std::size_t r = 0; r < e.height(); ++r) {
                const std::size_t src = r == 0 ? 0 : std::min(r - 1, lolo.height() - 1);
                std::copy(lolo.row(src).begin(), lolo.row(src).end(), e.row(r).begin());
            }
            lolo = std::move(e);
        }
        if (lolo.width() % 4 != 0) {
            Image<double> e(lolo.height(), lolo.width() + 2);
            for (std::size_t r = 0; r < e.height(); ++r)
                for (std::size_t c = 0; c < e.width(); ++c)
                    e(r, c) = lolo(r, c == 0 ? 0 : std::min(c - 1, lolo.width() - 1));
            lolo = std::move(e);
        }
        lo = coldfilt(lolo, fb.h0b, fb.h0a).transposed();
        hi = coldfilt(lolo, fb.h1b, fb.h1a).transposed();
        lolo = coldfilt(lo, fb.h0b, fb.h0a).transposed();

        std::array<ComplexImage, 6> bands;
        store_pair(bands, 0, 5, quads_to_complex(coldfilt(hi, fb.h0b, fb.h0a).transposed()));
        store_pair(bands, 2, 3, quads_to_complex(coldfilt(lo, fb.h1b, fb.h1a).transposed()));
        store_pair(bands, 1, 4, quads_to_complex(coldfilt(hi, fb.h1b, fb.h1a).transposed()));
        pyr.subbands.push_back(std::move(bands));
        pyr.lowpass.push_back(lolo);
    }
    return pyr;
}

/// Checks subband count and shapes against the layout dtcwt_forward produces.
inline void validate_pyramid(const DtcwtPyramid& pyr) {
    const auto L = static_cast<std::size_t>(pyr.levels);
    if (pyr.levels < 1 || pyr.subbands.size() != L || pyr.lowpass.size() != L)
        throw InputError("malformed pyramid: level count mismatch");
    std::size_t h = pyr.height + pyr.height % 2, w = pyr.width + pyr.width % 2;
    for (std::size_t l = 0; l < L; ++l) {
        if (l > 0) {
            h = (h + (h % 4 ? 2 : 0)) / 2;
            w = (w + (w % 4 ? 2 : 0)) / 2;
        }
        if (pyr.lowpass[l].height() != h || pyr.lowpass[l].width() != w)
            throw InputError("malformed pyramid: lowpass shape at level " + std::to_string(l + 1));
        for (const auto& band : pyr.subbands[l])
            if (band.height() != h / 2 || band.width() != w / 2)
                throw InputError("malformed pyramid: subband shape at level " + std::to_string(l + 1));
    }
}

/// Inverse transform from the deepest lowpass and all subbands.
inline Image<double> dtcwt_inverse(const DtcwtPyramid& pyr,
                                   const FilterBank& fb = FilterBank::near_sym_b_qshift_b()) {
    using namespace detail;
    validate_pyramid(pyr);
    auto pair_quads = [&](int level, std::size_t ridge_first, std::size_t ridge_second) {
        const auto& bands = pyr.subbands[static_cast<std::size_t>(level - 1)];
        return complex_to_quads(bands[ridge_slot(ridge_first)], bands[ridge_slot(ridge_second)]);
    };

    Image<double> z = pyr.lowpass.back();
    for (int level = pyr.levels; level >= 2; --level) {
        const auto lh = pair_quads(level, 0, 5);
        const auto hl = pair_quads(level, 2, 3);
        const auto hh = pair_quads(level, 1, 4);
        const auto y1 = add(colifilt(z, fb.g0b, fb.g0a), colifilt(lh, fb.g1b, fb.g1a));
        const auto y2 = add(colifilt(hl, fb.g0b, fb.g0a), colifilt(hh, fb.g1b, fb.g1a));
        z = add(colifilt(y1.transposed(), fb.g0b, fb.g0a), colifilt(y2.transposed(), fb.g1b, fb.g1a)).transposed();

        const auto& finer = pyr.subbands[static_cast<std::size_t>(level - 2)][0];
        const std::size_t th = 2 * finer.height(), tw = 2 * finer.width();
        const std::size_t r0 = z.height() != th ? 1 : 0, c0 = z.width() != tw ? 1 : 0;
        if (z.height() - 2 * r0 != th || z.width() - 2 * c0 != tw)
            throw InputError("malformed pyramid: subband sizes inconsistent across levels");
        if (r0 || c0) {
            Image<double> cropped(th, tw);
            for (std::size_t r = 0; r < th; ++r)
                for (std::size_t c = 0; c < tw; ++c) cropped(r, c) = z(r + r0, c + c0);
            z = std::move(cropped);
        }
    }

    const auto lh = pair_quads(1, 0, 5);
    const auto hl = pair_quads(1, 2, 3);
    const auto hh = pair_quads(1, 1, 4);
    const auto y1 = add(colfilter(z, fb.g0o), colfilter(lh, fb.g1o));
    const auto y2 = add(colfilter(hl, fb.g0o), colfilter(hh, fb.g1o));
    z = add(colfilter(y1.transposed(), fb.g0o), colfilter(y2.transposed(), fb.g1o)).transposed();

    if (z.height() == pyr.height && z.width() == pyr.width) return z;
    Image<double> out(pyr.height, pyr.width);
    for (std::size_t r = 0; r < pyr.height; ++r)
        for (std::size_t c = 0; c < pyr.width; ++c) out(r, c) = z(r, c);
    return out;
}

/// Lowpass at `level` with the four trees averaged: one value per 2x2 quad,
/// the same shape as that level's subbands.
inline Image<double> tree_averaged_lowpass(const DtcwtPyramid& pyr, int level) {
    const auto& lp = pyr.lowpass.at(static_cast<std::size_t>(level - 1));
    Image<double> out(lp.height() / 2, lp.width() / 2);
    for (std::size_t r = 0; r < out.height(); ++r)
        for (std::size_t c = 0; c < out.width(); ++c)
            out(r, c) = 0.25 * (lp(2 * r, 2 * c) + lp(2 * r, 2 * c + 1) + lp(2 * r + 1, 2 * c) + lp(2 * r + 1, 2 * c + 1));
    return out;
}

/// Affine map of values onto [0,1] by min/max; constant input maps to zeros.
inline GrayImage rescale_unit(const Image<double>& img) {
    GrayImage out(img.height(), img.width(), 0.0);
    if (img.empty()) return out;
    const auto [lo_it, hi_it] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) return out;
    const double span = hi - lo;
    auto o = out.pixels();
    auto in = img.pixels();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::clamp((in[i] - lo) / span, 0.0, 1.0);
    return out;
}

inline Image<double> magnitude(const ComplexImage& band) {
    Image<double> out(band.height(), band.width());
    for (std::size_t i = 0; i < band.size(); ++i) out.pixels()[i] = std::abs(band.pixels()[i]);
    return out;
}

/// [lowpass, |+15|, |+45|, |+75|, |-75|, |-45|, |-15|] at `level`, each rescaled to [0,1].
inline std::vector<GrayImage> magnitude_subimages(const DtcwtPyramid& pyr, int level) {
    if (level < 1 || level > pyr.levels)
        throw InputError("level " + std::to_string(level) + " outside 1.." + std::to_string(pyr.levels));
    std::vector<GrayImage> out;
    out.reserve(7);
    out.push_back(rescale_unit(tree_averaged_lowpass(pyr, level)));
    for (const auto& band : pyr.subbands[static_cast<std::size_t>(level - 1)]) out.push_back(rescale_unit(magnitude(band)));
    return out;
}

} // namespace lus
