#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace lus {

/// Dense row-major 2-D array. Used for gray images, quantized levels and
/// complex subbands alike.
template <typename T>
class Image {
public:
    using value_type = T;

    Image() = default;
    Image(std::size_t height, std::size_t width, T fill = T{})
        : height_(height), width_(width), data_(height * width, fill) {}
    Image(std::size_t height, std::size_t width, std::vector<T> data)
        : height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != height_ * width_)
            throw InputError("image buffer size does not match dimensions");
    }

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * width_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * width_ + c]; }

    std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * width_, width_}; }
    std::span<const T> row(std::size_t r) const noexcept { return {data_.data() + r * width_, width_}; }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    Image transposed() const {
        Image out(width_, height_);
        for (std::size_t r = 0; r < height_; ++r)
            for (std::size_t c = 0; c < width_; ++c)
                out(c, r) = (*this)(r, c);
        return out;
    }

    /// Rows [first, last) as a new image.
    Image rows(std::size_t first, std::size_t last) const {
        Image out(last - first, width_);
        std::copy(data_.begin() + static_cast<std::ptrdiff_t>(first * width_),
                  data_.begin() + static_cast<std::ptrdiff_t>(last * width_), out.data_.begin());
        return out;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<T> data_;
};

/// Intensities in [0,1].
using GrayImage = Image<double>;

/// Quantized levels, 1-based.
using LevelImage = Image<int>;

/// Inclusive pixel rectangle.
struct RoiRect {
    std::size_t top = 0;
    std::size_t left = 0;
    std::size_t bottom = 0;
    std::size_t right = 0;

    bool fits(std::size_t height, std::size_t width) const noexcept {
        return top <= bottom && left <= right && bottom < height && right < width;
    }
    friend bool operator==(const RoiRect&, const RoiRect&) = default;
};

/// Checks the [0,1] intensity invariant and non-empty dimensions.
inline void validate_gray(const GrayImage& img) {
    if (img.height() == 0 || img.width() == 0)
        throw InputError("image must have at least one row and one column");
    for (double p : img.pixels())
        if (!(p >= 0.0 && p <= 1.0))
            throw InputError("pixel intensity outside [0,1]");
}

inline std::string dims_string(std::size_t h, std::size_t w) {
    return std::to_string(h) + "x" + std::to_string(w);
}

} // namespace lus
