#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "error.hpp"
#include "image.hpp"

namespace lus {

namespace detail {

inline GrayImage from_bytes(std::size_t height, std::size_t width, const std::uint8_t* bytes) {
    std::vector<double> px(height * width);
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = static_cast<double>(bytes[i]) / 255.0;
    return GrayImage(height, width, std::move(px));
}

inline std::uint8_t to_byte(double p) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(p, 0.0, 1.0) * 255.0));
}

// Binary PGM: "P5" ws width ws height ws maxval single-ws raster. '#' comments allowed in the header.
inline GrayImage decode_pgm(const std::vector<std::uint8_t>& buf, const std::string& path) {
    std::size_t pos = 2;
    auto next_int = [&]() -> long {
        while (pos < buf.size()) {
            if (buf[pos] == '#') {
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            } else if (std::isspace(buf[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        long v = 0;
        std::size_t start = pos;
        while (pos < buf.size() && std::isdigit(buf[pos])) v = v * 10 + (buf[pos++] - '0');
        if (pos == start) throw InputError(path + ": malformed PGM header");
        return v;
    };
    const long width = next_int();
    const long height = next_int();
    const long maxval = next_int();
    if (width <= 0 || height <= 0) throw InputError(path + ": PGM has zero dimension");
    if (maxval > 255) throw InputError(path + ": unsupported bit depth (16-bit PGM), need 8-bit grayscale");
    if (maxval <= 0) throw InputError(path + ": malformed PGM maxval");
    ++pos;  // single whitespace before raster
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (buf.size() < pos + n) throw InputError(path + ": truncated PGM raster");
    return from_bytes(static_cast<std::size_t>(height), static_cast<std::size_t>(width), buf.data() + pos);
}

struct PngMemReader {
    const std::vector<std::uint8_t>* buf;
    std::size_t pos;
};

inline void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* r = static_cast<PngMemReader*>(png_get_io_ptr(png));
    if (r->pos + len > r->buf->size()) png_error(png, "truncated PNG");
    std::memcpy(out, r->buf->data() + r->pos, len);
    r->pos += len;
}

inline void png_quiet_warning(png_structp, png_const_charp) {}

struct PngHeader {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int color = 0;
    int depth = 0;
};

// libpng reports errors by longjmp; keep every setjmp frame free of objects with destructors.
inline bool png_read_header(png_structp png, png_infop info, PngHeader& h) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_read_info(png, info);
    h.width = png_get_image_width(png, info);
    h.height = png_get_image_height(png, info);
    h.color = png_get_color_type(png, info);
    h.depth = png_get_bit_depth(png, info);
    return true;
}

inline bool png_read_rows(png_structp png, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_read_image(png, rows);
    return true;
}

inline GrayImage decode_png(const std::vector<std::uint8_t>& buf, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_quiet_warning);
    if (!png) throw InputError(path + ": libpng init failed");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_read_struct(p, i, nullptr); }
    } guard{&png, &info};
    if (!info) throw InputError(path + ": libpng init failed");
    PngMemReader reader{&buf, 0};
    png_set_read_fn(png, &reader, png_mem_read);
    PngHeader h;
    if (!png_read_header(png, info, h)) throw InputError(path + ": corrupt PNG header");
    if (h.color != PNG_COLOR_TYPE_GRAY)
        throw InputError(path + ": color PNG not supported, need 8-bit grayscale");
    if (h.depth != 8)
        throw InputError(path + ": unsupported bit depth " + std::to_string(h.depth) + ", need 8-bit grayscale");
    std::vector<std::uint8_t> raster(std::size_t{h.width} * h.height);
    std::vector<png_bytep> rows(h.height);
    for (std::size_t r = 0; r < h.height; ++r) rows[r] = raster.data() + r * h.width;
    if (!png_read_rows(png, rows.data())) throw InputError(path + ": corrupt PNG data");
    return from_bytes(h.height, h.width, raster.data());
}

inline bool png_write_all(png_structp png, png_infop info, png_uint_32 width, png_uint_32 height,
                          png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    return true;
}

} // namespace detail

/// Loads an 8-bit grayscale PNG or binary PGM (P5), scaling bytes by 1/255.
inline GrayImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open image: " + path.string());
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    static constexpr std::uint8_t png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (buf.size() >= 8 && std::equal(buf.begin(), buf.begin() + 8, png_sig))
        return detail::decode_png(buf, path.string());
    if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '5')
        return detail::decode_pgm(buf, path.string());
    if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '6')
        throw InputError(path.string() + ": color PPM not supported, need 8-bit grayscale");
    throw InputError(path.string() + ": unsupported image container (need PNG or binary PGM)");
}

/// Writes intensities as an 8-bit binary PGM (rounded, clamped to [0,1]).
inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write image: " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> raster(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) raster[i] = static_cast<char>(detail::to_byte(img.pixels()[i]));
    out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!out) throw InputError("failed writing image: " + path.string());
}

/// Writes an 8-bit grayscale PNG.
inline void write_png(const std::filesystem::path& path, const GrayImage& img) {
    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
    if (!fp) throw InputError("cannot write image: " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, detail::png_quiet_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    struct Guard {
        png_structp* p;
        png_infop* i;
        ~Guard() { png_destroy_write_struct(p, i); }
    } guard{&png, &info};
    if (!png || !info) throw InputError("libpng init failed");
    std::vector<std::uint8_t> raster(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) raster[i] = detail::to_byte(img.pixels()[i]);
    std::vector<png_bytep> rows(img.height());
    for (std::size_t r = 0; r < img.height(); ++r) rows[r] = raster.data() + r * img.width();
    png_init_io(png, fp.get());
    if (!detail::png_write_all(png, info, static_cast<png_uint_32>(img.width()),
                               static_cast<png_uint_32>(img.height()), rows.data()))
        throw InputError("failed writing image: " + path.string());
}

} // namespace lus
