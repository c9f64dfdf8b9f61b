#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "lus/image.hpp"

namespace lus::test {

/// Fresh scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("lus_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline GrayImage random_image(std::size_t h, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage img(h, w);
    for (auto& p : img.pixels()) p = u(eng);
    return img;
}

inline LevelImage random_levels(std::size_t h, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_int_distribution<int> u(1, 8);
    LevelImage img(h, w);
    for (auto& p : img.pixels()) p = u(eng);
    return img;
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_raw_pgm(const std::filesystem::path& path, std::size_t h, std::size_t w,
                          const std::vector<std::uint8_t>& bytes, int maxval = 255) {
    std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n" + std::to_string(maxval) + "\n";
    s.append(bytes.begin(), bytes.end());
    write_file(path, s);
}

} // namespace lus::test
