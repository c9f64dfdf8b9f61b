#pragma once

// Deliberately naive re-implementations used as oracles for the texture
// feature code: quadratic pair enumeration, run discovery from run starts,
// and LBP codes from an explicit bit list in a different neighbour order.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "lus/image.hpp"

namespace lus::oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix glcm_counts(const LevelImage& q, int dr, int dc) {
    Matrix g(8, std::vector<double>(8, 0.0));
    const auto H = static_cast<int>(q.height()), W = static_cast<int>(q.width());
    for (int r1 = 0; r1 < H; ++r1)
        for (int c1 = 0; c1 < W; ++c1)
            for (int r2 = 0; r2 < H; ++r2)
                for (int c2 = 0; c2 < W; ++c2)
                    if (r2 - r1 == dr && c2 - c1 == dc)
                        g[static_cast<std::size_t>(q(static_cast<std::size_t>(r1), static_cast<std::size_t>(c1)) - 1)]
                         [static_cast<std::size_t>(q(static_cast<std::size_t>(r2), static_cast<std::size_t>(c2)) - 1)] += 1;
    return g;
}

inline std::array<double, 5> glcm_features(const LevelImage& q, const Matrix& g) {
    long double mean = 0, var = 0;
    for (int v : q.pixels()) mean += v;
    mean /= static_cast<long double>(q.size());
    for (int v : q.pixels()) var += (v - mean) * (v - mean);
    var /= static_cast<long double>(q.size());
    long double total = 0;
    for (const auto& row : g)
        for (double v : row) total += v;
    long double contrast = 0, corr = 0, energy = 0, homog = 0, entropy = 0;
    for (int i = 1; i <= 8; ++i)
        for (int j = 1; j <= 8; ++j) {
            const long double p = g[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] / total;
            contrast += (i - j) * (i - j) * p;
            corr += (i - mean) * (j - mean) * p;
            energy += p * p;
            homog += p / (1 + std::abs(i - j) * std::abs(i - j));
            if (p > 0) entropy += -p * std::log2(p);
        }
    return {static_cast<double>(contrast), var > 0 ? static_cast<double>(corr / var) : 0.0,
            static_cast<double>(energy), static_cast<double>(homog), static_cast<double>(entropy)};
}

/// Runs as (level, length) pairs, found by locating each run's first pixel.
inline std::vector<std::pair<int, int>> runs(const LevelImage& q, int sr, int sc) {
    const auto H = static_cast<int>(q.height()), W = static_cast<int>(q.width());
    auto in = [&](int r, int c) { return r >= 0 && r < H && c >= 0 && c < W; };
    auto at = [&](int r, int c) { return q(static_cast<std::size_t>(r), static_cast<std::size_t>(c)); };
    std::vector<std::pair<int, int>> out;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) {
            if (in(r - sr, c - sc) && at(r - sr, c - sc) == at(r, c)) continue;
            int len = 1;
            while (in(r + len * sr, c + len * sc) && at(r + len * sr, c + len * sc) == at(r, c)) ++len;
            out.emplace_back(at(r, c), len);
        }
    return out;
}

inline std::array<double, 11> glrlm_features(const std::vector<std::pair<int, int>>& rs, std::size_t n_pixels) {
    std::map<int, long double> per_level, per_length;
    long double lre = 0, sre = 0, lgre = 0, hgre = 0, srlge = 0, srhge = 0, lrlge = 0, lrhge = 0;
    for (auto [i, j] : rs) {
        const long double I = i, J = j;
        lre += J * J;
        sre += 1 / (J * J);
        lgre += 1 / (I * I);
        hgre += I * I;
        srlge += 1 / (I * I * J * J);
        srhge += I * I / (J * J);
        lrlge += J * J / (I * I);
        lrhge += I * I * J * J;
        per_level[i] += 1;
        per_length[j] += 1;
    }
    const auto n = static_cast<long double>(rs.size());
    long double gln = 0, rln = 0;
    for (auto [k, v] : per_level) gln += v * v;
    for (auto [k, v] : per_length) rln += v * v;
    auto d = [&](long double v) { return static_cast<double>(v / n); };
    return {d(lre), d(sre), d(gln), d(rln), static_cast<double>(n / static_cast<long double>(n_pixels)),
            d(lgre), d(hgre), d(srlge), d(srhge), d(lrlge), d(lrhge)};
}

/// riu2 histogram; neighbours listed clockwise from north.
inline std::array<double, 10> lbp_riu2(const GrayImage& img) {
    static const int dr[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    static const int dc[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    std::array<double, 10> h{};
    for (std::size_t r = 1; r + 1 < img.height(); ++r)
        for (std::size_t c = 1; c + 1 < img.width(); ++c) {
            int bits[8];
            int ones = 0;
            for (int k = 0; k < 8; ++k) {
                bits[k] = img(static_cast<std::size_t>(static_cast<int>(r) + dr[k]),
                              static_cast<std::size_t>(static_cast<int>(c) + dc[k])) >= img(r, c);
                ones += bits[k];
            }
            int transitions = 0;
            for (int k = 0; k < 8; ++k) transitions += bits[k] != bits[(k + 1) % 8];
            h[static_cast<std::size_t>(transitions <= 2 ? ones : 9)] += 1;
        }
    return h;
}

} // namespace lus::oracle
