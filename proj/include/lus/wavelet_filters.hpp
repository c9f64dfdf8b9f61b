#pragma once

// Dual-tree filter coefficients.
//
// Level 1: Kingsbury's near-symmetric biorthogonal pair "near_sym_b"
// (13-tap analysis lowpass, 19-tap analysis highpass). Levels >= 2: the
// 14-tap quarter-sample-shift orthonormal pair "qshift_b". Values are the
// published sets shipped with the Cambridge DTCWT toolbox, copied at full
// double precision.

#include <array>
#include <vector>

namespace lus::filters {

inline constexpr std::array<double, 13> near_sym_b_h0 = {
    -0.0017578125, 0.0, 0.022265625,
    -0.046875, -0.0482421875, 0.296875,
    0.55546875, 0.296875, -0.0482421875,
    -0.046875, 0.022265625, 0.0,
    -0.0017578125,
};
inline constexpr std::array<double, 19> near_sym_b_g0 = {
    7.062639508928571e-05, 0.0, -0.0013419015066964285,
    -0.0018833705357142855, 0.007156808035714285, 0.023856026785714284,
    -0.05564313616071428, -0.05168805803571428, 0.29975760323660716,
    0.5594308035714286, 0.29975760323660716, -0.05168805803571428,
    -0.05564313616071428, 0.023856026785714284, 0.007156808035714285,
    -0.0018833705357142855, -0.0013419015066964285, 0.0,
    7.062639508928571e-05,
};
inline constexpr std::array<double, 19> near_sym_b_h1 = {
    -7.062639508928571e-05, 0.0, 0.0013419015066964285,
    -0.0018833705357142855, -0.007156808035714285, 0.023856026785714284,
    0.05564313616071428, -0.05168805803571428, -0.29975760323660716,
    0.5594308035714286, -0.29975760323660716, -0.05168805803571428,
    0.05564313616071428, 0.023856026785714284, -0.007156808035714285,
    -0.0018833705357142855, 0.0013419015066964285, 0.0,
    -7.062639508928571e-05,
};
inline constexpr std::array<double, 13> near_sym_b_g1 = {
    -0.0017578125, -0.0, 0.022265625,
    0.046875, -0.0482421875, -0.296875,
    0.55546875, -0.296875, -0.0482421875,
    0.046875, 0.022265625, -0.0,
    -0.0017578125,
};
inline constexpr std::array<double, 14> qshift_b_h0a = {
    0.003253142763653182, -0.00388321199915849, 0.03466034684485349,
    -0.03887280126882779, -0.11720388769911527, 0.27529538466888204,
    0.7561456438925225, 0.5688104207121227, 0.011866092033797,
    -0.1067118046866654, 0.023825384794920298, 0.01702522388155399,
    -0.005439475937274115, -0.004556895628475491,
};
inline constexpr std::array<double, 14> qshift_b_h0b = {
    -0.004556895628475491, -0.005439475937274115, 0.01702522388155399,
    0.023825384794920298, -0.1067118046866654, 0.011866092033797,
    0.5688104207121227, 0.7561456438925225, 0.27529538466888204,
    -0.11720388769911527, -0.03887280126882779, 0.03466034684485349,
    -0.00388321199915849, 0.003253142763653182,
};
inline constexpr std::array<double, 14> qshift_b_g0a = {
    -0.004556895628475491, -0.005439475937274115, 0.01702522388155399,
    0.023825384794920298, -0.1067118046866654, 0.011866092033797,
    0.5688104207121227, 0.7561456438925225, 0.27529538466888204,
    -0.11720388769911527, -0.03887280126882779, 0.03466034684485349,
    -0.00388321199915849, 0.003253142763653182,
};
inline constexpr std::array<double, 14> qshift_b_g0b = {
    0.003253142763653182, -0.00388321199915849, 0.03466034684485349,
    -0.03887280126882779, -0.11720388769911527, 0.27529538466888204,
    0.7561456438925225, 0.5688104207121227, 0.011866092033797,
    -0.1067118046866654, 0.023825384794920298, 0.01702522388155399,
    -0.005439475937274115, -0.004556895628475491,
};
inline constexpr std::array<double, 14> qshift_b_h1a = {
    -0.004556895628475491, 0.005439475937274115, 0.01702522388155399,
    -0.023825384794920298, -0.1067118046866654, -0.011866092033797,
    0.5688104207121227, -0.7561456438925225, 0.27529538466888204,
    0.11720388769911527, -0.03887280126882779, -0.03466034684485349,
    -0.00388321199915849, -0.003253142763653182,
};
inline constexpr std::array<double, 14> qshift_b_h1b = {
    -0.003253142763653182, -0.00388321199915849, -0.03466034684485349,
    -0.03887280126882779, 0.11720388769911527, 0.27529538466888204,
    -0.7561456438925225, 0.5688104207121227, -0.011866092033797,
    -0.1067118046866654, -0.023825384794920298, 0.01702522388155399,
    0.005439475937274115, -0.004556895628475491,
};
inline constexpr std::array<double, 14> qshift_b_g1a = {
    -0.003253142763653182, -0.00388321199915849, -0.03466034684485349,
    -0.03887280126882779, 0.11720388769911527, 0.27529538466888204,
    -0.7561456438925225, 0.5688104207121227, -0.011866092033797,
    -0.1067118046866654, -0.023825384794920298, 0.01702522388155399,
    0.005439475937274115, -0.004556895628475491,
};
inline constexpr std::array<double, 14> qshift_b_g1b = {
    -0.004556895628475491, 0.005439475937274115, 0.01702522388155399,
    -0.023825384794920298, -0.1067118046866654, -0.011866092033797,
    0.5688104207121227, -0.7561456438925225, 0.27529538466888204,
    0.11720388769911527, -0.03887280126882779, -0.03466034684485349,
    -0.00388321199915849, -0.003253142763653182,
};

} // namespace lus::filters

namespace lus {

/// Analysis/synthesis filters for both trees.
///
/// Level-1 filters are odd length and applied undecimated; the two trees are
/// the even and odd sampling phases of the same output, i.e. tree b is tree a
/// shifted by one sample. Q-shift tree-b filters are the time reverse of tree a.
struct FilterBank {
    std::vector<double> h0o, g0o, h1o, g1o;
    std::vector<double> h0a, h0b, g0a, g0b, h1a, h1b, g1a, g1b;

    static FilterBank near_sym_b_qshift_b() {
        using namespace filters;
        auto v = [](const auto& a) { return std::vector<double>(a.begin(), a.end()); };
        return FilterBank{v(near_sym_b_h0), v(near_sym_b_g0), v(near_sym_b_h1), v(near_sym_b_g1),
                          v(qshift_b_h0a),  v(qshift_b_h0b),  v(qshift_b_g0a),  v(qshift_b_g0b),
                          v(qshift_b_h1a),  v(qshift_b_h1b),  v(qshift_b_g1a),  v(qshift_b_g1b)};
    }
};

} // namespace lus
