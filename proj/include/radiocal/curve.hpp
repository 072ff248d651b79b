#pragma once

#include <array>
#include <cstddef>

namespace radiocal {

/// Number of samples an inverse-response curve carries.
inline constexpr int kCurveSamples = 100;

/// Shared abscissae: 100 equidistant values spanning [0,1] inclusive,
/// spacing 1/99. Every curve in the library lives on this grid.
inline const std::array<double, kCurveSamples>& curve_grid() {
    static const std::array<double, kCurveSamples> grid = [] {
        std::array<double, kCurveSamples> g{};
        for (int i = 0; i < kCurveSamples; ++i)
            g[i] = static_cast<double>(i) / (kCurveSamples - 1);
        return g;
    }();
    return grid;
}

enum class CurveKind {
    Smooth,    ///< sampled from a parametric model
    Staircase, ///< produced by grid voting
};

/// An inverse camera response sampled on the shared grid.
struct CrfCurve {
    std::array<double, kCurveSamples> values{};
    CurveKind kind = CurveKind::Smooth;

    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
};

} // namespace radiocal
