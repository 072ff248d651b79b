#pragma once

#include <Eigen/Dense>
#include <cassert>
#include <cmath>
#include <optional>

#include "radiocal/ggcm.hpp"
#include "radiocal/patches.hpp"

namespace radiocal {

/// A channel span below this is treated as degenerate: rescaling it to [0,1]
/// would amplify quantization noise past any useful signal.
inline constexpr double kSpanFloor = 1e-4;

/// Total-least-squares line through a 3D point cloud.
struct LineFit {
    Rgb point{};              ///< centroid
    Rgb direction{};          ///< unit principal axis
    double residual = 0.0;    ///< mean squared orthogonal distance
};

/// Rescale each channel affinely so its minimum is 0 and maximum is 1.
/// Returns nothing when any channel's span is below the degeneracy floor.
inline std::optional<PixelDistribution> normalize_channels(const PixelDistribution& d) {
    Rgb lo{1e300, 1e300, 1e300};
    Rgb hi{-1e300, -1e300, -1e300};
    for (const Rgb& pt : d.points)
        for (int ch = 0; ch < 3; ++ch) {
            lo[ch] = std::min(lo[ch], pt[ch]);
            hi[ch] = std::max(hi[ch], pt[ch]);
        }
    Rgb span{};
    for (int ch = 0; ch < 3; ++ch) {
        span[ch] = hi[ch] - lo[ch];
        if (span[ch] < kSpanFloor)
            return std::nullopt;
    }
    PixelDistribution out;
    out.index = d.index;
    out.points.reserve(d.points.size());
    for (const Rgb& pt : d.points)
        out.points.push_back({(pt[0] - lo[0]) / span[0], (pt[1] - lo[1]) / span[1],
                              (pt[2] - lo[2]) / span[2]});
    return out;
}

/// Fit a 3D line by the principal axis of the centered cloud and return the
/// mean squared orthogonal distance to it, i.e. the sum of the two smaller
/// covariance eigenvalues. Needs at least 3 points.
inline LineFit line_fit(const PixelDistribution& d) {
    assert(d.points.size() >= 3);
    const auto n = static_cast<double>(d.points.size());
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const Rgb& pt : d.points)
        mean += Eigen::Vector3d(pt[0], pt[1], pt[2]);
    mean /= n;

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Rgb& pt : d.points) {
        const Eigen::Vector3d c = Eigen::Vector3d(pt[0], pt[1], pt[2]) - mean;
        cov += c * c.transpose();
    }
    cov /= n;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    // eigenvalues are sorted ascending; the principal axis is the last one
    const Eigen::Vector3d axis = eig.eigenvectors().col(2);
    LineFit fit;
    fit.point = {mean.x(), mean.y(), mean.z()};
    fit.direction = {axis.x(), axis.y(), axis.z()};
    fit.residual = std::max(0.0, eig.eigenvalues()(0) + eig.eigenvalues()(1));
    return fit;
}

inline double line_fit_error(const PixelDistribution& d) {
    return line_fit(d).residual;
}

/// The staged objective's data term: line-fit error of the channel-normalized
/// inverse-mapped distribution. Empty when normalization degenerates.
/// `normalize` exists for the ablation that bypasses the normalization step.
inline std::optional<double> linearisation_error(const PixelDistribution& d,
                                                 const GgcmParams& p,
                                                 bool normalize = true) {
    PixelDistribution mapped = apply_inverse(d, p);
    if (!normalize)
        return line_fit_error(mapped);
    auto norm = normalize_channels(mapped);
    if (!norm)
        return std::nullopt;
    return line_fit_error(*norm);
}

} // namespace radiocal
