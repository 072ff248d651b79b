#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "radiocal/image.hpp"

namespace radiocal {

enum class ScanDirection { Horizontal, Vertical };

/// One scanned row or column of a patch, viewed as an ordered set of points
/// in RGB space. `index` is the 1-based scan index within the patch.
struct PixelDistribution {
    std::vector<Rgb> points;
    int index = 1;
};

/// An s-by-s window of the source image.
struct Patch {
    int row = 0; ///< origin (top) in the source image
    int col = 0; ///< origin (left) in the source image
    int size = 0;
    std::vector<Rgb> pixels; ///< row-major, size*size entries
    ScanDirection scan_dir = ScanDirection::Horizontal;

    const Rgb& at(int r, int c) const {
        return pixels[static_cast<std::size_t>(r) * size + c];
    }
    Rgb& at(int r, int c) {
        return pixels[static_cast<std::size_t>(r) * size + c];
    }
};

/// Thresholds governing which windows become candidate patches.
struct SelectionThresholds {
    double tau_us = 0.15;  ///< under-saturation bound on per-pixel channel mean
    double tau_os = 0.9;   ///< over-saturation bound on per-pixel channel mean
    double tau_un = 0.01;  ///< pooled-variance uniformity bound
    double tau_na = 0.065; ///< per-channel narrowness bound along the scan
    int patch_size = 21;   ///< s, odd and >= 3
};

namespace detail {

// Population variance of a channel over one scanned line of the patch.
inline double line_channel_variance(const Patch& p, ScanDirection dir, int k, int ch) {
    const int s = p.size;
    double mean = 0.0;
    for (int i = 0; i < s; ++i)
        mean += (dir == ScanDirection::Horizontal ? p.at(k, i) : p.at(i, k))[ch];
    mean /= s;
    double var = 0.0;
    for (int i = 0; i < s; ++i) {
        const double v = (dir == ScanDirection::Horizontal ? p.at(k, i) : p.at(i, k))[ch];
        var += (v - mean) * (v - mean);
    }
    return var / s;
}

// Summed per-channel variance of all scanned lines in the given direction.
inline double scan_variance_score(const Patch& p, ScanDirection dir) {
    double score = 0.0;
    for (int k = 0; k < p.size; ++k)
        for (int ch = 0; ch < 3; ++ch)
            score += line_channel_variance(p, dir, k, ch);
    return score;
}

} // namespace detail

/// Direction whose scanned distributions carry more summed per-channel
/// variance. Ties (within 1e-12) resolve to Horizontal.
inline ScanDirection scan_direction(const Patch& p) {
    const double h = detail::scan_variance_score(p, ScanDirection::Horizontal);
    const double v = detail::scan_variance_score(p, ScanDirection::Vertical);
    return (v > h + 1e-12) ? ScanDirection::Vertical : ScanDirection::Horizontal;
}

/// The three selection criteria:
///  1. every pixel's channel mean lies strictly inside (tau_us, tau_os);
///  2. the pooled variance of all 3*s*s channel values exceeds tau_un;
///  3. along the assigned scan direction, each channel's mean
///     per-distribution variance exceeds tau_na.
inline bool is_valid_patch(const Patch& p, const SelectionThresholds& th) {
    const int s = p.size;
    const int n = s * s;

    for (const Rgb& px : p.pixels) {
        const double m = (px[0] + px[1] + px[2]) / 3.0;
        if (m <= th.tau_us || m >= th.tau_os)
            return false;
    }

    double mean = 0.0;
    for (const Rgb& px : p.pixels)
        mean += px[0] + px[1] + px[2];
    mean /= 3.0 * n;
    double pooled = 0.0;
    for (const Rgb& px : p.pixels)
        for (int ch = 0; ch < 3; ++ch)
            pooled += (px[ch] - mean) * (px[ch] - mean);
    pooled /= 3.0 * n;
    if (pooled <= th.tau_un)
        return false;

    for (int ch = 0; ch < 3; ++ch) {
        double v = 0.0;
        for (int k = 0; k < s; ++k)
            v += detail::line_channel_variance(p, p.scan_dir, k, ch);
        if (v / s <= th.tau_na)
            return false;
    }
    return true;
}

/// The s scanned distributions of a patch: rows top-to-bottom for
/// Horizontal, columns left-to-right for Vertical.
inline std::vector<PixelDistribution> extract_distributions(const Patch& p) {
    std::vector<PixelDistribution> out;
    out.reserve(p.size);
    for (int k = 0; k < p.size; ++k) {
        PixelDistribution d;
        d.index = k + 1;
        d.points.reserve(p.size);
        for (int i = 0; i < p.size; ++i)
            d.points.push_back(p.scan_dir == ScanDirection::Horizontal ? p.at(k, i)
                                                                       : p.at(i, k));
        out.push_back(std::move(d));
    }
    return out;
}

/// Slide an s-by-s window over the image in raster order, keep windows that
/// pass the selection criteria (scan direction assigned first), stop once
/// max_patches are collected. An empty result is a legal outcome.
inline std::vector<Patch> collect_patches(const Image& img, const SelectionThresholds& th,
                                          int stride, int max_patches) {
    const int s = th.patch_size;
    if (img.width < s || img.height < s)
        throw std::invalid_argument("collect_patches: image smaller than patch size");
    if (stride < 1)
        throw std::invalid_argument("collect_patches: stride must be positive");

    std::vector<Patch> omega;
    for (int r = 0; r + s <= img.height && static_cast<int>(omega.size()) < max_patches;
         r += stride) {
        for (int c = 0; c + s <= img.width && static_cast<int>(omega.size()) < max_patches;
             c += stride) {
            Patch p;
            p.row = r;
            p.col = c;
            p.size = s;
            p.pixels.reserve(static_cast<std::size_t>(s) * s);
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j)
                    p.pixels.push_back(img.at(r + i, c + j));
            p.scan_dir = scan_direction(p);
            if (is_valid_patch(p, th))
                omega.push_back(std::move(p));
        }
    }
    return omega;
}

} // namespace radiocal
