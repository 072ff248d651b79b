#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "radiocal/curve.hpp"
#include "radiocal/ggcm.hpp"
#include "radiocal/image.hpp"
#include "radiocal/patches.hpp"

namespace radiocal {

/// Gaussian sampler with a pinned algorithm so fixtures reproduce across
/// platforms and languages: mt19937_64 seeded directly, uniforms taken as
/// (x >> 11) * 2^-53, pairs mixed by Box-Muller.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double uniform() { // [0, 1)
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Spatial profile of a generated edge: plateaus at both ends joined by a
/// raised-cosine ramp. For s=3 this degenerates to {0, 1/2, 1}. The sample
/// positions along the colour segment are free as long as every point stays
/// on it; clustering them at the endpoints keeps the generated patches past
/// the narrowness threshold for every response curve under test.
inline std::vector<double> edge_profile(int s, double plateau = 0.35) {
    std::vector<double> t(static_cast<std::size_t>(s));
    for (int j = 0; j < s; ++j) {
        const double u = static_cast<double>(j) / (s - 1);
        if (u <= plateau)
            t[j] = 0.0;
        else if (u >= 1.0 - plateau)
            t[j] = 1.0;
        else
            t[j] = 0.5 * (1.0 - std::cos(3.14159265358979323846 * (u - plateau) /
                                         (1.0 - 2.0 * plateau)));
    }
    return t;
}

/// Irradiance-domain patch whose every row runs along the segment from
/// colour `a` to colour `b` (rows identical); each row is exactly collinear
/// in RGB space by construction.
inline Patch gen_gradient_patch(const Rgb& a, const Rgb& b, int s) {
    if (s < 2)
        throw std::invalid_argument("gen_gradient_patch: s must be >= 2");
    Patch p;
    p.size = s;
    p.scan_dir = ScanDirection::Horizontal;
    p.pixels.resize(static_cast<std::size_t>(s) * s);
    const std::vector<double> t = edge_profile(s);
    for (int col = 0; col < s; ++col) {
        Rgb v;
        for (int ch = 0; ch < 3; ++ch)
            v[ch] = a[ch] + t[col] * (b[ch] - a[ch]);
        for (int row = 0; row < s; ++row)
            p.at(row, col) = v;
    }
    return p;
}

/// Push an irradiance image through the forward response, channel-wise.
inline Image apply_crf(const Image& irradiance, const GgcmParams& p) {
    Image out = irradiance;
    for (Rgb& px : out.pixels)
        for (int ch = 0; ch < 3; ++ch)
            px[ch] = ggcm_forward(px[ch], p);
    return out;
}

/// Add clamped i.i.d. Gaussian noise per channel. Deterministic for a fixed
/// seed: pixels in raster order, channels r,g,b within a pixel.
inline Image add_noise(const Image& img, double sigma, std::uint64_t seed) {
    if (sigma < 0.0)
        throw std::invalid_argument("add_noise: sigma must be >= 0");
    if (sigma == 0.0)
        return img;
    Image out = img;
    GaussianSampler gauss(seed);
    for (Rgb& px : out.pixels)
        for (int ch = 0; ch < 3; ++ch)
            px[ch] = std::min(1.0, std::max(0.0, px[ch] + sigma * gauss.normal()));
    return out;
}

/// Colour endpoint pair of one generated patch.
using ColourPair = std::pair<Rgb, Rgb>;

/// Strongly chromatic wide-range pairs; they pass the default selection
/// thresholds after any response in the supported range.
inline std::vector<ColourPair> default_scene_pairs() {
    return {
        {{0.03, 0.97, 0.03}, {0.95, 0.04, 0.96}},
        {{0.96, 0.05, 0.04}, {0.04, 0.96, 0.95}},
        {{0.04, 0.04, 0.97}, {0.96, 0.95, 0.05}},
        {{0.95, 0.96, 0.04}, {0.03, 0.05, 0.93}},
    };
}

/// Near-achromatic pairs: their channels move together, so the mapped
/// distributions stay close to a line regardless of the response and carry
/// little calibration signal. They only pass selection for mild responses.
inline std::vector<ColourPair> weak_scene_pairs() {
    return {
        {{0.17, 0.16, 0.18}, {0.84, 0.85, 0.83}},
        {{0.85, 0.83, 0.84}, {0.16, 0.18, 0.17}},
    };
}

struct SyntheticScene {
    Image image;      ///< intensity domain, after response and noise
    Image irradiance; ///< linear domain, before response and noise
    CrfCurve truth;   ///< ground-truth inverse response on the shared grid
    GgcmParams truth_params;
};

/// Tile gradient patches on a uniform mid-gray background (rejected by the
/// uniformity criterion), apply the response, then noise. Patches sit at
/// window-aligned positions so a stride-s scan hits each exactly once.
inline SyntheticScene gen_scene(const std::vector<ColourPair>& pairs,
                                const GgcmParams& truth, double sigma,
                                std::uint64_t seed, int s = 21) {
    const int n = static_cast<int>(pairs.size());
    int cols = 1, rows = 1;
    while (cols * rows < n) {
        if (cols <= rows)
            ++cols;
        else
            ++rows;
    }
    if (n == 0)
        cols = rows = 1;

    Image irr(s * (2 * cols + 1), s * (2 * rows + 1), {0.5, 0.5, 0.5});
    for (int i = 0; i < n; ++i) {
        const int gr = i / cols;
        const int gc = i % cols;
        const Patch p = gen_gradient_patch(pairs[i].first, pairs[i].second, s);
        const int r0 = s * (2 * gr + 1);
        const int c0 = s * (2 * gc + 1);
        for (int r = 0; r < s; ++r)
            for (int c = 0; c < s; ++c)
                irr.at(r0 + r, c0 + c) = p.at(r, c);
    }

    SyntheticScene scene;
    scene.truth_params = truth;
    scene.truth = ggcm_inverse_curve(truth);
    scene.image = add_noise(apply_crf(irr, truth), sigma, seed);
    scene.irradiance = std::move(irr);
    return scene;
}

} // namespace radiocal
