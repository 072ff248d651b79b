#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "radiocal/curve.hpp"
#include "radiocal/estimator.hpp"
#include "radiocal/ggcm.hpp"
#include "radiocal/image.hpp"
#include "radiocal/synth.hpp"

namespace radiocal {

/// Root of the summed squared differences over the 100 shared samples.
/// Deliberately not divided by the sample count.
inline double rmse(const CrfCurve& pred, const CrfCurve& truth) {
    double acc = 0.0;
    for (int i = 0; i < kCurveSamples; ++i) {
        const double d = pred.values[i] - truth.values[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

/// Apply the inverse response to every channel of every pixel.
inline Image linearize(const Image& img, const GgcmParams& p) {
    Image out = img;
    for (Rgb& px : out.pixels)
        for (int ch = 0; ch < 3; ++ch)
            px[ch] = ggcm_inverse_value(px[ch], p);
    return out;
}

/// Same, driven by a sampled curve (linear interpolation between samples).
/// This is what the CLI uses when only a curve file is available.
inline Image linearize(const Image& img, const CrfCurve& curve) {
    Image out = img;
    for (Rgb& px : out.pixels)
        for (int ch = 0; ch < 3; ++ch) {
            const double u = std::min(1.0, std::max(0.0, px[ch])) * (kCurveSamples - 1);
            const int i = std::min(kCurveSamples - 2, static_cast<int>(u));
            const double f = u - i;
            px[ch] = (1.0 - f) * curve.values[i] + f * curve.values[i + 1];
        }
    return out;
}

struct EvalReport {
    std::vector<double> per_image;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0; ///< population form
    double min = 0.0;
    double max = 0.0;
};

inline EvalReport summarize(std::vector<double> values) {
    if (values.empty())
        throw std::invalid_argument("summarize: empty value list");
    EvalReport rep;
    rep.per_image = values;
    const double n = static_cast<double>(values.size());
    for (double v : values)
        rep.mean += v;
    rep.mean /= n;
    for (double v : values)
        rep.stddev += (v - rep.mean) * (v - rep.mean);
    rep.stddev = std::sqrt(rep.stddev / n);
    std::sort(values.begin(), values.end());
    rep.min = values.front();
    rep.max = values.back();
    const std::size_t h = values.size() / 2;
    rep.median = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
    return rep;
}

struct AblationScene {
    Image image;
    CrfCurve truth;
    std::string name;
};

struct AblationReport {
    EvalReport full;
    EvalReport one_attempt;      ///< single stage, two coefficients
    EvalReport no_normalization; ///< channel normalization bypassed
    EvalReport no_consistency;   ///< unit reliability weights, no pruning
    std::vector<std::string> failures; ///< "<scene>/<variant>: <error>"
};

namespace detail {

inline EstimatorConfig ablation_variant_config(const EstimatorConfig& base, int which) {
    EstimatorConfig cfg = base;
    switch (which) {
    case 1: // one-attempt
        cfg.stages = 1;
        cfg.coeff_override = 2;
        break;
    case 2: // no normalization
        cfg.normalize = false;
        break;
    case 3: // no prediction consistency
        cfg.use_consistency = false;
        break;
    default:
        break;
    }
    return cfg;
}

} // namespace detail

/// Run the four method variants over a scene set and aggregate their errors.
/// Per-scene estimation failures are recorded and the batch continues.
inline AblationReport run_ablation(const std::vector<AblationScene>& scenes,
                                   const EstimatorConfig& base) {
    if (scenes.empty())
        throw std::invalid_argument("run_ablation: empty scene set");

    static const char* names[4] = {"full", "one_attempt", "no_normalization",
                                   "no_consistency"};
    AblationReport rep;
    std::vector<double> errs[4];
    for (const AblationScene& scene : scenes) {
        for (int v = 0; v < 4; ++v) {
            try {
                auto res = estimate(scene.image, detail::ablation_variant_config(base, v));
                errs[v].push_back(rmse(res.curve, scene.truth));
            } catch (const Error& e) {
                rep.failures.push_back(scene.name + "/" + names[v] + ": " + e.what());
            }
        }
    }
    rep.full = summarize(errs[0]);
    rep.one_attempt = summarize(errs[1]);
    rep.no_normalization = summarize(errs[2]);
    rep.no_consistency = summarize(errs[3]);
    return rep;
}

} // namespace radiocal
