#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

#include "radiocal/estimator.hpp"
#include "radiocal/synth.hpp"

using namespace radiocal;

namespace {

CrfCurve constant_offset(const CrfCurve& c, double offset) {
    CrfCurve out = c;
    for (double& v : out.values)
        v += offset;
    return out;
}

// E[x^2] - mean^2 route, distinct from the implementation's centered sums.
double consistency_oracle(const std::vector<CrfCurve>& curves) {
    const double n = static_cast<double>(curves.size());
    double acc = 0.0;
    for (int i = 0; i < kCurveSamples; ++i) {
        double s = 0.0, s2 = 0.0;
        for (const CrfCurve& c : curves) {
            s += c.values[i];
            s2 += c.values[i] * c.values[i];
        }
        acc += s2 / n - (s / n) * (s / n);
    }
    return acc / kCurveSamples;
}

PixelDistribution gamma_distribution(const Rgb& a, const Rgb& b, double gamma) {
    Patch patch = gen_gradient_patch(a, b, 21);
    PixelDistribution d = extract_distributions(patch)[0];
    for (Rgb& p : d.points)
        for (int ch = 0; ch < 3; ++ch)
            p[ch] = std::pow(p[ch], gamma);
    return d;
}

} // namespace

TEST(Consistency, Examples) {
    const CrfCurve base = ggcm_inverse_curve(GgcmParams{{0.6}});
    EXPECT_LT(consistency({base, base, base}), 1e-30);
    EXPECT_DOUBLE_EQ(consistency({base}), 0.0);
    EXPECT_NEAR(consistency({base, constant_offset(base, 0.1)}), 0.0025, 1e-12);
}

TEST(Consistency, MatchesBruteForce) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 21);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<CrfCurve> curves(count(rng));
        for (CrfCurve& c : curves)
            for (double& v : c.values)
                v = unit(rng);
        EXPECT_NEAR(consistency(curves), consistency_oracle(curves), 1e-12);
    }
}

TEST(Reliability, Examples) {
    EXPECT_DOUBLE_EQ(reliability(0.0), 1.0);
    EXPECT_NEAR(reliability(0.05), std::exp(-1.0), 1e-12);
    EXPECT_NEAR(reliability(0.0025), 0.951229, 1e-6);
    EXPECT_GT(reliability(10.0), 0.0);
}

TEST(OptimizeDistribution, RecoversGammaNoiseless) {
    const auto d = gamma_distribution({0.03, 0.97, 0.03}, {0.95, 0.04, 0.96}, 0.4);
    const auto r = optimize_distribution(d, 1, nullptr, 0.0);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(r->params.coeffs[0], 0.4, 0.02);
}

TEST(OptimizeDistribution, LinearDataGivesIdentity) {
    Patch patch = gen_gradient_patch({0.2, 0.7, 0.15}, {0.85, 0.2, 0.9}, 21);
    const PixelDistribution d = extract_distributions(patch)[0];
    const auto r = optimize_distribution(d, 1, nullptr, 0.0);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(r->params.coeffs[0], 1.0, 0.02);
}

TEST(OptimizeDistribution, HugeLambdaPinsToPrior) {
    const auto d = gamma_distribution({0.03, 0.97, 0.03}, {0.95, 0.04, 0.96}, 0.4);
    CrfCurve identity;
    const auto& grid = curve_grid();
    for (int i = 0; i < kCurveSamples; ++i)
        identity.values[i] = grid[i];
    const auto r = optimize_distribution(d, 1, &identity, 1e9);
    ASSERT_TRUE(r.has_value());
    const CrfCurve fitted = ggcm_inverse_curve(r->params);
    for (int i = 0; i < kCurveSamples; ++i)
        EXPECT_NEAR(fitted.values[i], identity.values[i], 1e-2);
}

TEST(OptimizeDistribution, DegenerateChannelSkipped) {
    PixelDistribution d;
    for (int i = 0; i <= 20; ++i)
        d.points.push_back({i / 20.0, 0.5, 0.3 + i / 50.0});
    EXPECT_FALSE(optimize_distribution(d, 1, nullptr, 0.0).has_value());
}

TEST(EstimatePatch, CleanPatchIsFullyReliable) {
    Patch patch = gen_gradient_patch({0.03, 0.97, 0.03}, {0.95, 0.04, 0.96}, 21);
    for (Rgb& px : patch.pixels)
        for (int ch = 0; ch < 3; ++ch)
            px[ch] = std::pow(px[ch], 0.4);
    patch.scan_dir = ScanDirection::Horizontal;
    const auto est = estimate_patch(patch, 1, nullptr, 0.0, 20);
    ASSERT_TRUE(est.has_value());
    EXPECT_EQ(est->distribution_curves.size(), 21u);
    EXPECT_LT(est->sigma_hat, 1e-6);
    EXPECT_GT(est->alpha_hat, 0.9999);
}

TEST(EstimatePatch, NoiseLowersReliability) {
    Patch clean = gen_gradient_patch({0.03, 0.97, 0.03}, {0.95, 0.04, 0.96}, 21);
    for (Rgb& px : clean.pixels)
        for (int ch = 0; ch < 3; ++ch)
            px[ch] = std::pow(px[ch], 0.4);
    clean.scan_dir = ScanDirection::Horizontal;

    Image as_image(21, 21);
    for (int r = 0; r < 21; ++r)
        for (int c = 0; c < 21; ++c)
            as_image.at(r, c) = clean.at(r, c);
    const Image noisy_img = add_noise(as_image, 0.02, 5);
    Patch noisy = clean;
    for (int r = 0; r < 21; ++r)
        for (int c = 0; c < 21; ++c)
            noisy.at(r, c) = noisy_img.at(r, c);

    const auto est_clean = estimate_patch(clean, 1, nullptr, 0.0, 20);
    const auto est_noisy = estimate_patch(noisy, 1, nullptr, 0.0, 20);
    ASSERT_TRUE(est_clean && est_noisy);
    EXPECT_GT(est_noisy->sigma_hat, est_clean->sigma_hat);
    EXPECT_LT(est_noisy->alpha_hat, est_clean->alpha_hat);
}

TEST(EstimatePatch, AchromaticPatchDropped) {
    // constant green everywhere: every distribution is degenerate
    Patch p = gen_gradient_patch({0.2, 0.5, 0.3}, {0.8, 0.5, 0.9}, 21);
    p.scan_dir = ScanDirection::Horizontal;
    EXPECT_FALSE(estimate_patch(p, 1, nullptr, 0.0, 20).has_value());
}

TEST(Estimate, EmptyPatchSetReported) {
    Image flat(128, 128, {0.5, 0.5, 0.5});
    EXPECT_THROW(estimate(flat, EstimatorConfig{}), EmptyPatchSetError);
}

TEST(Estimate, InvalidConfigRejected) {
    Image img(64, 64, {0.5, 0.5, 0.5});
    EstimatorConfig cfg;
    cfg.stages = 0;
    EXPECT_THROW(estimate(img, cfg), std::invalid_argument);
    cfg = EstimatorConfig{};
    cfg.tau_re = 1.0;
    EXPECT_THROW(estimate(img, cfg), std::invalid_argument);
    cfg = EstimatorConfig{};
    cfg.thresholds.patch_size = 20; // even
    EXPECT_THROW(estimate(img, cfg), std::invalid_argument);
    cfg = EstimatorConfig{};
    cfg.thresholds.tau_us = 0.95; // above tau_os
    EXPECT_THROW(estimate(img, cfg), std::invalid_argument);
}

TEST(Estimate, CleanSceneRecoversTruthAndPrunesMonotonically) {
    const SyntheticScene scene = gen_scene(default_scene_pairs(), GgcmParams{{0.5}}, 0.0, 1);
    const EstimateResult res = estimate(scene.image, EstimatorConfig{});
    ASSERT_EQ(res.stages.size(), 2u);
    EXPECT_LE(res.stages[1].surviving_patches, res.stages[0].surviving_patches);
    EXPECT_LE(res.diagnostics.stages[0].patches_out, res.diagnostics.stages[0].patches_in);

    double err = 0.0;
    for (int i = 0; i < kCurveSamples; ++i) {
        const double d = res.curve.values[i] - scene.truth.values[i];
        err += d * d;
    }
    EXPECT_LE(std::sqrt(err), 0.02);
}

TEST(Estimate, VerticalScanPatchesWork) {
    // transpose a scene so every valid patch varies top-to-bottom
    const SyntheticScene scene = gen_scene(default_scene_pairs(), GgcmParams{{0.5}}, 0.0, 1);
    Image transposed(scene.image.height, scene.image.width);
    for (int r = 0; r < scene.image.height; ++r)
        for (int c = 0; c < scene.image.width; ++c)
            transposed.at(c, r) = scene.image.at(r, c);

    const auto omega = collect_patches(transposed, SelectionThresholds{}, 21, 500);
    ASSERT_FALSE(omega.empty());
    for (const Patch& p : omega)
        EXPECT_EQ(p.scan_dir, ScanDirection::Vertical);

    const EstimateResult res = estimate(transposed, EstimatorConfig{});
    double err = 0.0;
    for (int i = 0; i < kCurveSamples; ++i) {
        const double d = res.curve.values[i] - scene.truth.values[i];
        err += d * d;
    }
    EXPECT_LE(std::sqrt(err), 0.02);
}

TEST(Estimate, DeterministicAcrossRuns) {
    const SyntheticScene scene = gen_scene(default_scene_pairs(), GgcmParams{{0.7}}, 0.01, 4);
    EstimatorConfig cfg;
    const EstimateResult a = estimate(scene.image, cfg);
    const EstimateResult b = estimate(scene.image, cfg);
    ASSERT_EQ(a.params.coeffs.size(), b.params.coeffs.size());
    for (std::size_t i = 0; i < a.params.coeffs.size(); ++i)
        EXPECT_EQ(a.params.coeffs[i], b.params.coeffs[i]);
    for (int i = 0; i < kCurveSamples; ++i)
        EXPECT_EQ(a.curve.values[i], b.curve.values[i]);
}

TEST(Estimate, FallsBackWhenEveryPatchIsPruned) {
    const SyntheticScene scene = gen_scene(default_scene_pairs(), GgcmParams{{0.5}}, 0.02, 3);
    EstimatorConfig cfg;
    cfg.tau_re = 0.999999; // noisy patches cannot reach this reliability
    const EstimateResult res = estimate(scene.image, cfg);
    ASSERT_EQ(res.stages.size(), 1u);
    EXPECT_EQ(res.stages[0].surviving_patches, 0);
    ASSERT_FALSE(res.diagnostics.warnings.empty());
    // the one-coefficient fallback still produces a usable curve
    EXPECT_EQ(res.params.order(), 1);
    EXPECT_NEAR(res.params.coeffs[0], 0.5, 0.1);
}

TEST(Estimate, NightModeAdmitsDarkPatches) {
    // dark-end pixel means sit between 0.02 and 0.15: rejected as
    // under-saturated by default, usable in night mode
    const std::vector<ColourPair> dark_pairs = {
        {{0.03, 0.25, 0.08}, {0.60, 0.85, 0.65}},
        {{0.25, 0.03, 0.10}, {0.85, 0.62, 0.68}},
        {{0.08, 0.06, 0.24}, {0.66, 0.63, 0.86}},
        {{0.20, 0.16, 0.03}, {0.78, 0.72, 0.60}},
    };
    const SyntheticScene scene = gen_scene(dark_pairs, GgcmParams{{1.0}}, 0.0, 2);

    EXPECT_THROW(estimate(scene.image, EstimatorConfig{}), EmptyPatchSetError);

    EstimatorConfig night;
    night.night_mode = true;
    const EstimateResult res = estimate(scene.image, night);
    double err = 0.0;
    for (int i = 0; i < kCurveSamples; ++i) {
        const double d = res.curve.values[i] - scene.truth.values[i];
        err += d * d;
    }
    EXPECT_LE(std::sqrt(err), 0.02);
}

TEST(Estimate, CoarsestGridStillWorks) {
    const SyntheticScene scene = gen_scene(default_scene_pairs(), GgcmParams{{0.5}}, 0.0, 1);
    EstimatorConfig cfg;
    cfg.grid_resolution = 2;
    const EstimateResult res = estimate(scene.image, cfg);
    EXPECT_EQ(res.params.order(), 2);
    for (int i = 1; i < kCurveSamples; ++i)
        EXPECT_GE(res.curve.values[i], res.curve.values[i - 1]);
}

TEST(Estimate, ConcurrentCallsAgree) {
    const SyntheticScene scene = gen_scene(default_scene_pairs(), GgcmParams{{0.6}}, 0.01, 12);
    EstimateResult results[4];
    {
        std::vector<std::thread> workers;
        for (auto& slot : results)
            workers.emplace_back([&scene, &slot] { slot = estimate(scene.image, EstimatorConfig{}); });
        for (auto& w : workers)
            w.join();
    }
    for (int k = 1; k < 4; ++k)
        for (int i = 0; i < kCurveSamples; ++i)
            EXPECT_EQ(results[k].curve.values[i], results[0].curve.values[i]);
}

TEST(Estimate, StageOneIgnoresLambda) {
    const SyntheticScene scene = gen_scene(default_scene_pairs(), GgcmParams{{0.6}}, 0.005, 8);
    EstimatorConfig one;
    one.stages = 1;
    EstimatorConfig one_big_lambda = one;
    one_big_lambda.lambda = 1e6;
    const EstimateResult a = estimate(scene.image, one);
    const EstimateResult b = estimate(scene.image, one_big_lambda);
    for (int i = 0; i < kCurveSamples; ++i)
        EXPECT_EQ(a.curve.values[i], b.curve.values[i]);
}
