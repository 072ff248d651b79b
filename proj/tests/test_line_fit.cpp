#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "radiocal/line_fit.hpp"
#include "radiocal/synth.hpp"

using namespace radiocal;

namespace {

constexpr double kPi = 3.14159265358979323846;

PixelDistribution make_dist(std::vector<Rgb> pts) {
    PixelDistribution d;
    d.points = std::move(pts);
    return d;
}

Rgb rotate(const Rgb& v, const Rgb& axis, double angle) {
    // Rodrigues rotation about a unit axis
    const double c = std::cos(angle), s = std::sin(angle);
    const double dot = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2];
    Rgb cross{axis[1] * v[2] - axis[2] * v[1], axis[2] * v[0] - axis[0] * v[2],
              axis[0] * v[1] - axis[1] * v[0]};
    Rgb out;
    for (int i = 0; i < 3; ++i)
        out[i] = v[i] * c + cross[i] * s + axis[i] * dot * (1 - c);
    return out;
}

// Exhaustive direction search on a 1-degree sphere grid; the optimal line
// for a fixed direction passes through the centroid.
double brute_force_line_error(const PixelDistribution& d) {
    const auto n = static_cast<double>(d.points.size());
    Rgb mean{0, 0, 0};
    for (const Rgb& p : d.points)
        for (int i = 0; i < 3; ++i)
            mean[i] += p[i] / n;
    double best = 1e300;
    for (int ti = 0; ti <= 180; ++ti) {
        for (int pi = 0; pi < 360; ++pi) {
            const double th = ti * kPi / 180.0, ph = pi * kPi / 180.0;
            const Rgb u{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                        std::cos(th)};
            double err = 0.0;
            for (const Rgb& p : d.points) {
                const Rgb c{p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]};
                const double along = c[0] * u[0] + c[1] * u[1] + c[2] * u[2];
                err += c[0] * c[0] + c[1] * c[1] + c[2] * c[2] - along * along;
            }
            best = std::min(best, err / n);
        }
    }
    return best;
}

} // namespace

TEST(Normalize, RescalesEachChannelToUnitSpan) {
    const auto d = make_dist({{0.2, 0.1, 0.4}, {0.4, 0.3, 0.6}, {0.6, 0.5, 0.8}});
    const auto norm = normalize_channels(d);
    ASSERT_TRUE(norm.has_value());
    EXPECT_DOUBLE_EQ(norm->points[0][0], 0.0);
    EXPECT_DOUBLE_EQ(norm->points[1][0], 0.5);
    EXPECT_DOUBLE_EQ(norm->points[2][0], 1.0);
    for (int ch = 1; ch < 3; ++ch) {
        EXPECT_DOUBLE_EQ(norm->points[0][ch], 0.0);
        EXPECT_DOUBLE_EQ(norm->points[2][ch], 1.0);
    }
}

TEST(Normalize, FullSpanChannelUnchanged) {
    const auto d = make_dist({{0.0, 0.0, 0.0}, {0.25, 0.5, 0.75}, {1.0, 1.0, 1.0}});
    const auto norm = normalize_channels(d);
    ASSERT_TRUE(norm.has_value());
    for (std::size_t i = 0; i < d.points.size(); ++i)
        for (int ch = 0; ch < 3; ++ch)
            EXPECT_DOUBLE_EQ(norm->points[i][ch], d.points[i][ch]);
}

TEST(Normalize, ConstantChannelDegenerate) {
    const auto d = make_dist({{0.2, 0.5, 0.4}, {0.4, 0.5, 0.6}, {0.6, 0.5, 0.8}});
    EXPECT_FALSE(normalize_channels(d).has_value());
}

TEST(LineFit, CollinearPointsHaveZeroError) {
    std::vector<Rgb> pts;
    for (int i = 0; i <= 20; ++i) {
        const double t = i / 20.0;
        pts.push_back({0.1 + 0.5 * t, 0.9 - 0.6 * t, 0.3 + 0.2 * t});
    }
    EXPECT_LE(line_fit_error(make_dist(pts)), 1e-12);
}

TEST(LineFit, CircleResidualIsHalfRadiusSquared) {
    // points on a circle of radius r in a tilted plane, plus offset
    const double r = 0.37;
    const Rgb axis{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    std::vector<Rgb> pts;
    for (int i = 0; i < 21; ++i) {
        const double a = 2.0 * kPi * i / 21;
        Rgb p{r * std::cos(a), r * std::sin(a), 0.0};
        p = rotate(p, axis, 0.7);
        for (int ch = 0; ch < 3; ++ch)
            p[ch] += 0.5;
        pts.push_back(p);
    }
    const auto d = make_dist(pts);
    EXPECT_NEAR(line_fit_error(d), r * r / 2.0, 1e-12);
    EXPECT_NEAR(brute_force_line_error(d), r * r / 2.0, r * r * 3e-4);
}

TEST(LineFit, MatchesBruteForceOnRandomClouds) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Rgb> pts;
        for (int i = 0; i < 21; ++i)
            pts.push_back({unit(rng), unit(rng), unit(rng)});
        const auto d = make_dist(pts);
        const double exact = line_fit_error(d);
        const double brute = brute_force_line_error(d);
        EXPECT_LE(exact, brute + 1e-12);
        EXPECT_LE(brute - exact, 3e-4 * (exact + 1.0));
    }
}

TEST(LineFit, RotationInvariant) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Rgb> pts;
    for (int i = 0; i < 21; ++i)
        pts.push_back({unit(rng), unit(rng), unit(rng)});
    const double base = line_fit_error(make_dist(pts));
    for (int trial = 0; trial < 10; ++trial) {
        Rgb axis{unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5};
        const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
        for (int ch = 0; ch < 3; ++ch)
            axis[ch] /= n;
        const double angle = 2.0 * kPi * unit(rng);
        std::vector<Rgb> rot;
        for (const Rgb& p : pts)
            rot.push_back(rotate(p, axis, angle));
        EXPECT_NEAR(line_fit_error(make_dist(rot)), base, 1e-9);
    }
}

TEST(LineFit, NormalizationQuotientsOutAffineScale) {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.2, 3.0);
    std::uniform_real_distribution<double> shift(-0.5, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Rgb> pts;
        for (int i = 0; i < 21; ++i)
            pts.push_back({unit(rng), unit(rng), unit(rng)});
        const auto d = make_dist(pts);
        Rgb a{scale(rng), scale(rng), scale(rng)};
        Rgb b{shift(rng), shift(rng), shift(rng)};
        std::vector<Rgb> mapped;
        for (const Rgb& p : pts)
            mapped.push_back({a[0] * p[0] + b[0], a[1] * p[1] + b[1], a[2] * p[2] + b[2]});
        const auto n1 = normalize_channels(d);
        const auto n2 = normalize_channels(make_dist(mapped));
        ASSERT_TRUE(n1 && n2);
        EXPECT_NEAR(line_fit_error(*n1), line_fit_error(*n2), 1e-9);
    }
}

TEST(LinearisationError, ExactInverseLinearizes) {
    const Patch patch = gen_gradient_patch({0.2, 0.7, 0.1}, {0.8, 0.1, 0.9}, 21);
    PixelDistribution d = extract_distributions(patch)[0];
    // push through a gamma response, then undo it
    for (Rgb& p : d.points)
        for (int ch = 0; ch < 3; ++ch)
            p[ch] = std::pow(p[ch], 0.4);
    const auto at_truth = linearisation_error(d, GgcmParams{{0.4}});
    ASSERT_TRUE(at_truth.has_value());
    EXPECT_LE(*at_truth, 1e-10);

    // an already linear distribution needs no correction
    const PixelDistribution lin = extract_distributions(patch)[0];
    const auto at_identity = linearisation_error(lin, GgcmParams{{1.0}});
    ASSERT_TRUE(at_identity.has_value());
    EXPECT_LE(*at_identity, 1e-10);
}

TEST(LinearisationError, UniqueMinimumOnProfileGrid) {
    const Patch patch = gen_gradient_patch({0.03, 0.97, 0.03}, {0.95, 0.04, 0.96}, 21);
    PixelDistribution d = extract_distributions(patch)[0];
    for (Rgb& p : d.points)
        for (int ch = 0; ch < 3; ++ch)
            p[ch] = std::pow(p[ch], 0.4);
    int argmin = -1;
    double best = 1e300;
    for (int k = 1; k <= 50; ++k) {
        const auto err = linearisation_error(d, GgcmParams{{k * 0.02}});
        if (err && *err < best) {
            best = *err;
            argmin = k;
        }
    }
    EXPECT_EQ(argmin, 20); // 0.40 on the 0.02-step grid
}

TEST(LinearisationError, DegeneratePropagates) {
    PixelDistribution d;
    for (int i = 0; i <= 20; ++i)
        d.points.push_back({i / 20.0, 0.5, 0.2 + i / 40.0}); // constant green
    EXPECT_FALSE(linearisation_error(d, GgcmParams{{1.0}}).has_value());
}
