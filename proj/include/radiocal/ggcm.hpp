#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "radiocal/curve.hpp"
#include "radiocal/nelder_mead.hpp"
#include "radiocal/patches.hpp"

namespace radiocal {

/// Coefficient box and positivity floor for the exponent polynomial.
inline constexpr double kGamma1Min = 0.05;
inline constexpr double kGamma1Max = 5.0;
inline constexpr double kCoeffBound = 5.0;
inline constexpr double kExponentFloor = 1e-3;

/// Coefficients of the generalized gamma curve model. The exponent
/// polynomial P(v) = c0 + c1*v + ... + c_{n-1}*v^{n-1} drives both the
/// forward response and the sampled inverse curve.
struct GgcmParams {
    std::vector<double> coeffs;

    GgcmParams() = default;
    explicit GgcmParams(std::vector<double> c) : coeffs(std::move(c)) {}

    int order() const { return static_cast<int>(coeffs.size()); }

    double exponent(double v) const {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;)
            acc = acc * v + coeffs[i];
        return acc;
    }

    double exponent_derivative(double v) const {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 1;)
            acc = acc * v + coeffs[i] * static_cast<double>(i);
        return acc;
    }
};

/// Inverse response at a single sample: x -> x^(1/P(x)).
inline double ggcm_inverse_value(double x, const GgcmParams& p) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double e = std::max(p.exponent(x), 1e-12);
    return std::pow(x, 1.0 / e);
}

namespace detail {

// Violation measure of the validity constraints: zero iff the parameters
// are inside the coefficient box, the exponent polynomial stays above the
// positivity floor over [0,1], and the inverse curve is non-decreasing.
// Monotonicity is the sign of P(v) - v*ln(v)*P'(v); for one- and
// two-coefficient models it follows from the positivity floor, so it is
// checked (together with the sampled curve) only for higher orders.
inline double ggcm_constraint_violation(const GgcmParams& p) {
    double viol = 0.0;
    if (p.coeffs.empty())
        return 1.0;
    const double g1 = p.coeffs[0];
    viol += std::max(0.0, kGamma1Min - g1) + std::max(0.0, g1 - kGamma1Max);
    for (std::size_t i = 1; i < p.coeffs.size(); ++i)
        viol += std::max(0.0, std::abs(p.coeffs[i]) - kCoeffBound);

    double min_poly = p.exponent(0.0);
    for (int i = 0; i <= 100; ++i)
        min_poly = std::min(min_poly, p.exponent(i / 100.0));
    viol += std::max(0.0, kExponentFloor - min_poly);

    if (p.order() > 2 && viol == 0.0) {
        double min_mono = 0.0;
        for (int i = 1; i < 500; ++i) {
            const double v = i / 500.0;
            const double n = p.exponent(v) - v * std::log(v) * p.exponent_derivative(v);
            min_mono = std::min(min_mono, n);
        }
        viol += std::max(0.0, -min_mono);
        double prev = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double cur = ggcm_inverse_value(i / 100.0, p);
            viol += std::max(0.0, prev - cur);
            prev = cur;
        }
    }
    return viol;
}

} // namespace detail

inline bool ggcm_is_valid(const GgcmParams& p) {
    return detail::ggcm_constraint_violation(p) == 0.0;
}

/// Penalty wall used by every optimization over GgcmParams.
inline double ggcm_penalty(const GgcmParams& p) {
    const double v = detail::ggcm_constraint_violation(p);
    return v > 0.0 ? 10.0 + 1e4 * v * v : 0.0;
}

/// Inverse response sampled on the shared grid; endpoints are exactly 0 and 1.
inline CrfCurve ggcm_inverse_curve(const GgcmParams& p) {
    CrfCurve c;
    c.kind = CurveKind::Smooth;
    const auto& grid = curve_grid();
    for (int i = 0; i < kCurveSamples; ++i)
        c.values[i] = ggcm_inverse_value(grid[i], p);
    c.values[0] = 0.0;
    c.values[kCurveSamples - 1] = 1.0;
    return c;
}

/// Forward response, the exact functional inverse of ggcm_inverse_value.
/// Closed form e^P(e) for the one-coefficient model; bisection on the
/// monotone inverse otherwise.
inline double ggcm_forward(double e, const GgcmParams& p) {
    if (e <= 0.0) return 0.0;
    if (e >= 1.0) return 1.0;
    if (p.order() == 1)
        return std::pow(e, p.coeffs[0]);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ggcm_inverse_value(mid, p) < e)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Map a distribution into the (estimated) irradiance domain, channel-wise.
inline PixelDistribution apply_inverse(const PixelDistribution& d, const GgcmParams& p) {
    PixelDistribution out;
    out.index = d.index;
    out.points.reserve(d.points.size());
    for (const Rgb& pt : d.points)
        out.points.push_back({ggcm_inverse_value(pt[0], p), ggcm_inverse_value(pt[1], p),
                              ggcm_inverse_value(pt[2], p)});
    return out;
}

struct ModelFitResult {
    GgcmParams params;
    double objective = 0.0;
    bool converged = true;
};

/// Least-squares fit of the c-coefficient model to a sampled curve:
/// minimizes the sum over the grid of squared differences. Initialization is
/// a 0.02-step scan of the leading coefficient with higher coefficients zero,
/// then simplex refinement.
inline ModelFitResult fit_final_model(const CrfCurve& target, int c) {
    auto objective = [&](const std::vector<double>& coeffs) {
        GgcmParams p{coeffs};
        const double pen = ggcm_penalty(p);
        double sse = 0.0;
        const auto& grid = curve_grid();
        for (int i = 0; i < kCurveSamples; ++i) {
            const double d = ggcm_inverse_value(grid[i], p) - target.values[i];
            sse += d * d;
        }
        return sse + pen;
    };

    double best_g1 = kGamma1Min;
    double best_val = objective({best_g1});
    for (double g1 = kGamma1Min + 0.02; g1 <= kGamma1Max + 1e-12; g1 += 0.02) {
        const double v = objective({g1});
        if (v < best_val) {
            best_val = v;
            best_g1 = g1;
        }
    }

    std::vector<double> x0(static_cast<std::size_t>(c), 0.0);
    x0[0] = best_g1;
    std::vector<double> steps(static_cast<std::size_t>(c), 0.1);
    steps[0] = 0.05;

    NelderMeadOptions opt;
    opt.max_iterations = 500;
    opt.x_tolerance = 1e-6;
    auto r = nelder_mead(objective, x0, steps, opt);

    ModelFitResult out;
    out.params = GgcmParams{r.x};
    out.objective = r.fx;
    out.converged = r.converged;
    return out;
}

} // namespace radiocal
