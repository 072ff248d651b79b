#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace radiocal {

struct NelderMeadOptions {
    int max_iterations = 500;
    double x_tolerance = 1e-6;  // simplex diameter, per coordinate
    double f_tolerance = 1e-15; // spread of vertex values
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Downhill simplex minimization (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). Constraints are the caller's business: wrap them into the
/// objective as penalties. Deterministic for fixed inputs.
template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0,
                             const std::vector<double>& steps,
                             const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> verts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        verts[i + 1][i] += steps[i];

    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        fv[i] = f(verts[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_order = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    NelderMeadResult res;
    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        sort_order();
        const auto& best = verts[order[0]];
        const auto& worst = verts[order[n]];

        double diam = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                diam = std::max(diam, std::abs(verts[order[i]][d] - best[d]));
        if (diam < opt.x_tolerance || fv[order[n]] - fv[order[0]] < opt.f_tolerance) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                centroid[d] += verts[order[i]][d] / static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + t * (worst[d] - centroid[d]);
            return p;
        };

        auto reflected = blend(-1.0);
        double fr = f(reflected);
        if (fr < fv[order[0]]) {
            auto expanded = blend(-2.0);
            double fe = f(expanded);
            if (fe < fr) {
                verts[order[n]] = std::move(expanded);
                fv[order[n]] = fe;
            } else {
                verts[order[n]] = std::move(reflected);
                fv[order[n]] = fr;
            }
        } else if (fr < fv[order[n - 1]]) {
            verts[order[n]] = std::move(reflected);
            fv[order[n]] = fr;
        } else {
            auto contracted = blend(fr < fv[order[n]] ? -0.5 : 0.5);
            double fc = f(contracted);
            if (fc < std::min(fr, fv[order[n]])) {
                verts[order[n]] = std::move(contracted);
                fv[order[n]] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 1; i <= n; ++i) {
                    auto& v = verts[order[i]];
                    for (std::size_t d = 0; d < n; ++d)
                        v[d] = best[d] + 0.5 * (v[d] - best[d]);
                    fv[order[i]] = f(v);
                }
            }
        }
    }

    sort_order();
    res.x = verts[order[0]];
    res.fx = fv[order[0]];
    res.iterations = iter;
    return res;
}

} // namespace radiocal
