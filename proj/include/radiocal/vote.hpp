#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "radiocal/curve.hpp"

namespace radiocal {

/// Accumulator over the discretised response plane: columns bin the
/// intensity axis, rows bin the response value axis.
struct VoteGrid {
    int resolution = 20;
    std::vector<double> weight;    ///< resolution*resolution, row-major
    std::vector<double> value_sum; ///< weighted sum of deposited values

    explicit VoteGrid(int delta)
        : resolution(delta),
          weight(static_cast<std::size_t>(delta) * delta, 0.0),
          value_sum(static_cast<std::size_t>(delta) * delta, 0.0) {
        if (delta < 2)
            throw std::invalid_argument("VoteGrid: resolution must be >= 2");
    }

    int bin(double v) const {
        if (v <= 0.0) return 0;
        const int b = static_cast<int>(v * resolution);
        return b >= resolution ? resolution - 1 : b;
    }

    double& weight_at(int row, int col) {
        return weight[static_cast<std::size_t>(row) * resolution + col];
    }
    double weight_at(int row, int col) const {
        return weight[static_cast<std::size_t>(row) * resolution + col];
    }

    /// Deposit one curve: every grid sample adds `w` to its containing cell.
    void deposit(const CrfCurve& curve, double w) {
        const auto& grid = curve_grid();
        for (int i = 0; i < kCurveSamples; ++i) {
            const double v = std::min(1.0, std::max(0.0, curve.values[i]));
            const std::size_t cell =
                static_cast<std::size_t>(bin(v)) * resolution + bin(grid[i]);
            weight[cell] += w;
            value_sum[cell] += w * v;
        }
    }
};

/// Per-column argmax rows. Ties pick the row whose cell midpoint is closest
/// to the previous column's selected midpoint; in the first column, the
/// lowest row.
inline std::vector<int> select_rows(const VoteGrid& g) {
    const int delta = g.resolution;
    std::vector<int> rows(static_cast<std::size_t>(delta));
    double prev_mid = 0.0;
    for (int col = 0; col < delta; ++col) {
        int best_row = -1;
        double best_w = -1.0;
        for (int row = 0; row < delta; ++row) {
            const double w = g.weight_at(row, col);
            if (w > best_w) {
                best_w = w;
                best_row = row;
            } else if (w == best_w && col > 0) {
                const double mid = (row + 0.5) / delta;
                const double best_mid = (best_row + 0.5) / delta;
                if (std::abs(mid - prev_mid) < std::abs(best_mid - prev_mid))
                    best_row = row;
            }
        }
        rows[col] = best_row;
        prev_mid = (best_row + 0.5) / delta;
    }
    return rows;
}

/// Mode voting over curves. Per column the max-weight row wins; the
/// staircase value carried for that column is the weighted centroid of the
/// samples deposited in the winning row and its two vertical neighbours,
/// which keeps sub-cell precision while still discarding outlier curves.
inline CrfCurve vote_mode(const std::vector<CrfCurve>& curves,
                          const std::vector<double>& weights, int delta) {
    if (curves.empty() || curves.size() != weights.size())
        throw std::invalid_argument("vote_mode: need matching non-empty curves/weights");

    VoteGrid grid(delta);
    for (std::size_t i = 0; i < curves.size(); ++i)
        grid.deposit(curves[i], weights[i]);
    const std::vector<int> rows = select_rows(grid);

    std::vector<double> num(static_cast<std::size_t>(delta), 0.0);
    std::vector<double> den(static_cast<std::size_t>(delta), 0.0);
    const auto& gx = curve_grid();
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const double w = weights[ci];
        for (int i = 0; i < kCurveSamples; ++i) {
            const double v = std::min(1.0, std::max(0.0, curves[ci].values[i]));
            const int col = grid.bin(gx[i]);
            if (std::abs(grid.bin(v) - rows[col]) <= 1) {
                num[col] += w * v;
                den[col] += w;
            }
        }
    }

    CrfCurve out;
    out.kind = CurveKind::Staircase;
    for (int i = 0; i < kCurveSamples; ++i) {
        const int col = grid.bin(gx[i]);
        out.values[i] = den[col] > 0.0 ? num[col] / den[col] : (rows[col] + 0.5) / delta;
    }
    return out;
}

} // namespace radiocal
