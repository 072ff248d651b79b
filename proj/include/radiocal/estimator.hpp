#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radiocal/curve.hpp"
#include "radiocal/errors.hpp"
#include "radiocal/ggcm.hpp"
#include "radiocal/image.hpp"
#include "radiocal/line_fit.hpp"
#include "radiocal/nelder_mead.hpp"
#include "radiocal/patches.hpp"
#include "radiocal/vote.hpp"

namespace radiocal {

struct EstimatorConfig {
    int stages = 2;            ///< T; stage t estimates t coefficients
    double lambda = 0.01;      ///< closeness weight against the previous stage
    double tau_re = 0.3;       ///< reliability pruning threshold
    int grid_resolution = 20;  ///< voting grid resolution
    SelectionThresholds thresholds{};
    int stride = 0;            ///< window stride; 0 means patch_size
    int max_patches = 500;
    bool night_mode = false;   ///< relaxes tau_us to 0.02
    std::uint64_t rng_seed = 0;

    // Ablation hooks. Defaults give the full method.
    std::optional<int> coeff_override; ///< fixed coefficient count per stage
    bool normalize = true;             ///< channel normalization inside the objective
    bool use_consistency = true;       ///< reliability-weighted voting and pruning

    SelectionThresholds effective_thresholds() const {
        SelectionThresholds th = thresholds;
        if (night_mode)
            th.tau_us = 0.02;
        return th;
    }
    int effective_stride() const { return stride > 0 ? stride : thresholds.patch_size; }

    void validate() const {
        const SelectionThresholds th = effective_thresholds();
        if (stages < 1)
            throw std::invalid_argument("config: stages must be >= 1");
        if (lambda < 0.0)
            throw std::invalid_argument("config: lambda must be >= 0");
        if (tau_re < 0.0 || tau_re >= 1.0)
            throw std::invalid_argument("config: tau_re must be in [0, 1)");
        if (grid_resolution < 2)
            throw std::invalid_argument("config: grid resolution must be >= 2");
        if (th.patch_size < 3 || th.patch_size % 2 == 0)
            throw std::invalid_argument("config: patch size must be odd and >= 3");
        if (!(0.0 <= th.tau_us && th.tau_us < th.tau_os && th.tau_os <= 1.0))
            throw std::invalid_argument("config: need 0 <= tau_us < tau_os <= 1");
        if (th.tau_un <= 0.0 || th.tau_na <= 0.0)
            throw std::invalid_argument("config: tau_un and tau_na must be positive");
        if (coeff_override && *coeff_override < 1)
            throw std::invalid_argument("config: coefficient override must be >= 1");
    }
};

/// Spread of a set of curve estimates: mean over the grid of the population
/// variance across curves.
inline double consistency(const std::vector<CrfCurve>& curves) {
    if (curves.empty())
        return 0.0;
    const double n = static_cast<double>(curves.size());
    double acc = 0.0;
    for (int i = 0; i < kCurveSamples; ++i) {
        double mean = 0.0;
        for (const CrfCurve& c : curves)
            mean += c.values[i];
        mean /= n;
        double var = 0.0;
        for (const CrfCurve& c : curves)
            var += (c.values[i] - mean) * (c.values[i] - mean);
        acc += var / n;
    }
    return acc / kCurveSamples;
}

/// Reliability weight of a consistency score; 1 for perfectly consistent.
inline double reliability(double sigma_hat) {
    return std::exp(-sigma_hat / 0.05);
}

struct OptimizeResult {
    GgcmParams params;
    double objective = 0.0;
    bool converged = true;
};

/// Minimize the per-distribution objective: linearisation error plus, when a
/// prior curve is given, lambda times the summed squared distance of the
/// candidate inverse curve to the prior over the grid.
///
/// Returns nothing when the distribution itself is degenerate. Without an
/// explicit initialization the leading coefficient is scanned over 60
/// log-spaced samples of its box and higher coefficients start at zero.
inline std::optional<OptimizeResult>
optimize_distribution(const PixelDistribution& d, int c, const CrfCurve* prior,
                      double lambda, const std::vector<double>* init = nullptr,
                      bool normalize = true) {
    if (!normalize_channels(d))
        return std::nullopt; // degenerate channel, caller skips the distribution

    auto objective = [&](const std::vector<double>& coeffs) {
        GgcmParams p{coeffs};
        const double pen = ggcm_penalty(p);
        const auto lin = linearisation_error(d, p, normalize);
        double obj = (lin ? *lin : 1e3) + pen;
        if (lambda > 0.0 && prior) {
            const auto& grid = curve_grid();
            double sse = 0.0;
            for (int i = 0; i < kCurveSamples; ++i) {
                const double diff = ggcm_inverse_value(grid[i], p) - prior->values[i];
                sse += diff * diff;
            }
            obj += lambda * sse;
        }
        return obj;
    };

    std::vector<double> x0;
    if (init) {
        x0 = *init;
        x0.resize(static_cast<std::size_t>(c), 0.0);
    } else {
        const double ratio = std::pow(kGamma1Max / kGamma1Min, 1.0 / 59.0);
        double best_g1 = kGamma1Min;
        double best_val = objective({best_g1});
        double g1 = kGamma1Min;
        for (int i = 1; i < 60; ++i) {
            g1 *= ratio;
            const double v = objective({g1});
            if (v < best_val) {
                best_val = v;
                best_g1 = g1;
            }
        }
        x0.assign(static_cast<std::size_t>(c), 0.0);
        x0[0] = best_g1;
    }

    std::vector<double> steps(static_cast<std::size_t>(c), 0.1);
    steps[0] = 0.05;
    NelderMeadOptions opt;
    opt.max_iterations = 500;
    opt.x_tolerance = 1e-6;
    auto r = nelder_mead(objective, x0, steps, opt);

    return OptimizeResult{GgcmParams{r.x}, r.fx, r.converged};
}

/// Everything the engine learns about one patch in one stage.
struct PatchEstimate {
    CrfCurve curve;                          ///< voted patch estimate (staircase)
    double sigma_hat = 0.0;                  ///< consistency of the predictions
    double alpha_hat = 1.0;                  ///< reliability, exp(-sigma/0.05)
    std::vector<CrfCurve> distribution_curves; ///< surviving per-distribution fits
    bool any_nonconverged = false;
};

/// Estimate one patch: optimize every non-degenerate scanned distribution,
/// vote their smooth curves with unit weights, and score consistency.
/// Returns nothing when fewer than 3 distributions survive; such a patch
/// carries no meaningful consistency and is dropped from the candidate set.
inline std::optional<PatchEstimate>
estimate_patch(const Patch& patch, int c, const CrfCurve* prior, double lambda,
               int grid_resolution, const std::vector<double>* init = nullptr,
               bool normalize = true) {
    PatchEstimate est;
    for (const PixelDistribution& d : extract_distributions(patch)) {
        auto r = optimize_distribution(d, c, prior, lambda, init, normalize);
        if (!r)
            continue;
        est.any_nonconverged |= !r->converged;
        est.distribution_curves.push_back(ggcm_inverse_curve(r->params));
    }
    if (est.distribution_curves.size() < 3)
        return std::nullopt;

    const std::vector<double> unit(est.distribution_curves.size(), 1.0);
    est.curve = vote_mode(est.distribution_curves, unit, grid_resolution);
    est.sigma_hat = consistency(est.distribution_curves);
    est.alpha_hat = reliability(est.sigma_hat);
    return est;
}

struct StageEstimate {
    int index = 0;              ///< stage number t, 1-based
    int coefficients = 0;       ///< model order used in this stage
    CrfCurve staircase;         ///< voted stage estimate
    int surviving_patches = 0;  ///< patches remaining after pruning
};

struct PatchRecord {
    int row = 0;
    int col = 0;
    double sigma_hat = 0.0;
    double alpha_hat = 0.0;
    bool pruned = false;
    bool dropped = false; ///< too few usable distributions
};

struct StageDiagnostics {
    int index = 0;
    int coefficients = 0;
    int patches_in = 0;
    int patches_out = 0;
    int nonconverged_fits = 0; ///< patches with at least one capped optimization
    std::vector<PatchRecord> patches;
};

struct Diagnostics {
    int initial_patches = 0;
    std::vector<StageDiagnostics> stages;
    std::vector<std::string> warnings;
};

struct EstimateResult {
    GgcmParams params;
    CrfCurve curve; ///< smooth final estimate
    std::vector<StageEstimate> stages;
    Diagnostics diagnostics;
};

/// Full estimation loop: collect candidate patches, then refine in stages of
/// increasing model order. Stage 1 runs unconstrained (lambda forced to 0);
/// later stages are tethered to the previous stage's curve and initialized
/// from its one-coefficient fit. After each stage's vote, patches whose
/// reliability falls below tau_re are pruned. The last staircase is smoothed
/// by fit_final_model.
inline EstimateResult estimate(const Image& img, const EstimatorConfig& cfg) {
    cfg.validate();
    const SelectionThresholds th = cfg.effective_thresholds();
    std::vector<Patch> omega =
        collect_patches(img, th, cfg.effective_stride(), cfg.max_patches);
    if (omega.empty())
        throw EmptyPatchSetError("no image window passed the patch selection criteria");

    EstimateResult result;
    result.diagnostics.initial_patches = static_cast<int>(omega.size());

    CrfCurve prior;
    bool have_prior = false;
    int last_stage_coeffs = 1;

    for (int t = 1; t <= cfg.stages; ++t) {
        const int c = cfg.coeff_override.value_or(t);
        const double lambda = (t == 1) ? 0.0 : cfg.lambda;

        std::vector<double> init;
        if (have_prior) {
            auto fit1 = fit_final_model(prior, 1);
            init = fit1.params.coeffs;
        }

        StageDiagnostics sd;
        sd.index = t;
        sd.coefficients = c;
        sd.patches_in = static_cast<int>(omega.size());

        std::vector<Patch> survivors;
        std::vector<CrfCurve> curves;
        std::vector<double> vote_weights;
        std::vector<double> alphas;
        for (const Patch& p : omega) {
            auto est = estimate_patch(p, c, have_prior ? &prior : nullptr, lambda,
                                      cfg.grid_resolution,
                                      have_prior ? &init : nullptr, cfg.normalize);
            PatchRecord rec;
            rec.row = p.row;
            rec.col = p.col;
            if (!est) {
                rec.dropped = true;
                sd.patches.push_back(rec);
                continue;
            }
            rec.sigma_hat = est->sigma_hat;
            rec.alpha_hat = est->alpha_hat;
            sd.nonconverged_fits += est->any_nonconverged ? 1 : 0;
            sd.patches.push_back(rec);
            survivors.push_back(p);
            curves.push_back(est->curve);
            alphas.push_back(est->alpha_hat);
            vote_weights.push_back(cfg.use_consistency ? est->alpha_hat : 1.0);
        }

        if (curves.empty()) {
            if (!have_prior)
                throw EmptyPatchSetError("every candidate patch was dropped");
            result.diagnostics.warnings.push_back(
                "stage " + std::to_string(t) +
                ": all patches dropped; keeping previous stage estimate");
            result.diagnostics.stages.push_back(std::move(sd));
            break;
        }

        prior = vote_mode(curves, vote_weights, cfg.grid_resolution);
        have_prior = true;
        last_stage_coeffs = c;

        // vote first, prune afterwards
        omega.clear();
        const double prune_at = cfg.use_consistency ? cfg.tau_re : 0.0;
        for (std::size_t i = 0; i < survivors.size(); ++i) {
            if (alphas[i] >= prune_at)
                omega.push_back(std::move(survivors[i]));
            else
                for (PatchRecord& rec : sd.patches)
                    if (rec.row == survivors[i].row && rec.col == survivors[i].col)
                        rec.pruned = true;
        }
        sd.patches_out = static_cast<int>(omega.size());

        StageEstimate se;
        se.index = t;
        se.coefficients = c;
        se.staircase = prior;
        se.surviving_patches = static_cast<int>(omega.size());
        result.stages.push_back(se);
        result.diagnostics.stages.push_back(std::move(sd));

        if (omega.empty() && t < cfg.stages) {
            result.diagnostics.warnings.push_back(
                "all patches pruned after stage " + std::to_string(t) +
                "; falling back to this stage's estimate");
            break;
        }
    }

    const int final_c = cfg.coeff_override.value_or(
        static_cast<int>(result.stages.size()) == cfg.stages ? cfg.stages
                                                             : last_stage_coeffs);
    auto fit = fit_final_model(prior, final_c);
    if (!fit.converged)
        result.diagnostics.warnings.push_back("final model fit hit the iteration cap");
    result.params = fit.params;
    result.curve = ggcm_inverse_curve(fit.params);
    return result;
}

} // namespace radiocal
