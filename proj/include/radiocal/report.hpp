#pragma once

#include <string>

#include <json.hpp>

#include "radiocal/estimator.hpp"
#include "radiocal/eval.hpp"

namespace radiocal {

using ordered_json = nlohmann::ordered_json;

inline ordered_json curve_to_json(const CrfCurve& c) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < kCurveSamples; ++i)
        arr.push_back(c.values[i]);
    return arr;
}

inline ordered_json config_to_json(const EstimatorConfig& cfg) {
    ordered_json j;
    j["stages"] = cfg.stages;
    j["lambda"] = cfg.lambda;
    j["tau_re"] = cfg.tau_re;
    j["grid_resolution"] = cfg.grid_resolution;
    j["patch_size"] = cfg.thresholds.patch_size;
    j["tau_us"] = cfg.effective_thresholds().tau_us;
    j["tau_os"] = cfg.thresholds.tau_os;
    j["tau_un"] = cfg.thresholds.tau_un;
    j["tau_na"] = cfg.thresholds.tau_na;
    j["stride"] = cfg.effective_stride();
    j["max_patches"] = cfg.max_patches;
    j["night_mode"] = cfg.night_mode;
    j["seed"] = cfg.rng_seed;
    j["normalize"] = cfg.normalize;
    j["use_consistency"] = cfg.use_consistency;
    if (cfg.coeff_override)
        j["coeff_override"] = *cfg.coeff_override;
    return j;
}

/// Diagnostics report: per-stage patch counts and reliabilities, the stage
/// staircases, and the final coefficients.
inline ordered_json diagnostics_to_json(const EstimateResult& res,
                                        const EstimatorConfig& cfg) {
    ordered_json j;
    j["config"] = config_to_json(cfg);
    j["initial_patches"] = res.diagnostics.initial_patches;

    ordered_json stages = ordered_json::array();
    for (std::size_t i = 0; i < res.diagnostics.stages.size(); ++i) {
        const StageDiagnostics& sd = res.diagnostics.stages[i];
        ordered_json js;
        js["stage"] = sd.index;
        js["coefficients"] = sd.coefficients;
        js["patches_in"] = sd.patches_in;
        js["patches_out"] = sd.patches_out;
        js["nonconverged_fits"] = sd.nonconverged_fits;
        ordered_json patches = ordered_json::array();
        for (const PatchRecord& rec : sd.patches) {
            ordered_json jp;
            jp["row"] = rec.row;
            jp["col"] = rec.col;
            if (rec.dropped) {
                jp["dropped"] = true;
            } else {
                jp["sigma"] = rec.sigma_hat;
                jp["alpha"] = rec.alpha_hat;
                jp["pruned"] = rec.pruned;
            }
            patches.push_back(std::move(jp));
        }
        js["patches"] = std::move(patches);
        if (i < res.stages.size())
            js["staircase"] = curve_to_json(res.stages[i].staircase);
        stages.push_back(std::move(js));
    }
    j["stages"] = std::move(stages);

    j["final"] = ordered_json{{"coefficients", res.params.coeffs},
                              {"curve", curve_to_json(res.curve)}};
    j["warnings"] = res.diagnostics.warnings;
    return j;
}

inline ordered_json eval_report_to_json(const EvalReport& rep) {
    ordered_json j;
    j["mean"] = rep.mean;
    j["median"] = rep.median;
    j["std"] = rep.stddev;
    j["min"] = rep.min;
    j["max"] = rep.max;
    j["per_image"] = rep.per_image;
    return j;
}

inline ordered_json ablation_to_json(const AblationReport& rep) {
    ordered_json j;
    j["full"] = eval_report_to_json(rep.full);
    j["one_attempt"] = eval_report_to_json(rep.one_attempt);
    j["no_normalization"] = eval_report_to_json(rep.no_normalization);
    j["no_consistency"] = eval_report_to_json(rep.no_consistency);
    j["failures"] = rep.failures;
    return j;
}

} // namespace radiocal
