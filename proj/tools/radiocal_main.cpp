// Command-line surface for the inverse response estimator.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "radiocal/radiocal.hpp"

namespace fs = std::filesystem;
using namespace radiocal;

namespace {

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_config_file(EstimatorConfig& cfg, const std::string& path) {
    for (const auto& [key, value] : parse_config_file(path)) {
        try {
            if (key == "stages") cfg.stages = std::stoi(value);
            else if (key == "lambda") cfg.lambda = std::stod(value);
            else if (key == "tau_re") cfg.tau_re = std::stod(value);
            else if (key == "grid") cfg.grid_resolution = std::stoi(value);
            else if (key == "patch_size") cfg.thresholds.patch_size = std::stoi(value);
            else if (key == "tau_us") cfg.thresholds.tau_us = std::stod(value);
            else if (key == "tau_os") cfg.thresholds.tau_os = std::stod(value);
            else if (key == "tau_un") cfg.thresholds.tau_un = std::stod(value);
            else if (key == "tau_na") cfg.thresholds.tau_na = std::stod(value);
            else if (key == "stride") cfg.stride = std::stoi(value);
            else if (key == "max_patches") cfg.max_patches = std::stoi(value);
            else if (key == "night_mode") cfg.night_mode = (value == "true" || value == "1");
            else if (key == "seed") cfg.rng_seed = std::stoull(value);
            else throw FormatError(path + ": unknown config key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw FormatError(path + ": bad value for '" + key + "'");
        }
    }
}

// Wires the shared estimator flags into a subcommand. File config is applied
// before flags so explicit flags win.
struct EstimatorFlags {
    std::string config_file;

    void attach(CLI::App* cmd, EstimatorConfig& cfg) {
        cmd->add_option("--config", config_file, "config file (key = value lines)");
        cmd->add_option("--stages", cfg.stages, "refinement stages T");
        cmd->add_option("--lambda", cfg.lambda, "closeness weight to the previous stage");
        cmd->add_option("--tau-re", cfg.tau_re, "reliability pruning threshold");
        cmd->add_option("--grid", cfg.grid_resolution, "voting grid resolution");
        cmd->add_option("--patch-size", cfg.thresholds.patch_size, "patch side length s");
        cmd->add_option("--tau-us", cfg.thresholds.tau_us, "under-saturation threshold");
        cmd->add_option("--tau-os", cfg.thresholds.tau_os, "over-saturation threshold");
        cmd->add_option("--tau-un", cfg.thresholds.tau_un, "uniformity variance threshold");
        cmd->add_option("--tau-na", cfg.thresholds.tau_na, "narrowness variance threshold");
        cmd->add_option("--stride", cfg.stride, "window stride (default: patch size)");
        cmd->add_option("--max-patches", cfg.max_patches, "candidate patch cap");
        cmd->add_flag("--night", cfg.night_mode, "night mode (relaxes tau_us to 0.02)");
        cmd->add_option("--seed", cfg.rng_seed, "random seed recorded in reports");
    }

    // Re-applies precedence: defaults -> config file -> explicit flags.
    void finalize(CLI::App* cmd, EstimatorConfig& cfg) const {
        if (config_file.empty())
            return;
        EstimatorConfig from_file; // defaults
        apply_config_file(from_file, config_file);
        auto keep = [&](const char* flag) { return cmd->count(flag) > 0; };
        EstimatorConfig merged = from_file;
        if (keep("--stages")) merged.stages = cfg.stages;
        if (keep("--lambda")) merged.lambda = cfg.lambda;
        if (keep("--tau-re")) merged.tau_re = cfg.tau_re;
        if (keep("--grid")) merged.grid_resolution = cfg.grid_resolution;
        if (keep("--patch-size")) merged.thresholds.patch_size = cfg.thresholds.patch_size;
        if (keep("--tau-us")) merged.thresholds.tau_us = cfg.thresholds.tau_us;
        if (keep("--tau-os")) merged.thresholds.tau_os = cfg.thresholds.tau_os;
        if (keep("--tau-un")) merged.thresholds.tau_un = cfg.thresholds.tau_un;
        if (keep("--tau-na")) merged.thresholds.tau_na = cfg.thresholds.tau_na;
        if (keep("--stride")) merged.stride = cfg.stride;
        if (keep("--max-patches")) merged.max_patches = cfg.max_patches;
        if (keep("--night")) merged.night_mode = cfg.night_mode;
        if (keep("--seed")) merged.rng_seed = cfg.rng_seed;
        cfg = merged;
    }
};

GgcmParams parse_coeffs(const std::string& list) {
    GgcmParams p;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const std::string tok =
            list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            p.coeffs.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument("junk");
        } catch (const std::exception&) {
            throw FormatError("bad coefficient list: '" + list + "'");
        }
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    return p;
}

int run_estimate(const std::string& image_path, const std::string& out_path,
                 const std::string& report_path, const EstimatorConfig& cfg) {
    const Image img = load_image(image_path);
    if (img.width < cfg.thresholds.patch_size || img.height < cfg.thresholds.patch_size)
        throw FormatError(image_path + ": image smaller than the patch size");
    const EstimateResult res = estimate(img, cfg);
    write_curve(res.curve, out_path);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out)
            throw IoError("cannot open " + report_path + " for writing");
        out << diagnostics_to_json(res, cfg).dump(2) << '\n';
    }
    std::printf("patches: %d", res.diagnostics.initial_patches);
    for (const auto& st : res.stages)
        std::printf("  stage %d: %d kept", st.index, st.surviving_patches);
    std::printf("\ncoefficients:");
    for (double c : res.params.coeffs)
        std::printf(" %.6g", c);
    std::printf("\nwrote %s\n", out_path.c_str());
    for (const auto& w : res.diagnostics.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    return 0;
}

int run_ablate_dir(const std::string& dir, const std::string& out_path,
                   const EstimatorConfig& cfg) {
    std::vector<AblationScene> scenes;
    std::vector<fs::path> pngs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".png")
            pngs.push_back(entry.path());
    std::sort(pngs.begin(), pngs.end());
    for (const auto& png : pngs) {
        fs::path truth = png;
        truth.replace_extension(".csv");
        if (!fs::exists(truth))
            continue;
        AblationScene scene;
        scene.image = load_image(png.string());
        scene.truth = read_curve(truth.string());
        scene.name = png.stem().string();
        scenes.push_back(std::move(scene));
    }
    if (scenes.empty())
        throw FormatError(dir + ": no <name>.png / <name>.csv scene pairs found");

    const AblationReport rep = run_ablation(scenes, cfg);
    const ordered_json j = ablation_to_json(rep);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out)
            throw IoError("cannot open " + out_path + " for writing");
        out << j.dump(2) << '\n';
        std::printf("wrote %s\n", out_path.c_str());
    } else {
        std::printf("%s\n", j.dump(2).c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-image inverse camera response estimation"};
    app.require_subcommand(1);

    // estimate
    std::string est_image, est_out, est_report;
    EstimatorConfig est_cfg;
    EstimatorFlags est_flags;
    auto* est = app.add_subcommand("estimate", "estimate the inverse response of an image");
    est->add_option("image", est_image, "input PNG or JPEG")->required();
    est->add_option("--out", est_out, "output curve CSV")->required();
    est->add_option("--report", est_report, "diagnostics JSON path");
    est_flags.attach(est, est_cfg);

    // linearize
    std::string lin_image, lin_crf, lin_out;
    int lin_bits = 8;
    auto* lin = app.add_subcommand("linearize", "apply an inverse response curve to an image");
    lin->add_option("image", lin_image, "input PNG or JPEG")->required();
    lin->add_option("--crf", lin_crf, "curve CSV to apply")->required();
    lin->add_option("--out", lin_out, "output PNG")->required();
    lin->add_option("--bits", lin_bits, "output bit depth (8 or 16)");

    // synth
    double syn_gamma = 0.4, syn_noise = 0.0;
    std::string syn_coeffs, syn_out, syn_truth;
    std::uint64_t syn_seed = 0;
    int syn_size = 21;
    bool syn_weak = false;
    auto* syn = app.add_subcommand("synth", "generate a synthetic scene with known response");
    syn->add_option("--gamma", syn_gamma, "response exponent (one-coefficient model)");
    syn->add_option("--coeffs", syn_coeffs, "comma-separated model coefficients");
    syn->add_option("--noise", syn_noise, "Gaussian noise sigma");
    syn->add_option("--seed", syn_seed, "noise seed");
    syn->add_option("--size", syn_size, "patch side length");
    syn->add_flag("--weak", syn_weak, "also tile near-achromatic patches");
    syn->add_option("--out", syn_out, "output scene PNG (16-bit)")->required();
    syn->add_option("--truth", syn_truth, "output ground-truth curve CSV")->required();

    // eval
    std::string ev_pred, ev_truth;
    auto* ev = app.add_subcommand("eval", "RMSE between a predicted and a true curve");
    ev->add_option("--pred", ev_pred, "predicted curve CSV")->required();
    ev->add_option("--truth", ev_truth, "ground-truth curve CSV")->required();

    // ablate
    std::string ab_dir, ab_out;
    EstimatorConfig ab_cfg;
    EstimatorFlags ab_flags;
    auto* ab = app.add_subcommand("ablate", "run the method variants over a scene directory");
    ab->add_option("--scenes", ab_dir, "directory of <name>.png + <name>.csv pairs")->required();
    ab->add_option("--out", ab_out, "report JSON path (stdout when omitted)");
    ab_flags.attach(ab, ab_cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (est->parsed()) {
            est_flags.finalize(est, est_cfg);
            return run_estimate(est_image, est_out, est_report, est_cfg);
        }
        if (lin->parsed()) {
            const Image img = load_image(lin_image);
            const CrfCurve curve = read_curve(lin_crf);
            save_png(linearize(img, curve), lin_out, lin_bits);
            std::printf("wrote %s\n", lin_out.c_str());
            return 0;
        }
        if (syn->parsed()) {
            GgcmParams truth = syn_coeffs.empty() ? GgcmParams{{syn_gamma}}
                                                  : parse_coeffs(syn_coeffs);
            if (!ggcm_is_valid(truth))
                throw FormatError("response coefficients violate the model constraints");
            auto pairs = default_scene_pairs();
            if (syn_weak)
                for (const auto& p : weak_scene_pairs())
                    pairs.push_back(p);
            const SyntheticScene scene = gen_scene(pairs, truth, syn_noise, syn_seed, syn_size);
            save_png(scene.image, syn_out, 16);
            write_curve(scene.truth, syn_truth);
            std::printf("wrote %s and %s\n", syn_out.c_str(), syn_truth.c_str());
            return 0;
        }
        if (ev->parsed()) {
            const double e = rmse(read_curve(ev_pred), read_curve(ev_truth));
            std::printf("rmse = %.6f\n", e);
            return 0;
        }
        if (ab->parsed()) {
            ab_flags.finalize(ab, ab_cfg);
            return run_ablate_dir(ab_dir, ab_out, ab_cfg);
        }
    } catch (const EmptyPatchSetError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
