#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pansharp/pansharp.hpp"

namespace {

using namespace pansharp;

// MS inputs may arrive at their native grid; bring them to the PAN
// grid and report the resolution ratio.
std::pair<MultiBandImage, int> to_pan_grid(const MultiBandImage& ms, const RasterBand& pan) {
    if (pan.width() % ms.width() != 0 || pan.height() % ms.height() != 0)
        throw ParameterError("PAN dims are not an integer multiple of MS dims");
    const int rx = pan.width() / ms.width();
    const int ry = pan.height() / ms.height();
    if (rx != ry)
        throw ParameterError("MS:PAN ratio differs between axes (" +
                             std::to_string(rx) + " vs " + std::to_string(ry) + ")");
    return {upsample(ms, rx), rx};
}

int infer_ratio(const MultiBandImage& ms, const RasterBand& pan) {
    if (pan.width() % ms.width() != 0 || pan.height() % ms.height() != 0 ||
        pan.width() / ms.width() != pan.height() / ms.height())
        throw ParameterError("PAN dims are not an integer multiple of MS dims");
    return pan.width() / ms.width();
}

std::vector<FusionMethod> parse_method_list(const std::string& list) {
    if (list == "all")
        return {all_fusion_methods.begin(), all_fusion_methods.end()};
    std::vector<FusionMethod> methods;
    std::size_t start = 0;
    while (start <= list.size()) {
        const std::size_t comma = list.find(',', start);
        const std::string token =
            list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const std::optional<FusionMethod> m = parse_fusion_method(token);
        if (!m)
            throw ParameterError("unknown fusion method '" + token +
                                 "' (expected brovey|ihs|pca|hpm|awl|whpm)");
        methods.push_back(*m);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (methods.empty()) throw ParameterError("empty method list");
    return methods;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pansharp: multispectral/panchromatic image fusion toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a deterministic synthetic scene");
    std::uint64_t seed = 42;
    int size = 256, ratio = 4, bands = 3;
    std::string synth_out;
    synth->add_option("--seed", seed, "RNG seed");
    synth->add_option("--size", size, "PAN width/height in pixels");
    synth->add_option("--ratio", ratio, "MS:PAN resolution ratio");
    synth->add_option("--bands", bands, "multispectral band count");
    synth->add_option("--out", synth_out, "output directory")->required();

    // fuse
    auto* fuse_cmd = app.add_subcommand("fuse", "fuse one MS image with a PAN band");
    std::string method_name, fuse_ms, fuse_pan, fuse_out;
    int levels = 0, window = 0;
    std::optional<double> epsilon;
    fuse_cmd->add_option("--method", method_name, "brovey|ihs|pca|hpm|awl|whpm")->required();
    fuse_cmd->add_option("--ms", fuse_ms, "MS manifest path")->required();
    fuse_cmd->add_option("--pan", fuse_pan, "PAN pgm path")->required();
    fuse_cmd->add_option("--out", fuse_out, "output manifest path")->required();
    auto* levels_opt = fuse_cmd->add_option("--levels", levels,
                                            "wavelet levels (default log2(ratio))");
    auto* window_opt = fuse_cmd->add_option("--window", window,
                                            "boxcar window (default 2*ratio+1)");
    fuse_cmd->add_option("--epsilon", epsilon, "denominator guard");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score fusion methods on a scene");
    std::string eval_ms, eval_pan, eval_methods = "all", eval_out, save_images;
    int mi_bins = 64, q_window = 8;
    bool wald = false;
    eval_cmd->add_option("--ms", eval_ms, "MS manifest path")->required();
    eval_cmd->add_option("--pan", eval_pan, "PAN pgm path")->required();
    eval_cmd->add_option("--methods", eval_methods, "all or comma-separated list");
    eval_cmd->add_option("--mi-bins", mi_bins, "histogram bins for MI");
    eval_cmd->add_option("--q-window", q_window, "q-index block size");
    eval_cmd->add_flag("--wald", wald, "reduced-scale evaluation against the original MS");
    eval_cmd->add_option("--out", eval_out, "report CSV path")->required();
    eval_cmd->add_option("--save-images", save_images, "directory for fused images");

    try {
        app.parse(argc, argv);

        if (synth->parsed()) {
            const SyntheticScene scene = synth_scene(seed, size, ratio, bands);
            const std::filesystem::path dir(synth_out);
            save_multiband(scene.ms, dir / "ms.txt");
            save_band(scene.pan, dir / "pan.pgm");
            if (scene.truth) save_multiband(*scene.truth, dir / "truth.txt");
            std::cout << "wrote scene (" << bands << " bands, " << size << "x" << size
                      << " pan, ratio " << ratio << ") to " << dir.string() << "\n";
        } else if (fuse_cmd->parsed()) {
            const std::optional<FusionMethod> method = parse_fusion_method(method_name);
            if (!method)
                throw ParameterError("unknown fusion method '" + method_name +
                                     "' (expected brovey|ihs|pca|hpm|awl|whpm)");
            const MultiBandImage ms = load_multiband(fuse_ms);
            const RasterBand pan = load_band(fuse_pan);
            auto [ms_up, r] = to_pan_grid(ms, pan);
            FusionParams params = params_for_ratio(r);
            if (levels_opt->count() > 0) params.levels = levels;
            if (window_opt->count() > 0) params.boxcar_window = window;
            params.epsilon = epsilon;
            const MultiBandImage fused = fuse(*method, ms_up, pan, params);
            save_multiband(fused, fuse_out);
            std::cout << "wrote " << fuse_out << "\n";
        } else if (eval_cmd->parsed()) {
            EvalConfig config;
            config.methods = parse_method_list(eval_methods);
            config.mi_bins = mi_bins;
            config.q_window = q_window;
            config.wald = wald;
            if (!save_images.empty()) config.output_dir = save_images;

            const MultiBandImage ms = load_multiband(eval_ms);
            const RasterBand pan = load_band(eval_pan);
            const int r = infer_ratio(ms, pan);
            config.params = params_for_ratio(r);
            const SyntheticScene scene{ms, pan, std::nullopt, r, {}};
            const std::vector<MetricsReport> rows = run_evaluation(config, scene);
            emit_report(rows, eval_out);
            print_report(rows, std::cout);
            std::cout << "wrote " << eval_out << "\n";
        }
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
