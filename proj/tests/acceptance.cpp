// Acceptance suite: runs the full criteria checklist end to end and
// prints one PASS/FAIL line per criterion.
//
// usage: acceptance [path-to-cli] [scratch-dir]

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pansharp/pansharp.hpp"
#include "test_util.hpp"

using namespace pansharp;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_scratch;
bool g_all_ok = true;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s  criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str());
    g_all_ok = g_all_ok && ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_cli(const std::string& args) {
    if (g_cli.empty()) return -1;
    const std::string cmd = "'" + g_cli + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

// cc_avg column of one CSV row, or NaN.
double csv_cc(const std::string& csv, const std::string& method) {
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind(method + ",", 0) != 0) continue;
        const std::size_t a = line.find(',');
        const std::size_t b = line.find(',', a + 1);
        return std::stod(line.substr(a + 1, b - a - 1));
    }
    return std::nan("");
}

double brute_force_mi(const RasterBand& a, const RasterBand& b, int bins) {
    auto bin_of = [bins](const RasterBand& band, std::size_t i) {
        const auto [lo, hi] = min_max(band);
        if (hi == lo) return 0;
        const int k = static_cast<int>((band.samples()[i] - lo) / (hi - lo) * bins);
        return std::min(k, bins - 1);
    };
    const double total = static_cast<double>(a.size());
    double mi = 0.0;
    for (int x = 0; x < bins; ++x) {
        for (int y = 0; y < bins; ++y) {
            double nab = 0.0, na = 0.0, nb = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const bool in_a = bin_of(a, i) == x;
                const bool in_b = bin_of(b, i) == y;
                na += in_a;
                nb += in_b;
                nab += in_a && in_b;
            }
            if (nab > 0.0)
                mi += (nab / total) * std::log((nab / total) / ((na / total) * (nb / total)));
        }
    }
    return mi;
}

void criterion_1_reconstruction() {
    ps_test::TestRng rng(2024);
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int w = rng.integer(64, 257);
        const int h = rng.integer(64, 257);
        const int levels = rng.integer(1, 3);
        const RasterBand band = ps_test::random_band(rng, w, h);
        const RasterBand rec = atrous_reconstruct(atrous_decompose(band, levels));
        double peak = 0.0;
        for (double v : band.samples()) peak = std::max(peak, std::abs(v));
        worst = std::max(worst, max_abs_diff(rec, band) / peak);
    }
    const double dt = seconds_since(t0);
    std::ostringstream detail;
    detail << "max rel err " << worst << ", " << dt << " s";
    report(1, "a trous perfect reconstruction on 50 random bands", worst < 1e-9 && dt < 5.0,
           detail.str());
}

void criterion_2_whpm_identity() {
    ps_test::TestRng rng(777);
    FusionParams params;
    params.epsilon = 1e-6;
    double worst_telescope = 0.0;
    double worst_oracle = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const RasterBand pan = ps_test::random_band(rng, 64, 64, 0.3, 1.0);
        const MultiBandImage ms = ps_test::random_image(rng, 3, 64, 64, 0.2, 1.0);

        const WaveletDecomposition decomp = atrous_decompose(pan, params.levels);
        const RasterBand details = detail_sum(decomp);
        for (std::size_t i = 0; i < pan.size(); ++i)
            worst_telescope = std::max(
                worst_telescope, std::abs((pan.samples()[i] - details.samples()[i]) -
                                          decomp.residual.samples()[i]));

        const MultiBandImage fused = fuse_wavelet_hpm(ms, pan, params);
        for (int b = 0; b < 3; ++b) {
            for (std::size_t i = 0; i < pan.size(); ++i) {
                const double m = ms.band(b).samples()[i];
                const double oracle =
                    m + details.samples()[i] * m /
                            std::max(decomp.residual.samples()[i], *params.epsilon);
                worst_oracle =
                    std::max(worst_oracle, std::abs(fused.band(b).samples()[i] - oracle));
            }
        }
    }
    std::ostringstream detail;
    detail << "telescope " << worst_telescope << ", oracle " << worst_oracle;
    report(2, "wavelet HPM denominator identity and oracle match",
           worst_telescope < 1e-9 && worst_oracle < 1e-12, detail.str());
}

void criterion_3_constant_pan() {
    ps_test::TestRng rng(31);
    double worst = 0.0;
    for (FusionMethod method : {FusionMethod::hpm_boxcar, FusionMethod::atrous_additive,
                                FusionMethod::wavelet_hpm}) {
        const MultiBandImage ms = ps_test::random_image(rng, 3, 64, 64, 10.0, 90.0);
        const RasterBand pan = ps_test::constant_band(64, 64, 120.0);
        const MultiBandImage fused = fuse(method, ms, pan);
        for (int b = 0; b < 3; ++b)
            worst = std::max(worst, max_abs_diff(fused.band(b), ms.band(b)));
    }
    std::ostringstream detail;
    detail << "max |fused - ms| " << worst;
    report(3, "constant PAN keeps MS for HPM, AWL, WHPM", worst < 1e-9, detail.str());
}

void criterion_4_metric_identities() {
    ps_test::TestRng rng(404);
    bool ok = true;
    std::ostringstream detail;

    const RasterBand a = ps_test::random_band(rng, 32, 32, 0.0, 100.0);
    std::vector<double> neg = a.samples(), aff = a.samples();
    for (double& v : neg) v = -v;
    for (double& v : aff) v = 2.0 * v + 5.0;
    ok = ok && std::abs(correlation(a, a) - 1.0) < 1e-12;
    ok = ok && std::abs(correlation(a, RasterBand(32, 32, std::move(neg))) + 1.0) < 1e-12;
    ok = ok && std::abs(correlation(a, RasterBand(32, 32, std::move(aff))) - 1.0) < 1e-12;
    const RasterBand b = ps_test::random_band(rng, 32, 32, 0.0, 100.0);
    std::vector<double> baff = b.samples();
    for (double& v : baff) v = 0.25 * v + 3.0;
    ok = ok && std::abs(correlation(a, RasterBand(32, 32, std::move(baff))) -
                        correlation(a, b)) < 1e-12;
    if (!ok) detail << "correlation identities failed; ";

    const RasterBand small_a = ps_test::random_band(rng, 8, 8, 0.0, 16.0);
    const RasterBand small_b = ps_test::random_band(rng, 8, 8, 0.0, 16.0);
    const double mi_sym = std::abs(mutual_information(small_a, small_b, 4) -
                                   mutual_information(small_b, small_a, 4));
    ok = ok && mi_sym < 1e-12;

    const double prod_mi = mutual_information(small_a, small_a, 4);
    const double brute = brute_force_mi(small_a, small_a, 4);
    const JointHistogram h = JointHistogram::build(small_a, small_a, 4);
    double entropy = 0.0;
    for (std::int64_t c : h.marginal_a) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / small_a.size();
        entropy -= p * std::log(p);
    }
    const bool mi_ok = std::abs(prod_mi - brute) < 1e-12 && std::abs(prod_mi - entropy) < 1e-9;
    if (!mi_ok) detail << "MI oracle/entropy failed; ";
    ok = ok && mi_ok;

    ok = ok && std::abs(q_index(a, a) - 1.0) < 1e-12;

    bool qnr_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        const int bands = rng.integer(2, 4);
        const MultiBandImage ms = ps_test::random_image(rng, bands, 16, 16, 0.0, 100.0);
        const MultiBandImage fused = ps_test::random_image(rng, bands, 32, 32, 0.0, 100.0);
        const RasterBand pan = ps_test::random_band(rng, 32, 32, 0.0, 100.0);
        const QnrResult r = qnr(fused, ms, pan, 2);
        qnr_ok = qnr_ok && r.d_lambda >= 0.0 && r.d_lambda <= 1.0 && r.d_s >= 0.0 &&
                 r.d_s <= 1.0 && r.qnr >= 0.0 && r.qnr <= 1.0 &&
                 std::abs(r.qnr - (1.0 - r.d_lambda) * (1.0 - r.d_s)) < 1e-12;
    }
    if (!qnr_ok) detail << "QNR rows failed; ";
    ok = ok && qnr_ok;

    if (ok) detail << "CC/MI/Q/QNR identities hold";
    report(4, "metric identities", ok, detail.str());
}

void criterion_5_independent_noise_mi() {
    ps_test::TestRng rng(90210);
    const RasterBand n1 = ps_test::random_band(rng, 256, 256);
    const RasterBand n2 = ps_test::random_band(rng, 256, 256);
    const double mi = mutual_information(n1, n2, 64);
    std::ostringstream detail;
    detail << "MI " << mi;
    report(5, "independent uniform noise has MI < 0.05", mi < 0.05, detail.str());
}

void criterion_6_bundled_scene() {
    bool ok = true;
    std::ostringstream detail;

    const auto t0 = std::chrono::steady_clock::now();
    const SyntheticScene scene = synth_scene(42, 256, 4, 3);
    EvalConfig config;
    const std::vector<MetricsReport> rows = run_evaluation(config, scene);
    const double dt = seconds_since(t0);
    ok = ok && dt < 30.0 && rows.size() == 6;
    for (const MetricsReport& row : rows) ok = ok && row.valid();

    const std::string csv1 = format_csv(rows);
    const std::string csv2 = format_csv(run_evaluation(config, synth_scene(42, 256, 4, 3)));
    ok = ok && csv1 == csv2;

    const double whpm_cc = csv_cc(csv1, "whpm");
    const double hpm_cc = csv_cc(csv1, "hpm");
    ok = ok && whpm_cc >= hpm_cc;  // the pinned cc_avg ordering
    detail << "whpm cc " << whpm_cc << " vs hpm cc " << hpm_cc << ", " << dt << " s";

    // the same pipeline through the CLI, twice, must be byte-identical
    if (!g_cli.empty()) {
        const fs::path dir = g_scratch / "scene42";
        bool cli_ok = run_cli("synth --seed 42 --size 256 --ratio 4 --bands 3 --out '" +
                              dir.string() + "'") == 0;
        const std::string eval_args = "evaluate --ms '" + (dir / "ms.txt").string() +
                                      "' --pan '" + (dir / "pan.pgm").string() + "' --out '";
        cli_ok = cli_ok && run_cli(eval_args + (dir / "r1.csv").string() + "'") == 0;
        cli_ok = cli_ok && run_cli(eval_args + (dir / "r2.csv").string() + "'") == 0;
        const std::string r1 = slurp(dir / "r1.csv");
        cli_ok = cli_ok && !r1.empty() && r1 == slurp(dir / "r2.csv");
        cli_ok = cli_ok && csv_cc(r1, "whpm") >= csv_cc(r1, "hpm");
        if (!cli_ok) detail << "; CLI run mismatch";
        ok = ok && cli_ok;
    }
    report(6, "bundled scene evaluation: six valid rows, deterministic, whpm >= hpm", ok,
           detail.str());
}

void criterion_7_brovey_ihs() {
    ps_test::TestRng rng(1234);
    bool ok = true;
    std::ostringstream detail;

    const MultiBandImage ms = ps_test::random_image(rng, 3, 32, 32, 20.0, 80.0);
    const RasterBand pan = ps_test::random_band(rng, 32, 32, 20.0, 80.0);
    const FusionParams params;
    const double eps = params.resolve_epsilon(pan);

    const MultiBandImage brovey = fuse_brovey(ms, pan, params);
    double worst_ratio = 0.0;
    for (int i = 1; i < 3; ++i) {
        for (std::size_t k = 0; k < pan.size(); ++k) {
            const double fj = brovey.band(0).samples()[k];
            const double mj = ms.band(0).samples()[k];
            if (fj <= eps || mj <= eps) continue;
            worst_ratio = std::max(worst_ratio,
                                   std::abs(brovey.band(i).samples()[k] / fj -
                                            ms.band(i).samples()[k] / mj));
        }
    }
    ok = ok && worst_ratio < 1e-9;
    detail << "brovey ratio dev " << worst_ratio;

    const MultiBandImage ihs = fuse_ihs(ms, pan, params);
    std::vector<double> intensity(pan.size(), 0.0);
    for (int b = 0; b < 3; ++b)
        for (std::size_t i = 0; i < pan.size(); ++i)
            intensity[i] += ms.band(b).samples()[i] / 3.0;
    double im = 0.0, pm = 0.0;
    for (std::size_t i = 0; i < pan.size(); ++i) {
        im += intensity[i];
        pm += pan.samples()[i];
    }
    im /= static_cast<double>(pan.size());
    pm /= static_cast<double>(pan.size());
    double ivar = 0.0, pvar = 0.0;
    for (std::size_t i = 0; i < pan.size(); ++i) {
        ivar += (intensity[i] - im) * (intensity[i] - im);
        pvar += (pan.samples()[i] - pm) * (pan.samples()[i] - pm);
    }
    const double gain = std::sqrt(ivar / pvar);
    double worst_intensity = 0.0;
    for (std::size_t i = 0; i < pan.size(); ++i) {
        const double matched = (pan.samples()[i] - pm) * gain + im;
        const double fused_i = (ihs.band(0).samples()[i] + ihs.band(1).samples()[i] +
                                ihs.band(2).samples()[i]) / 3.0;
        worst_intensity = std::max(worst_intensity, std::abs(fused_i - matched));
    }
    ok = ok && worst_intensity < 1e-9;
    detail << ", ihs intensity dev " << worst_intensity;

    report(7, "Brovey ratio preservation and IHS intensity substitution", ok, detail.str());
}

void criterion_8_pca_round_trip() {
    ps_test::TestRng rng(55);
    double worst = 0.0;
    for (int bands = 3; bands <= 8; ++bands) {
        const MultiBandImage ms = ps_test::random_image(rng, bands, 32, 32, 0.0, 100.0);
        const PcaModel model = pca_fit(ms);
        const MultiBandImage rec = pca_reconstruct(pca_project(ms, model), model);
        for (int i = 0; i < bands; ++i)
            worst = std::max(worst, max_abs_diff(rec.band(i), ms.band(i)));
    }
    std::ostringstream detail;
    detail << "max round-trip err " << worst;
    report(8, "PCA forward/inverse round trip on 3..8 bands", worst < 1e-9, detail.str());
}

void criterion_9_file_round_trips() {
    bool ok = true;
    std::ostringstream detail;
    const fs::path dir = g_scratch / "formats";
    fs::create_directories(dir);

    ps_test::TestRng rng(66);
    std::vector<double> v8(24 * 16), v16(24 * 16);
    for (double& x : v8) x = rng.integer(0, 255);
    for (double& x : v16) x = rng.integer(0, 65535);
    const RasterBand b8(24, 16, std::move(v8));
    const RasterBand b16(24, 16, std::move(v16));

    save_band(b8, dir / "b8.pgm", 255);
    save_band(b16, dir / "b16.pgm", 65535);
    ok = ok && max_abs_diff(load_band(dir / "b8.pgm"), b8) == 0.0;
    ok = ok && max_abs_diff(load_band(dir / "b16.pgm"), b16) == 0.0;
    save_band(load_band(dir / "b16.pgm"), dir / "b16_2.pgm", 65535);
    ok = ok && slurp(dir / "b16.pgm") == slurp(dir / "b16_2.pgm");
    if (!ok) detail << "pgm round trip failed; ";

    const RasterBand fb = ps_test::random_band(rng, 9, 5, -10.0, 10.0);
    save_band_f32(fb, dir / "fb.f32");
    const RasterBand fb2 = load_band_f32(dir / "fb.f32");
    bool f32_ok = true;
    for (std::size_t i = 0; i < fb.size(); ++i)
        f32_ok = f32_ok && fb2.samples()[i] ==
                               static_cast<double>(static_cast<float>(fb.samples()[i]));
    save_band_f32(fb2, dir / "fb2.f32");
    f32_ok = f32_ok && slurp(dir / "fb.f32") == slurp(dir / "fb2.f32");
    if (!f32_ok) detail << "f32 round trip failed; ";
    ok = ok && f32_ok;

    if (!g_cli.empty()) {
        // manifest whose bands disagree on dims must be rejected with exit 2
        save_band(ps_test::constant_band(8, 8, 10.0), dir / "a.pgm");
        save_band(ps_test::constant_band(4, 4, 10.0), dir / "b.pgm");
        std::ofstream bad(dir / "bad.txt");
        bad << "band=a.pgm\nband=b.pgm\n";
        bad.close();
        const int code = run_cli("fuse --method brovey --ms '" + (dir / "bad.txt").string() +
                                 "' --pan '" + (dir / "a.pgm").string() + "' --out '" +
                                 (dir / "out.txt").string() + "'");
        if (code != 2) {
            detail << "dim-mismatch exit code " << code << " != 2; ";
            ok = false;
        }

        // the full exit-code contract: 0 parameter=1 io=2 degenerate=3
        std::vector<double> base(64), twice(64);
        for (int i = 0; i < 64; ++i) {
            base[i] = 1 + (i * 7) % 100;
            twice[i] = 2 * base[i];
        }
        save_band(RasterBand(8, 8, base), dir / "pc1.pgm");
        save_band(RasterBand(8, 8, twice), dir / "pc2.pgm");
        std::ofstream rank1(dir / "rank1.txt");
        rank1 << "band=pc1.pgm\nband=pc2.pgm\n";
        rank1.close();
        const int degenerate = run_cli("fuse --method pca --ms '" +
                                       (dir / "rank1.txt").string() + "' --pan '" +
                                       (dir / "pc1.pgm").string() + "' --out '" +
                                       (dir / "out2.txt").string() + "'");
        const int param = run_cli("fuse --method brovey --ms '" + (dir / "rank1.txt").string() +
                                  "' --pan '" + (dir / "pc1.pgm").string() + "' --out '" +
                                  (dir / "out3.txt").string() + "' --window 4");
        const int io = run_cli("evaluate --ms '" + (dir / "missing.txt").string() +
                               "' --pan '" + (dir / "pc1.pgm").string() + "' --out '" +
                               (dir / "r.csv").string() + "'");
        if (degenerate != 3 || param != 1 || io != 2) {
            detail << "exit codes deg/param/io " << degenerate << "/" << param << "/" << io
                   << " != 3/1/2; ";
            ok = false;
        }

        // happy-path fuse: low-res MS in, fused manifest out on the PAN grid
        const fs::path tiny = g_scratch / "tiny";
        bool fuse_ok = run_cli("synth --seed 5 --size 64 --ratio 4 --bands 3 --out '" +
                               tiny.string() + "'") == 0;
        fuse_ok = fuse_ok && run_cli("fuse --method whpm --ms '" +
                                     (tiny / "ms.txt").string() + "' --pan '" +
                                     (tiny / "pan.pgm").string() + "' --out '" +
                                     (tiny / "fused.txt").string() + "'") == 0;
        if (fuse_ok) {
            const MultiBandImage fused = load_multiband(tiny / "fused.txt");
            fuse_ok = fused.band_count() == 3 && fused.width() == 64 && fused.height() == 64;
        }
        if (!fuse_ok) {
            detail << "fuse subcommand round trip failed; ";
            ok = false;
        }
    }

    if (ok) detail << "all formats lossless, exit codes honored";
    report(9, "file format round trips and CLI error codes", ok, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    g_scratch = argc > 2 ? fs::path(argv[2])
                         : fs::temp_directory_path() / "pansharp_acceptance";
    fs::create_directories(g_scratch);
    if (!g_cli.empty() && !fs::exists(g_cli)) {
        std::cerr << "CLI binary not found: " << g_cli << "\n";
        return 2;
    }

    criterion_1_reconstruction();
    criterion_2_whpm_identity();
    criterion_3_constant_pan();
    criterion_4_metric_identities();
    criterion_5_independent_noise_mi();
    criterion_6_bundled_scene();
    criterion_7_brovey_ihs();
    criterion_8_pca_round_trip();
    criterion_9_file_round_trips();

    std::printf("%s\n", g_all_ok ? "acceptance: all criteria passed"
                                 : "acceptance: FAILURES above");
    return g_all_ok ? 0 : 1;
}
