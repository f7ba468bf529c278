#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pansharp/atrous.hpp"
#include "pansharp/jacobi.hpp"
#include "pansharp/raster.hpp"
#include "pansharp/resample.hpp"

// The six fusion algorithms. All of them expect the multispectral
// image already resampled to the panchromatic grid; callers bring the
// inputs to a common grid first (see upsample).

namespace pansharp {

enum class FusionMethod { wavelet_hpm, hpm_boxcar, atrous_additive, brovey, pca, ihs };

inline constexpr std::array<FusionMethod, 6> all_fusion_methods = {
    FusionMethod::wavelet_hpm, FusionMethod::hpm_boxcar,
    FusionMethod::atrous_additive, FusionMethod::brovey,
    FusionMethod::pca, FusionMethod::ihs};

inline std::string_view to_string(FusionMethod method) {
    switch (method) {
        case FusionMethod::wavelet_hpm: return "whpm";
        case FusionMethod::hpm_boxcar: return "hpm";
        case FusionMethod::atrous_additive: return "awl";
        case FusionMethod::brovey: return "brovey";
        case FusionMethod::pca: return "pca";
        case FusionMethod::ihs: return "ihs";
    }
    throw ParameterError("unknown fusion method");
}

inline std::optional<FusionMethod> parse_fusion_method(std::string_view name) {
    for (FusionMethod m : all_fusion_methods)
        if (name == to_string(m)) return m;
    return std::nullopt;
}

struct FusionParams {
    int levels = 2;             // wavelet decomposition depth
    int boxcar_window = 9;      // 2 * ratio + 1 for the 4:1 default
    std::optional<double> epsilon;  // denominator guard; default 1e-6 * mean(pan)
    int ratio = 4;              // MS:PAN resolution ratio

    double resolve_epsilon(const RasterBand& pan) const {
        const double eps = epsilon.value_or(1e-6 * mean(pan));
        if (!(eps > 0.0))
            throw ParameterError("epsilon guard must be positive");
        return eps;
    }

    void validate() const {
        if (levels < 1) throw ParameterError("levels must be at least 1");
        if (boxcar_window < 3 || boxcar_window % 2 == 0)
            throw ParameterError("boxcar window must be odd and at least 3");
        if (ratio < 1) throw ParameterError("ratio must be at least 1");
        if (epsilon && !(*epsilon > 0.0))
            throw ParameterError("epsilon guard must be positive");
    }
};

/// Ratio-derived defaults: each wavelet level halves the frequency
/// band, so levels = log2(ratio); the boxcar window spans 2*ratio+1.
inline FusionParams params_for_ratio(int ratio) {
    if (ratio < 1) throw ParameterError("ratio must be at least 1");
    FusionParams params;
    params.ratio = ratio;
    params.levels = 1;
    while ((1 << params.levels) <= ratio / 2) ++params.levels;
    params.boxcar_window = 2 * ratio + 1;
    return params;
}

namespace detail {

inline void require_same_grid(const MultiBandImage& ms, const RasterBand& pan) {
    if (ms.width() != pan.width() || ms.height() != pan.height())
        throw StructuralError("multispectral and panchromatic grids disagree: " +
                              std::to_string(ms.width()) + "x" + std::to_string(ms.height()) +
                              " vs " + std::to_string(pan.width()) + "x" +
                              std::to_string(pan.height()));
}

// Per-pixel arithmetic mean of all bands.
inline RasterBand intensity(const MultiBandImage& ms) {
    std::vector<double> out(ms.band(0).size(), 0.0);
    for (const RasterBand& b : ms.bands())
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.samples()[i];
    const double inv = 1.0 / ms.band_count();
    for (double& v : out) v *= inv;
    return RasterBand(ms.width(), ms.height(), std::move(out));
}

}  // namespace detail

/// High-pass modulation step shared by the boxcar and wavelet variants:
/// F = ms + (pan - pan_low) * ms / max(pan_low, eps).
inline RasterBand hpm_inject(const RasterBand& ms, const RasterBand& pan,
                             const RasterBand& pan_low, double eps) {
    if (!ms.same_dims(pan) || !ms.same_dims(pan_low))
        throw StructuralError("hpm_inject inputs disagree on dimensions");
    std::vector<double> out(ms.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double low = pan_low.samples()[i];
        const double gain = ms.samples()[i] / std::max(low, eps);
        out[i] = ms.samples()[i] + (pan.samples()[i] - low) * gain;
    }
    return RasterBand(ms.width(), ms.height(), std::move(out));
}

/// High-pass modulation with a boxcar lowpass:
/// F_i = MS_i + (PAN - PAN_L) * MS_i / PAN_L, PAN_L = boxcar(PAN).
inline MultiBandImage fuse_hpm_boxcar(const MultiBandImage& ms, const RasterBand& pan,
                                      const FusionParams& params = {}) {
    params.validate();
    detail::require_same_grid(ms, pan);
    const double eps = params.resolve_epsilon(pan);
    const RasterBand pan_low = boxcar_filter(pan, params.boxcar_window);
    std::vector<RasterBand> fused;
    fused.reserve(ms.band_count());
    for (const RasterBand& b : ms.bands())
        fused.push_back(hpm_inject(b, pan, pan_low, eps));
    return MultiBandImage(std::move(fused));
}

/// Additive wavelet fusion: F_i = MS_i + sum of PAN's detail planes.
inline MultiBandImage fuse_atrous_additive(const MultiBandImage& ms, const RasterBand& pan,
                                           const FusionParams& params = {}) {
    params.validate();
    detail::require_same_grid(ms, pan);
    const RasterBand details = detail_sum(atrous_decompose(pan, params.levels));
    std::vector<RasterBand> fused;
    fused.reserve(ms.band_count());
    for (const RasterBand& b : ms.bands()) {
        std::vector<double> out(b.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = b.samples()[i] + details.samples()[i];
        fused.emplace_back(ms.width(), ms.height(), std::move(out));
    }
    return MultiBandImage(std::move(fused));
}

/// Wavelet high-pass modulation:
/// F_i = MS_i + D * MS_i / (PAN - D), D = sum of PAN's detail planes.
/// PAN - D telescopes to the wavelet residual, i.e. the modulation
/// gain divides by the wavelet lowpass instead of a boxcar lowpass.
inline MultiBandImage fuse_wavelet_hpm(const MultiBandImage& ms, const RasterBand& pan,
                                       const FusionParams& params = {}) {
    params.validate();
    detail::require_same_grid(ms, pan);
    const double eps = params.resolve_epsilon(pan);
    const WaveletDecomposition decomp = atrous_decompose(pan, params.levels);
    const RasterBand details = detail_sum(decomp);

    std::vector<double> low(pan.size());
    for (std::size_t i = 0; i < low.size(); ++i)
        low[i] = pan.samples()[i] - details.samples()[i];
    const RasterBand pan_low(pan.width(), pan.height(), std::move(low));
    if (max_abs_diff(pan_low, decomp.residual) > 1e-9 * std::max(1.0, std::abs(mean(pan))))
        throw Error("wavelet telescoping identity violated (PAN - details != residual)");

    std::vector<RasterBand> fused;
    fused.reserve(ms.band_count());
    for (const RasterBand& b : ms.bands())
        fused.push_back(hpm_inject(b, pan, pan_low, eps));
    return MultiBandImage(std::move(fused));
}

/// Brovey: F_i = MS_i * PAN / I with I the per-pixel band mean.
inline MultiBandImage fuse_brovey(const MultiBandImage& ms, const RasterBand& pan,
                                  const FusionParams& params = {}) {
    params.validate();
    detail::require_same_grid(ms, pan);
    const double eps = params.resolve_epsilon(pan);
    const RasterBand intensity = detail::intensity(ms);
    std::vector<RasterBand> fused;
    fused.reserve(ms.band_count());
    for (const RasterBand& b : ms.bands()) {
        std::vector<double> out(b.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = b.samples()[i] * pan.samples()[i] /
                     std::max(intensity.samples()[i], eps);
        fused.emplace_back(ms.width(), ms.height(), std::move(out));
    }
    return MultiBandImage(std::move(fused));
}

/// Fast linear IHS for 3-band images: the intensity (band mean) is
/// replaced by the histogram-matched PAN, which in the linear model is
/// the additive update F_i = MS_i + (PAN' - I).
inline MultiBandImage fuse_ihs(const MultiBandImage& ms, const RasterBand& pan,
                               const FusionParams& params = {}) {
    params.validate();
    detail::require_same_grid(ms, pan);
    if (ms.band_count() != 3)
        throw ParameterError("IHS fusion needs exactly 3 bands, got " +
                             std::to_string(ms.band_count()));
    const RasterBand intensity = detail::intensity(ms);
    const RasterBand matched = histogram_match(pan, intensity);
    std::vector<RasterBand> fused;
    fused.reserve(3);
    for (const RasterBand& b : ms.bands()) {
        std::vector<double> out(b.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = b.samples()[i] + (matched.samples()[i] - intensity.samples()[i]);
        fused.emplace_back(ms.width(), ms.height(), std::move(out));
    }
    return MultiBandImage(std::move(fused));
}

/// Principal components of the band covariance. basis is row-major with
/// row k holding the loading vector of component k (descending
/// eigenvalue); PC1's loadings are oriented to a positive sum so the
/// substitution is deterministic.
struct PcaModel {
    std::vector<double> band_means;
    std::vector<double> basis;
    std::vector<double> eigenvalues;
    int bands = 0;
};

inline PcaModel pca_fit(const MultiBandImage& ms) {
    const int n = ms.band_count();
    if (n < 2) throw ParameterError("PCA needs at least 2 bands");

    PcaModel model;
    model.bands = n;
    model.band_means.resize(n);
    for (int i = 0; i < n; ++i) model.band_means[i] = mean(ms.band(i));

    std::vector<double> cov(static_cast<std::size_t>(n) * n, 0.0);
    const double inv = 1.0 / static_cast<double>(ms.band(0).size());
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double acc = 0.0;
            const std::vector<double>& a = ms.band(i).samples();
            const std::vector<double>& b = ms.band(j).samples();
            for (std::size_t k = 0; k < a.size(); ++k)
                acc += (a[k] - model.band_means[i]) * (b[k] - model.band_means[j]);
            cov[static_cast<std::size_t>(i) * n + j] = acc * inv;
            cov[static_cast<std::size_t>(j) * n + i] = acc * inv;
        }
    }

    SymmetricEigen eig = jacobi_eigen(std::move(cov), n);
    if (!(eig.values.front() > 0.0) || eig.values.back() <= 1e-12 * eig.values.front())
        throw DegenerateInputError("band covariance is (near) singular");

    model.eigenvalues = std::move(eig.values);
    model.basis.resize(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k)
        for (int r = 0; r < n; ++r)
            model.basis[static_cast<std::size_t>(k) * n + r] =
                eig.vectors[static_cast<std::size_t>(r) * n + k];

    double pc1_sum = 0.0;
    for (int r = 0; r < n; ++r) pc1_sum += model.basis[r];
    if (pc1_sum < 0.0)
        for (int r = 0; r < n; ++r) model.basis[r] = -model.basis[r];
    return model;
}

/// Centered projection onto the principal components; band k of the
/// result is the score image of component k.
inline MultiBandImage pca_project(const MultiBandImage& ms, const PcaModel& model) {
    const int n = model.bands;
    if (ms.band_count() != n)
        throw StructuralError("image band count does not match PCA model");
    const std::size_t pixels = ms.band(0).size();
    std::vector<std::vector<double>> scores(n, std::vector<double>(pixels, 0.0));
    for (int r = 0; r < n; ++r) {
        const std::vector<double>& src = ms.band(r).samples();
        for (int k = 0; k < n; ++k) {
            const double w = model.basis[static_cast<std::size_t>(k) * n + r];
            std::vector<double>& dst = scores[k];
            const double shift = model.band_means[r];
            for (std::size_t i = 0; i < pixels; ++i) dst[i] += w * (src[i] - shift);
        }
    }
    std::vector<RasterBand> bands;
    bands.reserve(n);
    for (int k = 0; k < n; ++k)
        bands.emplace_back(ms.width(), ms.height(), std::move(scores[k]));
    return MultiBandImage(std::move(bands));
}

/// Inverse of pca_project (orthogonal basis, so the transpose).
inline MultiBandImage pca_reconstruct(const MultiBandImage& scores, const PcaModel& model) {
    const int n = model.bands;
    if (scores.band_count() != n)
        throw StructuralError("score band count does not match PCA model");
    const std::size_t pixels = scores.band(0).size();
    std::vector<std::vector<double>> out(n, std::vector<double>(pixels));
    for (int r = 0; r < n; ++r) {
        std::vector<double>& dst = out[r];
        const double shift = model.band_means[r];
        for (std::size_t i = 0; i < pixels; ++i) dst[i] = shift;
        for (int k = 0; k < n; ++k) {
            const double w = model.basis[static_cast<std::size_t>(k) * n + r];
            const std::vector<double>& src = scores.band(k).samples();
            for (std::size_t i = 0; i < pixels; ++i) dst[i] += w * src[i];
        }
    }
    std::vector<RasterBand> bands;
    bands.reserve(n);
    for (int r = 0; r < n; ++r)
        bands.emplace_back(scores.width(), scores.height(), std::move(out[r]));
    return MultiBandImage(std::move(bands));
}

/// PC1 substitution: replace the first principal component with the
/// histogram-matched PAN and invert the transform.
inline MultiBandImage fuse_pca(const MultiBandImage& ms, const RasterBand& pan,
                               const FusionParams& params = {}) {
    params.validate();
    detail::require_same_grid(ms, pan);
    const PcaModel model = pca_fit(ms);
    MultiBandImage scores = pca_project(ms, model);
    const RasterBand matched = histogram_match(pan, scores.band(0));

    std::vector<RasterBand> replaced = scores.bands();
    replaced[0] = matched;
    return pca_reconstruct(MultiBandImage(std::move(replaced)), model);
}

inline MultiBandImage fuse(FusionMethod method, const MultiBandImage& ms,
                           const RasterBand& pan, const FusionParams& params = {}) {
    switch (method) {
        case FusionMethod::wavelet_hpm: return fuse_wavelet_hpm(ms, pan, params);
        case FusionMethod::hpm_boxcar: return fuse_hpm_boxcar(ms, pan, params);
        case FusionMethod::atrous_additive: return fuse_atrous_additive(ms, pan, params);
        case FusionMethod::brovey: return fuse_brovey(ms, pan, params);
        case FusionMethod::pca: return fuse_pca(ms, pan, params);
        case FusionMethod::ihs: return fuse_ihs(ms, pan, params);
    }
    throw ParameterError("unknown fusion method");
}

}  // namespace pansharp
