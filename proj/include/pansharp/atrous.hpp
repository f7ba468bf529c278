#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pansharp/raster.hpp"

// Undecimated ("a trous") wavelet transform with the separable B3
// cubic-spline kernel [1,4,6,4,1]/16. Level j smooths the previous
// approximation with the kernel dilated by 2^(j-1) (zeros inserted
// between taps); the detail plane is the difference of successive
// approximations, so residual + sum(planes) telescopes back to the
// source exactly.

namespace pansharp {

enum class BorderMode { mirror, periodic };

struct WaveletDecomposition {
    std::vector<RasterBand> planes;  // w_1..w_n, finest first
    RasterBand residual;             // deepest approximation c_n

    int levels() const { return static_cast<int>(planes.size()); }
};

/// Largest level count whose dilated kernel footprint
/// (2^(levels-1) * 4 + 1) still fits the band.
inline int max_atrous_levels(int width, int height) {
    const int limit = std::min(width, height);
    int levels = 0;
    while ((4 << levels) + 1 <= limit) ++levels;  // footprint at level n: 4*2^(n-1)+1
    return levels;
}

namespace detail {

// One separable smoothing pass with tap spacing `step`.
inline RasterBand b3_smooth(const RasterBand& band, int step, BorderMode border) {
    static constexpr double taps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
    const int w = band.width();
    const int h = band.height();
    const auto wrap = border == BorderMode::mirror ? &mirror_index : &periodic_index;

    std::vector<double> mid(band.size());
    const std::vector<double>& src = band.samples();
    for (int y = 0; y < h; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * w;
        double* out = mid.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -2; k <= 2; ++k)
                acc += taps[k + 2] * row[wrap(x + k * step, w)];
            out[x] = acc;
        }
    }
    std::vector<double> out(band.size());
    for (int y = 0; y < h; ++y) {
        int sy[5];
        for (int k = -2; k <= 2; ++k) sy[k + 2] = wrap(y + k * step, h);
        double* orow = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < 5; ++k)
                acc += taps[k] * mid[static_cast<std::size_t>(sy[k]) * w + x];
            orow[x] = acc;
        }
    }
    return RasterBand(w, h, std::move(out));
}

}  // namespace detail

inline WaveletDecomposition atrous_decompose(const RasterBand& band, int levels,
                                             BorderMode border = BorderMode::mirror) {
    if (levels < 1)
        throw ParameterError("decomposition needs at least 1 level, got " +
                             std::to_string(levels));
    const int feasible = max_atrous_levels(band.width(), band.height());
    if (levels > feasible)
        throw ParameterError("band " + std::to_string(band.width()) + "x" +
                             std::to_string(band.height()) + " supports at most " +
                             std::to_string(feasible) + " levels, requested " +
                             std::to_string(levels));

    std::vector<RasterBand> planes;
    planes.reserve(levels);
    RasterBand approx = band;
    for (int j = 0; j < levels; ++j) {
        RasterBand next = detail::b3_smooth(approx, 1 << j, border);
        std::vector<double> diff(approx.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = approx.samples()[i] - next.samples()[i];
        planes.emplace_back(band.width(), band.height(), std::move(diff));
        approx = std::move(next);
    }
    return WaveletDecomposition{std::move(planes), std::move(approx)};
}

inline void check_decomposition(const WaveletDecomposition& decomp) {
    if (decomp.planes.empty())
        throw StructuralError("decomposition has no detail planes");
    for (const RasterBand& p : decomp.planes)
        if (!p.same_dims(decomp.residual))
            throw StructuralError("decomposition planes disagree on dimensions");
}

/// residual + sum of detail planes.
inline RasterBand atrous_reconstruct(const WaveletDecomposition& decomp) {
    check_decomposition(decomp);
    std::vector<double> out = decomp.residual.samples();
    for (const RasterBand& p : decomp.planes)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += p.samples()[i];
    return RasterBand(decomp.residual.width(), decomp.residual.height(), std::move(out));
}

/// Pixelwise sum of all detail planes (source minus residual).
inline RasterBand detail_sum(const WaveletDecomposition& decomp) {
    check_decomposition(decomp);
    std::vector<double> out(decomp.residual.size(), 0.0);
    for (const RasterBand& p : decomp.planes)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += p.samples()[i];
    return RasterBand(decomp.residual.width(), decomp.residual.height(), std::move(out));
}

}  // namespace pansharp
