#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pansharp/raster.hpp"

namespace pansharp {

/// Unweighted window x window moving average with mirror borders.
/// Accumulates deviations from an anchor sample so a constant band is
/// preserved bit for bit.
inline RasterBand boxcar_filter(const RasterBand& band, int window) {
    if (window < 1 || window % 2 == 0)
        throw ParameterError("boxcar window must be odd and positive, got " +
                             std::to_string(window));
    if (window > std::min(band.width(), band.height()))
        throw ParameterError("boxcar window " + std::to_string(window) +
                             " exceeds band dimensions");
    if (window == 1) return band;

    const int w = band.width();
    const int h = band.height();
    const int r = window / 2;
    const double anchor = band.samples()[0];
    const double norm = 1.0 / (static_cast<double>(window) * window);
    const std::vector<double>& src = band.samples();
    std::vector<double> out(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ky = -r; ky <= r; ++ky) {
                const double* row = src.data() +
                                    static_cast<std::size_t>(mirror_index(y + ky, h)) * w;
                for (int kx = -r; kx <= r; ++kx)
                    acc += row[mirror_index(x + kx, w)] - anchor;
            }
            out[static_cast<std::size_t>(y) * w + x] = anchor + acc * norm;
        }
    }
    return RasterBand(w, h, std::move(out));
}

namespace detail {

// Keys cubic convolution weight (a = -1/2); reproduces polynomials up
// to degree 2 away from borders.
inline double cubic_weight(double s) {
    s = std::abs(s);
    if (s < 1.0) return ((1.5 * s - 2.5) * s) * s + 1.0;
    if (s < 2.0) return (((-0.5 * s + 2.5) * s) - 4.0) * s + 2.0;
    return 0.0;
}

struct CubicTap {
    int base;           // leftmost source index before mirroring
    double w[4];
};

// Output pixel centers are aligned with input centers: source
// coordinate of output i is (i + 0.5) / factor - 0.5.
inline std::vector<CubicTap> cubic_taps(int n_out, int factor) {
    std::vector<CubicTap> taps(n_out);
    for (int i = 0; i < n_out; ++i) {
        const double s = (i + 0.5) / factor - 0.5;
        const double fl = std::floor(s);
        const double t = s - fl;
        CubicTap& tap = taps[i];
        tap.base = static_cast<int>(fl) - 1;
        for (int k = 0; k < 4; ++k) tap.w[k] = cubic_weight(t + 1.0 - k);
        // weights of the Keys kernel sum to 1 analytically; renormalize
        // to keep constants exact in floating point
        const double sum = tap.w[0] + tap.w[1] + tap.w[2] + tap.w[3];
        for (double& w : tap.w) w /= sum;
    }
    return taps;
}

}  // namespace detail

/// Bicubic upsampling by an integer factor (center-aligned grid,
/// mirror borders). Factor 1 returns the input unchanged.
inline RasterBand upsample(const RasterBand& band, int factor) {
    if (factor < 1)
        throw ParameterError("upsample factor must be at least 1, got " +
                             std::to_string(factor));
    if (factor == 1) return band;

    const int w = band.width();
    const int h = band.height();
    const int ow = w * factor;
    const int oh = h * factor;
    const std::vector<detail::CubicTap> xt = detail::cubic_taps(ow, factor);
    const std::vector<detail::CubicTap> yt = detail::cubic_taps(oh, factor);

    // horizontal pass: w x h -> ow x h
    std::vector<double> mid(static_cast<std::size_t>(ow) * h);
    const std::vector<double>& src = band.samples();
    for (int y = 0; y < h; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * w;
        double* out = mid.data() + static_cast<std::size_t>(y) * ow;
        for (int x = 0; x < ow; ++x) {
            const detail::CubicTap& t = xt[x];
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += t.w[k] * row[mirror_index(t.base + k, w)];
            out[x] = acc;
        }
    }

    // vertical pass: ow x h -> ow x oh
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        const detail::CubicTap& t = yt[y];
        int sy[4];
        for (int k = 0; k < 4; ++k) sy[k] = mirror_index(t.base + k, h);
        double* orow = out.data() + static_cast<std::size_t>(y) * ow;
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += t.w[k] * mid[static_cast<std::size_t>(sy[k]) * ow + x];
            orow[x] = acc;
        }
    }
    return RasterBand(ow, oh, std::move(out));
}

/// Degradation operator: boxcar prefilter of size `factor` followed by
/// decimation, i.e. the mean of each factor x factor block. Preserves
/// the global mean.
inline RasterBand downsample(const RasterBand& band, int factor) {
    if (factor < 1)
        throw ParameterError("downsample factor must be at least 1, got " +
                             std::to_string(factor));
    if (factor == 1) return band;
    if (band.width() % factor != 0 || band.height() % factor != 0)
        throw ParameterError("band dimensions " + std::to_string(band.width()) +
                             "x" + std::to_string(band.height()) +
                             " not divisible by factor " + std::to_string(factor));

    const int ow = band.width() / factor;
    const int oh = band.height() / factor;
    const double norm = 1.0 / (static_cast<double>(factor) * factor);
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    const std::vector<double>& src = band.samples();
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int by = 0; by < factor; ++by) {
                const double* row = src.data() +
                                    static_cast<std::size_t>(y * factor + by) * band.width() +
                                    static_cast<std::size_t>(x) * factor;
                for (int bx = 0; bx < factor; ++bx) acc += row[bx];
            }
            out[static_cast<std::size_t>(y) * ow + x] = acc * norm;
        }
    }
    return RasterBand(ow, oh, std::move(out));
}

inline MultiBandImage upsample(const MultiBandImage& image, int factor) {
    std::vector<RasterBand> bands;
    bands.reserve(image.band_count());
    for (const RasterBand& b : image.bands()) bands.push_back(upsample(b, factor));
    return MultiBandImage(std::move(bands));
}

inline MultiBandImage downsample(const MultiBandImage& image, int factor) {
    std::vector<RasterBand> bands;
    bands.reserve(image.band_count());
    for (const RasterBand& b : image.bands()) bands.push_back(downsample(b, factor));
    return MultiBandImage(std::move(bands));
}

/// Affine histogram match: shifts and scales `source` so its mean and
/// standard deviation equal those of `reference`.
inline RasterBand histogram_match(const RasterBand& source,
                                  const RasterBand& reference) {
    const double ms = mean(source);
    const double ss = stddev(source);
    if (ss == 0.0)
        throw DegenerateInputError("histogram match needs non-constant source");
    const double mr = mean(reference);
    const double gain = stddev(reference) / ss;
    std::vector<double> out(source.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (source.samples()[i] - ms) * gain + mr;
    return RasterBand(source.width(), source.height(), std::move(out));
}

}  // namespace pansharp
