#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pansharp/errors.hpp"

namespace pansharp {

// Mirror extension duplicates the edge sample ([b a | a b c | c b a]).
// With a normalized symmetric kernel this makes convolution doubly
// stochastic, so the global mean is preserved exactly.
inline int mirror_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

inline int periodic_index(int i, int n) {
    const int r = i % n;
    return r < 0 ? r + n : r;
}

/// A single-band 2-D grid of real-valued samples (row-major doubles).
/// Immutable after construction; all samples must be finite.
class RasterBand {
public:
    RasterBand(int width, int height)
        : RasterBand(width, height,
                     std::vector<double>(checked_size(width, height), 0.0)) {}

    RasterBand(int width, int height, std::vector<double> samples)
        : width_(width), height_(height), samples_(std::move(samples)) {
        if (width_ < 1 || height_ < 1)
            throw ParameterError("raster dimensions must be at least 1x1");
        if (samples_.size() != static_cast<std::size_t>(width_) * height_)
            throw ParameterError("sample count does not match " +
                                 std::to_string(width_) + "x" +
                                 std::to_string(height_));
        for (double v : samples_)
            if (!std::isfinite(v))
                throw ParameterError("raster contains non-finite samples");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return samples_.size(); }

    double at(int x, int y) const {
        return samples_[static_cast<std::size_t>(y) * width_ + x];
    }

    const std::vector<double>& samples() const { return samples_; }

    bool same_dims(const RasterBand& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    static std::size_t checked_size(int w, int h) {
        if (w < 1 || h < 1)
            throw ParameterError("raster dimensions must be at least 1x1");
        return static_cast<std::size_t>(w) * h;
    }

    int width_;
    int height_;
    std::vector<double> samples_;
};

/// Ordered collection of co-registered bands sharing one grid.
class MultiBandImage {
public:
    explicit MultiBandImage(std::vector<RasterBand> bands)
        : bands_(std::move(bands)) {
        if (bands_.empty())
            throw ParameterError("multiband image needs at least one band");
        for (const RasterBand& b : bands_)
            if (!b.same_dims(bands_.front()))
                throw StructuralError("bands disagree on dimensions");
    }

    int band_count() const { return static_cast<int>(bands_.size()); }
    int width() const { return bands_.front().width(); }
    int height() const { return bands_.front().height(); }

    const RasterBand& band(int i) const { return bands_[i]; }
    const std::vector<RasterBand>& bands() const { return bands_; }

private:
    std::vector<RasterBand> bands_;
};

/// Square normalized convolution kernel, symmetric under 180-degree
/// rotation (so correlation and convolution coincide).
class Kernel2D {
public:
    Kernel2D(int size, std::vector<double> weights)
        : size_(size), weights_(std::move(weights)) {
        if (size_ < 1 || size_ % 2 == 0)
            throw ParameterError("kernel size must be odd and positive");
        const std::size_t n = static_cast<std::size_t>(size_) * size_;
        if (weights_.size() != n)
            throw ParameterError("kernel weight count does not match size");
        double sum = 0.0;
        for (double w : weights_) sum += w;
        if (std::abs(sum - 1.0) > 1e-12)
            throw ParameterError("kernel weights must sum to 1");
        for (std::size_t i = 0; i < n; ++i)
            if (weights_[i] != weights_[n - 1 - i])
                throw ParameterError("kernel must be rotation-symmetric");
    }

    static Kernel2D boxcar(int window) {
        const double w = 1.0 / (static_cast<double>(window) * window);
        return Kernel2D(window,
                        std::vector<double>(static_cast<std::size_t>(window) * window, w));
    }

    // 5x5 outer product of the B3 cubic-spline taps [1,4,6,4,1]/16.
    static Kernel2D b3_spline() {
        static constexpr double taps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16,
                                           4.0 / 16, 1.0 / 16};
        std::vector<double> w(25);
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 5; ++c) w[r * 5 + c] = taps[r] * taps[c];
        return Kernel2D(5, std::move(w));
    }

    int size() const { return size_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    int size_;
    std::vector<double> weights_;
};

inline RasterBand convolve_mirror(const RasterBand& band, const Kernel2D& kernel) {
    const int w = band.width();
    const int h = band.height();
    const int r = kernel.size() / 2;
    const std::vector<double>& k = kernel.weights();
    const std::vector<double>& src = band.samples();
    std::vector<double> out(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ky = -r; ky <= r; ++ky) {
                const int sy = mirror_index(y + ky, h);
                const double* row = src.data() + static_cast<std::size_t>(sy) * w;
                const double* kr = k.data() + static_cast<std::size_t>(ky + r) * kernel.size();
                for (int kx = -r; kx <= r; ++kx)
                    acc += kr[kx + r] * row[mirror_index(x + kx, w)];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return RasterBand(w, h, std::move(out));
}

inline double mean(const RasterBand& band) {
    double s = 0.0;
    for (double v : band.samples()) s += v;
    return s / static_cast<double>(band.size());
}

// Population standard deviation.
inline double stddev(const RasterBand& band) {
    const double m = mean(band);
    double s = 0.0;
    for (double v : band.samples()) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(band.size()));
}

inline std::pair<double, double> min_max(const RasterBand& band) {
    const auto [lo, hi] =
        std::minmax_element(band.samples().begin(), band.samples().end());
    return {*lo, *hi};
}

inline double max_abs_diff(const RasterBand& a, const RasterBand& b) {
    if (!a.same_dims(b)) throw StructuralError("bands disagree on dimensions");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
    return m;
}

}  // namespace pansharp
