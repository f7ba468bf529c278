#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pansharp/fusion.hpp"
#include "pansharp/raster.hpp"
#include "pansharp/resample.hpp"

namespace pansharp {

/// Pearson linear correlation coefficient.
inline double correlation(const RasterBand& a, const RasterBand& b) {
    if (!a.same_dims(b)) throw StructuralError("correlation needs equal dims");
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a.samples()[i] - ma;
        const double db = b.samples()[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw DegenerateInputError("correlation is undefined for constant bands");
    return sab / std::sqrt(saa * sbb);
}

/// Mean of the fused-vs-PAN and fused-vs-MS correlations, averaged over
/// bands: 0.5 * [mean_i CC(F_i, PAN) + mean_i CC(F_i, MS_i)].
inline double avg_correlation(const MultiBandImage& fused, const MultiBandImage& ms_up,
                              const RasterBand& pan) {
    if (fused.band_count() != ms_up.band_count())
        throw StructuralError("band counts disagree");
    double cc_pan = 0.0, cc_ms = 0.0;
    for (int i = 0; i < fused.band_count(); ++i) {
        cc_pan += correlation(fused.band(i), pan);
        cc_ms += correlation(fused.band(i), ms_up.band(i));
    }
    return 0.5 * (cc_pan + cc_ms) / fused.band_count();
}

/// Joint intensity histogram. Each band is binned linearly over its own
/// [min, max] range; the maximum maps to the top bin. A constant band
/// occupies a single bin.
struct JointHistogram {
    int bins = 0;
    std::vector<std::int64_t> counts;      // bins x bins, row = bin of a
    std::vector<std::int64_t> marginal_a;  // row sums
    std::vector<std::int64_t> marginal_b;  // column sums

    static JointHistogram build(const RasterBand& a, const RasterBand& b, int bins) {
        if (bins < 2) throw ParameterError("histogram needs at least 2 bins");
        if (!a.same_dims(b)) throw StructuralError("joint histogram needs equal dims");

        auto bin_of = [bins](const RasterBand& band) {
            const auto [lo, hi] = min_max(band);
            const double scale = hi > lo ? bins / (hi - lo) : 0.0;
            std::vector<int> idx(band.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                int k = static_cast<int>((band.samples()[i] - lo) * scale);
                idx[i] = std::min(k, bins - 1);
            }
            return idx;
        };

        JointHistogram h;
        h.bins = bins;
        h.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
        h.marginal_a.assign(bins, 0);
        h.marginal_b.assign(bins, 0);
        const std::vector<int> ia = bin_of(a);
        const std::vector<int> ib = bin_of(b);
        for (std::size_t i = 0; i < ia.size(); ++i) {
            ++h.counts[static_cast<std::size_t>(ia[i]) * bins + ib[i]];
            ++h.marginal_a[ia[i]];
            ++h.marginal_b[ib[i]];
        }
        return h;
    }
};

/// Mutual information in nats; zero-probability cells contribute 0.
inline double mutual_information(const RasterBand& a, const RasterBand& b, int bins) {
    const JointHistogram h = JointHistogram::build(a, b, bins);
    const double total = static_cast<double>(a.size());
    double mi = 0.0;
    for (int x = 0; x < h.bins; ++x) {
        const std::int64_t na = h.marginal_a[x];
        if (na == 0) continue;
        for (int y = 0; y < h.bins; ++y) {
            const std::int64_t nab = h.counts[static_cast<std::size_t>(x) * h.bins + y];
            if (nab == 0) continue;
            const double pab = nab / total;
            const double pa = na / total;
            const double pb = h.marginal_b[y] / total;
            mi += pab * std::log(pab / (pa * pb));
        }
    }
    return mi;
}

inline double avg_mutual_information(const MultiBandImage& fused,
                                     const MultiBandImage& ms_up, const RasterBand& pan,
                                     int bins) {
    if (fused.band_count() != ms_up.band_count())
        throw StructuralError("band counts disagree");
    double mi_pan = 0.0, mi_ms = 0.0;
    for (int i = 0; i < fused.band_count(); ++i) {
        mi_pan += mutual_information(fused.band(i), pan, bins);
        mi_ms += mutual_information(fused.band(i), ms_up.band(i), bins);
    }
    return 0.5 * (mi_pan + mi_ms) / fused.band_count();
}

/// Universal image quality index averaged over non-overlapping
/// window x window blocks (partial edge blocks are dropped):
/// Q = 4*cov*m_a*m_b / ((var_a + var_b) * (m_a^2 + m_b^2)).
/// Blocks with a zero denominator are skipped.
inline double q_index(const RasterBand& a, const RasterBand& b, int window = 8) {
    if (window < 2) throw ParameterError("q_index window must be at least 2");
    if (!a.same_dims(b)) throw StructuralError("q_index needs equal dims");

    const int bw = a.width() / window;
    const int bh = a.height() / window;
    const double n = static_cast<double>(window) * window;
    double sum = 0.0;
    long blocks = 0;
    for (int by = 0; by < bh; ++by) {
        for (int bx = 0; bx < bw; ++bx) {
            double sa = 0.0, sb = 0.0;
            for (int y = 0; y < window; ++y) {
                const std::size_t row =
                    static_cast<std::size_t>(by * window + y) * a.width() + bx * window;
                for (int x = 0; x < window; ++x) {
                    sa += a.samples()[row + x];
                    sb += b.samples()[row + x];
                }
            }
            const double ma = sa / n;
            const double mb = sb / n;
            double va = 0.0, vb = 0.0, cov = 0.0;
            for (int y = 0; y < window; ++y) {
                const std::size_t row =
                    static_cast<std::size_t>(by * window + y) * a.width() + bx * window;
                for (int x = 0; x < window; ++x) {
                    const double da = a.samples()[row + x] - ma;
                    const double db = b.samples()[row + x] - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            }
            const double den = (va + vb) * (ma * ma + mb * mb);
            if (den == 0.0) continue;  // fully flat or zero-mean block
            sum += 4.0 * cov * ma * mb / den;  // the 1/n factors cancel
            ++blocks;
        }
    }
    if (blocks == 0)
        throw DegenerateInputError("q_index: no usable blocks");
    return sum / static_cast<double>(blocks);
}

struct QnrResult {
    double d_lambda = 0.0;
    double d_s = 0.0;
    double qnr = 0.0;
};

/// No-reference quality protocol: spectral distortion D_lambda compares
/// inter-band Q at the fused and original scales, spatial distortion
/// D_s compares band-to-PAN Q at both scales (PAN degraded by `ratio`
/// for the original scale); QNR = (1 - D_lambda) * (1 - D_s).
inline QnrResult qnr(const MultiBandImage& fused, const MultiBandImage& ms_orig,
                     const RasterBand& pan, int ratio, int q_window = 8) {
    const int n = fused.band_count();
    if (n != ms_orig.band_count())
        throw StructuralError("fused and original band counts disagree");
    if (n < 2) throw StructuralError("QNR needs at least 2 bands");
    if (fused.width() != pan.width() || fused.height() != pan.height())
        throw StructuralError("fused image must live on the PAN grid");
    if (ratio < 1 || ms_orig.width() * ratio != pan.width() ||
        ms_orig.height() * ratio != pan.height())
        throw StructuralError("original MS dims must be PAN dims / ratio");

    double d_lambda = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            d_lambda += std::abs(q_index(fused.band(i), fused.band(j), q_window) -
                                 q_index(ms_orig.band(i), ms_orig.band(j), q_window));
    d_lambda = 2.0 * d_lambda / (static_cast<double>(n) * (n - 1));

    const RasterBand pan_degraded = downsample(pan, ratio);
    double d_s = 0.0;
    for (int i = 0; i < n; ++i)
        d_s += std::abs(q_index(fused.band(i), pan, q_window) -
                        q_index(ms_orig.band(i), pan_degraded, q_window));
    d_s /= static_cast<double>(n);

    return QnrResult{d_lambda, d_s, (1.0 - d_lambda) * (1.0 - d_s)};
}

/// One evaluation row: a fusion method with its scores, or the error
/// that stopped it.
struct MetricsReport {
    FusionMethod method = FusionMethod::wavelet_hpm;
    double cc_avg = 0.0;
    double mi_avg = 0.0;
    double d_lambda = 0.0;
    double d_s = 0.0;
    double qnr = 0.0;
    bool failed = false;
    std::string error;

    bool valid() const {
        if (failed) return false;
        return cc_avg >= -1.0 && cc_avg <= 1.0 && mi_avg >= 0.0 &&
               d_lambda >= 0.0 && d_lambda <= 1.0 && d_s >= 0.0 && d_s <= 1.0 &&
               qnr >= 0.0 && qnr <= 1.0 &&
               std::abs(qnr - (1.0 - d_lambda) * (1.0 - d_s)) <= 1e-12;
    }
};

}  // namespace pansharp
