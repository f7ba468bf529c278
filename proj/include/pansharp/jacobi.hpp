#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pansharp/errors.hpp"

namespace pansharp {

struct SymmetricEigen {
    std::vector<double> values;   // descending
    std::vector<double> vectors;  // n x n row-major, column k pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition of a small dense symmetric matrix
/// (intended for band covariance matrices, n <= 16 or so).
inline SymmetricEigen jacobi_eigen(std::vector<double> a, int n) {
    if (n < 1 || a.size() != static_cast<std::size_t>(n) * n)
        throw ParameterError("jacobi_eigen needs a square matrix");

    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

    auto at = [&](std::vector<double>& m, int r, int c) -> double& {
        return m[static_cast<std::size_t>(r) * n + c];
    };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
        double diag = 0.0;
        for (int p = 0; p < n; ++p) diag += at(a, p, p) * at(a, p, p);
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(a, p, q);
                if (apq == 0.0) continue;
                const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = at(a, p, p);
                const double aqq = at(a, q, q);
                at(a, p, p) = app - t * apq;
                at(a, q, q) = aqq + t * apq;
                at(a, p, q) = 0.0;
                at(a, q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = at(a, r, p);
                        const double arq = at(a, r, q);
                        at(a, r, p) = at(a, p, r) = arp - s * (arq + tau * arp);
                        at(a, r, q) = at(a, q, r) = arq + s * (arp - tau * arq);
                    }
                    const double vrp = at(v, r, p);
                    const double vrq = at(v, r, q);
                    at(v, r, p) = vrp - s * (vrq + tau * vrp);
                    at(v, r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return at(a, i, i) > at(a, j, j);
    });

    SymmetricEigen result;
    result.values.resize(n);
    result.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        result.values[k] = at(a, order[k], order[k]);
        for (int r = 0; r < n; ++r)
            result.vectors[static_cast<std::size_t>(r) * n + k] = at(v, r, order[k]);
    }
    return result;
}

}  // namespace pansharp
