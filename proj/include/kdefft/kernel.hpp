#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "kdefft/errors.hpp"
#include "kdefft/grid.hpp"
#include "kdefft/linalg.hpp"
#include "kdefft/ndarray.hpp"

namespace kdefft {

/// Scaled multivariate normal kernel K_H(u) = (2 pi)^{-d/2} |H|^{-1/2} exp(-u^T H^{-1} u / 2).
inline double gaussian_kernel(std::span<const double> u, const BandwidthMatrix& h) {
    if (static_cast<int>(u.size()) != h.dim())
        throw DimensionMismatch("kernel argument dimension differs from bandwidth");
    const double q = h.quad_form_inv(u);
    const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * h.dim()) / std::sqrt(h.det());
    return norm * std::exp(-0.5 * q);
}

/// Per-dimension truncation radius L_k = min(M_k - 1, ceil(tau sqrt(lambda_max) / delta_k)),
/// floored at 1 so the weight array never degenerates to a single cell.
inline std::vector<int> effective_support(const BandwidthMatrix& h, const GridSpec& grid, double tau) {
    const double r = tau * std::sqrt(h.lambda_max());
    std::vector<int> support(grid.dim);
    for (int k = 0; k < grid.dim; ++k) {
        const auto cap = static_cast<long long>(grid.sizes[k]) - 1;
        long long l = static_cast<long long>(std::ceil(r / grid.binwidths[k]));
        l = std::min(l, cap);
        support[k] = static_cast<int>(std::max(l, 1ll));
    }
    return support;
}

/// Kernel weights on lattice offsets, index l_k in [-L_k, L_k], scaled by 1/n.
struct KernelWeights {
    int dim = 0;
    std::vector<int> support;
    NdArray<double> values;  // shape 2*L_k + 1

    double at(std::span<const int> l) const {
        std::size_t off = 0;
        for (int k = 0; k < dim; ++k)
            off += static_cast<std::size_t>(l[k] + support[k]) * values.strides()[k];
        return values[off];
    }
};

inline KernelWeights kernel_weights(const GridSpec& grid, const BandwidthMatrix& h,
                                    const std::vector<int>& support, std::size_t n) {
    if (h.dim() != grid.dim) throw DimensionMismatch("bandwidth and grid dimensions differ");
    if (static_cast<int>(support.size()) != grid.dim) throw BadSupport("support size must match dimension");
    if (n < 1) throw BadSupport("sample size must be positive");
    for (int k = 0; k < grid.dim; ++k)
        if (support[k] < 1 || static_cast<std::size_t>(support[k]) > grid.sizes[k] - 1)
            throw BadSupport("support must lie in [1, M_k - 1]");

    KernelWeights kw;
    kw.dim = grid.dim;
    kw.support = support;
    std::vector<std::size_t> shape(grid.dim);
    for (int k = 0; k < grid.dim; ++k) shape[k] = 2 * static_cast<std::size_t>(support[k]) + 1;
    kw.values = NdArray<double>(shape);

    std::vector<std::size_t> idx(grid.dim, 0);
    std::vector<double> u(grid.dim);
    const double inv_n = 1.0 / static_cast<double>(n);
    std::size_t flat = 0;
    do {
        for (int k = 0; k < grid.dim; ++k)
            u[k] = grid.binwidths[k] * (static_cast<double>(idx[k]) - support[k]);
        kw.values[flat++] = inv_n * gaussian_kernel(u, h);
    } while (NdArray<double>::next_index(idx, shape));
    return kw;
}

}  // namespace kdefft
