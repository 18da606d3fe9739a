#pragma once

// Independent brute-force reference implementations. These deliberately avoid
// the library's fast paths so tests compare two routes.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "kdefft/grid.hpp"
#include "kdefft/kernel.hpp"
#include "kdefft/ndarray.hpp"

namespace oracles {

using kdefft::NdArray;

/// O(P^2) circular convolution by definition.
inline NdArray<double> brute_circular_convolve(const NdArray<double>& a, const NdArray<double>& b) {
    const auto& shape = a.shape();
    NdArray<double> out(shape);
    std::vector<std::size_t> p(shape.size(), 0);
    std::size_t pflat = 0;
    do {
        double s = 0.0;
        std::vector<std::size_t> q(shape.size(), 0);
        std::size_t qflat = 0;
        do {
            std::size_t roff = 0;
            for (std::size_t k = 0; k < shape.size(); ++k) {
                const std::size_t r = (p[k] + shape[k] - q[k]) % shape[k];
                roff += r * b.strides()[k];
            }
            s += a[qflat++] * b[roff];
        } while (NdArray<double>::next_index(q, shape));
        out[pflat++] = s;
    } while (NdArray<double>::next_index(p, shape));
    return out;
}

/// Gather-form truncated convolution: for each output node, loop over the whole
/// kernel box and read counts where defined.
inline NdArray<double> gather_binned_direct(const kdefft::GridSpec& grid,
                                            const kdefft::GridCounts& counts,
                                            const kdefft::KernelWeights& kw) {
    NdArray<double> out(grid.sizes);
    const int d = grid.dim;
    std::vector<std::size_t> box(d);
    for (int k = 0; k < d; ++k) box[k] = 2 * static_cast<std::size_t>(kw.support[k]) + 1;

    std::vector<std::size_t> j(d, 0);
    std::size_t jflat = 0;
    do {
        double s = 0.0;
        std::vector<std::size_t> li(d, 0);
        std::size_t kflat = 0;
        do {
            bool inside = true;
            std::size_t coff = 0;
            for (int k = 0; k < d; ++k) {
                const long long src = static_cast<long long>(j[k]) -
                                      (static_cast<long long>(li[k]) - kw.support[k]);
                if (src < 0 || src >= static_cast<long long>(grid.sizes[k])) { inside = false; break; }
                coff += static_cast<std::size_t>(src) * counts.values.strides()[k];
            }
            if (inside) s += counts.values[coff] * kw.values[kflat];
            ++kflat;
        } while (NdArray<double>::next_index(li, box));
        out[jflat++] = s;
    } while (NdArray<double>::next_index(j, grid.sizes));
    return out;
}

/// Matrix inverse and determinant by Gauss-Jordan with partial pivoting.
struct InverseDet {
    std::vector<double> inverse;
    double det = 0.0;
};

inline InverseDet gauss_jordan(std::vector<double> a, int d) {
    InverseDet r;
    r.inverse.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) r.inverse[static_cast<std::size_t>(i) * d + i] = 1.0;
    r.det = 1.0;
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int i = col + 1; i < d; ++i)
            if (std::abs(a[static_cast<std::size_t>(i) * d + col]) >
                std::abs(a[static_cast<std::size_t>(piv) * d + col]))
                piv = i;
        if (piv != col) {
            for (int k = 0; k < d; ++k) {
                std::swap(a[static_cast<std::size_t>(piv) * d + k], a[static_cast<std::size_t>(col) * d + k]);
                std::swap(r.inverse[static_cast<std::size_t>(piv) * d + k],
                          r.inverse[static_cast<std::size_t>(col) * d + k]);
            }
            r.det = -r.det;
        }
        const double pivot = a[static_cast<std::size_t>(col) * d + col];
        r.det *= pivot;
        for (int k = 0; k < d; ++k) {
            a[static_cast<std::size_t>(col) * d + k] /= pivot;
            r.inverse[static_cast<std::size_t>(col) * d + k] /= pivot;
        }
        for (int i = 0; i < d; ++i) {
            if (i == col) continue;
            const double f = a[static_cast<std::size_t>(i) * d + col];
            if (f == 0.0) continue;
            for (int k = 0; k < d; ++k) {
                a[static_cast<std::size_t>(i) * d + k] -= f * a[static_cast<std::size_t>(col) * d + k];
                r.inverse[static_cast<std::size_t>(i) * d + k] -=
                    f * r.inverse[static_cast<std::size_t>(col) * d + k];
            }
        }
    }
    return r;
}

/// Independent naive KDE: explicit H^{-1} and |H| from Gauss-Jordan.
inline std::vector<double> naive_kde_indep(const kdefft::SampleMatrix& data,
                                           const std::vector<double>& h_entries, int d,
                                           const kdefft::SampleMatrix& eval_points) {
    const InverseDet id = gauss_jordan(h_entries, d);
    const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * d) / std::sqrt(id.det);
    std::vector<double> out(eval_points.n, 0.0);
    for (std::size_t m = 0; m < eval_points.n; ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i < data.n; ++i) {
            double q = 0.0;
            for (int a = 0; a < d; ++a) {
                const double ua = eval_points.points[m * d + a] - data.points[i * d + a];
                for (int b = 0; b < d; ++b) {
                    const double ub = eval_points.points[m * d + b] - data.points[i * d + b];
                    q += ua * id.inverse[static_cast<std::size_t>(a) * d + b] * ub;
                }
            }
            s += norm * std::exp(-0.5 * q);
        }
        out[m] = s / static_cast<double>(data.n);
    }
    return out;
}

}  // namespace oracles
