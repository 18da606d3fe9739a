#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "kdefft/errors.hpp"
#include "kdefft/linalg.hpp"
#include "kdefft/ndarray.hpp"

namespace kdefft {

/// n x d sample, row-major.
struct SampleMatrix {
    std::size_t n = 0;
    int dim = 0;
    std::vector<double> points;

    const double* row(std::size_t i) const { return points.data() + i * dim; }
};

/// Equally spaced evaluation grid, node j in dimension k at lower[k] + j*binwidths[k].
struct GridSpec {
    int dim = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::size_t> sizes;
    std::vector<double> binwidths;

    double node(int k, std::size_t j) const { return lower[k] + static_cast<double>(j) * binwidths[k]; }
};

struct GridCounts {
    NdArray<double> values;
    double total = 0.0;       // n
    std::size_t clamped = 0;  // points outside the grid, clamped to the boundary cell
};

inline GridSpec make_grid(const SampleMatrix& data, const std::vector<std::size_t>& sizes,
                          const std::vector<double>& extension) {
    if (data.n == 0 || data.dim == 0) throw DegenerateRange("empty sample");
    if (static_cast<int>(sizes.size()) != data.dim || static_cast<int>(extension.size()) != data.dim)
        throw BadGridSize("grid sizes / extension must match sample dimension");
    GridSpec g;
    g.dim = data.dim;
    g.sizes = sizes;
    g.lower.resize(data.dim);
    g.upper.resize(data.dim);
    g.binwidths.resize(data.dim);
    for (int k = 0; k < data.dim; ++k) {
        if (sizes[k] < 2) throw BadGridSize("grid size must be at least 2 per dimension");
        if (extension[k] < 0.0) throw BadGridSize("grid extension must be nonnegative");
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < data.n; ++i) {
            const double v = data.points[i * data.dim + k];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        g.lower[k] = lo - extension[k];
        g.upper[k] = hi + extension[k];
        if (!(g.upper[k] > g.lower[k]))
            throw DegenerateRange("degenerate range in dimension " + std::to_string(k));
        g.binwidths[k] = (g.upper[k] - g.lower[k]) / static_cast<double>(sizes[k] - 1);
    }
    return g;
}

/// Per-dimension grid extension tau * sqrt(H_kk), enough to hold the kernel tails.
inline std::vector<double> default_extension(const BandwidthMatrix& h, double tau) {
    std::vector<double> ext(h.dim());
    for (int k = 0; k < h.dim(); ++k) ext[k] = tau * std::sqrt(h.entry(k, k));
    return ext;
}

/// Multilinear binning: each point spreads unit weight over the 2^d nodes of its cell.
/// Points outside the grid are clamped to the boundary cell and counted in `clamped`.
inline GridCounts linear_binning(const SampleMatrix& data, const GridSpec& grid) {
    if (grid.dim != data.dim) throw DimensionMismatch("grid and sample dimensions differ");
    const int d = grid.dim;
    GridCounts out;
    out.values = NdArray<double>(grid.sizes);
    out.total = static_cast<double>(data.n);

    std::vector<std::size_t> base(d);
    std::vector<double> frac(d);
    const auto& strides = out.values.strides();
    for (std::size_t i = 0; i < data.n; ++i) {
        bool outside = false;
        for (int k = 0; k < d; ++k) {
            double t = (data.points[i * d + k] - grid.lower[k]) / grid.binwidths[k];
            const double tmax = static_cast<double>(grid.sizes[k] - 1);
            if (t < 0.0) { t = 0.0; outside = true; }
            if (t > tmax) { t = tmax; outside = true; }
            std::size_t j = std::min(static_cast<std::size_t>(t), grid.sizes[k] - 2);
            base[k] = j;
            frac[k] = t - static_cast<double>(j);
        }
        if (outside) ++out.clamped;
        for (unsigned corner = 0; corner < (1u << d); ++corner) {
            double w = 1.0;
            std::size_t off = 0;
            for (int k = 0; k < d; ++k) {
                const bool hi = (corner >> k) & 1u;
                w *= hi ? frac[k] : 1.0 - frac[k];
                off += (base[k] + (hi ? 1 : 0)) * strides[k];
            }
            out.values[off] += w;
        }
    }
    return out;
}

}  // namespace kdefft
