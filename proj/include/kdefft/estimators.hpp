#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "kdefft/errors.hpp"
#include "kdefft/fft.hpp"
#include "kdefft/grid.hpp"
#include "kdefft/kernel.hpp"
#include "kdefft/linalg.hpp"
#include "kdefft/ndarray.hpp"

namespace kdefft {

enum class Method { naive, binned_direct, fft_wand, fft_corrected };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::naive: return "naive";
        case Method::binned_direct: return "binned-direct";
        case Method::fft_wand: return "fft-wand";
        case Method::fft_corrected: return "fft-corrected";
    }
    return "?";
}

/// Density estimates at the grid nodes.
struct DensityGrid {
    GridSpec grid;
    NdArray<double> values;
    Method method = Method::binned_direct;
};

/// Exact O(m n) kernel sum; the accuracy reference, not a fast path.
inline std::vector<double> naive_kde(const SampleMatrix& data, const BandwidthMatrix& h,
                                     const SampleMatrix& eval_points) {
    if (data.dim != h.dim() || eval_points.dim != h.dim())
        throw DimensionMismatch("sample, bandwidth and evaluation dimensions differ");
    const int d = data.dim;
    std::vector<double> out(eval_points.n, 0.0);
    std::vector<double> diff(d);
    for (std::size_t m = 0; m < eval_points.n; ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i < data.n; ++i) {
            for (int k = 0; k < d; ++k) diff[k] = eval_points.points[m * d + k] - data.points[i * d + k];
            s += gaussian_kernel(diff, h);
        }
        out[m] = s / static_cast<double>(data.n);
    }
    return out;
}

namespace detail {

// Scatter the kernel block of one source node into the output, clipped to the grid.
inline void scatter_source(double weight, const NdArray<double>& kw_values,
                           const std::vector<int>& support, const std::vector<std::size_t>& sizes,
                           const std::vector<std::size_t>& src, NdArray<double>& out, int dim_k,
                           std::size_t out_off, std::size_t kw_off) {
    const long long m = static_cast<long long>(src[dim_k]);
    const long long lo = std::max<long long>(-support[dim_k], -m);
    const long long hi = std::min<long long>(support[dim_k], static_cast<long long>(sizes[dim_k]) - 1 - m);
    if (dim_k + 1 == static_cast<int>(sizes.size())) {
        double* op = out.data() + out_off + static_cast<std::size_t>(m + lo);
        const double* kp = kw_values.data() + kw_off + static_cast<std::size_t>(support[dim_k] + lo);
        const long long count = hi - lo + 1;
        for (long long i = 0; i < count; ++i) op[i] += weight * kp[i];
        return;
    }
    for (long long l = lo; l <= hi; ++l)
        scatter_source(weight, kw_values, support, sizes, src, out, dim_k + 1,
                       out_off + static_cast<std::size_t>(m + l) * out.strides()[dim_k],
                       kw_off + static_cast<std::size_t>(support[dim_k] + l) * kw_values.strides()[dim_k]);
}

}  // namespace detail

/// Truncated convolution sum evaluated directly; the equivalence oracle for the
/// FFT pipelines. Counts outside the grid box are treated as zero.
inline DensityGrid binned_kde_direct(const GridSpec& grid, const GridCounts& counts,
                                     const KernelWeights& kw) {
    if (counts.values.shape() != grid.sizes) throw ShapeMismatch("counts shape differs from grid");
    if (kw.dim != grid.dim) throw ShapeMismatch("kernel weights dimension differs from grid");
    DensityGrid out;
    out.grid = grid;
    out.method = Method::binned_direct;
    out.values = NdArray<double>(grid.sizes);

    std::vector<std::size_t> src(grid.dim, 0);
    std::size_t flat = 0;
    do {
        const double c = counts.values[flat++];
        if (c != 0.0)
            detail::scatter_source(c, kw.values, kw.support, grid.sizes, src, out.values, 0, 0, 0);
    } while (NdArray<double>::next_index(src, grid.sizes));
    return out;
}

/// Original wrap-around embedding: only the nonnegative-offset kernel block is
/// used, mirrored to the far edges. Correct for diagonal H only; retained to
/// reproduce the failure it causes for unconstrained H.
inline std::pair<NdArray<double>, NdArray<double>> embed_wand(const KernelWeights& kw,
                                                              const GridCounts& counts,
                                                              const std::vector<std::size_t>& pad) {
    if (pad.size() != counts.values.shape().size() || kw.dim != static_cast<int>(pad.size()))
        throw ShapeMismatch("pad rank differs from operands");
    const int d = kw.dim;
    for (int k = 0; k < d; ++k)
        if (pad[k] < counts.values.shape()[k] + 2 * static_cast<std::size_t>(kw.support[k]))
            throw ShapeMismatch("pad sizes too small for the embedding");

    NdArray<double> kpad(pad);
    std::vector<std::size_t> box(d);
    for (int k = 0; k < d; ++k) box[k] = 2 * static_cast<std::size_t>(kw.support[k]) + 1;
    std::vector<std::size_t> idx(d, 0);
    do {
        // offset l_k = idx[k] - L_k; negative offsets wrap to P_k + l_k but read
        // the mirrored entry k_{|l|}
        std::size_t dst = 0;
        std::size_t moff = 0;
        for (int k = 0; k < d; ++k) {
            const long long l = static_cast<long long>(idx[k]) - kw.support[k];
            dst += (l >= 0 ? static_cast<std::size_t>(l) : pad[k] - static_cast<std::size_t>(-l)) *
                   kpad.strides()[k];
            moff += static_cast<std::size_t>(std::abs(l) + kw.support[k]) * kw.values.strides()[k];
        }
        kpad[dst] = kw.values[moff];
    } while (NdArray<double>::next_index(idx, box));

    NdArray<double> cpad(pad);
    std::vector<std::size_t> cidx(d, 0);
    std::size_t flat = 0;
    do {
        std::size_t dst = 0;
        for (int k = 0; k < d; ++k) dst += cidx[k] * cpad.strides()[k];
        cpad[dst] = counts.values[flat++];
    } while (NdArray<double>::next_index(cidx, counts.values.shape()));
    return {std::move(kpad), std::move(cpad)};
}

/// Corrected embedding: the full kernel block sits at the origin corner with no
/// reflection; the counts block is shifted by L_k per dimension. Zero-padding only.
inline std::pair<NdArray<double>, NdArray<double>> embed_corrected(const KernelWeights& kw,
                                                                   const GridCounts& counts,
                                                                   const std::vector<std::size_t>& pad) {
    if (pad.size() != counts.values.shape().size() || kw.dim != static_cast<int>(pad.size()))
        throw ShapeMismatch("pad rank differs from operands");
    const int d = kw.dim;
    for (int k = 0; k < d; ++k)
        if (pad[k] < counts.values.shape()[k] + 2 * static_cast<std::size_t>(kw.support[k]))
            throw ShapeMismatch("pad sizes too small for the embedding");

    NdArray<double> kpad(pad);
    std::vector<std::size_t> box(d);
    for (int k = 0; k < d; ++k) box[k] = 2 * static_cast<std::size_t>(kw.support[k]) + 1;
    std::vector<std::size_t> idx(d, 0);
    std::size_t flat = 0;
    do {
        std::size_t dst = 0;
        for (int k = 0; k < d; ++k) dst += idx[k] * kpad.strides()[k];
        kpad[dst] = kw.values[flat++];
    } while (NdArray<double>::next_index(idx, box));

    NdArray<double> cpad(pad);
    std::vector<std::size_t> cidx(d, 0);
    flat = 0;
    do {
        std::size_t dst = 0;
        for (int k = 0; k < d; ++k)
            dst += (cidx[k] + static_cast<std::size_t>(kw.support[k])) * cpad.strides()[k];
        cpad[dst] = counts.values[flat++];
    } while (NdArray<double>::next_index(cidx, counts.values.shape()));
    return {std::move(kpad), std::move(cpad)};
}

/// Pull the M-shaped window at `offset` out of the padded convolution output.
/// Tiny FFT-roundoff negatives are clamped to zero; anything below
/// -1e-12 * max|value| indicates a broken pipeline and raises.
inline DensityGrid extract(const NdArray<double>& s, const GridSpec& grid,
                           const std::vector<std::size_t>& offset, Method tag) {
    if (offset.size() != s.shape().size() || grid.sizes.size() != s.shape().size())
        throw ShapeMismatch("extraction rank differs from source");
    for (std::size_t k = 0; k < offset.size(); ++k)
        if (offset[k] + grid.sizes[k] > s.shape()[k])
            throw WindowOutOfRange("extraction window exceeds the padded array");

    DensityGrid out;
    out.grid = grid;
    out.method = tag;
    out.values = NdArray<double>(grid.sizes);

    double max_abs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) max_abs = std::max(max_abs, std::abs(s[i]));

    std::vector<std::size_t> idx(grid.sizes.size(), 0);
    std::size_t flat = 0;
    do {
        std::size_t srcoff = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) srcoff += (offset[k] + idx[k]) * s.strides()[k];
        double v = s[srcoff];
        if (v < 0.0) {
            if (v < -1e-12 * max_abs)
                throw NumericError("negative density beyond roundoff scale");
            v = 0.0;
        }
        out.values[flat++] = v;
    } while (NdArray<double>::next_index(idx, grid.sizes));
    return out;
}

/// FFT pipeline: pad, embed (wand or corrected), circular-convolve, extract.
/// For the corrected variant the result matches binned_kde_direct for any SPD H;
/// the wand variant matches only for diagonal H.
inline DensityGrid binned_kde_fft(const GridSpec& grid, const GridCounts& counts,
                                  const KernelWeights& kw, Method variant) {
    if (variant != Method::fft_wand && variant != Method::fft_corrected)
        throw ShapeMismatch("variant must be an FFT method");
    const auto pad = choose_pad_sizes(grid.sizes, kw.support);
    auto [kpad, cpad] = variant == Method::fft_wand ? embed_wand(kw, counts, pad)
                                                    : embed_corrected(kw, counts, pad);
    const NdArray<double> s = circular_convolve(cpad, kpad);
    std::vector<std::size_t> offset(grid.dim, 0);
    if (variant == Method::fft_corrected)
        for (int k = 0; k < grid.dim; ++k) offset[k] = 2 * static_cast<std::size_t>(kw.support[k]);
    return extract(s, grid, offset, variant);
}

}  // namespace kdefft
