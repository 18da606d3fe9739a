#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "kdefft/errors.hpp"
#include "kdefft/ndarray.hpp"

namespace kdefft {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// Smallest power of two >= M_k + 2 L_k per dimension, so the linear convolution
/// of a size-M signal with a size-(2L+1) kernel never wraps inside the window.
inline std::vector<std::size_t> choose_pad_sizes(const std::vector<std::size_t>& sizes,
                                                 const std::vector<int>& support) {
    if (sizes.size() != support.size()) throw ShapeMismatch("sizes and support lengths differ");
    std::vector<std::size_t> pad(sizes.size());
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (support[k] < 1 || static_cast<std::size_t>(support[k]) > sizes[k] - 1)
            throw BadSupport("support must lie in [1, M_k - 1]");
        pad[k] = next_power_of_two(sizes[k] + 2 * static_cast<std::size_t>(support[k]));
    }
    return pad;
}

namespace detail {

inline std::vector<std::complex<double>> fft_twiddles(std::size_t n) {
    std::vector<std::complex<double>> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k)
        w[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    return w;
}

/// Iterative radix-2 transform, unscaled in both directions.
inline void fft_pow2(std::complex<double>* a, std::size_t n, bool inverse,
                     const std::vector<std::complex<double>>& w) {
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> tw = w[k * step];
                if (inverse) tw = std::conj(tw);
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * tw;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

/// O(n^2) fallback for small non-power-of-two lengths; unscaled.
inline void dft_naive(std::complex<double>* a, std::size_t n, bool inverse) {
    std::vector<std::complex<double>> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += a[j] * std::polar(1.0, sign * 2.0 * std::numbers::pi *
                                            static_cast<double>(k * j % n) / static_cast<double>(n));
        out[k] = s;
    }
    std::copy(out.begin(), out.end(), a);
}

/// Radix-2 transform along a strided axis, vectorized across the contiguous
/// inner block: each butterfly combines two contiguous runs of `stride`
/// elements with one constant twiddle, so the inner loop streams memory.
inline void fft_pow2_batched(std::complex<double>* a, std::size_t len, std::size_t stride,
                             bool inverse, const std::vector<std::complex<double>>& w) {
    for (std::size_t i = 1, j = 0; i < len; ++i) {
        std::size_t bit = len >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap_ranges(a + i * stride, a + (i + 1) * stride, a + j * stride);
    }
    for (std::size_t half = 1; half < len; half <<= 1) {
        const std::size_t step = len / (2 * half);
        for (std::size_t i = 0; i < len; i += 2 * half) {
            for (std::size_t k = 0; k < half; ++k) {
                std::complex<double> tw = w[k * step];
                if (inverse) tw = std::conj(tw);
                const double tr = tw.real(), ti = tw.imag();
                double* u = reinterpret_cast<double*>(a + (i + k) * stride);
                double* v = reinterpret_cast<double*>(a + (i + k + half) * stride);
                for (std::size_t c = 0; c < 2 * stride; c += 2) {
                    const double vr = v[c] * tr - v[c + 1] * ti;
                    const double vi = v[c] * ti + v[c + 1] * tr;
                    const double ur = u[c], ui = u[c + 1];
                    u[c] = ur + vr;
                    u[c + 1] = ui + vi;
                    v[c] = ur - vr;
                    v[c + 1] = ui - vi;
                }
            }
        }
    }
}

inline void transform_axis(NdArray<std::complex<double>>& a, std::size_t axis, bool inverse) {
    const std::size_t len = a.shape()[axis];
    if (len == 1) return;
    const std::size_t stride = a.strides()[axis];
    const std::size_t total = a.size();
    const std::size_t block = len * stride;

    std::vector<std::complex<double>> tw;
    const bool pow2 = is_power_of_two(len);
    if (pow2) tw = fft_twiddles(len);

    if (pow2 && stride > 1) {
        for (std::size_t outer = 0; outer < total; outer += block)
            fft_pow2_batched(a.data() + outer, len, stride, inverse, tw);
        return;
    }

    std::vector<std::complex<double>> line(len);
    for (std::size_t outer = 0; outer < total; outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            std::complex<double>* base = a.data() + outer + inner;
            if (stride == 1) {
                // zero lines transform to zero; the zero-padded embeddings
                // leave large all-zero stretches worth skipping
                bool zero = true;
                for (std::size_t j = 0; j < len; ++j)
                    if (base[j] != std::complex<double>{}) { zero = false; break; }
                if (zero) continue;
                if (pow2) fft_pow2(base, len, inverse, tw);
                else dft_naive(base, len, inverse);
            } else {
                for (std::size_t j = 0; j < len; ++j) line[j] = base[j * stride];
                if (pow2) fft_pow2(line.data(), len, inverse, tw);
                else dft_naive(line.data(), len, inverse);
                for (std::size_t j = 0; j < len; ++j) base[j * stride] = line[j];
            }
        }
    }
}

}  // namespace detail

/// d-dimensional DFT, unscaled; callers account for the 1/prod(P) factor.
/// The contiguous axis goes first so its zero-line skip sees the raw padding.
inline void fft_nd(NdArray<std::complex<double>>& a, bool inverse) {
    for (std::size_t axis = a.rank(); axis-- > 0;) detail::transform_axis(a, axis, inverse);
}

/// Circular convolution s[p] = sum_q a[q] b[(p - q) mod P] via the convolution
/// theorem. The transform normalization is absorbed here; the imaginary residue
/// of the inverse transform is checked against 1e-9 * max |real| and dropped.
inline NdArray<double> circular_convolve(const NdArray<double>& a, const NdArray<double>& b) {
    if (a.shape() != b.shape()) throw ShapeMismatch("convolution operands must share a shape");

    // Both inputs are real, so one transform of z = a + i*b carries both
    // spectra: A(p) = (Z(p) + conj(Z(-p)))/2 and B(p) = (Z(p) - conj(Z(-p)))/(2i),
    // hence A(p)*B(p) = (Z(p)^2 - conj(Z(-p))^2) / (4i). Balancing the two
    // operands' norms first keeps the cancellation error of that difference at
    // the level of separate transforms; the scaling cancels in the product.
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) na += a[i] * a[i];
    for (std::size_t i = 0; i < b.size(); ++i) nb += b[i] * b[i];
    if (na == 0.0 || nb == 0.0) return NdArray<double>(a.shape());
    const double gamma = std::sqrt(std::sqrt(na / nb));
    NdArray<std::complex<double>> z(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) z[i] = {a[i] / gamma, b[i] * gamma};
    fft_nd(z, false);

    NdArray<std::complex<double>> s(a.shape());
    const auto& shape = z.shape();
    const auto& strides = z.strides();
    std::vector<std::size_t> idx(shape.size(), 0);
    std::size_t flat = 0;
    do {
        std::size_t rev = 0;
        for (std::size_t k = 0; k < shape.size(); ++k)
            rev += (idx[k] == 0 ? 0 : shape[k] - idx[k]) * strides[k];
        const std::complex<double> num = z[flat] * z[flat] - std::conj(z[rev]) * std::conj(z[rev]);
        s[flat] = {0.25 * num.imag(), -0.25 * num.real()};  // num / (4i)
        ++flat;
    } while (NdArray<std::complex<double>>::next_index(idx, shape));
    fft_nd(s, true);

    const double scale = 1.0 / static_cast<double>(a.size());
    NdArray<double> out(a.shape());
    double max_real = 0.0;
    double max_imag = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = s[i].real() * scale;
        max_real = std::max(max_real, std::abs(s[i].real()));
        max_imag = std::max(max_imag, std::abs(s[i].imag()));
    }
    if (max_imag > 1e-9 * std::max(max_real, 1e-300))
        throw NumericalResidue("inverse transform left a non-negligible imaginary part");
    return out;
}

}  // namespace kdefft
