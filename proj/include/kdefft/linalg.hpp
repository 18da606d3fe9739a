#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "kdefft/errors.hpp"

namespace kdefft {

struct SymEigen {
    std::vector<double> values;   // unordered
    std::vector<double> vectors;  // d x d row-major, column j pairs with values[j]
};

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix (row-major).
inline SymEigen sym_eigen(std::vector<double> a, int d) {
    SymEigen e;
    e.vectors.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) e.vectors[static_cast<std::size_t>(i) * d + i] = 1.0;

    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) s += a[static_cast<std::size_t>(i) * d + j] * a[static_cast<std::size_t>(i) * d + j];
        return std::sqrt(2.0 * s);
    };
    double frob = 0.0;
    for (double v : a) frob += v * v;
    frob = std::sqrt(frob);
    const double tol = std::max(frob, 1.0) * 1e-15;

    for (int sweep = 0; sweep < 64 && off_norm() > tol; ++sweep) {
        for (int p = 0; p < d - 1; ++p) {
            for (int q = p + 1; q < d; ++q) {
                const double apq = a[static_cast<std::size_t>(p) * d + q];
                if (std::abs(apq) <= tol * 1e-2) continue;
                const double app = a[static_cast<std::size_t>(p) * d + p];
                const double aqq = a[static_cast<std::size_t>(q) * d + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = a[static_cast<std::size_t>(k) * d + p];
                    const double akq = a[static_cast<std::size_t>(k) * d + q];
                    a[static_cast<std::size_t>(k) * d + p] = c * akp - s * akq;
                    a[static_cast<std::size_t>(k) * d + q] = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = a[static_cast<std::size_t>(p) * d + k];
                    const double aqk = a[static_cast<std::size_t>(q) * d + k];
                    a[static_cast<std::size_t>(p) * d + k] = c * apk - s * aqk;
                    a[static_cast<std::size_t>(q) * d + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = e.vectors[static_cast<std::size_t>(k) * d + p];
                    const double vkq = e.vectors[static_cast<std::size_t>(k) * d + q];
                    e.vectors[static_cast<std::size_t>(k) * d + p] = c * vkp - s * vkq;
                    e.vectors[static_cast<std::size_t>(k) * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    e.values.resize(d);
    for (int i = 0; i < d; ++i) e.values[i] = a[static_cast<std::size_t>(i) * d + i];
    return e;
}

/// Lower Cholesky factor; throws NotPositiveDefinite when a pivot is not > 0.
inline std::vector<double> cholesky(const std::vector<double>& a, int d) {
    std::vector<double> l(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<std::size_t>(i) * d + j];
            for (int k = 0; k < j; ++k)
                s -= l[static_cast<std::size_t>(i) * d + k] * l[static_cast<std::size_t>(j) * d + k];
            if (i == j) {
                if (!(s > 0.0)) throw NotPositiveDefinite("matrix is not positive definite");
                l[static_cast<std::size_t>(i) * d + i] = std::sqrt(s);
            } else {
                l[static_cast<std::size_t>(i) * d + j] = s / l[static_cast<std::size_t>(j) * d + j];
            }
        }
    }
    return l;
}

/// Validated SPD bandwidth matrix with cached derived factors.
class BandwidthMatrix {
public:
    static BandwidthMatrix validate(int dim, std::vector<double> entries) {
        if (dim < 1 || entries.size() != static_cast<std::size_t>(dim) * dim)
            throw NotSquare("bandwidth matrix must be square");
        if (dim > 16) throw NotSquare("dimension above 16 is unsupported");
        double max_abs = 0.0;
        for (double v : entries) {
            if (!std::isfinite(v)) throw NotSymmetric("bandwidth matrix has non-finite entries");
            max_abs = std::max(max_abs, std::abs(v));
        }
        double max_asym = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j)
                max_asym = std::max(max_asym,
                                    std::abs(entries[static_cast<std::size_t>(i) * dim + j] -
                                             entries[static_cast<std::size_t>(j) * dim + i]));
        if (max_asym > 1e-12 * max_abs)
            throw NotSymmetric("bandwidth matrix is not symmetric");

        BandwidthMatrix h;
        h.dim_ = dim;
        h.h_ = std::move(entries);
        h.chol_ = cholesky(h.h_, dim);

        SymEigen e = sym_eigen(h.h_, dim);
        h.det_ = 1.0;
        h.lambda_max_ = -std::numeric_limits<double>::infinity();
        for (double lam : e.values) {
            if (!(lam > 0.0)) throw NotPositiveDefinite("matrix is not positive definite");
            h.det_ *= lam;
            h.lambda_max_ = std::max(h.lambda_max_, lam);
        }
        // H^{-1/2} = V diag(lambda^{-1/2}) V^T, symmetric by construction
        h.inv_sqrt_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double s = 0.0;
                for (int k = 0; k < dim; ++k)
                    s += e.vectors[static_cast<std::size_t>(i) * dim + k] *
                         e.vectors[static_cast<std::size_t>(j) * dim + k] / std::sqrt(e.values[k]);
                h.inv_sqrt_[static_cast<std::size_t>(i) * dim + j] = s;
            }
        return h;
    }

    /// Accepts rows; non-square input raises NotSquare.
    static BandwidthMatrix validate(const std::vector<std::vector<double>>& rows) {
        const int d = static_cast<int>(rows.size());
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(d) * d);
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != d) throw NotSquare("bandwidth matrix must be square");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return validate(d, std::move(flat));
    }

    int dim() const { return dim_; }
    const std::vector<double>& entries() const { return h_; }
    const std::vector<double>& inv_sqrt() const { return inv_sqrt_; }
    double det() const { return det_; }
    double lambda_max() const { return lambda_max_; }
    double entry(int i, int j) const { return h_[static_cast<std::size_t>(i) * dim_ + j]; }

    /// u^T H^{-1} u through the Cholesky factor: solve L y = u, return |y|^2.
    double quad_form_inv(std::span<const double> u) const {
        double y[16];  // dim_ is small
        double q = 0.0;
        for (int i = 0; i < dim_; ++i) {
            double s = u[i];
            for (int k = 0; k < i; ++k) s -= chol_[static_cast<std::size_t>(i) * dim_ + k] * y[k];
            y[i] = s / chol_[static_cast<std::size_t>(i) * dim_ + i];
            q += y[i] * y[i];
        }
        return q;
    }

private:
    BandwidthMatrix() = default;
    int dim_ = 0;
    std::vector<double> h_;
    std::vector<double> inv_sqrt_;
    std::vector<double> chol_;
    double det_ = 0.0;
    double lambda_max_ = 0.0;
};

/// Standalone H^{-1/2} (same convention as BandwidthMatrix::inv_sqrt).
inline std::vector<double> matrix_inv_sqrt(const BandwidthMatrix& h) { return h.inv_sqrt(); }

}  // namespace kdefft
