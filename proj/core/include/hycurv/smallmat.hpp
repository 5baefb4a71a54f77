#pragma once

#include "hycurv/error.hpp"

#include <array>
#include <cmath>
#include <cstring>

namespace hycurv {

/// Hard cap on the curvature dimension handled by the dense kernels.
inline constexpr int kMaxDim = 8;

/// Fixed-capacity vector for principal curvatures, gradients and points.
/// No heap allocation; meant to be passed by value in hot loops.
struct SmallVec {
    int n = 0;
    std::array<double, kMaxDim> a{};

    SmallVec() = default;
    explicit SmallVec(int dim) : n(dim) { a.fill(0.0); }
    SmallVec(std::initializer_list<double> xs) {
        n = static_cast<int>(xs.size());
        int i = 0;
        for (double x : xs) a[static_cast<size_t>(i++)] = x;
    }

    double& operator[](int i) { return a[static_cast<size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<size_t>(i)]; }

    double norm() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
        return std::sqrt(s);
    }
    double dot(const SmallVec& o) const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += a[static_cast<size_t>(i)] * o.a[static_cast<size_t>(i)];
        return s;
    }
    bool finite() const {
        for (int i = 0; i < n; ++i)
            if (!std::isfinite(a[static_cast<size_t>(i)])) return false;
        return true;
    }
};

/// Fixed-capacity dense n x n matrix, row major.
struct SmallMat {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> a{};

    SmallMat() = default;
    explicit SmallMat(int dim) : n(dim) { a.fill(0.0); }

    static SmallMat identity(int dim) {
        SmallMat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int i, int j) { return a[static_cast<size_t>(i * n + j)]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i * n + j)]; }

    SmallVec apply(const SmallVec& x) const {
        SmallVec y(n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    SmallMat mul(const SmallMat& o) const {
        SmallMat r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const double v = (*this)(i, k);
                if (v == 0.0) continue;
                for (int j = 0; j < n; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }

    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < n * n; ++i) s += a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
        return std::sqrt(s);
    }

    double max_asymmetry() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
        return m;
    }
};

struct EigenDecomp {
    SmallVec lambda;   // ascending
    SmallMat vectors;  // columns are the matching orthonormal eigenvectors
};

/// Cyclic Jacobi eigensolver for symmetric matrices, n <= 8.
/// Sweeps until the off-diagonal Frobenius norm drops below 1e-13 * ||A||_F.
EigenDecomp jacobi_eigen(const SmallMat& A);

} // namespace hycurv
