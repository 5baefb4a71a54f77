#include "hycurv/symfunc.hpp"

#include <algorithm>
#include <string>

namespace hycurv {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

namespace {

// e[0..jmax] of the entries; expanding prod(x + lambda_i) one factor at a time.
void esf_up_to(const SmallVec& lambda, int jmax, std::array<double, kMaxDim + 1>& e) {
    e.fill(0.0);
    e[0] = 1.0;
    for (int i = 0; i < lambda.n; ++i) {
        const int top = std::min(i + 1, jmax);
        for (int j = top; j >= 1; --j)
            e[static_cast<size_t>(j)] += lambda[i] * e[static_cast<size_t>(j - 1)];
    }
}

} // namespace

double sigma(const SmallVec& lambda, int j) {
    if (j < 0 || j > lambda.n)
        throw Error(Errc::order_range,
                    "sigma: order " + std::to_string(j) + " outside [0, " +
                        std::to_string(lambda.n) + "]")
            .with_order(j);
    if (j == 0) return 1.0;
    std::array<double, kMaxDim + 1> e{};
    esf_up_to(lambda, j, e);
    return e[static_cast<size_t>(j)];
}

double sigma_excl(const SmallVec& lambda, int j, int i) {
    if (i < 0 || i >= lambda.n)
        throw Error(Errc::index_range, "sigma_excl: index " + std::to_string(i) + " out of range");
    if (j < 0 || j > lambda.n - 1)
        throw Error(Errc::order_range, "sigma_excl: order out of range").with_order(j);
    // Re-run the recurrence on the reduced vector; stabler than dividing out
    // the excluded root and cheap at n <= 8.
    SmallVec reduced(lambda.n - 1);
    int m = 0;
    for (int p = 0; p < lambda.n; ++p)
        if (p != i) reduced[m++] = lambda[p];
    if (j == 0) return 1.0;
    std::array<double, kMaxDim + 1> e{};
    esf_up_to(reduced, j, e);
    return e[static_cast<size_t>(j)];
}

bool in_gamma_k(const SmallVec& lambda, int k) {
    if (k < 1 || k > lambda.n) return false;
    std::array<double, kMaxDim + 1> e{};
    esf_up_to(lambda, k, e);
    for (int j = 1; j <= k; ++j)
        if (!(e[static_cast<size_t>(j)] > 0.0)) return false;
    return true;
}

double cone_margin(const SmallVec& lambda, int k) {
    if (k < 1 || k > lambda.n)
        throw Error(Errc::order_range, "cone_margin: order out of range").with_order(k);
    std::array<double, kMaxDim + 1> e{};
    esf_up_to(lambda, k, e);
    double m = e[1] / binomial(lambda.n, 1);
    for (int j = 2; j <= k; ++j)
        m = std::min(m, e[static_cast<size_t>(j)] / binomial(lambda.n, j));
    return m;
}

SymEval f_eval(const SmallVec& lambda, int k) {
    const int n = lambda.n;
    if (k < 1 || k > n)
        throw Error(Errc::order_range, "f_eval: order out of range").with_order(k);

    std::array<double, kMaxDim + 1> e{};
    esf_up_to(lambda, k, e);
    for (int j = 1; j <= k; ++j) {
        if (!(e[static_cast<size_t>(j)] > 0.0)) {
            throw Error(Errc::admissibility,
                        "f_eval: lambda outside Gamma_" + std::to_string(k) +
                            " (sigma_" + std::to_string(j) + " <= 0)")
                .with_order(j)
                .with_margin(cone_margin(lambda, k));
        }
    }

    SymEval out;
    out.value = e[static_cast<size_t>(k)];
    out.f_value = std::pow(out.value, 1.0 / static_cast<double>(k));
    out.margin = e[1] / binomial(n, 1);
    for (int j = 2; j <= k; ++j)
        out.margin = std::min(out.margin, e[static_cast<size_t>(j)] / binomial(n, j));

    const double scale = out.f_value / (static_cast<double>(k) * out.value);
    out.grad = SmallVec(n);
    for (int i = 0; i < n; ++i)
        out.grad[i] = scale * sigma_excl(lambda, k - 1, i);
    return out;
}

MatrixEval F_eval(const SmallMat& A, int k) {
    const int n = A.n;
    if (n < 1 || n > kMaxDim)
        throw Error(Errc::shape, "F_eval: dimension out of range");
    if (A.max_asymmetry() > kSymmetryTol * std::max(1.0, A.frobenius()))
        throw Error(Errc::shape, "F_eval: input matrix is not symmetric");

    const EigenDecomp eig = jacobi_eigen(A);
    const SymEval fe = f_eval(eig.lambda, k); // throws if spectrum leaves Gamma_k

    MatrixEval out;
    out.F_value = fe.f_value;
    out.eigenvalues = eig.lambda;
    out.eigenvectors = eig.vectors;
    out.margin = fe.margin;
    out.dF = SmallMat(n);
    for (int p = 0; p < n; ++p) {
        const double fp = fe.grad[p];
        for (int i = 0; i < n; ++i) {
            const double vip = eig.vectors(i, p);
            for (int j = 0; j < n; ++j)
                out.dF(i, j) += fp * vip * eig.vectors(j, p);
        }
    }
    return out;
}

} // namespace hycurv
