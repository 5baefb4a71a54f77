#include "hycurv/smallmat.hpp"

#include <algorithm>

namespace hycurv {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::order_range: return "order_range";
        case Errc::index_range: return "index_range";
        case Errc::shape: return "shape";
        case Errc::domain: return "domain";
        case Errc::admissibility: return "admissibility";
        case Errc::degenerate_domain: return "degenerate_domain";
        case Errc::grid_mismatch: return "grid_mismatch";
        case Errc::dimension_mismatch: return "dimension_mismatch";
        case Errc::zero_diagonal: return "zero_diagonal";
        case Errc::krylov_breakdown: return "krylov_breakdown";
        case Errc::newton_nonconvergence: return "newton_nonconvergence";
        case Errc::cone_exit: return "cone_exit";
        case Errc::continuation_failure: return "continuation_failure";
        case Errc::parse_error: return "parse_error";
        case Errc::config_error: return "config_error";
        case Errc::io_error: return "io_error";
    }
    return "unknown";
}

namespace {

double offdiag_frobenius(const SmallMat& m) {
    double s = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

} // namespace

EigenDecomp jacobi_eigen(const SmallMat& A) {
    const int n = A.n;
    if (n < 1 || n > kMaxDim)
        throw Error(Errc::shape, "jacobi_eigen: dimension out of range");

    SmallMat m = A;
    SmallMat v = SmallMat::identity(n);
    const double target = 1e-13 * std::max(A.frobenius(), 1e-300);

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (offdiag_frobenius(m) <= target) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double app = m(p, p);
                const double aqq = m(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                // Stable rotation: pick the smaller-magnitude tangent root.
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int i = 0; i < n; ++i) {
                    const double mip = m(i, p);
                    const double miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (int j = 0; j < n; ++j) {
                    const double mpj = m(p, j);
                    const double mqj = m(q, j);
                    m(p, j) = c * mpj - s * mqj;
                    m(q, j) = s * mpj + c * mqj;
                }
                for (int i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    // Sort eigenvalues ascending, carrying the eigenvector columns along.
    std::array<int, kMaxDim> order{};
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.begin() + n,
              [&](int i, int j) { return m(i, i) < m(j, j); });

    EigenDecomp out;
    out.lambda = SmallVec(n);
    out.vectors = SmallMat(n);
    for (int k = 0; k < n; ++k) {
        const int src = order[static_cast<size_t>(k)];
        out.lambda[k] = m(src, src);
        for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, src);
    }
    return out;
}

} // namespace hycurv
