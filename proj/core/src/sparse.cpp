#include "hycurv/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hycurv {

CsrMatrix CsrBuilder::finish() {
    CsrMatrix m;
    m.rows = rows_;
    m.row_offsets.assign(static_cast<size_t>(rows_) + 1, 0);
    for (long r = 0; r < rows_; ++r) {
        auto& row = entries_[static_cast<size_t>(r)];
        std::sort(row.begin(), row.end(),
                  [](const Entry& a, const Entry& b) { return a.col < b.col; });
        // merge duplicates, drop exact zeros
        size_t out = 0;
        for (size_t i = 0; i < row.size();) {
            int32_t c = row[i].col;
            double s = 0.0;
            while (i < row.size() && row[i].col == c) s += row[i++].val;
            if (s != 0.0) row[out++] = {c, s};
        }
        row.resize(out);
        m.row_offsets[static_cast<size_t>(r) + 1] =
            m.row_offsets[static_cast<size_t>(r)] + static_cast<long>(out);
    }
    m.col.reserve(static_cast<size_t>(m.row_offsets[static_cast<size_t>(rows_)]));
    m.val.reserve(m.col.capacity());
    for (long r = 0; r < rows_; ++r)
        for (const Entry& e : entries_[static_cast<size_t>(r)]) {
            m.col.push_back(e.col);
            m.val.push_back(e.val);
        }
    return m;
}

std::vector<double> spmv(const CsrMatrix& A, const std::vector<double>& x) {
    if (static_cast<long>(x.size()) != A.rows)
        throw Error(Errc::dimension_mismatch,
                    "spmv: vector length " + std::to_string(x.size()) + " != " +
                        std::to_string(A.rows));
    std::vector<double> y(static_cast<size_t>(A.rows));
    for (long r = 0; r < A.rows; ++r) {
        double s = 0.0;
        for (long p = A.row_offsets[static_cast<size_t>(r)]; p < A.row_offsets[static_cast<size_t>(r) + 1]; ++p)
            s += A.val[static_cast<size_t>(p)] * x[static_cast<size_t>(A.col[static_cast<size_t>(p)])];
        y[static_cast<size_t>(r)] = s;
    }
    return y;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

} // namespace

KrylovResult solve_bicgstab(const CsrMatrix& A, const std::vector<double>& b,
                            double tol, int max_iter) {
    const long n = A.rows;
    if (static_cast<long>(b.size()) != n)
        throw Error(Errc::dimension_mismatch, "solve_bicgstab: rhs length mismatch");

    std::vector<double> dinv(static_cast<size_t>(n), 0.0);
    for (long r = 0; r < n; ++r) {
        double d = 0.0;
        for (long p = A.row_offsets[static_cast<size_t>(r)]; p < A.row_offsets[static_cast<size_t>(r) + 1]; ++p)
            if (A.col[static_cast<size_t>(p)] == r) d = A.val[static_cast<size_t>(p)];
        if (d == 0.0)
            throw Error(Errc::zero_diagonal,
                        "solve_bicgstab: zero diagonal entry in row " + std::to_string(r))
                .with_node(r);
        dinv[static_cast<size_t>(r)] = 1.0 / d;
    }

    KrylovResult res;
    res.x.assign(static_cast<size_t>(n), 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    const double target = tol * bnorm;

    std::vector<double> r = b; // r0 = b - A*0
    std::vector<double> rhat = r;
    std::vector<double> p(static_cast<size_t>(n), 0.0), v(static_cast<size_t>(n), 0.0);
    std::vector<double> phat(static_cast<size_t>(n)), shat(static_cast<size_t>(n));
    double rho_old = 1.0, alpha = 1.0, omega = 1.0;

    for (int it = 1; it <= max_iter; ++it) {
        const double rho = dot(rhat, r);
        if (std::fabs(rho) < 1e-300 * bnorm * bnorm || !std::isfinite(rho))
            throw Error(Errc::krylov_breakdown, "solve_bicgstab: rho breakdown at iteration " +
                                                    std::to_string(it));
        if (it == 1) {
            p = r;
        } else {
            const double beta = (rho / rho_old) * (alpha / omega);
            for (size_t i = 0; i < p.size(); ++i)
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        for (size_t i = 0; i < p.size(); ++i) phat[i] = dinv[i] * p[i];
        v = spmv(A, phat);
        const double rv = dot(rhat, v);
        if (std::fabs(rv) < 1e-300 || !std::isfinite(rv))
            throw Error(Errc::krylov_breakdown, "solve_bicgstab: alpha breakdown");
        alpha = rho / rv;

        std::vector<double>& s = r; // reuse storage: s = r - alpha*v
        for (size_t i = 0; i < s.size(); ++i) s[i] -= alpha * v[i];
        double snorm = norm2(s);
        if (snorm <= target) {
            for (size_t i = 0; i < res.x.size(); ++i) res.x[i] += alpha * phat[i];
            res.iterations = it;
            res.rel_residual = snorm / bnorm;
            res.converged = true;
            return res;
        }

        for (size_t i = 0; i < s.size(); ++i) shat[i] = dinv[i] * s[i];
        const std::vector<double> t = spmv(A, shat);
        const double tt = dot(t, t);
        if (tt == 0.0 || !std::isfinite(tt))
            throw Error(Errc::krylov_breakdown, "solve_bicgstab: omega breakdown (t = 0)");
        omega = dot(t, s) / tt;
        if (omega == 0.0 || !std::isfinite(omega))
            throw Error(Errc::krylov_breakdown, "solve_bicgstab: omega breakdown");

        for (size_t i = 0; i < res.x.size(); ++i)
            res.x[i] += alpha * phat[i] + omega * shat[i];
        for (size_t i = 0; i < s.size(); ++i) r[i] = s[i] - omega * t[i];

        const double rnorm = norm2(r);
        res.iterations = it;
        res.rel_residual = rnorm / bnorm;
        if (rnorm <= target) {
            res.converged = true;
            return res;
        }
        rho_old = rho;
    }
    return res; // max_iter exceeded; reported, not fatal
}

} // namespace hycurv
