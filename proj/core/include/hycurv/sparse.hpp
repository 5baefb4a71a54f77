#pragma once

#include "hycurv/error.hpp"

#include <cstdint>
#include <vector>

namespace hycurv {

/// Square CSR matrix; column indices sorted per row, no explicit zeros.
/// Structurally nonsymmetric (the first-order transport terms break symmetry).
struct CsrMatrix {
    long rows = 0;
    std::vector<long> row_offsets;   // size rows + 1
    std::vector<int32_t> col;
    std::vector<double> val;

    long nnz() const { return static_cast<long>(col.size()); }
};

/// Assemble a CSR matrix from per-row (col, value) pairs; duplicates are
/// summed, zeros dropped, columns sorted.
class CsrBuilder {
public:
    explicit CsrBuilder(long rows) : rows_(rows), entries_(static_cast<size_t>(rows)) {}
    void add(long row, long col, double v) {
        entries_[static_cast<size_t>(row)].push_back({static_cast<int32_t>(col), v});
    }
    CsrMatrix finish();

private:
    struct Entry {
        int32_t col;
        double val;
    };
    long rows_;
    std::vector<std::vector<Entry>> entries_;
};

std::vector<double> spmv(const CsrMatrix& A, const std::vector<double>& x);

struct KrylovResult {
    std::vector<double> x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned BiCGSTAB from x0 = 0.
/// Stops when ||b - Ax|| <= tol * ||b||; running out of iterations is
/// reported through `converged`, not an error. A vanishing diagonal entry
/// raises a preconditioner error and rho ~ 0 a breakdown error; the Newton
/// driver treats either as a failed step and falls back to smaller damping.
KrylovResult solve_bicgstab(const CsrMatrix& A, const std::vector<double>& b,
                            double tol, int max_iter);

} // namespace hycurv
