#pragma once

#include "hycurv/smallmat.hpp"

namespace hycurv {

/// Binomial coefficient C(n, k) as a double; exact for the small n used here.
double binomial(int n, int k);

/// sigma_j(lambda): j-th elementary symmetric polynomial, sigma_0 == 1.
/// Computed by the one-pass characteristic-coefficient recurrence, O(n*j).
double sigma(const SmallVec& lambda, int j);

/// sigma_j of lambda with entry i removed, often written sigma_j(lambda|i).
double sigma_excl(const SmallVec& lambda, int j, int i);

/// True iff sigma_j(lambda) > 0 strictly for all j = 1..k (Garding cone).
bool in_gamma_k(const SmallVec& lambda, int k);

/// min over j = 1..k of sigma_j(lambda) / C(n, j).
/// Positive iff lambda lies in Gamma_k, zero on the cone boundary. This is a
/// monotone proxy for the distance to the cone boundary, not the Euclidean
/// distance (which has no closed form).
double cone_margin(const SmallVec& lambda, int k);

struct SymEval {
    double value;    // sigma_k(lambda)
    double f_value;  // sigma_k(lambda)^(1/k)
    SmallVec grad;   // f_i = (1/k) sigma_k^{1/k - 1} sigma_{k-1}(lambda|i)
    double margin;   // cone_margin(lambda, k)
};

/// f = sigma_k^{1/k} with its gradient. Requires lambda strictly in Gamma_k;
/// otherwise throws an admissibility error carrying the first violated order.
SymEval f_eval(const SmallVec& lambda, int k);

struct MatrixEval {
    double F_value;        // f(lambda(A))
    SmallMat dF;           // F^{ij} = sum_p f_p v_p v_p^T
    SmallVec eigenvalues;  // ascending
    SmallMat eigenvectors; // columns, orthonormal
    double margin;         // cone margin of the spectrum
};

/// F(A) = f(lambda(A)) for a symmetric matrix A with spectrum in Gamma_k,
/// together with the derivative matrix F^{ij}. The spectral formula for F^{ij}
/// is well defined under eigenvalue multiplicity because f is symmetric.
MatrixEval F_eval(const SmallMat& A, int k);

/// Symmetry tolerance accepted by F_eval.
inline constexpr double kSymmetryTol = 1e-12;

} // namespace hycurv
