#pragma once

// The worked model problem used across the solver tests: the equidistant cap
// subsolution over a disk with psi = 2 u^2, for which kappa[ubar] = 1/2
// everywhere and the compatibility data are sigma = eps^2, r0 = inf, C0 = 1.

#include "hycurv/problem.hpp"

#include <cstring>

namespace testsupport {

/// Bitwise field equality; NaN padding outside the mask compares equal.
inline bool same_bits(const hycurv::ScalarField& a, const hycurv::ScalarField& b) {
    return a.v.size() == b.v.size() &&
           std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0;
}

inline hycurv::ProblemSpec example_spec(double h = 1.0 / 32.0, int k = 2) {
    hycurv::ProblemSpec s;
    s.n = 2;
    s.k = k;
    s.psi = hycurv::expr::parse("2*u^2", 2);
    s.ubar = hycurv::expr::parse("sqrt(1 - x1^2 - x2^2) - 0.5", 2);
    s.box_min = hycurv::SmallVec{-0.875, -0.875};
    s.box_max = hycurv::SmallVec{0.875, 0.875};
    s.h = h;
    return s;
}

} // namespace testsupport
