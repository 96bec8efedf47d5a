#pragma once

// Complete elliptic integrals of the first kind.
//
// The production path is the arithmetic-geometric mean,
//   K(k) = pi / (2 AGM(1, k')),   k' = sqrt(1 - k^2),
// which converges quadratically. The Gauss series of 2F1(1/2,1/2;1;k^2)
// is provided as an independent oracle.

#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>

#include "nevlab/core.hpp"

namespace nevlab {

/// A modulus k with K = K(k) and Kp = K(k').
struct EllipticPair {
    real k = 0;
    real K = 0;
    real Kp = 0;

    real k_complement() const { return std::sqrt((1 - k) * (1 + k)); }
};

template <std::floating_point Real>
Real elliptic_K(Real k) {
    if (!(k > 0 && k < 1)) {
        throw domain_error("elliptic_K: modulus must lie in (0, 1)");
    }
    Real a = 1;
    Real b = std::sqrt((1 - k) * (1 + k));
    constexpr Real eps = std::numeric_limits<Real>::epsilon();
    for (int iter = 0; iter < 64 && std::abs(a - b) > eps * a; ++iter) {
        const Real next_a = (a + b) / 2;
        b = std::sqrt(a * b);
        a = next_a;
    }
    return std::numbers::pi_v<Real> / (a + b);
}

inline EllipticPair elliptic_pair(real k) {
    if (!(k > 0 && k < 1)) {
        throw domain_error("elliptic_pair: modulus must lie in (0, 1)");
    }
    const real kc = std::sqrt((1 - k) * (1 + k));
    return EllipticPair{k, elliptic_K(k), elliptic_K(kc)};
}

/// Partial sums of 2F1(1/2,1/2;1;k2) until the next term drops below tol.
template <std::floating_point Real>
Real hyp2f1_half_series(Real k2, Real tol, long max_terms = 1'000'000) {
    if (!(k2 >= 0 && k2 < 1)) {
        throw domain_error("hyp2f1_half_series: argument must lie in [0, 1)");
    }
    if (!(tol > 0)) {
        throw domain_error("hyp2f1_half_series: tolerance must be positive");
    }
    Real sum = 1;
    Real term = 1;
    for (long n = 0; n < max_terms; ++n) {
        const Real ratio = (n + Real(0.5)) / (n + 1);
        term *= ratio * ratio * k2;
        sum += term;
        if (term < tol) {
            return sum;
        }
    }
    throw non_convergence_error("hyp2f1_half_series: term cap exceeded (k2 too close to 1)");
}

}  // namespace nevlab
