#pragma once

#include "esnrls/types.hpp"

namespace esnrls {

struct RankOneUpdateResult {
    Matrix p_next;  // updated inverse, symmetrized
    Vector v;       // p * u
    Vector g;       // gain, v / (lambda + v.u)
};

/// Rank-one recursion for the inverse autocorrelation matrix:
/// given p = A^{-1}, returns (lambda*A + u*u^T)^{-1} together with the
/// intermediate vectors v = p*u and the gain g. p_next is averaged with its
/// transpose to keep symmetry over long update sequences.
RankOneUpdateResult rank_one_inverse_update(const Matrix& p, const Vector& u, double lambda);

/// Largest absolute eigenvalue, by power iteration. A quadratic fit over
/// consecutive iterates covers the cases plain power iteration cannot: a
/// dominant complex-conjugate pair or a +/- real pair of equal modulus.
double spectral_radius(const Matrix& w);

/// Rescale w so its spectral radius equals target.
Matrix spectral_scale(const Matrix& w, double target);

}  // namespace esnrls
