#pragma once

#include "spectralkl/errors.hpp"
#include "spectralkl/types.hpp"

namespace spectralkl {

/// Solves the discrete-time Lyapunov equation  X = F X F* + Q  for stable F
/// and Hermitian Q. Uses Kronecker vectorization up to dimension 40 and
/// squared-iterate doubling above. Throws LyapunovSolveFailure if F is not
/// stable or the linear solve degenerates.
Matrix solve_discrete_lyapunov(const Matrix& f, const Matrix& q);

/// Spectral radius; zero for an empty matrix.
double spectral_radius(const Matrix& m);

}  // namespace spectralkl
