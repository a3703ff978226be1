// Dense matrix exponential: scaling-and-squaring with diagonal Pade approximants
// (degrees 3/5/7/9/13, Higham-style theta switching), tolerance ~1e-13 relative.
#pragma once

#include "sideband/common.hpp"

namespace sideband {

MatrixXcd expm(const MatrixXcd& a);

// exp(-i H t) for Hermitian H via self-adjoint diagonalization. Used by the
// oracle as an independent route (no shared code with expm/Pade).
MatrixXcd expm_hermitian_propagator(const MatrixXcd& h, double t);

}  // namespace sideband
