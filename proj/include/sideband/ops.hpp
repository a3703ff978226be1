// Operator and state algebra on truncated Fock spaces tensored with a qubit:
// ladder/Pauli constructors, tensor embedding, displacement, partial trace,
// expectation values.
//
// Qubit basis convention (fixed project-wide): index 0 = |g>, index 1 = |e>,
// sigma_z = diag(+1, -1) so <sigma_z> = +1 in the ground state, and
// sigma_plus = |e><g| raises ground to excited.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sideband/operator_matrix.hpp"
#include "sideband/state.hpp"

namespace sideband {

enum class Pauli { X, Y, Z, Plus, Minus };

// <m|a|m+1> = sqrt(m+1) on a dim-truncated Fock space. dim >= 2 required.
OperatorMatrix annihilation(int dim);
// Number operator diag(0, 1, ..., dim-1).
OperatorMatrix number_operator(int dim);
// Identity on a single subsystem.
OperatorMatrix identity_operator(int dim, const std::string& label = "mode");
// 2x2 Pauli / ladder matrices under the fixed basis convention.
OperatorMatrix pauli(Pauli which);
// Qubit rotation exp(-i theta/2 * sigma_axis) (axis in {X, Y, Z}).
MatrixXcd qubit_rotation(Pauli axis, double theta);

// Tensor-embed a single-subsystem operator at `target` within `layout`.
OperatorMatrix embed(const OperatorMatrix& op, const SubsystemLayout& layout,
                     const std::string& target);

// Displacement operator D(alpha) = exp(alpha a^dag - alpha^* a), dim x dim,
// via the Pade matrix exponential. Emits a truncation warning on stderr when
// the unitarity defect exceeds 1e-6.
OperatorMatrix displacement(cxd alpha, int dim);
// Entrywise max |D^dag D - I| (the truncation/unitarity defect).
double unitarity_defect(const OperatorMatrix& op);
// Recommended minimum truncation for holding displacement amplitude alpha.
int displacement_adequate_dim(double alpha_abs);

// Reduce to the subsystems in `keep` (result ordered as in the original layout).
QuantumState partial_trace(const QuantumState& state, const std::vector<std::string>& keep);

// <psi|A|psi> or Tr[rho A]; layouts must match.
cxd expectation(const QuantumState& state, const OperatorMatrix& op);
// Expectation of a single-subsystem operator embedded at `target`.
cxd expectation_on(const QuantumState& state, const MatrixXcd& op_single,
                   const std::string& target);

// Fock basis vector |n> on one mode.
VectorXcd fock_vector(int dim, int n);
// Truncated coherent state |alpha> (normalized after truncation).
VectorXcd coherent_vector(int dim, cxd alpha);

// Warning sink for truncation warnings (defaults to stderr); tests may replace it.
void set_warning_handler(std::function<void(const std::string&)> handler);
void emit_warning(const std::string& message);

}  // namespace sideband
