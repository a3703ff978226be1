// Sparse apply plans for Liouvillian evaluation in a diagonal interaction
// picture, with serial and OpenMP execution paths.
//
// The integrator absorbs the static diagonal D of the Hamiltonian exactly:
// the working state is X~ = e^{+iDt} X e^{-iDt} (or e^{+iDt} psi for pure
// states). Every remaining operator A is applied with its entries phased as
//   A~_{ik}(t) = A_{ik} e^{i (d_i - d_k) t},
// so each plan entry carries its phase frequency delta = d_row - d_col and is
// re-phased once per evaluation time.
#pragma once

#include <vector>

#include "sideband/common.hpp"

namespace sideband {

struct PlanEntry {
  int col = 0;
  cxd val{0.0, 0.0};
  double delta = 0.0;  // d_row - d_col (rad/us)
};

class ApplyPlan {
 public:
  ApplyPlan() = default;
  // CSR plan of `m` with phase deltas from the absorbed diagonal `diag`
  // (pass an empty vector for no phases). Entries below `tol` are dropped.
  ApplyPlan(const MatrixXcd& m, const VectorXd& diag, double tol = 0.0);

  int dim() const { return dim_; }
  int nnz() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  bool has_phases() const { return has_phases_; }

  // Recompute the phased entry values for evaluation time t.
  void phase_to(double t) const;

  // Y += scale * (A X). X and Y are dim x c (c = 1 for pure states).
  void accum_left(cxd scale, const MatrixXcd& x, MatrixXcd& y, bool parallel) const;
  // Y += scale * (X A^dag), using this plan's rows as columns of A^dag.
  void accum_right_dagger(cxd scale, const MatrixXcd& x, MatrixXcd& y, bool parallel) const;

  // Dense reconstruction of the phased matrix (tests / diagnostics).
  MatrixXcd dense_at(double t) const;

 private:
  int dim_ = 0;
  bool has_phases_ = false;
  std::vector<int> row_ptr_;
  std::vector<PlanEntry> entries_;
  mutable std::vector<cxd> phased_;
};

// Literal dense references the plan kernels are tested and benchmarked against.
VectorXcd dense_schrodinger_rhs(const MatrixXcd& h, const VectorXcd& psi);
MatrixXcd dense_lindblad_rhs(const MatrixXcd& h,
                             const std::vector<std::pair<MatrixXcd, double>>& collapse,
                             const MatrixXcd& rho);

}  // namespace sideband
