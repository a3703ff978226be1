#include "sideband/kernels.hpp"

#include <cmath>

namespace sideband {

ApplyPlan::ApplyPlan(const MatrixXcd& m, const VectorXd& diag, double tol) {
  if (m.rows() != m.cols()) throw ValidationError("ApplyPlan: matrix must be square");
  dim_ = static_cast<int>(m.rows());
  const bool use_diag = diag.size() > 0;
  if (use_diag && diag.size() != m.rows())
    throw ValidationError("ApplyPlan: diag size does not match matrix dimension");
  row_ptr_.assign(static_cast<size_t>(dim_) + 1, 0);
  for (int i = 0; i < dim_; ++i) {
    row_ptr_[static_cast<size_t>(i)] = static_cast<int>(entries_.size());
    for (int j = 0; j < dim_; ++j) {
      const cxd v = m(i, j);
      if (std::abs(v) <= tol) continue;
      const double delta = use_diag ? diag(i) - diag(j) : 0.0;
      entries_.push_back({j, v, delta});
      if (delta != 0.0) has_phases_ = true;
    }
  }
  row_ptr_[static_cast<size_t>(dim_)] = static_cast<int>(entries_.size());
  phased_.resize(entries_.size());
  phase_to(0.0);
}

void ApplyPlan::phase_to(double t) const {
  const size_t n = entries_.size();
  if (!has_phases_ || t == 0.0) {
    for (size_t e = 0; e < n; ++e) phased_[e] = entries_[e].val;
    return;
  }
  for (size_t e = 0; e < n; ++e) {
    const PlanEntry& pe = entries_[e];
    phased_[e] = pe.val * std::polar(1.0, pe.delta * t);
  }
}

void ApplyPlan::accum_left(cxd scale, const MatrixXcd& x, MatrixXcd& y, bool parallel) const {
  const int cols = static_cast<int>(x.cols());
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < dim_; ++i) {
    for (int e = row_ptr_[static_cast<size_t>(i)]; e < row_ptr_[static_cast<size_t>(i) + 1];
         ++e) {
      const cxd w = scale * phased_[static_cast<size_t>(e)];
      const int k = entries_[static_cast<size_t>(e)].col;
      for (int c = 0; c < cols; ++c) y(i, c) += w * x(k, c);
    }
  }
}

void ApplyPlan::accum_right_dagger(cxd scale, const MatrixXcd& x, MatrixXcd& y,
                                   bool parallel) const {
  // (X A^dag)_{rj} = sum_k X_{rk} conj(A_{jk}): column j of Y accumulates
  // conj-scaled columns of X indexed by this plan's row j entries.
#pragma omp parallel for schedule(static) if (parallel)
  for (int j = 0; j < dim_; ++j) {
    for (int e = row_ptr_[static_cast<size_t>(j)]; e < row_ptr_[static_cast<size_t>(j) + 1];
         ++e) {
      const cxd w = scale * std::conj(phased_[static_cast<size_t>(e)]);
      const int k = entries_[static_cast<size_t>(e)].col;
      y.col(j) += w * x.col(k);
    }
  }
}

MatrixXcd ApplyPlan::dense_at(double t) const {
  phase_to(t);
  MatrixXcd out = MatrixXcd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int e = row_ptr_[static_cast<size_t>(i)]; e < row_ptr_[static_cast<size_t>(i) + 1];
         ++e) {
      out(i, entries_[static_cast<size_t>(e)].col) = phased_[static_cast<size_t>(e)];
    }
  }
  return out;
}

VectorXcd dense_schrodinger_rhs(const MatrixXcd& h, const VectorXcd& psi) {
  return cxd(0.0, -1.0) * (h * psi);
}

MatrixXcd dense_lindblad_rhs(const MatrixXcd& h,
                             const std::vector<std::pair<MatrixXcd, double>>& collapse,
                             const MatrixXcd& rho) {
  MatrixXcd out = cxd(0.0, -1.0) * (h * rho - rho * h);
  for (const auto& [l, rate] : collapse) {
    const MatrixXcd ldl = l.adjoint() * l;
    out += rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

}  // namespace sideband
