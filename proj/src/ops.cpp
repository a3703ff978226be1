#include "sideband/ops.hpp"

#include <cmath>
#include <iostream>
#include <mutex>

#include "sideband/expm.hpp"

namespace sideband {

namespace {
std::function<void(const std::string&)>& warning_handler() {
  static std::function<void(const std::string&)> handler = [](const std::string& msg) {
    std::cerr << "[warning] " << msg << "\n";
  };
  return handler;
}
}  // namespace

void set_warning_handler(std::function<void(const std::string&)> handler) {
  warning_handler() = std::move(handler);
}

void emit_warning(const std::string& message) {
  if (warning_handler()) warning_handler()(message);
}

OperatorMatrix annihilation(int dim) {
  if (dim < 2) throw ValidationError("annihilation: dim must be >= 2");
  MatrixXcd a = MatrixXcd::Zero(dim, dim);
  for (int m = 0; m + 1 < dim; ++m) {
    a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
  }
  return OperatorMatrix(SubsystemLayout::single("mode", dim), std::move(a));
}

OperatorMatrix number_operator(int dim) {
  if (dim < 2) throw ValidationError("number_operator: dim must be >= 2");
  MatrixXcd n = MatrixXcd::Zero(dim, dim);
  for (int m = 0; m < dim; ++m) n(m, m) = m;
  return OperatorMatrix::hermitian(SubsystemLayout::single("mode", dim), std::move(n));
}

OperatorMatrix identity_operator(int dim, const std::string& label) {
  return OperatorMatrix::hermitian(SubsystemLayout::single(label, dim),
                                   MatrixXcd::Identity(dim, dim));
}

OperatorMatrix pauli(Pauli which) {
  MatrixXcd m = MatrixXcd::Zero(2, 2);
  bool herm = true;
  switch (which) {
    case Pauli::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      // With index 0 = |g>: sigma_y = [[0, -i], [i, 0]] in the (g, e) ordering.
      m(0, 1) = cxd(0.0, -1.0);
      m(1, 0) = cxd(0.0, 1.0);
      break;
    case Pauli::Z:
      // sigma_z|g> = +|g> under the fixed convention.
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Pauli::Plus:
      // sigma_+ = |e><g| = (sigma_x - i sigma_y)/2 under this sigma_z convention.
      m(1, 0) = 1.0;
      herm = false;
      break;
    case Pauli::Minus:
      m(0, 1) = 1.0;
      herm = false;
      break;
  }
  SubsystemLayout layout = SubsystemLayout::single("qubit", 2);
  if (herm) return OperatorMatrix::hermitian(std::move(layout), std::move(m));
  return OperatorMatrix(std::move(layout), std::move(m));
}

MatrixXcd qubit_rotation(Pauli axis, double theta) {
  if (axis != Pauli::X && axis != Pauli::Y && axis != Pauli::Z) {
    throw ValidationError("qubit_rotation: axis must be X, Y, or Z");
  }
  const MatrixXcd s = pauli(axis).mat();
  const double c = std::cos(theta / 2.0);
  const double sn = std::sin(theta / 2.0);
  return c * MatrixXcd::Identity(2, 2) - cxd(0.0, 1.0) * sn * s;
}

OperatorMatrix embed(const OperatorMatrix& op, const SubsystemLayout& layout,
                     const std::string& target) {
  const int k = layout.index_of(target);
  if (op.dim() != layout.dim(k)) {
    throw ValidationError("embed: operator dim " + std::to_string(op.dim()) +
                          " does not match subsystem '" + target + "' dim " +
                          std::to_string(layout.dim(k)));
  }
  const int total = layout.total_dim();
  const int dk = layout.dim(k);
  const int stride = layout.stride(k);
  // outer counts blocks of contiguous inner indices: total = outer * dk * stride.
  const int outer = total / (dk * stride);
  MatrixXcd out = MatrixXcd::Zero(total, total);
  const MatrixXcd& small = op.mat();
  for (int o = 0; o < outer; ++o) {
    const int base = o * dk * stride;
    for (int r = 0; r < dk; ++r) {
      for (int c = 0; c < dk; ++c) {
        const cxd v = small(r, c);
        if (v == cxd(0.0, 0.0)) continue;
        for (int s = 0; s < stride; ++s) {
          out(base + r * stride + s, base + c * stride + s) = v;
        }
      }
    }
  }
  OperatorMatrix result(layout, std::move(out));
  if (op.hermitian_flag().value_or(false)) result.declare_hermitian(true);
  return result;
}

int displacement_adequate_dim(double alpha_abs) {
  return static_cast<int>(std::ceil(alpha_abs * alpha_abs + 3.0 * alpha_abs + 4.0));
}

OperatorMatrix displacement(cxd alpha, int dim) {
  if (dim < 2) throw ValidationError("displacement: dim must be >= 2");
  const MatrixXcd a = annihilation(dim).mat();
  const MatrixXcd gen = alpha * a.adjoint() - std::conj(alpha) * a;
  OperatorMatrix d(SubsystemLayout::single("mode", dim), expm(gen));
  const double defect = unitarity_defect(d);
  if (defect > 1e-6) {
    emit_warning("displacement: truncation dim " + std::to_string(dim) +
                 " inadequate for |alpha| = " + std::to_string(std::abs(alpha)) +
                 " (unitarity defect " + std::to_string(defect) + ")");
  }
  return d;
}

double unitarity_defect(const OperatorMatrix& op) {
  const MatrixXcd& u = op.mat();
  return (u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

QuantumState partial_trace(const QuantumState& state, const std::vector<std::string>& keep) {
  if (keep.empty()) throw ValidationError("partial_trace: empty keep list");
  const SubsystemLayout& layout = state.layout();
  const int ns = layout.subsystem_count();
  std::vector<bool> keep_mask(static_cast<size_t>(ns), false);
  for (const auto& label : keep) {
    keep_mask[static_cast<size_t>(layout.index_of(label))] = true;  // validates labels
  }

  std::vector<std::string> kept_labels;
  std::vector<int> kept_dims;
  std::vector<int> kept_idx, traced_idx;
  for (int k = 0; k < ns; ++k) {
    if (keep_mask[static_cast<size_t>(k)]) {
      kept_labels.push_back(layout.label(k));
      kept_dims.push_back(layout.dim(k));
      kept_idx.push_back(k);
    } else {
      traced_idx.push_back(k);
    }
  }
  SubsystemLayout out_layout(kept_labels, kept_dims);

  const MatrixXcd rho = state.density_matrix();
  const int out_dim = out_layout.total_dim();
  MatrixXcd out = MatrixXcd::Zero(out_dim, out_dim);

  int traced_dim = 1;
  for (int k : traced_idx) traced_dim *= layout.dim(k);

  // Map (kept multi-index, traced multi-index) -> flat index in the original space.
  auto flat = [&](int kept_flat, int traced_flat) {
    int idx = 0;
    for (int kk = static_cast<int>(kept_idx.size()) - 1; kk >= 0; --kk) {
      const int k = kept_idx[static_cast<size_t>(kk)];
      const int d = layout.dim(k);
      idx += (kept_flat % d) * layout.stride(k);
      kept_flat /= d;
    }
    for (int tt = static_cast<int>(traced_idx.size()) - 1; tt >= 0; --tt) {
      const int k = traced_idx[static_cast<size_t>(tt)];
      const int d = layout.dim(k);
      idx += (traced_flat % d) * layout.stride(k);
      traced_flat /= d;
    }
    return idx;
  };

  for (int r = 0; r < out_dim; ++r) {
    for (int c = 0; c < out_dim; ++c) {
      cxd acc(0.0, 0.0);
      for (int t = 0; t < traced_dim; ++t) {
        acc += rho(flat(r, t), flat(c, t));
      }
      out(r, c) = acc;
    }
  }

  const double tr = out.trace().real();
  if (std::abs(tr - state.trace_real()) > 1e-10) {
    throw InvariantViolation("partial_trace: trace not preserved (defect " +
                             std::to_string(std::abs(tr - state.trace_real())) + ")");
  }
  return QuantumState::density(std::move(out_layout), std::move(out), state.frame());
}

cxd expectation(const QuantumState& state, const OperatorMatrix& op) {
  if (state.layout() != op.layout()) {
    throw ValidationError("expectation: state layout " + state.layout().to_string() +
                          " does not match operator layout " + op.layout().to_string());
  }
  cxd value;
  if (state.is_pure()) {
    value = state.vec().dot(op.mat() * state.vec());  // Eigen dot conjugates the left side
  } else {
    value = (state.rho() * op.mat()).trace();
  }
  if (op.hermitian_flag().value_or(false) && std::abs(value.imag()) > 1e-9) {
    throw InvariantViolation("expectation: Hermitian operator produced imaginary part " +
                             std::to_string(value.imag()));
  }
  return value;
}

cxd expectation_on(const QuantumState& state, const MatrixXcd& op_single,
                   const std::string& target) {
  const SubsystemLayout& layout = state.layout();
  const int k = layout.index_of(target);
  const int dk = layout.dim(k);
  if (op_single.rows() != dk || op_single.cols() != dk) {
    throw ValidationError("expectation_on: operator dim mismatch for '" + target + "'");
  }
  const int total = layout.total_dim();
  const int stride = layout.stride(k);
  const int outer = total / (dk * stride);

  cxd acc(0.0, 0.0);
  if (state.is_pure()) {
    const VectorXcd& psi = state.vec();
    for (int o = 0; o < outer; ++o) {
      const int base = o * dk * stride;
      for (int r = 0; r < dk; ++r) {
        for (int c = 0; c < dk; ++c) {
          const cxd v = op_single(r, c);
          if (v == cxd(0.0, 0.0)) continue;
          for (int s = 0; s < stride; ++s) {
            acc += std::conj(psi(base + r * stride + s)) * v * psi(base + c * stride + s);
          }
        }
      }
    }
  } else {
    const MatrixXcd& rho = state.rho();
    // Tr[rho (I (x) A (x) I)] = sum over embedded entries A_rc * rho(col, row).
    for (int o = 0; o < outer; ++o) {
      const int base = o * dk * stride;
      for (int r = 0; r < dk; ++r) {
        for (int c = 0; c < dk; ++c) {
          const cxd v = op_single(r, c);
          if (v == cxd(0.0, 0.0)) continue;
          for (int s = 0; s < stride; ++s) {
            acc += v * rho(base + c * stride + s, base + r * stride + s);
          }
        }
      }
    }
  }
  return acc;
}

VectorXcd fock_vector(int dim, int n) {
  if (n < 0 || n >= dim) throw ValidationError("fock_vector: n out of range");
  VectorXcd v = VectorXcd::Zero(dim);
  v(n) = 1.0;
  return v;
}

VectorXcd coherent_vector(int dim, cxd alpha) {
  VectorXcd v(dim);
  // c_n = alpha^n / sqrt(n!) Gaussian-weighted; build by recurrence, normalize after truncation.
  v(0) = 1.0;
  for (int n = 1; n < dim; ++n) {
    v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  }
  v *= std::exp(-0.5 * std::norm(alpha));
  v.normalize();
  return v;
}

}  // namespace sideband
