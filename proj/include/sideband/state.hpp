// QuantumState: pure vector or density matrix on a SubsystemLayout, tagged with
// the frame it lives in.
#pragma once

#include <utility>

#include "sideband/layout.hpp"
#include "sideband/operator_matrix.hpp"

namespace sideband {

enum class Frame { DriveFrame, JCFrame };

const char* frame_name(Frame f);

// Validation tolerances (from the type contract).
inline constexpr double kNormTol = 1e-9;       // pure norm and density trace
inline constexpr double kDensityHermTol = 1e-10;
inline constexpr double kDensityEigTol = -1e-8;  // min eigenvalue floor

class QuantumState {
 public:
  QuantumState() = default;

  static QuantumState pure(SubsystemLayout layout, VectorXcd psi,
                           Frame frame = Frame::JCFrame);
  static QuantumState density(SubsystemLayout layout, MatrixXcd rho,
                              Frame frame = Frame::JCFrame);
  // Basis state |occupations> (one occupation number per subsystem, in layout order).
  static QuantumState basis(const SubsystemLayout& layout, const std::vector<int>& occupations,
                            Frame frame = Frame::JCFrame);

  bool is_pure() const { return pure_; }
  const SubsystemLayout& layout() const { return layout_; }
  Frame frame() const { return frame_; }
  void set_frame(Frame f) { frame_ = f; }
  int dim() const { return layout_.total_dim(); }

  const VectorXcd& vec() const;  // throws if density
  VectorXcd& vec();
  const MatrixXcd& rho() const;  // throws if pure
  MatrixXcd& rho();

  // Density-matrix view regardless of representation (|psi><psi| for pure states).
  MatrixXcd density_matrix() const;

  // Promote a pure state to its density representation in place.
  QuantumState as_density() const;

  double norm() const;   // vector norm (pure) or trace real part (density)
  double trace_real() const;

  // Cheap checks (norm/trace/Hermiticity). Throws InvariantViolation on failure.
  void validate_cheap() const;
  // Full check including the min-eigenvalue bound for density matrices.
  void validate_full() const;

 private:
  SubsystemLayout layout_;
  Frame frame_ = Frame::JCFrame;
  bool pure_ = true;
  VectorXcd psi_;
  MatrixXcd rho_;
};

}  // namespace sideband
