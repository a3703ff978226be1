#include "sideband/state.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace sideband {

const char* frame_name(Frame f) {
  return f == Frame::DriveFrame ? "drive" : "jc";
}

QuantumState QuantumState::pure(SubsystemLayout layout, VectorXcd psi, Frame frame) {
  if (psi.size() != layout.total_dim()) {
    throw ValidationError("QuantumState::pure: vector size does not match layout");
  }
  QuantumState s;
  s.layout_ = std::move(layout);
  s.frame_ = frame;
  s.pure_ = true;
  s.psi_ = std::move(psi);
  s.validate_cheap();
  return s;
}

QuantumState QuantumState::density(SubsystemLayout layout, MatrixXcd rho, Frame frame) {
  if (rho.rows() != rho.cols() || rho.rows() != layout.total_dim()) {
    throw ValidationError("QuantumState::density: matrix shape does not match layout");
  }
  QuantumState s;
  s.layout_ = std::move(layout);
  s.frame_ = frame;
  s.pure_ = false;
  s.rho_ = std::move(rho);
  s.validate_cheap();
  return s;
}

QuantumState QuantumState::basis(const SubsystemLayout& layout,
                                 const std::vector<int>& occupations, Frame frame) {
  VectorXcd psi = VectorXcd::Zero(layout.total_dim());
  psi(layout.flat_index(occupations)) = 1.0;
  return pure(layout, std::move(psi), frame);
}

const VectorXcd& QuantumState::vec() const {
  if (!pure_) throw ValidationError("QuantumState: vec() on a density matrix");
  return psi_;
}
VectorXcd& QuantumState::vec() {
  if (!pure_) throw ValidationError("QuantumState: vec() on a density matrix");
  return psi_;
}
const MatrixXcd& QuantumState::rho() const {
  if (pure_) throw ValidationError("QuantumState: rho() on a pure state");
  return rho_;
}
MatrixXcd& QuantumState::rho() {
  if (pure_) throw ValidationError("QuantumState: rho() on a pure state");
  return rho_;
}

MatrixXcd QuantumState::density_matrix() const {
  if (pure_) return psi_ * psi_.adjoint();
  return rho_;
}

QuantumState QuantumState::as_density() const {
  if (!pure_) return *this;
  return density(layout_, psi_ * psi_.adjoint(), frame_);
}

double QuantumState::norm() const {
  return pure_ ? psi_.norm() : rho_.trace().real();
}

double QuantumState::trace_real() const {
  return pure_ ? psi_.squaredNorm() : rho_.trace().real();
}

void QuantumState::validate_cheap() const {
  if (pure_) {
    const double n = psi_.norm();
    if (std::abs(n - 1.0) > kNormTol) {
      throw InvariantViolation("QuantumState: pure norm " + std::to_string(n) +
                               " outside 1 +/- 1e-9");
    }
  } else {
    const cxd tr = rho_.trace();
    if (std::abs(tr.real() - 1.0) > kNormTol || std::abs(tr.imag()) > kNormTol) {
      throw InvariantViolation("QuantumState: density trace " + std::to_string(tr.real()) +
                               " outside 1 +/- 1e-9");
    }
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kDensityHermTol) {
      throw InvariantViolation("QuantumState: density Hermiticity defect " +
                               std::to_string(herm) + " > 1e-10");
    }
  }
}

void QuantumState::validate_full() const {
  validate_cheap();
  if (!pure_) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (rho_ + rho_.adjoint()),
                                                Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < kDensityEigTol) {
      throw InvariantViolation("QuantumState: min eigenvalue " + std::to_string(min_eig) +
                               " below -1e-8");
    }
  }
}

}  // namespace sideband
