// OperatorMatrix: dense complex operator with layout metadata and an optional
// verified Hermiticity flag.
#pragma once

#include <optional>
#include <utility>

#include "sideband/layout.hpp"

namespace sideband {

inline constexpr double kHermitianTol = 1e-12;  // entrywise max |A - A^dag|

class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  OperatorMatrix(SubsystemLayout layout, MatrixXcd data)
      : layout_(std::move(layout)), data_(std::move(data)) {
    check_shape();
  }

  // Construct and declare Hermitian (verified to kHermitianTol).
  static OperatorMatrix hermitian(SubsystemLayout layout, MatrixXcd data);

  const SubsystemLayout& layout() const { return layout_; }
  const MatrixXcd& mat() const { return data_; }
  MatrixXcd& mat() { return data_; }
  int dim() const { return static_cast<int>(data_.rows()); }

  // Declared-Hermitian flag; std::nullopt when never declared either way.
  std::optional<bool> hermitian_flag() const { return hermitian_; }
  // Declare the flag; a true declaration is verified and throws InvariantViolation
  // if the matrix fails the 1e-12 entrywise check.
  void declare_hermitian(bool value);
  // Measured deviation from Hermiticity (entrywise max |A - A^dag|).
  double hermiticity_defect() const;

  OperatorMatrix adjoint() const {
    OperatorMatrix out(layout_, data_.adjoint());
    out.hermitian_ = hermitian_;
    return out;
  }

 private:
  void check_shape() const;

  SubsystemLayout layout_;
  MatrixXcd data_;
  std::optional<bool> hermitian_;
};

}  // namespace sideband
