#include "sideband/operator_matrix.hpp"

namespace sideband {

void OperatorMatrix::check_shape() const {
  if (data_.rows() != data_.cols()) {
    throw ValidationError("OperatorMatrix: matrix must be square");
  }
  if (data_.rows() != layout_.total_dim()) {
    throw ValidationError("OperatorMatrix: matrix dim " + std::to_string(data_.rows()) +
                          " does not match layout " + layout_.to_string());
  }
}

OperatorMatrix OperatorMatrix::hermitian(SubsystemLayout layout, MatrixXcd data) {
  OperatorMatrix op(std::move(layout), std::move(data));
  op.declare_hermitian(true);
  return op;
}

void OperatorMatrix::declare_hermitian(bool value) {
  if (value) {
    const double defect = hermiticity_defect();
    if (defect > kHermitianTol) {
      throw InvariantViolation("OperatorMatrix: declared Hermitian but |A - A^dag|_max = " +
                               std::to_string(defect));
    }
  }
  hermitian_ = value;
}

double OperatorMatrix::hermiticity_defect() const {
  return (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace sideband
