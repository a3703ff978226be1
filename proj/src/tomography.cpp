#include "sideband/tomography.hpp"

#include <algorithm>
#include <cmath>

namespace sideband {

double CharAxis::at(int i) const {
  if (points <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / (points - 1);
}

void CharAxis::validate() const {
  if (points < 1) throw ValidationError("characteristic axis needs at least one point");
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
    throw ValidationError("characteristic axis bounds must be finite and ordered");
}

const char* char_component_name(CharComponent c) {
  switch (c) {
    case CharComponent::ReAlpha: return "re_alpha";
    case CharComponent::ImAlpha: return "im_alpha";
    case CharComponent::ReBeta: return "re_beta";
    case CharComponent::ImBeta: return "im_beta";
  }
  return "?";
}

namespace {

double max_abs_reach(const CharAxis& a) { return std::max(std::abs(a.lo), std::abs(a.hi)); }

void check_origin(cxd origin) {
  if (std::abs(origin - cxd(1.0, 0.0)) > 1e-6)
    throw InvariantViolation("characteristic function at the origin is " +
                             std::to_string(std::abs(origin)) + ", expected 1");
}

// Tr[A B] without forming the product.
cxd trace_of_product(const MatrixXcd& a, const MatrixXcd& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

// Displacements are exponentials of a truncated generator, so they are only
// accurate well below the truncation edge.  States carry no support above
// their own dimension, so evaluating Tr[rho D] with D built in a larger
// working space (and the state zero-padded into it) removes the truncation
// error exactly.  The adequacy bound covers a displacement of the vacuum; a
// state supported up to the truncation edge needs that bound on top of its
// own dimension.
int working_dim(int state_dim, double reach) {
  return state_dim + displacement_adequate_dim(reach);
}

MatrixXcd zero_padded(const MatrixXcd& m, int dim) {
  if (dim <= m.rows()) return m;
  MatrixXcd out = MatrixXcd::Zero(dim, dim);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

}  // namespace

CharGrid char_function(const QuantumState& state, const std::string& mode,
                       const CharAxis& re_axis, const CharAxis& im_axis) {
  re_axis.validate();
  im_axis.validate();
  if (!state.layout().has(mode))
    throw ValidationError("char_function: no subsystem '" + mode + "' in the layout");

  const QuantumState reduced = partial_trace(state, {mode});
  const MatrixXcd rho = reduced.density_matrix();
  const int dim = static_cast<int>(rho.rows());

  const double corner = std::hypot(max_abs_reach(re_axis), max_abs_reach(im_axis));
  if (displacement_adequate_dim(corner) > dim)
    emit_warning("characteristic grid reaches |alpha| = " + std::to_string(corner) +
                 ", beyond the adequacy bound for dim " + std::to_string(dim) +
                 "; the state itself may be truncated at this scale");

  const int wd = working_dim(dim, corner);
  const MatrixXcd rho_w = zero_padded(rho, wd);

  // D(x + iy) = e^{i x y} D(x) D(iy): cache the two 1D families.
  std::vector<MatrixXcd> dx(re_axis.points), dy(im_axis.points);
  for (int i = 0; i < re_axis.points; ++i)
    dx[i] = displacement(cxd(re_axis.at(i), 0.0), wd).mat();
  for (int j = 0; j < im_axis.points; ++j)
    dy[j] = displacement(cxd(0.0, im_axis.at(j)), wd).mat();

  CharGrid grid;
  grid.x_kind = CharComponent::ReAlpha;
  grid.y_kind = CharComponent::ImAlpha;
  grid.x = re_axis;
  grid.y = im_axis;
  grid.origin = rho.trace();
  check_origin(grid.origin);
  grid.values.resize(static_cast<size_t>(re_axis.points) * im_axis.points);
  for (int ix = 0; ix < re_axis.points; ++ix) {
    const MatrixXcd left = rho_w * dx[ix];
    for (int iy = 0; iy < im_axis.points; ++iy) {
      const cxd phase = std::exp(cxd(0.0, re_axis.at(ix) * im_axis.at(iy)));
      grid.values[static_cast<size_t>(iy) * re_axis.points + ix] =
          phase * trace_of_product(left, dy[iy]);
    }
  }
  return grid;
}

cxd char_point(const QuantumState& state, const std::string& mode, cxd alpha) {
  const QuantumState reduced = partial_trace(state, {mode});
  const MatrixXcd rho = reduced.density_matrix();
  const int dim = static_cast<int>(rho.rows());
  const int wd = working_dim(dim, std::abs(alpha));
  // Tr[rho D] only touches the top-left state-sized block of D.
  return trace_of_product(rho, displacement(alpha, wd).mat().topLeftCorner(dim, dim));
}

CharGrid joint_char_function(const QuantumState& state, CharComponent x_kind,
                             const CharAxis& x_axis, CharComponent y_kind,
                             const CharAxis& y_axis) {
  x_axis.validate();
  y_axis.validate();
  if (x_kind != CharComponent::ReAlpha && x_kind != CharComponent::ImAlpha)
    throw ValidationError("joint_char_function: x axis must sweep alpha");
  if (y_kind != CharComponent::ReBeta && y_kind != CharComponent::ImBeta)
    throw ValidationError("joint_char_function: y axis must sweep beta");
  if (!state.layout().has("mem1") || !state.layout().has("mem2"))
    throw ValidationError("joint_char_function requires mem1 and mem2 in the layout");

  const QuantumState reduced = partial_trace(state, {"mem1", "mem2"});
  const MatrixXcd& rho = reduced.density_matrix();
  const auto& layout = reduced.layout();
  const int d1 = layout.dim_of("mem1");
  const int d2 = layout.dim_of("mem2");
  const int s1 = layout.stride(layout.index_of("mem1"));
  const int s2 = layout.stride(layout.index_of("mem2"));

  if (displacement_adequate_dim(max_abs_reach(x_axis)) > d1)
    emit_warning("joint characteristic grid alpha reach exceeds the adequacy bound for dim " +
                 std::to_string(d1));
  if (displacement_adequate_dim(max_abs_reach(y_axis)) > d2)
    emit_warning("joint characteristic grid beta reach exceeds the adequacy bound for dim " +
                 std::to_string(d2));

  const cxd x_unit = x_kind == CharComponent::ReAlpha ? cxd(1.0, 0.0) : cxd(0.0, 1.0);
  const cxd y_unit = y_kind == CharComponent::ReBeta ? cxd(1.0, 0.0) : cxd(0.0, 1.0);

  // The contraction only reads D elements below the state dimensions, so the
  // operators may be built in a larger working space for accuracy.
  const int w1 = working_dim(d1, max_abs_reach(x_axis));
  const int w2 = working_dim(d2, max_abs_reach(y_axis));

  std::vector<MatrixXcd> d1_ops(x_axis.points);
  for (int i = 0; i < x_axis.points; ++i)
    d1_ops[i] = displacement(x_unit * x_axis.at(i), w1).mat();

  CharGrid grid;
  grid.x_kind = x_kind;
  grid.y_kind = y_kind;
  grid.x = x_axis;
  grid.y = y_axis;
  grid.origin = rho.trace();
  check_origin(grid.origin);
  grid.values.resize(static_cast<size_t>(x_axis.points) * y_axis.points);

  // C = sum_{ijkl} rho[(ij),(kl)] D1[k,i] D2[l,j]; contract mem2 first.
  MatrixXcd t(d1, d1);
  for (int iy = 0; iy < y_axis.points; ++iy) {
    const MatrixXcd d2_op = displacement(y_unit * y_axis.at(iy), w2).mat();
    t.setZero();
    for (int i = 0; i < d1; ++i)
      for (int k = 0; k < d1; ++k) {
        cxd acc = 0.0;
        for (int j = 0; j < d2; ++j)
          for (int l = 0; l < d2; ++l) acc += rho(i * s1 + j * s2, k * s1 + l * s2) * d2_op(l, j);
        t(i, k) = acc;
      }
    for (int ix = 0; ix < x_axis.points; ++ix) {
      cxd acc = 0.0;
      for (int i = 0; i < d1; ++i)
        for (int k = 0; k < d1; ++k) acc += t(i, k) * d1_ops[ix](k, i);
      grid.values[static_cast<size_t>(iy) * x_axis.points + ix] = acc;
    }
  }
  return grid;
}

cxd joint_char_point(const QuantumState& state, cxd alpha, cxd beta) {
  const QuantumState reduced = partial_trace(state, {"mem1", "mem2"});
  const auto& layout = reduced.layout();
  const MatrixXcd& rho = reduced.density_matrix();
  const int d1 = layout.dim_of("mem1");
  const int d2 = layout.dim_of("mem2");
  const int s1 = layout.stride(layout.index_of("mem1"));
  const int s2 = layout.stride(layout.index_of("mem2"));
  const MatrixXcd dop1 = displacement(alpha, working_dim(d1, std::abs(alpha))).mat();
  const MatrixXcd dop2 = displacement(beta, working_dim(d2, std::abs(beta))).mat();
  cxd acc = 0.0;
  for (int i = 0; i < d1; ++i)
    for (int k = 0; k < d1; ++k)
      for (int j = 0; j < d2; ++j)
        for (int l = 0; l < d2; ++l)
          acc += rho(i * s1 + j * s2, k * s1 + l * s2) * dop1(k, i) * dop2(l, j);
  return acc;
}

cxd emulate_char_measurement(const QuantumState& state, const std::string& mode, cxd alpha) {
  if (!state.layout().has("qubit"))
    throw ValidationError("emulate_char_measurement requires the qubit in the layout");
  if (!state.layout().has(mode))
    throw ValidationError("emulate_char_measurement: no subsystem '" + mode + "'");

  // The sequence acts on (mode, qubit) only; reduce first.
  const QuantumState sub = partial_trace(state, {mode, "qubit"});
  const int dm = sub.layout().dim_of(mode);

  {
    const QuantumState qubit_only = partial_trace(sub, {"qubit"});
    if (std::abs(qubit_only.density_matrix()(0, 0) - 1.0) > 1e-9)
      throw ValidationError("emulate_char_measurement: qubit not reset to ground");
  }

  // The displaced branches need head-room above the state's own support; run
  // the sequence in a padded space (the qubit is the fast index, so the
  // original density matrix is exactly the top-left block).
  const int wd = working_dim(dm, std::abs(alpha));
  const SubsystemLayout layout({mode, "qubit"}, {wd, 2});
  MatrixXcd rho = zero_padded(sub.density_matrix(), 2 * wd);

  // Each conditional-displacement block moves the branches by +-alpha/4; the
  // echoed pair separates them by alpha in total, so the final qubit coherence
  // reads Tr[rho D(alpha)].
  const cxd lambda = alpha / 4.0;
  const auto qubit_op = [&](const MatrixXcd& m) {
    return embed(OperatorMatrix(SubsystemLayout({"qubit"}, {2}), m), layout, "qubit").mat();
  };
  const auto mode_op = [&](const MatrixXcd& m) {
    return embed(OperatorMatrix(SubsystemLayout({mode}, {wd}), m), layout, mode).mat();
  };

  const MatrixXcd pg = qubit_op(0.5 * (MatrixXcd::Identity(2, 2) + pauli(Pauli::Z).mat()));
  const MatrixXcd pe = qubit_op(0.5 * (MatrixXcd::Identity(2, 2) - pauli(Pauli::Z).mat()));
  const MatrixXcd dp = mode_op(displacement(lambda, wd).mat());
  const MatrixXcd dm_op = mode_op(displacement(-lambda, wd).mat());
  const MatrixXcd half = qubit_op(qubit_rotation(Pauli::Y, 0.5 * kTwoPi / 2.0));
  const MatrixXcd echo = qubit_op(qubit_rotation(Pauli::Y, kTwoPi / 2.0));

  const MatrixXcd cd1 = pg * dp + pe * dm_op;  // D(lambda sigma_z)
  const MatrixXcd cd2 = pg * dm_op + pe * dp;  // same drive after the echo

  const MatrixXcd u = cd2 * echo * cd1 * half;
  rho = u * rho * u.adjoint();

  // Equivalent to the two axis-selected closing pi/2 pulses with <sigma_z>
  // readout: measure the surviving qubit coherence directly.
  const QuantumState after =
      QuantumState::density(layout, std::move(rho), sub.frame());
  const cxd sx = expectation_on(after, pauli(Pauli::X).mat(), "qubit");
  const cxd sy = expectation_on(after, pauli(Pauli::Y).mat(), "qubit");
  return -(sx.real() + cxd(0.0, 1.0) * sy.real());
}

std::pair<QuantumState, double> postselect_ground(const QuantumState& state) {
  if (!state.layout().has("qubit"))
    throw ValidationError("postselect_ground requires the qubit in the layout");
  const auto& layout = state.layout();
  const MatrixXcd pg =
      embed(OperatorMatrix(SubsystemLayout({"qubit"}, {2}),
                           0.5 * (MatrixXcd::Identity(2, 2) + pauli(Pauli::Z).mat())),
            layout, "qubit")
          .mat();

  if (state.is_pure()) {
    VectorXcd psi = pg * state.vec();
    const double p = psi.squaredNorm();
    if (p < 1e-12) throw ValidationError("post-selection on ground is degenerate (p < 1e-12)");
    psi /= std::sqrt(p);
    return {QuantumState::pure(layout, std::move(psi), state.frame()), p};
  }
  MatrixXcd rho = pg * state.density_matrix() * pg;
  const double p = rho.trace().real();
  if (p < 1e-12) throw ValidationError("post-selection on ground is degenerate (p < 1e-12)");
  rho /= p;
  return {QuantumState::density(layout, std::move(rho), state.frame()), p};
}

double fidelity(const QuantumState& state, const QuantumState& target) {
  if (state.layout() != target.layout())
    throw ValidationError("fidelity: layouts do not match");
  if (!target.is_pure()) throw ValidationError("fidelity target must be a pure state");
  double f;
  if (state.is_pure()) {
    f = std::norm((target.vec().adjoint() * state.vec())(0, 0));
  } else {
    f = ((target.vec().adjoint() * state.density_matrix() * target.vec())(0, 0)).real();
  }
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace sideband
