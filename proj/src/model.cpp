#include "sideband/model.hpp"

#include <cmath>

#include "sideband/common.hpp"

namespace sideband {

namespace {

// Mode labels the physics layer recognizes, in canonical order.
const char* kModeLabels[] = {"mem1", "mem2", "readout"};

double chi_for(const SystemParams& p, const std::string& mode) {
  if (mode == "mem1") return p.chi_1;
  if (mode == "mem2") return p.chi_2;
  if (mode == "readout") return p.chi_r;
  throw ValidationError("unknown mode label '" + mode + "'");
}

}  // namespace

HamiltonianTerms build_drive_frame_hamiltonian(const SystemParams& params,
                                               const SubsystemLayout& layout) {
  params.validate();
  if (!layout.has("qubit"))
    throw ValidationError("drive-frame Hamiltonian requires a 'qubit' subsystem in the layout");
  const int dim = layout.total_dim();
  const double omega_r = to_angular(params.rabi_freq);

  MatrixXcd h_static = MatrixXcd::Zero(dim, dim);
  const OperatorMatrix sz = embed(pauli(Pauli::Z), layout, "qubit");
  for (const char* mode : kModeLabels) {
    if (!layout.has(mode)) continue;
    const OperatorMatrix num = embed(number_operator(layout.dim_of(mode)), layout, mode);
    const double chi = to_angular(chi_for(params, mode));
    h_static += -omega_r * num.mat() - chi * (num.mat() * sz.mat());
  }

  HamiltonianTerms terms{OperatorMatrix::hermitian(layout, std::move(h_static)), {}};

  // Rabi drive: coefficient Omega_Rabi(t) (rad/us), phase 0 = -x/2 quadrature.
  const SubsystemLayout qubit_sub = SubsystemLayout::single("qubit", 2);
  terms.channels.emplace(
      "rabi",
      ChannelTerm{embed(OperatorMatrix::hermitian(qubit_sub, -0.5 * pauli(Pauli::X).mat()),
                        layout, "qubit"),
                  embed(OperatorMatrix::hermitian(qubit_sub, -0.5 * pauli(Pauli::Y).mat()),
                        layout, "qubit")});

  // Sideband displacement drives: coefficient eps_m(t) (rad/us).
  for (const char* mode : kModeLabels) {
    if (!layout.has(mode)) continue;
    const int d = layout.dim_of(mode);
    const OperatorMatrix a = annihilation(d);
    MatrixXcd cos_quad = a.mat().adjoint() + a.mat();                // a^dag + a
    MatrixXcd sin_quad = cxd(0, 1) * (a.mat().adjoint() - a.mat());  // i(a^dag - a)
    const SubsystemLayout sub = SubsystemLayout::single(mode, d);
    terms.channels.emplace(
        std::string("drive_") + mode,
        ChannelTerm{embed(OperatorMatrix::hermitian(sub, std::move(cos_quad)), layout, mode),
                    embed(OperatorMatrix::hermitian(sub, std::move(sin_quad)), layout, mode)});
  }
  return terms;
}

OperatorMatrix build_jc_hamiltonian(const CouplingSet& couplings,
                                    const SubsystemLayout& layout) {
  if (!layout.has("qubit"))
    throw ValidationError("JC Hamiltonian requires a 'qubit' subsystem in the layout");
  const int dim = layout.total_dim();
  const OperatorMatrix sp = embed(pauli(Pauli::Plus), layout, "qubit");

  struct ModeG {
    const char* label;
    double g_mhz;
  };
  const ModeG table[] = {{"mem1", couplings.g_1}, {"mem2", couplings.g_2},
                         {"readout", couplings.g_r}};

  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  for (const auto& m : table) {
    if (!layout.has(m.label)) continue;
    const double g = to_angular(m.g_mhz);
    if (g == 0.0) continue;
    const OperatorMatrix a = embed(annihilation(layout.dim_of(m.label)), layout, m.label);
    MatrixXcd half = g * (a.mat() * sp.mat());  // g a sigma_+
    h += half + half.adjoint();                 // + g a^dag sigma_-
  }
  return OperatorMatrix::hermitian(layout, std::move(h));
}

std::pair<OperatorMatrix, OperatorMatrix> bright_dark_operators(const SubsystemLayout& layout) {
  if (!layout.has("mem1") || !layout.has("mem2"))
    throw ValidationError("bright/dark operators need both 'mem1' and 'mem2' in the layout");
  if (layout.dim_of("mem1") != layout.dim_of("mem2"))
    throw ValidationError("bright/dark operators need equal mem1/mem2 dimensions");
  const OperatorMatrix a1 = embed(annihilation(layout.dim_of("mem1")), layout, "mem1");
  const OperatorMatrix a2 = embed(annihilation(layout.dim_of("mem2")), layout, "mem2");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  OperatorMatrix bright(layout, inv_sqrt2 * (a1.mat() + a2.mat()));
  OperatorMatrix dark(layout, inv_sqrt2 * (a1.mat() - a2.mat()));
  return {std::move(bright), std::move(dark)};
}

MatrixXcd jc_qubit_map() { return qubit_rotation(Pauli::Y, kTwoPi / 4.0); }

QuantumState frame_map(const QuantumState& state, Frame to,
                       const CouplingSet* couplings) {
  if (state.frame() == to) return state;
  const SubsystemLayout& layout = state.layout();
  if (!layout.has("qubit"))
    throw ValidationError("frame_map requires a 'qubit' subsystem in the layout");

  // Full-system map W for DriveFrame -> JCFrame; the reverse uses W^dag.
  MatrixXcd w = embed(OperatorMatrix(SubsystemLayout::single("qubit", 2), jc_qubit_map()),
                      layout, "qubit")
                    .mat();
  if (couplings) {
    struct ModeA {
      const char* label;
      cxd abar;
    };
    const ModeA table[] = {{"mem1", couplings->abar_1}, {"mem2", couplings->abar_2},
                           {"readout", couplings->abar_r}};
    for (const auto& m : table) {
      if (!layout.has(m.label) || m.abar == cxd(0, 0)) continue;
      w = embed(displacement(-m.abar, layout.dim_of(m.label)), layout, m.label).mat() * w;
    }
  }
  if (to == Frame::DriveFrame) w = w.adjoint().eval();

  if (state.is_pure()) {
    VectorXcd v = w * state.vec();
    return QuantumState::pure(layout, std::move(v), to);
  }
  MatrixXcd rho = w * state.rho() * w.adjoint();
  return QuantumState::density(layout, std::move(rho), to);
}

}  // namespace sideband
