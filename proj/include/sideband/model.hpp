// Hamiltonian construction in both frames, bright/dark-mode operators, and the
// qubit/mode frame map.
//
// Frame conventions (documented once, used everywhere):
//  * Drive frame (literal lab-adjacent frame of the sideband drives):
//      H(t)/hbar = -Omega_R sum_m a_m^dag a_m - sum_m chi_m a_m^dag a_m sigma_z
//                  - (Omega_Rabi(t)/2) sigma_x + sum_m eps_m(t)(a_m^dag + a_m)
//    assembled as a static part plus named real-coefficient channels
//    ("rabi", "drive_<mode>"), all in angular units (rad/us).
//  * JC frame (rotating/dressed frame after the RWA):
//      H = sum_m g_m (a_m sigma_+ + a_m^dag sigma_-),   g_m real >= 0.
//    The qubit labels |g>_JC / |e>_JC are the dressed states: |e>_JC is the
//    state that couples to the sideband ladder. With the sign conventions
//    above the coupled dressed state is (|g>+|e>)/sqrt(2), and the lab->JC
//    qubit map is the rotation R_y(pi/2) (unitary V with V|+x> = |e>_JC).
#pragma once

#include <map>
#include <string>

#include "sideband/operator_matrix.hpp"
#include "sideband/ops.hpp"
#include "sideband/params.hpp"
#include "sideband/state.hpp"

namespace sideband {

// One named time-dependent channel: applied term is
//   c(t) * (cos(phase) * cos_quad + sin(phase) * sin_quad)
// with a real envelope c(t) in rad/us and a per-segment phase.
struct ChannelTerm {
  OperatorMatrix cos_quad;
  OperatorMatrix sin_quad;
};

// Operator sum with named coefficient channels (builder output).
struct HamiltonianTerms {
  OperatorMatrix static_part;
  std::map<std::string, ChannelTerm> channels;
};

// Eq.-style drive-frame Hamiltonian on the given layout (angular units).
// Channels: "rabi" multiplying -(1/2) sigma_x (sin quadrature -(1/2) sigma_y),
// "drive_<mode>" multiplying (a^dag + a) (sin quadrature i(a^dag - a)).
HamiltonianTerms build_drive_frame_hamiltonian(const SystemParams& params,
                                               const SubsystemLayout& layout);

// JC-frame Hamiltonian sum_m g_m (a_m sigma_+ + a_m^dag sigma_-) in rad/us for
// the modes present in the layout. Hermitian exact.
OperatorMatrix build_jc_hamiltonian(const CouplingSet& couplings,
                                    const SubsystemLayout& layout);

// Bright/dark combinations B = (a1 + a2)/sqrt(2), D = (a1 - a2)/sqrt(2),
// embedded on the full layout. Requires equal mem1/mem2 dims.
std::pair<OperatorMatrix, OperatorMatrix> bright_dark_operators(const SubsystemLayout& layout);

// Lab->JC qubit basis map V = R_y(pi/2): V|+x> = |e>_JC, V|-x> = |g>_JC.
MatrixXcd jc_qubit_map();

// Map a state between frames: qubit conjugated by V (or V^dag), and, when
// `couplings` is provided, memory modes displaced by -abar (DriveFrame ->
// JCFrame at steady drive) or +abar (reverse).
QuantumState frame_map(const QuantumState& state, Frame to,
                       const CouplingSet* couplings = nullptr);

}  // namespace sideband
