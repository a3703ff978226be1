// Collapse (Lindblad jump) operators from device parameters.
#pragma once

#include <string>
#include <vector>

#include "sideband/operator_matrix.hpp"
#include "sideband/params.hpp"
#include "sideband/state.hpp"

namespace sideband {

struct CollapseOp {
  OperatorMatrix op;
  double rate = 0.0;  // 1/us
  std::string tag;
};

struct CollapseSet {
  std::vector<CollapseOp> ops;
};

// Standard decoherence model on `layout`:
//  * qubit decay sigma_- at 1/T1_q,
//  * qubit pure dephasing sigma_z/sqrt(2) at gamma_phi = 1/T2 - 1/(2 T1),
//  * memory-mode damping a_m at 1/T1_m,
//  * readout damping a_r at kappa_r (angular, = 2*pi*kappa_r[MHz]) when the
//    readout mode is present.
// In the JC frame the qubit operators are conjugated by the lab->JC map
// (lab sigma_z dephasing becomes dressed sigma_x); mode operators keep their
// form. Zero-rate entries are omitted.
CollapseSet collapse_from_params(const SystemParams& params, const SubsystemLayout& layout,
                                 Frame frame);

}  // namespace sideband
