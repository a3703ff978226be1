// Characteristic-function tomography: direct computation, measurement-sequence
// emulation, joint two-mode slices, qubit post-selection, and fidelity.
#pragma once

#include <string>
#include <vector>

#include "sideband/ops.hpp"
#include "sideband/state.hpp"

namespace sideband {

// Inclusive linspace over one displacement quadrature.
struct CharAxis {
  double lo = -2.2;
  double hi = 2.2;
  int points = 41;

  double at(int i) const;
  void validate() const;  // points >= 1, finite bounds, lo <= hi
};

// Which quadrature an axis sweeps.
enum class CharComponent { ReAlpha, ImAlpha, ReBeta, ImBeta };

const char* char_component_name(CharComponent c);

// A 2D slice of a characteristic function: values[iy * x.points + ix].
struct CharGrid {
  CharComponent x_kind = CharComponent::ReAlpha;
  CharComponent y_kind = CharComponent::ImAlpha;
  CharAxis x;
  CharAxis y;
  std::vector<cxd> values;
  cxd origin;  // value at alpha = beta = 0 (1 for a normalized state)

  cxd at(int ix, int iy) const { return values[static_cast<size_t>(iy) * x.points + ix]; }
};

// C(alpha) = Tr[rho_mode D(alpha)] on the reduced state of `mode`, over the
// full (Re alpha, Im alpha) grid. Warns when the grid corner exceeds the
// displacement adequacy bound of the mode dimension.
CharGrid char_function(const QuantumState& state, const std::string& mode,
                       const CharAxis& re_axis, const CharAxis& im_axis);

// Single point of the same quantity.
cxd char_point(const QuantumState& state, const std::string& mode, cxd alpha);

// C(alpha, beta) = Tr[rho D1(alpha) (x) D2(beta)] on the reduced mem1+mem2
// state, swept along one quadrature of alpha (x axis) and one of beta (y).
CharGrid joint_char_function(const QuantumState& state, CharComponent x_kind,
                             const CharAxis& x_axis, CharComponent y_kind,
                             const CharAxis& y_axis);

cxd joint_char_point(const QuantumState& state, cxd alpha, cxd beta);

// Ideal measurement-sequence emulation of C(alpha) on `mode`: pi/2 pulse,
// conditional displacement, echo pi pulse, second conditional displacement,
// axis-selected pi/2 readout encoded in <sigma_x>, <sigma_y>. Requires the
// qubit reset to |g>. Matches char_function within 1e-8 on ideal states.
cxd emulate_char_measurement(const QuantumState& state, const std::string& mode, cxd alpha);

// Project the qubit onto |g> and renormalize; returns the projected state and
// the success probability Tr[P_g rho].
std::pair<QuantumState, double> postselect_ground(const QuantumState& state);

// F = <target| rho |target> for a pure target on the same layout.
double fidelity(const QuantumState& state, const QuantumState& target);

}  // namespace sideband
