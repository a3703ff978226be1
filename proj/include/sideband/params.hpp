// SystemParams: device parameters in experiment units (MHz as f = omega/2pi,
// lifetimes in us), plus derived coupling quantities.
#pragma once

#include <string>

#include "sideband/common.hpp"

namespace sideband {

struct SystemParams {
  double rabi_freq = 6.0;        // Omega_R/2pi [MHz]
  double chi_r = 0.36;           // dispersive shifts chi/2pi [MHz]
  double chi_1 = 0.035;
  double chi_2 = 0.020;
  double kappa_r = 0.42;         // readout linewidth kappa_r/2pi [MHz]
  double eps_r = 0.0;            // drive amplitudes eps/2pi [MHz]
  double eps_1 = 31.2;
  double eps_2 = 54.6;
  double t1_qubit = 22.8;        // lifetimes [us]
  double t2_echo_qubit = 21.8;
  double t1_mem1 = 145.0;
  double t1_mem2 = 136.0;
  bool include_readout = false;

  // Throws ValidationError naming the offending field.
  void validate() const;

  // Pure dephasing rate gamma_phi = 1/T2 - 1/(2 T1) [1/us].
  double pure_dephasing_rate() const;

  SystemParams with_coherence_multiplier(double mult) const;
};

struct CouplingSet {
  double g_r = 0.0;   // coupling rates g/2pi [MHz], real >= 0 by convention
  double g_1 = 0.0;
  double g_2 = 0.0;
  cxd abar_r = 0.0;   // steady-state amplitudes (readout is complex)
  double abar_1 = 0.0;
  double abar_2 = 0.0;
};

// abar = eps/Omega_R for memory modes; abar_r = eps_r/(Omega_R + i kappa_r/2).
cxd steady_state_amplitude(const SystemParams& params, const std::string& mode);
// g_i = |chi_i| * |abar_i| [MHz as g/2pi].
double effective_coupling(const SystemParams& params, const std::string& mode);
// All couplings at once.
CouplingSet couplings_from_params(const SystemParams& params);

}  // namespace sideband
