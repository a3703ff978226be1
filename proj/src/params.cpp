#include "sideband/params.hpp"

namespace sideband {

void SystemParams::validate() const {
  auto require_nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) {
      throw ValidationError(std::string("SystemParams: field '") + name + "' must be >= 0");
    }
  };
  if (!(rabi_freq > 0.0)) {
    throw ValidationError("SystemParams: field 'rabi_freq' must be > 0");
  }
  require_nonneg(chi_r, "chi_r");
  require_nonneg(chi_1, "chi_1");
  require_nonneg(chi_2, "chi_2");
  require_nonneg(kappa_r, "kappa_r");
  require_nonneg(eps_r, "eps_r");
  require_nonneg(eps_1, "eps_1");
  require_nonneg(eps_2, "eps_2");
  require_nonneg(t1_qubit, "t1_qubit");
  require_nonneg(t2_echo_qubit, "t2_echo_qubit");
  require_nonneg(t1_mem1, "t1_mem1");
  require_nonneg(t1_mem2, "t1_mem2");
  if (t1_qubit > 0.0 && t2_echo_qubit > 2.0 * t1_qubit) {
    throw ValidationError(
        "SystemParams: field 't2_echo_qubit' exceeds 2*t1_qubit (unphysical pure-dephasing "
        "rate)");
  }
}

double SystemParams::pure_dephasing_rate() const {
  if (t2_echo_qubit <= 0.0) return 0.0;  // T2 = 0/absent means no dephasing channel requested
  const double t1_term = (t1_qubit > 0.0) ? 1.0 / (2.0 * t1_qubit) : 0.0;
  double rate = 1.0 / t2_echo_qubit - t1_term;
  if (rate < 0.0 && rate > -1e-12) rate = 0.0;  // clamp arithmetic dust at T2 = 2 T1
  if (rate < 0.0) {
    throw ValidationError("SystemParams: negative pure-dephasing rate (t2_echo_qubit > 2*t1)");
  }
  return rate;
}

SystemParams SystemParams::with_coherence_multiplier(double mult) const {
  if (!(mult > 0.0)) {
    throw ValidationError("SystemParams: coherence multiplier must be > 0");
  }
  SystemParams out = *this;
  out.t1_qubit *= mult;
  out.t2_echo_qubit *= mult;
  out.t1_mem1 *= mult;
  out.t1_mem2 *= mult;
  return out;
}

cxd steady_state_amplitude(const SystemParams& params, const std::string& mode) {
  if (!(params.rabi_freq > 0.0)) {
    throw ValidationError("steady_state_amplitude: rabi_freq must be > 0");
  }
  if (mode == "mem1") return cxd(params.eps_1 / params.rabi_freq, 0.0);
  if (mode == "mem2") return cxd(params.eps_2 / params.rabi_freq, 0.0);
  if (mode == "readout") {
    return params.eps_r / cxd(params.rabi_freq, 0.5 * params.kappa_r);
  }
  throw ValidationError("steady_state_amplitude: unknown mode '" + mode + "'");
}

double effective_coupling(const SystemParams& params, const std::string& mode) {
  double chi;
  if (mode == "mem1") {
    chi = params.chi_1;
  } else if (mode == "mem2") {
    chi = params.chi_2;
  } else if (mode == "readout") {
    chi = params.chi_r;
  } else {
    throw ValidationError("effective_coupling: unknown mode '" + mode + "'");
  }
  return std::abs(chi) * std::abs(steady_state_amplitude(params, mode));
}

CouplingSet couplings_from_params(const SystemParams& params) {
  CouplingSet c;
  c.abar_1 = steady_state_amplitude(params, "mem1").real();
  c.abar_2 = steady_state_amplitude(params, "mem2").real();
  c.abar_r = steady_state_amplitude(params, "readout");
  c.g_1 = effective_coupling(params, "mem1");
  c.g_2 = effective_coupling(params, "mem2");
  c.g_r = params.include_readout ? effective_coupling(params, "readout") : 0.0;
  return c;
}

}  // namespace sideband
