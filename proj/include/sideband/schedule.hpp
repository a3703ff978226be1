// Protocol schedules: Fock generation, Fock SWAP, and Bell generation as
// ordered pulse steps, plus compilation into executable CoefficientPrograms
// in either frame.
//
// Conventions fixed here (and verified by the frame cross-check):
//  * The dressed state that exchanges excitations with the sideband ladder
//    (the JC-frame |e>) is the +x qubit state while the Rabi drive has its
//    initial sign; a Rabi sign flip exchanges the roles of the +-x states.
//  * State prep from lab |g>: R_y(+pi/2) -> JC |e> (generation, Bell),
//    R_y(-pi/2) -> JC |g> (SWAP spectator).
//  * Closing pulse: R_y(s_f * pi/2) with s_f the final Rabi sign, returning
//    the dressed ground state to lab |g> ("in phase with the final Rabi
//    drive" symmetry: for odd flip counts the sign follows the drive).
//  * JC-frame compilation: ramps vanish, the prep pulse becomes direct
//    initialization, sign flips become instantaneous relabeling unitaries
//    (+-i sigma_y), the closing pulse is dropped (frame exit bookkeeping).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sideband/model.hpp"
#include "sideband/ops.hpp"
#include "sideband/params.hpp"
#include "sideband/program.hpp"

namespace sideband {

struct TimingTable {
  enum class Source { Analytic, Calibrated };
  // tau[n] (generation hold for the n-th photon), tau_prime[n] (SWAP hold for
  // |n>); index 0 unused.
  std::vector<double> tau;
  std::vector<std::optional<double>> tau_prime;
  Source source = Source::Analytic;

  int max_n() const { return static_cast<int>(tau.size()) - 1; }
  double tau_n(int n) const;              // throws ValidationError when missing
  double tau_prime_n(int n) const;        // throws ValidationError when unset
  bool has_tau_prime(int n) const;
  void validate() const;                  // positive, analytic strictly decreasing
};

// tau_1 = 1/(4 g) us for g as g/2pi in MHz; tau_n = tau_1/sqrt(n);
// tau_prime_1 = sqrt(2) tau_1; tau_prime_n for n >= 2 left unset.
TimingTable analytic_timings(double g_mhz, int n_max);

enum class StepKind { RampUp, Hold, RabiPhaseFlip, QubitPulse, RampDown };
enum class RampShape { RaisedCosine, Linear };

const char* step_kind_name(StepKind k);
const char* ramp_shape_name(RampShape s);

struct Step {
  StepKind kind = StepKind::Hold;
  std::string channel;                 // RampUp / RampDown target
  std::vector<std::string> channels;   // Hold: channels meant to be active
  double duration = 0.0;               // Hold duration or ramp length (us)
  double amplitude = 0.0;              // RampUp target (MHz); 0 = take from params
  RampShape shape = RampShape::RaisedCosine;
  Pauli axis = Pauli::Y;               // QubitPulse
  double angle = 0.0;                  // QubitPulse rotation angle (radians)
  std::string note;                    // "init", "closing", ... (informational)
};

struct PulseSchedule {
  Frame frame = Frame::DriveFrame;
  std::string protocol;  // "fock" | "swap" | "bell"
  int target_n = 0;
  std::vector<Step> steps;

  // Ramp pairing, flip placement, and duration checks.
  void validate() const;
};

// Generation of |n> on mem1: sideband ramp, prep pulse, Rabi ramp, n holds
// (tau_1..tau_n) with sign flips between them, closing pulse, ramp downs.
//
// ramp_len sets the sideband-drive edges (controls how adiabatically the mode
// displacement is established). rabi_ramp_len sets the Rabi-drive edges and
// defaults to ramp_len when <= 0; it can be much shorter, since the qubit is
// prepared in the dressed eigenstate and tracks the Rabi turn-on exactly --
// only the brief sweep through the sideband resonance costs anything.
PulseSchedule fock_generation_schedule(int n, const TimingTable& timings, double ramp_len,
                                       Frame frame, double rabi_ramp_len = 0.0);
// SWAP of mem1 and mem2 Fock content through the bright mode: both sidebands
// ramped, spectator prep, single hold of tau_prime_n, closing pulse.
PulseSchedule swap_schedule(int n, const TimingTable& timings, double ramp_len, Frame frame,
                            double rabi_ramp_len = 0.0);
// Bell state across the modes: like SWAP but prep in the coupled dressed
// state and hold tau_prime_1 / 2.
PulseSchedule bell_schedule(const TimingTable& timings, double ramp_len, Frame frame,
                            double rabi_ramp_len = 0.0);

// Lower a schedule to segments/events in the schedule's frame. Drive frame:
// explicit eps(t) / Omega(t) envelopes (amplitudes from params, converted to
// rad/us), flips as Rabi-phase inversion. JC frame: holds only, with
// piecewise-constant "jc_<mode>" channels carrying g in rad/us.
CoefficientProgram compile(const PulseSchedule& schedule, const SystemParams& params);

// Channel operators matching JC-frame compiled programs: "jc_<mode>" channels
// multiply (a_m sigma_+ + a_m^dag sigma_-); the static part is zero.
HamiltonianTerms jc_hamiltonian_terms(const SubsystemLayout& layout);

}  // namespace sideband
