#pragma once

// Calibration and study procedures: hold-duration sweeps with extremum
// extraction, simulation-based transfer-time extraction for the mode-mode
// swap, and the ramp-length / coherence-budget fidelity study.

#include <array>
#include <string>
#include <vector>

#include "sideband/params.hpp"
#include "sideband/runner.hpp"
#include "sideband/schedule.hpp"

namespace sideband {

// One calibration sweep: an objective sampled over a strictly increasing
// grid, plus the raw grid extremum and its 3-point quadratic refinement.
struct SweepResult {
  std::string parameter;          // swept quantity, e.g. "tau_1"
  std::vector<double> grid;       // strictly increasing parameter values (us)
  std::vector<double> objective;  // objective per grid point
  bool maximize = true;           // search sense used
  bool extremum_found = true;     // false when the objective is flat in-range

  int best_index = 0;        // raw grid extremum
  double best_value = 0.0;   // objective at best_index
  double refined_location = 0.0;
  double refined_value = 0.0;
  // Parabola a + b*x + c*x^2 through the three points around the extremum;
  // all zero when refinement was impossible (extremum on a grid edge).
  std::array<double, 3> fit = {0.0, 0.0, 0.0};

  void validate() const;
};

struct SweepOptions {
  int steps = 41;
  bool decoherence = false;
  double coherence_mult = 1.0;
  Frame frame = Frame::DriveFrame;
  double ramp_len = 0.02;       // sideband ramp length (us)
  double rabi_ramp_len = 0.0;   // 0 = follow ramp_len
  RunOptions run;               // fock_dim / dt_max / tolerance overrides
};

// Sweep the hold duration of stage n of the Fock-generation protocol over
// [tau_lo, tau_hi], reusing the earlier-stage durations from `timings`.
// Objective: final <sigma_z> on the qubit (+1 means it returned to ground, a
// successful stage), searched for its maximum.  The experiment's equivalent
// curve reports minimal excited-state population at the same location.
SweepResult sweep_tau(int n, double tau_lo, double tau_hi, const TimingTable& timings,
                      const SystemParams& params, const SweepOptions& opts = {});

// Calibrate stages 1..n_max sequentially: stage k is swept over
// [window_lo, window_hi] * tau_k_analytic with earlier stages already set to
// their refined values.  Returns a Calibrated timing table (tau_prime is
// copied from the analytic table), plus the per-stage sweeps.
struct CalibrationRun {
  TimingTable timings;
  std::vector<SweepResult> sweeps;  // one per stage, in order
};
CalibrationRun calibrate_timings(int n_max, const SystemParams& params,
                                 const SweepOptions& opts = {}, double window_lo = 0.7,
                                 double window_hi = 1.3);

// Transfer-time extraction for the mode-mode swap: evolve |n, 0> with the
// qubit in the lower dressed state under the sideband-coupling Hamiltonian,
// sample <n_2>(t) over [t_lo, t_hi], and return the refined location of its
// maximum.  t_lo/t_hi <= 0 picks a default window around the single-photon
// transfer time.
struct SwapTimeResult {
  double tau_prime = 0.0;  // refined peak location (us)
  double peak_n2 = 0.0;    // <n_2> at the refined peak
  std::vector<double> times;
  std::vector<double> n2;
};
SwapTimeResult extract_swap_time(int n, const SystemParams& params, double t_lo = 0.0,
                                 double t_hi = 0.0, int samples = 1501);

// Ramp-length / coherence study: for every (n, ramp, coherence multiplier)
// combination, run the decoherent generation protocol and record the fidelity
// to |n> on mem1 after ground post-selection.
struct RampCoherencePoint {
  int n = 0;
  double ramp_ns = 0.0;
  double coherence_mult = 1.0;
  double fidelity = 0.0;
  double postselect_prob = 0.0;
};
std::vector<RampCoherencePoint> ramp_coherence_study(
    const std::vector<int>& n_list, const std::vector<double>& ramp_ns_list,
    const std::vector<double>& coherence_mults, const SystemParams& params,
    const TimingTable& timings, const RunOptions& base = {});

}  // namespace sideband
