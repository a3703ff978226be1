// Closed-form and brute-force ground truth, independent of the integrator.
// These are the authorities the test suite checks simulations against.
#pragma once

#include <functional>
#include <string>

#include "sideband/common.hpp"
#include "sideband/operator_matrix.hpp"

namespace sideband {

// A named closed-form evaluator with its validity window [t_min, t_max] in us.
struct AnalyticPrediction {
  std::string quantity;
  double t_min = 0.0;
  double t_max = 0.0;
  std::function<cxd(double)> eval;
};

enum class JcStart { QubitExcited, ModeExcited };

struct JcPopulations {
  double p_mode_gain;       // population of |g, n+1>
  double p_qubit_excited;   // population of |e, n>
};

// Two-level exchange |e,n> <-> |g,n+1> at angular rate 2*pi*g*sqrt(n+1); g is
// g/2pi in MHz. `start` picks which basis state holds the excitation at t = 0.
// p_mode_gain + p_qubit_excited == 1 exactly.
JcPopulations jc_populations(int n, double g_mhz, double t_us, JcStart start);

enum class BrightDarkStart { SinglePhotonMem1, QubitExcitedVacuum };

// Amplitudes on |1,0,g>, |0,1,g>, and the excited-qubit state (|0,0,e>).
struct BrightDarkAmplitudes {
  cxd a_10;
  cxd a_01;
  cxd a_qubit;
};

// Exact two-mode dynamics through the bright/dark decomposition: the bright
// combination exchanges with the qubit at sqrt(2) g, the dark one is frozen.
BrightDarkAmplitudes bright_dark_evolution(double t_us, double g_mhz, BrightDarkStart initial);

// Characteristic function of |n><n|: e^{-|alpha|^2/2} L_n(|alpha|^2), with the
// Laguerre polynomial evaluated by the stable three-term recurrence.
cxd char_fock_closed_form(int n, cxd alpha);

// exp(-i H t) via self-adjoint diagonalization (dim <= 512); the result is
// verified unitary to 1e-10.
OperatorMatrix brute_force_propagator(const OperatorMatrix& h, double t_us);

// Canned closed forms for the two-mode protocol, used directly by tests.
AnalyticPrediction dark_amplitude_prediction(double g_mhz);    // constant 1/sqrt(2)
AnalyticPrediction bright_transfer_prediction(double g_mhz);   // cos^2(sqrt(2) g_ang t)

}  // namespace sideband
