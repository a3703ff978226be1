#include "sideband/oracle.hpp"

#include <cmath>
#include <limits>

#include "sideband/expm.hpp"

namespace sideband {

JcPopulations jc_populations(int n, double g_mhz, double t_us, JcStart start) {
  if (n < 0) throw ValidationError("jc_populations requires n >= 0");
  if (g_mhz < 0.0) throw ValidationError("jc_populations requires g >= 0");
  const double theta = to_angular(g_mhz) * std::sqrt(static_cast<double>(n) + 1.0) * t_us;
  const double s2 = std::sin(theta) * std::sin(theta);
  JcPopulations out{};
  if (start == JcStart::QubitExcited) {
    out.p_mode_gain = s2;
    out.p_qubit_excited = 1.0 - s2;
  } else {
    out.p_qubit_excited = s2;
    out.p_mode_gain = 1.0 - s2;
  }
  return out;
}

BrightDarkAmplitudes bright_dark_evolution(double t_us, double g_mhz, BrightDarkStart initial) {
  if (!(g_mhz > 0.0)) throw ValidationError("bright_dark_evolution requires g > 0");
  const double theta = std::sqrt(2.0) * to_angular(g_mhz) * t_us;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  BrightDarkAmplitudes out{};
  if (initial == BrightDarkStart::SinglePhotonMem1) {
    // |1,0,g> = (|1_B> + |1_D>)/sqrt(2); only the bright half evolves.
    out.a_10 = cxd(0.5 * (c + 1.0), 0.0);
    out.a_01 = cxd(0.5 * (c - 1.0), 0.0);
    out.a_qubit = cxd(0.0, -s * inv_sqrt2);
  } else {
    // |0,0,e> -> cos |0,0,e> - i sin |1_B, g>.
    out.a_10 = cxd(0.0, -s * inv_sqrt2);
    out.a_01 = out.a_10;
    out.a_qubit = cxd(c, 0.0);
  }
  return out;
}

cxd char_fock_closed_form(int n, cxd alpha) {
  if (n < 0) throw ValidationError("char_fock_closed_form requires n >= 0");
  const double x = std::norm(alpha);
  double lm1 = 0.0;  // L_{k-1}
  double lk = 1.0;   // L_0
  for (int k = 0; k < n; ++k) {
    const double lp1 =
        ((2.0 * k + 1.0 - x) * lk - static_cast<double>(k) * lm1) / (k + 1.0);
    lm1 = lk;
    lk = lp1;
  }
  return cxd(std::exp(-0.5 * x) * lk, 0.0);
}

OperatorMatrix brute_force_propagator(const OperatorMatrix& h, double t_us) {
  if (h.dim() > 512)
    throw ValidationError("brute_force_propagator supports dim <= 512");
  if (h.hermitian_flag().has_value() && !*h.hermitian_flag())
    throw ValidationError("brute_force_propagator requires a Hermitian matrix");
  if (h.hermiticity_defect() > 1e-9)
    throw ValidationError("brute_force_propagator requires a Hermitian matrix");

  MatrixXcd u = expm_hermitian_propagator(h.mat(), t_us);
  const double unitarity =
      (u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (unitarity > 1e-10)
    throw NumericalError("propagator unitarity defect " + std::to_string(unitarity));
  return OperatorMatrix(h.layout(), std::move(u));
}

AnalyticPrediction dark_amplitude_prediction(double g_mhz) {
  (void)g_mhz;
  AnalyticPrediction p;
  p.quantity = "dark_mode_amplitude";
  p.t_min = 0.0;
  p.t_max = std::numeric_limits<double>::infinity();
  p.eval = [](double) { return cxd(1.0 / std::sqrt(2.0), 0.0); };
  return p;
}

AnalyticPrediction bright_transfer_prediction(double g_mhz) {
  AnalyticPrediction p;
  p.quantity = "qubit_excited_population";
  p.t_min = 0.0;
  p.t_max = std::numeric_limits<double>::infinity();
  const double rate = std::sqrt(2.0) * to_angular(g_mhz);
  p.eval = [rate](double t) {
    const double c = std::cos(rate * t);
    return cxd(c * c, 0.0);
  };
  return p;
}

}  // namespace sideband
