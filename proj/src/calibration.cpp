#include "sideband/calibration.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "sideband/model.hpp"
#include "sideband/ops.hpp"
#include "sideband/tomography.hpp"

namespace sideband {

namespace {

double final_sigma_z(const ProtocolResult& result) {
  return expectation_on(result.trajectory.final_state, pauli(Pauli::Z).mat(), "qubit").real();
}

// Fit a parabola through three points and move the extremum off the grid.
// Returns false when the points are too collinear to refine.
bool refine_quadratic(const double x[3], const double y[3], bool maximize, double& loc,
                      double& val, std::array<double, 3>& fit) {
  const double h0 = x[1] - x[0];
  const double h1 = x[2] - x[1];
  const double d0 = (y[1] - y[0]) / h0;
  const double d1 = (y[2] - y[1]) / h1;
  const double c = (d1 - d0) / (h0 + h1);  // half the second difference
  const double scale = std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y[2]), 1e-30});
  if (std::abs(c) * (h0 + h1) * (h0 + h1) < 1e-12 * scale) return false;
  if (maximize ? c >= 0.0 : c <= 0.0) return false;  // wrong curvature
  // Newton polynomial y = y0 + d0 (x-x0) + c (x-x0)(x-x1); vertex:
  const double xv = 0.5 * (x[0] + x[1] - d0 / c);
  if (xv < x[0] || xv > x[2]) return false;
  loc = xv;
  val = y[0] + d0 * (xv - x[0]) + c * (xv - x[0]) * (xv - x[1]);
  // Monomial coefficients a + b x + c x^2 for reporting.
  fit[2] = c;
  fit[1] = d0 - c * (x[0] + x[1]);
  fit[0] = y[0] - d0 * x[0] + c * x[0] * x[1];
  return true;
}

void locate_extremum(SweepResult& r) {
  const size_t count = r.objective.size();
  const auto [mn, mx] = std::minmax_element(r.objective.begin(), r.objective.end());
  if (*mx - *mn < 1e-9) {
    emit_warning("sweep of " + r.parameter +
                 " is flat across the window; no extremum to report");
    r.extremum_found = false;
  }
  const auto best_it = r.maximize ? mx : mn;
  r.best_index = static_cast<int>(best_it - r.objective.begin());
  r.best_value = *best_it;
  r.refined_location = r.grid[static_cast<size_t>(r.best_index)];
  r.refined_value = r.best_value;
  if (r.best_index == 0 || r.best_index == static_cast<int>(count) - 1) {
    if (r.extremum_found)
      emit_warning("sweep of " + r.parameter +
                   " peaks on a window edge; widen the window to refine");
    return;
  }
  const size_t i = static_cast<size_t>(r.best_index);
  const double xs[3] = {r.grid[i - 1], r.grid[i], r.grid[i + 1]};
  const double ys[3] = {r.objective[i - 1], r.objective[i], r.objective[i + 1]};
  refine_quadratic(xs, ys, r.maximize, r.refined_location, r.refined_value, r.fit);
}

}  // namespace

void SweepResult::validate() const {
  if (grid.size() != objective.size() || grid.empty())
    throw ValidationError("sweep result needs matching, non-empty grid and objective");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ValidationError("sweep grid must be strictly increasing");
  if (best_index < 0 || best_index >= static_cast<int>(grid.size()))
    throw ValidationError("sweep extremum index out of range");
  if (refined_location < grid.front() || refined_location > grid.back())
    throw ValidationError("refined extremum left the sweep window");
}

SweepResult sweep_tau(int n, double tau_lo, double tau_hi, const TimingTable& timings,
                      const SystemParams& params, const SweepOptions& opts) {
  if (n < 1) throw ValidationError("sweep_tau requires n >= 1");
  if (!(tau_lo > 0.0) || !(tau_hi > tau_lo))
    throw ValidationError("sweep_tau needs 0 < tau_lo < tau_hi");
  if (opts.steps < 5) throw ValidationError("sweep_tau needs at least 5 grid points");

  // Stage n is swept; stages below reuse the supplied calibration.
  TimingTable table;
  table.source = TimingTable::Source::Calibrated;
  table.tau.assign(static_cast<size_t>(n) + 1, 0.0);
  for (int k = 1; k < n; ++k) table.tau[static_cast<size_t>(k)] = timings.tau_n(k);

  SweepResult result;
  result.parameter = "tau_" + std::to_string(n);
  result.maximize = true;
  result.grid.resize(static_cast<size_t>(opts.steps));
  result.objective.resize(static_cast<size_t>(opts.steps));

  RunOptions run = opts.run;
  run.decoherence = opts.decoherence;
  run.coherence_mult = opts.coherence_mult;

  for (int i = 0; i < opts.steps; ++i) {
    const double tau = tau_lo + (tau_hi - tau_lo) * static_cast<double>(i) / (opts.steps - 1);
    table.tau[static_cast<size_t>(n)] = tau;
    const PulseSchedule sched =
        fock_generation_schedule(n, table, opts.ramp_len, opts.frame, opts.rabi_ramp_len);
    const ProtocolResult res = execute_schedule(sched, params, run);
    result.grid[static_cast<size_t>(i)] = tau;
    result.objective[static_cast<size_t>(i)] = final_sigma_z(res);
  }

  locate_extremum(result);
  result.validate();
  return result;
}

CalibrationRun calibrate_timings(int n_max, const SystemParams& params, const SweepOptions& opts,
                                 double window_lo, double window_hi) {
  if (n_max < 1) throw ValidationError("calibrate_timings requires n_max >= 1");
  if (!(window_lo > 0.0) || !(window_hi > window_lo))
    throw ValidationError("calibrate_timings needs 0 < window_lo < window_hi");

  const CouplingSet cpl = couplings_from_params(params);
  const TimingTable analytic = analytic_timings(cpl.g_1, n_max);

  CalibrationRun out;
  out.timings = analytic;
  out.timings.source = TimingTable::Source::Calibrated;
  for (int k = 1; k <= n_max; ++k) {
    const double center = analytic.tau_n(k);
    SweepResult sweep =
        sweep_tau(k, window_lo * center, window_hi * center, out.timings, params, opts);
    out.timings.tau[static_cast<size_t>(k)] = sweep.refined_location;
    out.sweeps.push_back(std::move(sweep));
  }
  out.timings.validate();
  return out;
}

SwapTimeResult extract_swap_time(int n, const SystemParams& params, double t_lo, double t_hi,
                                 int samples) {
  if (n < 1) throw ValidationError("extract_swap_time requires n >= 1");
  if (samples < 5) throw ValidationError("extract_swap_time needs at least 5 samples");
  const CouplingSet cpl = couplings_from_params(params);
  const double tau_1p = std::sqrt(2.0) / (4.0 * cpl.g_1);
  if (t_lo <= 0.0 && t_hi <= 0.0) {
    // Single-photon transfer completes exactly at tau_1p (and again at every
    // odd multiple); multi-photon transfer is never complete and its first
    // strong peak sits near 2.9 * tau_1p, past a weak early maximum.  The
    // default windows bracket the first experimentally useful peak.
    t_lo = (n == 1 ? 0.05 : 1.6) * tau_1p;
    t_hi = (n == 1 ? 1.6 : 4.0) * tau_1p;
  }
  if (!(t_lo > 0.0) || !(t_hi > t_lo))
    throw ValidationError("extract_swap_time needs 0 < t_lo < t_hi");

  const int md = n + 3;
  const SubsystemLayout layout({"mem1", "mem2", "qubit"}, {md, md, 2});
  const OperatorMatrix h = build_jc_hamiltonian(cpl, layout);
  const MatrixXcd n2 = embed(number_operator(md), layout, "mem2").mat();

  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h.mat());
  if (solver.info() != Eigen::Success)
    throw NumericalError("coupling Hamiltonian diagonalization failed");
  const MatrixXcd& v = solver.eigenvectors();
  const Eigen::VectorXd& e = solver.eigenvalues();

  std::vector<int> occ(static_cast<size_t>(layout.subsystem_count()), 0);
  occ[0] = n;
  const VectorXcd psi0 = QuantumState::basis(layout, occ, Frame::JCFrame).vec();
  const VectorXcd w = v.adjoint() * psi0;

  const auto n2_at = [&](double t) {
    VectorXcd phased(w.size());
    for (Eigen::Index a = 0; a < w.size(); ++a)
      phased(a) = std::exp(cxd(0.0, -e(a) * t)) * w(a);
    const VectorXcd psi = v * phased;
    return std::real(cxd((psi.adjoint() * n2 * psi)(0, 0)));
  };

  SwapTimeResult out;
  out.times.resize(static_cast<size_t>(samples));
  out.n2.resize(static_cast<size_t>(samples));
  int best = 0;
  for (int i = 0; i < samples; ++i) {
    const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / (samples - 1);
    out.times[static_cast<size_t>(i)] = t;
    out.n2[static_cast<size_t>(i)] = n2_at(t);
    if (out.n2[static_cast<size_t>(i)] > out.n2[static_cast<size_t>(best)]) best = i;
  }
  if (best == 0 || best == samples - 1)
    throw ValidationError("swap-transfer maximum sits on the search-window edge");

  const size_t b = static_cast<size_t>(best);
  const double xs[3] = {out.times[b - 1], out.times[b], out.times[b + 1]};
  const double ys[3] = {out.n2[b - 1], out.n2[b], out.n2[b + 1]};
  out.tau_prime = out.times[b];
  out.peak_n2 = out.n2[b];
  std::array<double, 3> fit{};
  double loc = out.tau_prime, val = out.peak_n2;
  if (refine_quadratic(xs, ys, /*maximize=*/true, loc, val, fit)) {
    out.tau_prime = loc;
    out.peak_n2 = n2_at(loc);
  }
  return out;
}

std::vector<RampCoherencePoint> ramp_coherence_study(
    const std::vector<int>& n_list, const std::vector<double>& ramp_ns_list,
    const std::vector<double>& coherence_mults, const SystemParams& params,
    const TimingTable& timings, const RunOptions& base) {
  if (n_list.empty() || ramp_ns_list.empty() || coherence_mults.empty())
    throw ValidationError("ramp_coherence_study needs non-empty axis lists");
  for (double r : ramp_ns_list)
    if (!(r > 0.0)) throw ValidationError("ramp lengths must be positive");
  for (double m : coherence_mults)
    if (!(m > 0.0)) throw ValidationError("coherence multipliers must be positive");

  std::vector<RampCoherencePoint> out;
  out.reserve(n_list.size() * ramp_ns_list.size() * coherence_mults.size());
  for (int n : n_list) {
    for (double ramp_ns : ramp_ns_list) {
      for (double mult : coherence_mults) {
        const PulseSchedule sched =
            fock_generation_schedule(n, timings, ramp_ns * 1e-3, Frame::DriveFrame);
        RunOptions run = base;
        run.decoherence = true;
        run.coherence_mult = mult;
        const ProtocolResult res = execute_schedule(sched, params, run);

        RampCoherencePoint pt;
        pt.n = n;
        pt.ramp_ns = ramp_ns;
        pt.coherence_mult = mult;
        auto [post, prob] = postselect_ground(res.trajectory.final_state);
        pt.postselect_prob = prob;
        const QuantumState mem = partial_trace(post, {"mem1"});
        const int md = mem.layout().dim_of("mem1");
        const SubsystemLayout mlay({"mem1"}, {md});
        pt.fidelity = fidelity(mem, QuantumState::basis(mlay, {n}, Frame::DriveFrame));
        out.push_back(pt);
      }
    }
  }
  return out;
}

}  // namespace sideband
