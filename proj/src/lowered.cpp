#include "sideband/lowered.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include <Eigen/Eigenvalues>

#include "sideband/ops.hpp"

namespace sideband {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA2[1] = {1.0 / 5};
constexpr double kA3[2] = {3.0 / 40, 9.0 / 40};
constexpr double kA4[3] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
constexpr double kA5[4] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
constexpr double kA6[5] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                           -5103.0 / 18656};
constexpr double kB[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                          11.0 / 84, 0.0};
// b - b*: weights of the embedded error estimate.
constexpr double kE[7] = {35.0 / 384 - 5179.0 / 57600,
                          0.0,
                          500.0 / 1113 - 7571.0 / 16695,
                          125.0 / 192 - 393.0 / 640,
                          -2187.0 / 6784 + 92097.0 / 339200,
                          11.0 / 84 - 187.0 / 2100,
                          -1.0 / 40};

// Invariant tolerances for evolution outputs (from the dynamics contracts).
constexpr double kPureNormTol = 1e-8;
constexpr double kTraceTol = 1e-8;
constexpr double kHermTol = 1e-9;
constexpr double kEigFloor = -1e-6;

struct SegmentCoeff {
  bool active = false;
  Envelope envelope;
  double cos_phase = 1.0;
  double sin_phase = 0.0;
};

class Rk45Engine {
 public:
  Rk45Engine(const LoweredSystem& sys, const CoefficientProgram& program, bool density,
             const EngineOptions& opts)
      : sys_(sys), program_(program), density_(density), opts_(opts) {
    const int n = sys.dim;
    const int cols = density ? n : 1;
    for (auto& k : ks_) k.resize(n, cols);
    y_stage_.resize(n, cols);
    scratch_g_.resize(n, cols);
    scratch_t_.resize(n, cols);
    err_.resize(n, cols);
    max_phase_freq_ = 0.0;
    for (double d : sys.diag) max_phase_freq_ = std::max(max_phase_freq_, 2.0 * std::abs(d));
  }

  EngineStats run(MatrixXcd& state, const std::vector<double>& sample_times,
                  const SampleHook& on_sample, std::vector<MatrixXcd> event_mats);

 private:
  void rhs(int seg, double t_local, double t_global, const MatrixXcd& x, MatrixXcd& y);
  void unphase(double t, const MatrixXcd& in, MatrixXcd& out) const;
  void check_invariants(const MatrixXcd& state, double t) const;

  const LoweredSystem& sys_;
  const CoefficientProgram& program_;
  bool density_;
  EngineOptions opts_;
  MatrixXcd ks_[7];
  MatrixXcd y_stage_, scratch_g_, scratch_t_, err_;
  double max_phase_freq_ = 0.0;
  EngineStats stats_;
};

void Rk45Engine::rhs(int seg, double t_local, double t_global, const MatrixXcd& x,
                     MatrixXcd& y) {
  ++stats_.rhs_evals;
  const bool par = opts_.parallel;
  if (!density_) {
    y.setZero();
    for (const auto& term : sys_.terms) {
      const cxd c = term.coeff(seg, t_local, t_global);
      if (c == cxd(0.0, 0.0)) continue;
      term.op.phase_to(t_global);
      term.op.accum_left(cxd(0.0, -1.0) * c, x, y, par);
      if (!term.hermitian) {
        term.op_dag.phase_to(t_global);
        term.op_dag.accum_left(cxd(0.0, -1.0) * std::conj(c), x, y, par);
      }
    }
    return;
  }
  // Density path: accumulate G = -i H X - (1/2) sum_k rate_k M_k X, exploit
  // Hermiticity of the stage matrices to finish with Y = G + G^dag, then add
  // the jump terms rate_k L X L^dag.
  scratch_g_.setZero();
  for (const auto& term : sys_.terms) {
    const cxd c = term.coeff(seg, t_local, t_global);
    if (c == cxd(0.0, 0.0)) continue;
    term.op.phase_to(t_global);
    term.op.accum_left(cxd(0.0, -1.0) * c, x, scratch_g_, par);
    if (!term.hermitian) {
      term.op_dag.phase_to(t_global);
      term.op_dag.accum_left(cxd(0.0, -1.0) * std::conj(c), x, scratch_g_, par);
    }
  }
  for (const auto& col : sys_.collapse) {
    col.ldl.phase_to(t_global);
    col.ldl.accum_left(cxd(-0.5 * col.rate, 0.0), x, scratch_g_, par);
  }
  y = scratch_g_ + scratch_g_.adjoint();
  for (const auto& col : sys_.collapse) {
    scratch_t_.setZero();
    col.op.phase_to(t_global);
    col.op.accum_left(cxd(1.0, 0.0), x, scratch_t_, par);
    col.op.accum_right_dagger(cxd(col.rate, 0.0), scratch_t_, y, par);
  }
}

void Rk45Engine::unphase(double t, const MatrixXcd& in, MatrixXcd& out) const {
  const int n = sys_.dim;
  VectorXcd p(n);
  for (int i = 0; i < n; ++i) p(i) = std::polar(1.0, -sys_.diag(i) * t);
  if (!density_) {
    out = p.asDiagonal() * in;
  } else {
    out = p.asDiagonal() * in * p.conjugate().asDiagonal();
  }
}

void Rk45Engine::check_invariants(const MatrixXcd& state, double t) const {
  if (!density_) {
    const double norm = state.norm();
    if (std::abs(norm - 1.0) > kPureNormTol) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "pure-state norm drifted by %.3e at t = %.6f us (tighten rtol)",
                    norm - 1.0, t);
      throw InvariantViolation(buf);
    }
    return;
  }
  const double tr_err = std::abs(state.trace() - cxd(1.0, 0.0));
  if (tr_err > kTraceTol)
    throw InvariantViolation("density trace drifted by " + std::to_string(tr_err) +
                             " at t = " + std::to_string(t) + " us");
  const double herm = (state - state.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermTol)
    throw InvariantViolation("density Hermiticity defect " + std::to_string(herm) +
                             " at t = " + std::to_string(t) + " us");
  if (opts_.check_positivity) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (state + state.adjoint()),
                                                Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < kEigFloor)
      throw InvariantViolation("density matrix eigenvalue " + std::to_string(min_eig) +
                               " below floor at t = " + std::to_string(t) + " us");
  }
}

EngineStats Rk45Engine::run(MatrixXcd& state, const std::vector<double>& sample_times,
                            const SampleHook& on_sample, std::vector<MatrixXcd> event_mats) {
  const double total = program_.total_duration();
  const double t_eps = 1e-12 * std::max(1.0, total);
  const double dt_floor = std::max(1e-14, 1e-12 * std::max(1.0, total));

  size_t sample_idx = 0;
  auto emit_samples_at = [&](double t) {
    while (sample_idx < sample_times.size() && sample_times[sample_idx] <= t + t_eps) {
      const double ts = sample_times[sample_idx];
      unphase(ts, state, y_stage_);
      check_invariants(y_stage_, ts);
      if (on_sample) on_sample(ts, y_stage_);
      ++sample_idx;
    }
  };

  // Events grouped by boundary index, applied in phased form.
  size_t event_idx = 0;
  auto apply_events_at_boundary = [&](int seg_index, double t) {
    for (size_t e = 0; e < program_.events.size(); ++e) {
      if (program_.events[e].before_segment != seg_index) continue;
      const MatrixXcd& full = event_mats[e];
      MatrixXcd phased(full.rows(), full.cols());
      for (int i = 0; i < full.rows(); ++i)
        for (int j = 0; j < full.cols(); ++j)
          phased(i, j) = full(i, j) == cxd(0.0, 0.0)
                             ? cxd(0.0, 0.0)
                             : full(i, j) * std::polar(1.0, (sys_.diag(i) - sys_.diag(j)) * t);
      if (!density_) {
        state = (phased * state).eval();
      } else {
        state = (phased * state * phased.adjoint()).eval();
      }
      ++event_idx;
    }
  };

  double t_global = 0.0;
  double dt_ctrl = total > 0.0 ? total : 1.0;
  if (opts_.dt_max > 0.0) dt_ctrl = std::min(dt_ctrl, opts_.dt_max);
  if (max_phase_freq_ > 0.0) dt_ctrl = std::min(dt_ctrl, 0.3 / max_phase_freq_);

  emit_samples_at(0.0);

  for (int seg = 0; seg < static_cast<int>(program_.segments.size()); ++seg) {
    apply_events_at_boundary(seg, t_global);
    const double seg_start = t_global;
    const double seg_dur = program_.segments[static_cast<size_t>(seg)].duration;
    const double seg_end = seg_start + seg_dur;

    // Stop points inside this segment: requested samples, then the end.
    std::vector<double> stops;
    for (size_t s = sample_idx; s < sample_times.size(); ++s) {
      const double ts = sample_times[s];
      if (ts <= seg_start + t_eps) continue;
      if (ts >= seg_end - t_eps) break;
      stops.push_back(ts);
    }
    stops.push_back(seg_end);

    bool have_k1 = false;
    int consecutive_rejects = 0;
    for (double target : stops) {
      while (t_global < target - t_eps) {
        if (!have_k1) {
          rhs(seg, t_global - seg_start, t_global, state, ks_[0]);
          have_k1 = true;
        }
        double dt = std::min(dt_ctrl, target - t_global);
        if (opts_.dt_max > 0.0) dt = std::min(dt, opts_.dt_max);
        if (dt < dt_floor)
          throw NumericalError("integrator step size underflow at t = " +
                               std::to_string(t_global) + " us");

        // Stages 2..6.
        auto stage = [&](int i, const double* a) {
          y_stage_ = state;
          for (int j = 0; j < i; ++j) {
            if (a[j] != 0.0) y_stage_ += (dt * a[j]) * ks_[j];
          }
          const double tl = t_global - seg_start + kC[i] * dt;
          rhs(seg, tl, t_global + kC[i] * dt, y_stage_, ks_[i]);
        };
        stage(1, kA2);
        stage(2, kA3);
        stage(3, kA4);
        stage(4, kA5);
        stage(5, kA6);
        // 5th-order solution into y_stage_.
        y_stage_ = state;
        for (int j = 0; j < 6; ++j) {
          if (kB[j] != 0.0) y_stage_ += (dt * kB[j]) * ks_[j];
        }
        rhs(seg, t_global - seg_start + dt, t_global + dt, y_stage_, ks_[6]);

        // Error estimate.
        err_.setZero();
        for (int j = 0; j < 7; ++j) {
          if (kE[j] != 0.0) err_ += (dt * kE[j]) * ks_[j];
        }
        double sum_sq = 0.0;
        const auto& y0 = state;
        const auto& y1 = y_stage_;
        for (int c = 0; c < err_.cols(); ++c) {
          for (int r = 0; r < err_.rows(); ++r) {
            const double scale =
                opts_.atol +
                opts_.rtol * std::max(std::abs(y0(r, c)), std::abs(y1(r, c)));
            const double q = std::abs(err_(r, c)) / scale;
            sum_sq += q * q;
          }
        }
        const double err = std::sqrt(sum_sq / static_cast<double>(err_.size()));

        if (err <= 1.0) {
          state = y_stage_;
          ks_[0] = ks_[6];  // FSAL
          t_global += dt;
          ++stats_.steps;
          consecutive_rejects = 0;
          const double fac =
              err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
          dt_ctrl = dt * fac;
        } else {
          ++stats_.rejected;
          if (++consecutive_rejects > opts_.max_consecutive_rejects)
            throw NumericalError("integrator rejected " +
                                 std::to_string(consecutive_rejects) +
                                 " consecutive steps at t = " + std::to_string(t_global));
          dt_ctrl = dt * std::clamp(0.9 * std::pow(err, -0.2), 0.05, 1.0);
        }
      }
      t_global = target;  // snap to the stop point
      emit_samples_at(t_global);
    }
    // Exact boundary value.
    t_global = seg_end;
  }
  apply_events_at_boundary(static_cast<int>(program_.segments.size()), t_global);
  emit_samples_at(t_global + t_eps);

  // Final unphase back to the lab frame.
  unphase(t_global, state, y_stage_);
  state = y_stage_;
  check_invariants(state, t_global);
  stats_.final_defect = density_ ? std::abs(state.trace().real() - 1.0)
                                 : std::abs(state.norm() - 1.0);
  (void)event_idx;
  return stats_;
}

std::vector<SegmentCoeff> channel_table(const CoefficientProgram& program,
                                        const std::string& name) {
  std::vector<SegmentCoeff> table(program.segments.size());
  for (size_t s = 0; s < program.segments.size(); ++s) {
    auto it = program.segments[s].channels.find(name);
    if (it == program.segments[s].channels.end()) continue;
    table[s].active = true;
    table[s].envelope = it->second.envelope;
    table[s].cos_phase = std::cos(it->second.phase);
    table[s].sin_phase = std::sin(it->second.phase);
  }
  return table;
}

}  // namespace

LoweredSystem lower_system(const HamiltonianTerms& h, const CoefficientProgram& program,
                           const CollapseSet* collapse) {
  program.validate();
  const int dim = h.static_part.dim();
  LoweredSystem sys;
  sys.dim = dim;
  sys.layout = h.static_part.layout();
  sys.diag = h.static_part.mat().diagonal().real();

  MatrixXcd offdiag = h.static_part.mat();
  offdiag.diagonal().setZero();
  if (offdiag.size() > 0 && offdiag.cwiseAbs().maxCoeff() > 0.0) {
    LoweredTerm term;
    term.op = ApplyPlan(offdiag, sys.diag, 0.0);
    term.hermitian = true;
    term.coeff = [](int, double, double) { return cxd(1.0, 0.0); };
    term.tag = "static_offdiag";
    sys.terms.push_back(std::move(term));
  }

  for (const auto& name : program.channel_names()) {
    auto it = h.channels.find(name);
    if (it == h.channels.end())
      throw ValidationError("program references channel '" + name +
                            "' not provided by the Hamiltonian");
    const ChannelTerm& ch = it->second;
    if (ch.cos_quad.dim() != dim || ch.sin_quad.dim() != dim)
      throw ValidationError("channel '" + name + "' operator dimension mismatch");
    auto table = channel_table(program, name);
    bool any_sin = false;
    for (const auto& sc : table) {
      if (sc.active && sc.sin_phase != 0.0) any_sin = true;
    }

    LoweredTerm cos_term;
    cos_term.op = ApplyPlan(ch.cos_quad.mat(), sys.diag, 0.0);
    cos_term.hermitian = true;
    cos_term.coeff = [table](int seg, double tl, double) -> cxd {
      const auto& sc = table[static_cast<size_t>(seg)];
      if (!sc.active) return {0.0, 0.0};
      return {sc.envelope.value(tl) * sc.cos_phase, 0.0};
    };
    cos_term.tag = name + ":cos";
    if (!cos_term.op.empty()) sys.terms.push_back(std::move(cos_term));

    if (any_sin) {
      LoweredTerm sin_term;
      sin_term.op = ApplyPlan(ch.sin_quad.mat(), sys.diag, 0.0);
      sin_term.hermitian = true;
      sin_term.coeff = [table](int seg, double tl, double) -> cxd {
        const auto& sc = table[static_cast<size_t>(seg)];
        if (!sc.active) return {0.0, 0.0};
        return {sc.envelope.value(tl) * sc.sin_phase, 0.0};
      };
      sin_term.tag = name + ":sin";
      if (!sin_term.op.empty()) sys.terms.push_back(std::move(sin_term));
    }
  }

  if (collapse) {
    for (const auto& c : collapse->ops) {
      if (c.rate <= 0.0) continue;
      if (c.op.dim() != dim)
        throw ValidationError("collapse operator dimension mismatch for '" + c.tag + "'");
      LoweredCollapse lc;
      lc.op = ApplyPlan(c.op.mat(), sys.diag, 0.0);
      lc.ldl = ApplyPlan((c.op.mat().adjoint() * c.op.mat()).eval(), sys.diag, 1e-15);
      lc.rate = c.rate;
      lc.tag = c.tag;
      sys.collapse.push_back(std::move(lc));
    }
  }
  return sys;
}

EngineStats integrate_program(const LoweredSystem& sys, const CoefficientProgram& program,
                              MatrixXcd& state, bool density,
                              const std::vector<double>& sample_times,
                              const SampleHook& on_sample, const EngineOptions& opts) {
  program.validate();
  if (state.rows() != sys.dim)
    throw ValidationError("state dimension does not match the lowered system");
  if (density && state.cols() != sys.dim)
    throw ValidationError("density state must be square");
  if (!density && state.cols() != 1)
    throw ValidationError("pure state must be a column vector");
  if (!density && !sys.collapse.empty())
    throw ValidationError("pure-state integration cannot carry collapse operators");
  for (size_t i = 1; i < sample_times.size(); ++i) {
    if (sample_times[i] < sample_times[i - 1])
      throw ValidationError("sample times must be sorted");
  }
  const double total = program.total_duration();
  if (!sample_times.empty() &&
      (sample_times.front() < -1e-12 || sample_times.back() > total + 1e-9 * (1.0 + total)))
    throw ValidationError("sample times outside the program duration");

  // Embed the 2x2 boundary unitaries on the full layout once.
  std::vector<MatrixXcd> event_mats;
  event_mats.reserve(program.events.size());
  for (const auto& ev : program.events) {
    if (!sys.layout.has("qubit"))
      throw ValidationError("qubit event on a system without a qubit subsystem");
    event_mats.push_back(
        embed(OperatorMatrix(SubsystemLayout::single("qubit", 2), ev.qubit_unitary),
              sys.layout, "qubit")
            .mat());
  }

  Rk45Engine engine(sys, program, density, opts);
  return engine.run(state, sample_times, on_sample, std::move(event_mats));
}

}  // namespace sideband
