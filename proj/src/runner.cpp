#include "sideband/runner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "sideband/model.hpp"
#include "sideband/ops.hpp"

namespace sideband {

namespace {

double chi_of(const SystemParams& p, const std::string& mode) {
  if (mode == "mem1") return p.chi_1;
  if (mode == "mem2") return p.chi_2;
  if (mode == "readout") return p.chi_r;
  throw ValidationError("unknown mode '" + mode + "'");
}

double eps_of(const SystemParams& p, const std::string& mode) {
  if (mode == "mem1") return p.eps_1;
  if (mode == "mem2") return p.eps_2;
  if (mode == "readout") return p.eps_r;
  throw ValidationError("unknown mode '" + mode + "'");
}

// Mode response per unit angular drive amplitude: alpha(t) = r * eps(t).
cxd response_ratio(const SystemParams& p, const std::string& mode) {
  if (mode == "readout") {
    return 1.0 / cxd(to_angular(p.rabi_freq), 0.5 * to_angular(p.kappa_r));
  }
  return cxd(1.0 / to_angular(p.rabi_freq), 0.0);
}

std::vector<std::string> driven_modes(const PulseSchedule& schedule) {
  std::set<std::string> seen;
  for (const auto& step : schedule.steps) {
    if (step.kind != StepKind::RampUp || step.channel == "rabi") continue;
    if (step.channel.rfind("drive_", 0) != 0)
      throw ValidationError("unrecognized drive channel '" + step.channel + "'");
    seen.insert(step.channel.substr(6));
  }
  std::vector<std::string> ordered;
  for (const char* m : {"mem1", "mem2", "readout"}) {
    if (seen.count(m)) {
      ordered.push_back(m);
      seen.erase(m);
    }
  }
  if (!seen.empty())
    throw ValidationError("unknown mode among drive channels: '" + *seen.begin() + "'");
  return ordered;
}

// Envelope value of a drive channel at a global time (0 when inactive).
double channel_value_at(const CoefficientProgram& program, const std::string& name, double t) {
  double start = 0.0;
  for (size_t s = 0; s < program.segments.size(); ++s) {
    const double end = start + program.segments[s].duration;
    const bool last = s + 1 == program.segments.size();
    if (t < start - 1e-12) break;
    if (t <= end + 1e-12 || last) {
      if (t <= end + 1e-12) {
        auto it = program.segments[s].channels.find(name);
        if (it == program.segments[s].channels.end()) return 0.0;
        return it->second.envelope.value(std::clamp(t - start, 0.0, program.segments[s].duration));
      }
    }
    start = end;
  }
  return 0.0;
}

// Per-segment envelope lookup for one channel, captured by coefficient closures.
std::vector<std::optional<Envelope>> channel_envelopes(const CoefficientProgram& program,
                                                       const std::string& name) {
  std::vector<std::optional<Envelope>> envs(program.segments.size());
  for (size_t s = 0; s < program.segments.size(); ++s) {
    auto it = program.segments[s].channels.find(name);
    if (it != program.segments[s].channels.end()) envs[s] = it->second.envelope;
  }
  return envs;
}

double default_dt_max(const PulseSchedule& schedule, const SystemParams& params) {
  if (schedule.frame == Frame::DriveFrame) return 1.0 / (20.0 * params.rabi_freq);
  const CouplingSet c = couplings_from_params(params);
  double g = 0.0;
  for (double cand : {c.g_1, c.g_2, c.g_r}) {
    if (cand > 0.0) g = (g == 0.0) ? cand : std::min(g, cand);
  }
  return g > 0.0 ? 1.0 / (20.0 * g) : 0.0;
}

// Appends n_<mode>_bare (displaced runs) or n_<mode>_disp (bare runs):
// <n>_other = <n> +- 2 Re(conj(alpha) <b>) + |alpha|^2 with alpha(t) the
// quasi-static response to the drive envelope.
void append_mapped_occupations(Trajectory& traj, const CoefficientProgram& program,
                               const SystemParams& params, const SubsystemLayout& layout,
                               bool run_is_displaced) {
  for (int k = 0; k < layout.subsystem_count(); ++k) {
    const std::string& mode = layout.label(k);
    if (mode == "qubit") continue;
    const std::string channel = "drive_" + mode;
    const cxd r = response_ratio(params, mode);
    const auto* n_col = traj.column("n_" + mode);
    const auto* re_col = traj.column("re_a_" + mode);
    const auto* im_col = traj.column("im_a_" + mode);
    if (!n_col || !re_col || !im_col) continue;
    std::vector<double> mapped(traj.times.size());
    for (size_t i = 0; i < traj.times.size(); ++i) {
      const cxd alpha = r * channel_value_at(program, channel, traj.times[i]);
      const cxd b((*re_col)[i], (*im_col)[i]);
      const double cross = 2.0 * std::real(std::conj(alpha) * b);
      mapped[i] = (*n_col)[i] + (run_is_displaced ? cross : -cross) + std::norm(alpha);
    }
    traj.records.push_back(
        {"n_" + mode + (run_is_displaced ? "_bare" : "_disp"), std::move(mapped)});
  }
}

}  // namespace

SubsystemLayout layout_for_schedule(const PulseSchedule& schedule, const SystemParams& params,
                                    int fock_dim, DriveModel model) {
  std::vector<std::string> modes = driven_modes(schedule);
  if (params.include_readout &&
      std::find(modes.begin(), modes.end(), "readout") == modes.end()) {
    modes.push_back("readout");
  }
  if (modes.empty()) throw ValidationError("schedule drives no memory mode");

  std::vector<std::string> labels;
  std::vector<int> dims;
  const int n = std::max(1, schedule.target_n);
  for (const auto& mode : modes) {
    int dim;
    if (fock_dim > 0) {
      dim = fock_dim;
    } else if (mode == "readout") {
      dim = (model == DriveModel::Bare && schedule.frame == Frame::DriveFrame)
                ? displacement_adequate_dim(std::abs(steady_state_amplitude(params, mode))) + 4
                : 4;
    } else if (schedule.frame == Frame::JCFrame) {
      dim = n + 5;
    } else if (model == DriveModel::Bare) {
      dim = displacement_adequate_dim(std::abs(steady_state_amplitude(params, mode))) + n + 4;
    } else {
      dim = n + 10;
    }
    labels.push_back(mode);
    dims.push_back(dim);
  }
  labels.push_back("qubit");
  dims.push_back(2);
  return SubsystemLayout(labels, dims);
}

std::vector<int> default_occupations(const PulseSchedule& schedule,
                                     const SubsystemLayout& layout) {
  std::vector<int> occ;
  for (int k = 0; k < layout.subsystem_count(); ++k) {
    const std::string& label = layout.label(k);
    if (label == "qubit") continue;
    occ.push_back(schedule.protocol == "swap" && label == "mem1" ? schedule.target_n : 0);
  }
  return occ;
}

HamiltonianTerms bare_drive_terms(const SystemParams& params, const SubsystemLayout& layout,
                                  const CoefficientProgram& program) {
  HamiltonianTerms h = build_drive_frame_hamiltonian(params, layout);
  // Static Stark compensation: the Rabi drive frequency is set for the
  // steady-state shifted qubit, i.e. +chi |abar|^2 sigma_z per driven mode.
  MatrixXcd comp = MatrixXcd::Zero(layout.total_dim(), layout.total_dim());
  const MatrixXcd sz = embed(pauli(Pauli::Z), layout, "qubit").mat();
  bool any = false;
  for (const auto& name : program.channel_names()) {
    if (name.rfind("drive_", 0) != 0) continue;
    const std::string mode = name.substr(6);
    const double shift =
        to_angular(chi_of(params, mode)) * std::norm(steady_state_amplitude(params, mode));
    if (shift == 0.0) continue;
    comp += shift * sz;
    any = true;
  }
  if (any) {
    h.static_part = OperatorMatrix::hermitian(layout, h.static_part.mat() + comp);
  }
  return h;
}

LoweredSystem build_displaced_system(const SystemParams& params, const SubsystemLayout& layout,
                                     const CoefficientProgram& program,
                                     const CollapseSet* collapse, bool exact_tracking) {
  HamiltonianTerms h = build_drive_frame_hamiltonian(params, layout);
  const double omega_ang = to_angular(params.rabi_freq);
  const MatrixXcd sz = embed(pauli(Pauli::Z), layout, "qubit").mat();
  const int dim = layout.total_dim();

  // Substitute each sideband drive channel by its displaced-frame image:
  // per unit angular drive amplitude eps(t), the Hamiltonian gains
  //   -chi (r b^dag + conj(r) b) sigma_z              (JC coupling)
  //   + [(1 - Omega r) - i (gamma/2) r] b^dag + h.c.  (linear residual +
  //                                                    dissipator correction)
  // with r the quasi-static response ratio and gamma the damping rate of the
  // dissipator actually applied.
  for (auto& [name, ch] : h.channels) {
    if (name.rfind("drive_", 0) != 0) continue;
    const std::string mode = name.substr(6);
    const cxd r = response_ratio(params, mode);
    const double chi_ang = to_angular(chi_of(params, mode));
    double gamma = 0.0;
    if (collapse) {
      for (const auto& c : collapse->ops) {
        if (c.tag == mode + "_damping") gamma = c.rate;
      }
    }
    const MatrixXcd b = embed(annihilation(layout.dim_of(mode)), layout, mode).mat();
    const MatrixXcd bdag = b.adjoint();
    MatrixXcd quad = -chi_ang * (r * bdag + std::conj(r) * b) * sz;
    const cxd c_lin = (1.0 - omega_ang * r) - cxd(0.0, 0.5 * gamma) * r;
    quad += c_lin * bdag + std::conj(c_lin) * b;
    ch.cos_quad = OperatorMatrix::hermitian(layout, std::move(quad));
    ch.sin_quad = OperatorMatrix::hermitian(layout, MatrixXcd::Zero(dim, dim));
  }

  LoweredSystem sys = lower_system(h, program, collapse);

  // Stark residual per driven mode: chi |abar|^2 (1 - u(t)^2) sigma_z, the
  // static compensation minus the instantaneous drive-induced shift.
  for (const auto& name : program.channel_names()) {
    if (name.rfind("drive_", 0) != 0) continue;
    const std::string mode = name.substr(6);
    const double chi_ang = to_angular(chi_of(params, mode));
    const double abar2 = std::norm(steady_state_amplitude(params, mode));
    const double eps_ang = to_angular(eps_of(params, mode));
    if (chi_ang * abar2 == 0.0 || eps_ang == 0.0) continue;
    auto envs = channel_envelopes(program, name);

    LoweredTerm stark;
    stark.op = ApplyPlan(sz, sys.diag, 0.0);
    stark.hermitian = true;
    stark.coeff = [envs, eps_ang, chi_ang, abar2](int seg, double tl, double) -> cxd {
      const auto& env = envs[static_cast<size_t>(seg)];
      const double u = env ? env->value(tl) / eps_ang : 0.0;
      return {chi_ang * abar2 * (1.0 - u * u), 0.0};
    };
    stark.tag = name + ":stark";
    sys.terms.push_back(std::move(stark));

    if (exact_tracking) {
      // Inertial correction for a displacement that follows the envelope:
      // -i (d alpha/dt) b^dag + h.c.
      const cxd r = response_ratio(params, mode);
      const MatrixXcd b = embed(annihilation(layout.dim_of(mode)), layout, mode).mat();
      LoweredTerm frame_term;
      frame_term.op = ApplyPlan(b.adjoint(), sys.diag, 0.0);
      frame_term.op_dag = ApplyPlan(b, sys.diag, 0.0);
      frame_term.hermitian = false;
      frame_term.coeff = [envs, r](int seg, double tl, double) -> cxd {
        const auto& env = envs[static_cast<size_t>(seg)];
        if (!env) return {0.0, 0.0};
        return cxd(0.0, -1.0) * r * env->slope(tl);
      };
      frame_term.tag = name + ":tracking";
      sys.terms.push_back(std::move(frame_term));
    }
  }
  return sys;
}

ProtocolResult execute_schedule(const PulseSchedule& schedule, const SystemParams& params,
                                const RunOptions& opts) {
  schedule.validate();
  params.validate();

  ProtocolResult result;
  result.schedule = schedule;
  result.layout = layout_for_schedule(schedule, params, opts.fock_dim, opts.drive_model);
  result.program = compile(schedule, params);

  std::vector<int> occ =
      opts.initial_occupations.empty() ? default_occupations(schedule, result.layout)
                                       : opts.initial_occupations;
  const int n_modes = result.layout.subsystem_count() - 1;
  if (static_cast<int>(occ.size()) != n_modes)
    throw ValidationError("initial_occupations must list every non-qubit mode");
  occ.push_back(schedule.frame == Frame::JCFrame ? result.program.initial_qubit : 0);
  result.initial_state = QuantumState::basis(result.layout, occ, schedule.frame);

  EvolveOptions eopts;
  eopts.dt_max = opts.dt_max > 0.0 ? opts.dt_max : default_dt_max(schedule, params);
  eopts.rtol = opts.rtol;
  if (opts.atol > 0.0) eopts.atol = opts.atol;
  // The literal drive frame is stiff (drive matrix elements ~ eps * sqrt(dim)
  // rad/us force ~1e5 steps per protocol); the default per-step tolerance
  // must be tighter there to hold the global norm/trace budget.
  if (eopts.rtol == 0.0 && schedule.frame == Frame::DriveFrame &&
      opts.drive_model == DriveModel::Bare) {
    eopts.rtol = opts.decoherence ? 1e-10 : 1e-12;
    if (opts.atol <= 0.0) eopts.atol = 1e-14;
  }
  eopts.samples_per_segment = opts.samples_per_segment;
  eopts.parallel = opts.parallel;
  eopts.check_positivity = opts.check_positivity;
  eopts.extras = opts.extras;

  const SystemParams scaled = params.with_coherence_multiplier(opts.coherence_mult);

  if (schedule.frame == Frame::JCFrame) {
    const HamiltonianTerms h = jc_hamiltonian_terms(result.layout);
    if (opts.decoherence) {
      const CollapseSet cs = collapse_from_params(scaled, result.layout, Frame::JCFrame);
      result.trajectory = evolve_lindblad(h, result.program, result.initial_state, cs, eopts);
    } else {
      result.trajectory = evolve_pure(h, result.program, result.initial_state, eopts);
    }
    return result;
  }

  // Drive frame: always record the qubit transverse component and the mode
  // quadrature expectations needed for occupation mapping.
  auto ensure_extra = [&](const std::string& name) {
    if (std::find(eopts.extras.begin(), eopts.extras.end(), name) == eopts.extras.end())
      eopts.extras.push_back(name);
  };
  ensure_extra("sigma_x");
  for (int k = 0; k < result.layout.subsystem_count(); ++k) {
    if (result.layout.label(k) == "qubit") continue;
    ensure_extra("re_a_" + result.layout.label(k));
    ensure_extra("im_a_" + result.layout.label(k));
  }

  CollapseSet cs;
  const CollapseSet* csp = nullptr;
  if (opts.decoherence) {
    cs = collapse_from_params(scaled, result.layout, Frame::DriveFrame);
    csp = &cs;
  }
  LoweredSystem sys;
  if (opts.drive_model == DriveModel::Bare) {
    sys = lower_system(bare_drive_terms(params, result.layout, result.program), result.program,
                       csp);
  } else {
    sys = build_displaced_system(params, result.layout, result.program, csp,
                                 opts.drive_model == DriveModel::DisplacedExact);
  }
  result.trajectory =
      run_lowered(sys, result.program, result.initial_state, opts.decoherence, eopts);
  append_mapped_occupations(result.trajectory, result.program, params, result.layout,
                            opts.drive_model != DriveModel::Bare);
  return result;
}

namespace {

// Running Rabi drive sign during each hold (index = order of holds in the
// schedule): flips toggle the sign between holds.
std::vector<int> hold_signs(const PulseSchedule& schedule) {
  std::vector<int> signs;
  int s = 1;
  for (const auto& step : schedule.steps) {
    if (step.kind == StepKind::RabiPhaseFlip) s = -s;
    if (step.kind == StepKind::Hold && step.duration > 0.0) signs.push_back(s);
  }
  return signs;
}

size_t find_time_index(const std::vector<double>& times, double target) {
  auto it = std::lower_bound(times.begin(), times.end(), target - 1e-9);
  if (it == times.end() || std::abs(*it - target) > 1e-9 * (1.0 + std::abs(target)))
    throw NumericalError("frame cross-check could not align sample times");
  return static_cast<size_t>(it - times.begin());
}

}  // namespace

FrameCrossCheck cross_check_frames(const SystemParams& params, const PulseSchedule& protocol,
                                   const std::vector<std::string>& observables,
                                   const RunOptions& opts) {
  const auto modes = driven_modes(protocol);
  if (modes.size() != 1 || modes[0] != "mem1")
    throw ValidationError(
        "frame cross-check supports single-memory-mode protocols (mem1 + qubit)");

  std::vector<std::string> wanted = observables;
  if (wanted.empty()) wanted = {"n_mem1", "sigma_z"};
  for (const auto& name : wanted) {
    if (name != "n_mem1" && name != "sigma_z")
      throw ValidationError("frame cross-check observable must be n_mem1 or sigma_z");
  }

  RunOptions run = opts;
  run.decoherence = false;
  run.coherence_mult = 1.0;
  run.initial_occupations.clear();

  PulseSchedule jc_sched = protocol;
  jc_sched.frame = Frame::JCFrame;
  PulseSchedule drive_sched = protocol;
  drive_sched.frame = Frame::DriveFrame;
  RunOptions drive_run = run;
  drive_run.drive_model = DriveModel::Bare;

  const ProtocolResult jc = execute_schedule(jc_sched, params, run);
  const ProtocolResult drive = execute_schedule(drive_sched, params, drive_run);

  // Hold segments are contiguous in both programs and carry matching tags;
  // align them pairwise and compare samples at equal offsets.
  const auto signs = hold_signs(protocol);
  FrameCrossCheck report;
  for (const auto& name : wanted) report.series.push_back({name, {}, {}, 0.0});

  const auto* jc_n = jc.trajectory.column("n_mem1");
  const auto* jc_sz = jc.trajectory.column("sigma_z");
  const auto* dr_ndisp = drive.trajectory.column("n_mem1_disp");
  const auto* dr_sx = drive.trajectory.column("sigma_x");
  if (!jc_n || !jc_sz || !dr_ndisp || !dr_sx)
    throw NumericalError("frame cross-check is missing required observable columns");

  double jc_start = 0.0;
  for (size_t seg = 0; seg < jc.program.segments.size(); ++seg) {
    const double dur = jc.program.segments[seg].duration;
    const std::string& tag = jc.program.segments[seg].tag;
    // Locate the drive segment with the same tag.
    double drive_start = 0.0;
    bool found = false;
    double acc = 0.0;
    for (const auto& dseg : drive.program.segments) {
      if (dseg.tag == tag) {
        drive_start = acc;
        found = true;
        break;
      }
      acc += dseg.duration;
    }
    if (!found)
      throw NumericalError("frame cross-check could not match segment '" + tag + "'");

    for (size_t i = 0; i < jc.trajectory.times.size(); ++i) {
      const double t = jc.trajectory.times[i];
      const double off = t - jc_start;
      if (off < (seg == 0 ? -1e-12 : 1e-12) || off > dur + 1e-12) continue;
      const size_t j = find_time_index(drive.trajectory.times, drive_start + off);
      const int s = signs[std::min(seg, signs.size() - 1)];
      report.times.push_back(t);
      for (auto& series : report.series) {
        double jc_val, dr_val;
        if (series.name == "n_mem1") {
          jc_val = (*jc_n)[i];
          dr_val = (*dr_ndisp)[j];
        } else {
          jc_val = (*jc_sz)[i];
          dr_val = -static_cast<double>(s) * (*dr_sx)[j];
        }
        series.jc.push_back(jc_val);
        series.drive.push_back(dr_val);
        series.max_abs_diff = std::max(series.max_abs_diff, std::abs(jc_val - dr_val));
      }
    }
    jc_start += dur;
  }
  for (const auto& series : report.series)
    report.max_abs_diff = std::max(report.max_abs_diff, series.max_abs_diff);
  return report;
}

}  // namespace sideband
