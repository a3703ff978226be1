#include "sideband/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace sideband {

namespace {

constexpr double kQuarterTurn = kTwoPi / 4.0;  // pi/2

// Relabeling unitary applied to the JC-frame state at a Rabi sign flip:
// V_new V_old^dag = +- i sigma_y (sign set by the pre-flip Rabi sign).
MatrixXcd flip_relabel(int sign_before) {
  MatrixXcd m = MatrixXcd::Zero(2, 2);
  const double s = sign_before > 0 ? 1.0 : -1.0;
  // +i sigma_y = [[0, 1], [-1, 0]] scaled: i*[[0,-i],[i,0]] = [[0,1],[-1,0]].
  m(0, 1) = s;
  m(1, 0) = -s;
  return m;
}

Step ramp_up(const std::string& channel, double len) {
  Step s;
  s.kind = StepKind::RampUp;
  s.channel = channel;
  s.duration = len;
  return s;
}

Step ramp_down(const std::string& channel, double len) {
  Step s;
  s.kind = StepKind::RampDown;
  s.channel = channel;
  s.duration = len;
  return s;
}

Step hold_step(std::vector<std::string> channels, double dur, std::string note) {
  Step s;
  s.channels = std::move(channels);
  s.duration = dur;
  s.note = std::move(note);
  return s;
}

Step pulse_step(double angle, std::string note) {
  Step s;
  s.kind = StepKind::QubitPulse;
  s.angle = angle;
  s.note = std::move(note);
  return s;
}

Step flip_step() {
  Step s;
  s.kind = StepKind::RabiPhaseFlip;
  return s;
}

}  // namespace

double TimingTable::tau_n(int n) const {
  if (n < 1 || n >= static_cast<int>(tau.size()))
    throw ValidationError("timing table has no tau for n = " + std::to_string(n));
  return tau[static_cast<size_t>(n)];
}

bool TimingTable::has_tau_prime(int n) const {
  return n >= 1 && n < static_cast<int>(tau_prime.size()) &&
         tau_prime[static_cast<size_t>(n)].has_value();
}

double TimingTable::tau_prime_n(int n) const {
  if (!has_tau_prime(n))
    throw ValidationError("timing table has no tau_prime for n = " + std::to_string(n) +
                          " (calibrate or supply it)");
  return *tau_prime[static_cast<size_t>(n)];
}

void TimingTable::validate() const {
  for (size_t n = 1; n < tau.size(); ++n) {
    if (!(tau[n] > 0.0))
      throw ValidationError("tau[" + std::to_string(n) + "] must be positive");
    if (source == Source::Analytic && n >= 2 && !(tau[n] < tau[n - 1]))
      throw ValidationError("analytic tau values must be strictly decreasing in n");
  }
  for (size_t n = 1; n < tau_prime.size(); ++n) {
    if (tau_prime[n].has_value() && !(*tau_prime[n] > 0.0))
      throw ValidationError("tau_prime[" + std::to_string(n) + "] must be positive");
  }
}

TimingTable analytic_timings(double g_mhz, int n_max) {
  if (!(g_mhz > 0.0)) throw ValidationError("analytic_timings requires g > 0");
  if (n_max < 1) throw ValidationError("analytic_timings requires n_max >= 1");
  TimingTable table;
  table.source = TimingTable::Source::Analytic;
  table.tau.assign(static_cast<size_t>(n_max) + 1, 0.0);
  table.tau_prime.assign(static_cast<size_t>(n_max) + 1, std::nullopt);
  const double tau_1 = 1.0 / (4.0 * g_mhz);
  for (int n = 1; n <= n_max; ++n)
    table.tau[static_cast<size_t>(n)] = tau_1 / std::sqrt(static_cast<double>(n));
  table.tau_prime[1] = std::sqrt(2.0) * tau_1;
  return table;
}

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::RampUp: return "ramp_up";
    case StepKind::Hold: return "hold";
    case StepKind::RabiPhaseFlip: return "rabi_phase_flip";
    case StepKind::QubitPulse: return "qubit_pulse";
    case StepKind::RampDown: return "ramp_down";
  }
  return "unknown";
}

const char* ramp_shape_name(RampShape s) {
  return s == RampShape::RaisedCosine ? "raised_cosine" : "linear";
}

void PulseSchedule::validate() const {
  std::set<std::string> active;
  std::map<std::string, int> balance;
  for (const auto& step : steps) {
    switch (step.kind) {
      case StepKind::RampUp:
        if (step.channel.empty()) throw ValidationError("RampUp step without a channel");
        if (!(step.duration > 0.0)) throw ValidationError("RampUp needs a positive ramp length");
        if (active.count(step.channel))
          throw ValidationError("RampUp on already-active channel '" + step.channel + "'");
        active.insert(step.channel);
        balance[step.channel] += 1;
        break;
      case StepKind::RampDown:
        if (!active.count(step.channel))
          throw ValidationError("RampDown on inactive channel '" + step.channel + "'");
        if (!(step.duration > 0.0)) throw ValidationError("RampDown needs a positive ramp length");
        active.erase(step.channel);
        balance[step.channel] -= 1;
        break;
      case StepKind::Hold:
        if (step.duration < 0.0) throw ValidationError("Hold duration must be >= 0");
        for (const auto& ch : step.channels) {
          if (!active.count(ch))
            throw ValidationError("Hold references inactive channel '" + ch + "'");
        }
        break;
      case StepKind::RabiPhaseFlip:
        if (!active.count("rabi"))
          throw ValidationError("RabiPhaseFlip while the Rabi channel is inactive");
        break;
      case StepKind::QubitPulse:
        if (step.angle == 0.0) throw ValidationError("QubitPulse with zero angle");
        break;
    }
  }
  for (const auto& [ch, b] : balance) {
    if (b != 0)
      throw ValidationError("channel '" + ch + "' ramped up without a matching ramp down");
  }
}

PulseSchedule fock_generation_schedule(int n, const TimingTable& timings, double ramp_len,
                                       Frame frame, double rabi_ramp_len) {
  if (n < 1) throw ValidationError("fock_generation_schedule requires n >= 1");
  timings.validate();
  if (!(ramp_len > 0.0)) throw ValidationError("ramp length must be positive");
  const double rabi_len = rabi_ramp_len > 0.0 ? rabi_ramp_len : ramp_len;

  PulseSchedule sched;
  sched.frame = frame;
  sched.protocol = "fock";
  sched.target_n = n;
  auto& s = sched.steps;
  s.push_back(ramp_up("drive_mem1", ramp_len));
  s.push_back(pulse_step(+kQuarterTurn, "init"));
  s.push_back(ramp_up("rabi", rabi_len));
  for (int k = 1; k <= n; ++k) {
    if (k >= 2) s.push_back(flip_step());
    s.push_back(hold_step({"rabi", "drive_mem1"}, timings.tau_n(k), "hold_" + std::to_string(k)));
  }
  const double s_f = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^(n-1)
  s.push_back(ramp_down("rabi", rabi_len));
  s.push_back(pulse_step(s_f * kQuarterTurn, "closing"));
  s.push_back(ramp_down("drive_mem1", ramp_len));
  sched.validate();
  return sched;
}

PulseSchedule swap_schedule(int n, const TimingTable& timings, double ramp_len, Frame frame,
                            double rabi_ramp_len) {
  if (n < 1) throw ValidationError("swap_schedule requires n >= 1");
  timings.validate();
  if (!(ramp_len > 0.0)) throw ValidationError("ramp length must be positive");
  const double rabi_len = rabi_ramp_len > 0.0 ? rabi_ramp_len : ramp_len;
  const double hold = timings.tau_prime_n(n);

  PulseSchedule sched;
  sched.frame = frame;
  sched.protocol = "swap";
  sched.target_n = n;
  auto& s = sched.steps;
  s.push_back(ramp_up("drive_mem1", ramp_len));
  s.push_back(ramp_up("drive_mem2", ramp_len));
  s.push_back(pulse_step(-kQuarterTurn, "init"));
  s.push_back(ramp_up("rabi", rabi_len));
  s.push_back(hold_step({"rabi", "drive_mem1", "drive_mem2"}, hold, "hold_swap"));
  s.push_back(ramp_down("rabi", rabi_len));
  s.push_back(pulse_step(+kQuarterTurn, "closing"));
  s.push_back(ramp_down("drive_mem1", ramp_len));
  s.push_back(ramp_down("drive_mem2", ramp_len));
  sched.validate();
  return sched;
}

PulseSchedule bell_schedule(const TimingTable& timings, double ramp_len, Frame frame,
                            double rabi_ramp_len) {
  timings.validate();
  if (!(ramp_len > 0.0)) throw ValidationError("ramp length must be positive");
  const double rabi_len = rabi_ramp_len > 0.0 ? rabi_ramp_len : ramp_len;
  const double hold = timings.tau_prime_n(1) / 2.0;

  PulseSchedule sched;
  sched.frame = frame;
  sched.protocol = "bell";
  sched.target_n = 1;
  auto& s = sched.steps;
  s.push_back(ramp_up("drive_mem1", ramp_len));
  s.push_back(ramp_up("drive_mem2", ramp_len));
  s.push_back(pulse_step(+kQuarterTurn, "init"));
  s.push_back(ramp_up("rabi", rabi_len));
  s.push_back(hold_step({"rabi", "drive_mem1", "drive_mem2"}, hold, "hold_bell"));
  s.push_back(ramp_down("rabi", rabi_len));
  s.push_back(pulse_step(+kQuarterTurn, "closing"));
  s.push_back(ramp_down("drive_mem1", ramp_len));
  s.push_back(ramp_down("drive_mem2", ramp_len));
  sched.validate();
  return sched;
}

namespace {

double drive_amplitude_for(const std::string& channel, const SystemParams& p) {
  if (channel == "rabi") return p.rabi_freq;
  if (channel == "drive_mem1") return p.eps_1;
  if (channel == "drive_mem2") return p.eps_2;
  if (channel == "drive_readout") return p.eps_r;
  throw ValidationError("no parameter amplitude for channel '" + channel + "'");
}

double jc_coupling_for(const std::string& channel, const CouplingSet& c) {
  if (channel == "drive_mem1") return c.g_1;
  if (channel == "drive_mem2") return c.g_2;
  if (channel == "drive_readout") return c.g_r;
  return 0.0;
}

CoefficientProgram compile_drive(const PulseSchedule& schedule, const SystemParams& params) {
  CoefficientProgram program;
  program.frame = Frame::DriveFrame;

  // channel -> steady amplitude (rad/us) while active.
  std::map<std::string, double> active;
  int rabi_sign = 1;
  auto rabi_phase = [&]() { return rabi_sign > 0 ? 0.0 : kTwoPi / 2.0; };

  struct PendingRamp {
    std::string channel;
    bool up;
    RampShape shape;
    double amp;  // rad/us target (up) or start (down)
  };
  std::vector<PendingRamp> group;
  double group_len = 0.0;

  auto phase_of = [&](const std::string& ch) { return ch == "rabi" ? rabi_phase() : 0.0; };

  auto flush_group = [&]() {
    if (group.empty()) return;
    Segment seg;
    seg.duration = group_len;
    seg.tag = "ramp";
    std::set<std::string> ramping;
    for (const auto& r : group) {
      Envelope env;
      env.shape = r.shape == RampShape::RaisedCosine
                      ? (r.up ? EnvelopeShape::RampUpCosine : EnvelopeShape::RampDownCosine)
                      : (r.up ? EnvelopeShape::RampUpLinear : EnvelopeShape::RampDownLinear);
      env.amplitude = r.amp;
      env.duration = group_len;
      seg.channels[r.channel] = {env, phase_of(r.channel)};
      ramping.insert(r.channel);
      if (r.up) {
        active[r.channel] = r.amp;
      } else {
        active.erase(r.channel);
      }
    }
    // Channels that stay on through this ramp window hold their amplitude.
    for (const auto& [ch, amp] : active) {
      if (ramping.count(ch)) continue;
      seg.channels[ch] = {Envelope{EnvelopeShape::Constant, amp, 0.0}, phase_of(ch)};
    }
    program.segments.push_back(std::move(seg));
    group.clear();
    group_len = 0.0;
  };

  for (const auto& step : schedule.steps) {
    switch (step.kind) {
      case StepKind::RampUp:
      case StepKind::RampDown: {
        const bool up = step.kind == StepKind::RampUp;
        double amp;
        if (up) {
          amp = to_angular(step.amplitude > 0.0 ? step.amplitude
                                                : drive_amplitude_for(step.channel, params));
        } else {
          auto it = active.find(step.channel);
          if (it == active.end())
            throw ValidationError("ramp down on inactive channel '" + step.channel + "'");
          amp = it->second;
        }
        if (!group.empty() && step.duration != group_len)
          throw ValidationError("adjacent ramps with different lengths cannot be merged");
        group_len = step.duration;
        group.push_back({step.channel, up, step.shape, amp});
        break;
      }
      case StepKind::Hold: {
        flush_group();
        if (step.duration == 0.0) break;  // zero-length hold compiles to nothing
        Segment seg;
        seg.duration = step.duration;
        seg.tag = step.note.empty() ? "hold" : step.note;
        for (const auto& [ch, amp] : active) {
          seg.channels[ch] = {Envelope{EnvelopeShape::Constant, amp, 0.0}, phase_of(ch)};
        }
        program.segments.push_back(std::move(seg));
        break;
      }
      case StepKind::RabiPhaseFlip:
        flush_group();
        rabi_sign = -rabi_sign;
        break;
      case StepKind::QubitPulse: {
        flush_group();
        InstantEvent ev;
        ev.before_segment = static_cast<int>(program.segments.size());
        ev.qubit_unitary = qubit_rotation(step.axis, step.angle);
        ev.tag = step.note.empty() ? "pulse" : step.note;
        program.events.push_back(std::move(ev));
        break;
      }
    }
  }
  flush_group();
  program.validate();
  return program;
}

CoefficientProgram compile_jc(const PulseSchedule& schedule, const SystemParams& params) {
  const CouplingSet couplings = couplings_from_params(params);
  CoefficientProgram program;
  program.frame = Frame::JCFrame;

  std::set<std::string> active;  // active sideband drive channels
  int rabi_sign = 1;
  bool saw_init = false;

  for (const auto& step : schedule.steps) {
    switch (step.kind) {
      case StepKind::RampUp:
      case StepKind::RampDown:
        if (step.kind == StepKind::RampUp) {
          active.insert(step.channel);
        } else {
          active.erase(step.channel);
        }
        break;
      case StepKind::Hold: {
        if (step.duration == 0.0) break;
        Segment seg;
        seg.duration = step.duration;
        seg.tag = step.note.empty() ? "hold" : step.note;
        for (const auto& ch : active) {
          if (ch == "rabi") continue;  // Rabi drive is implicit in the JC frame
          const double g = jc_coupling_for(ch, couplings);
          if (g == 0.0) continue;
          std::string label = ch.rfind("drive_", 0) == 0 ? ch.substr(6) : ch;
          seg.channels["jc_" + label] = {Envelope{EnvelopeShape::Constant, to_angular(g), 0.0},
                                         0.0};
        }
        program.segments.push_back(std::move(seg));
        break;
      }
      case StepKind::RabiPhaseFlip: {
        InstantEvent ev;
        ev.before_segment = static_cast<int>(program.segments.size());
        ev.qubit_unitary = flip_relabel(rabi_sign);
        ev.tag = "flip_relabel";
        program.events.push_back(std::move(ev));
        rabi_sign = -rabi_sign;
        break;
      }
      case StepKind::QubitPulse: {
        if (step.note == "init" && program.segments.empty() && !saw_init) {
          // R_y(+pi/2) prepares the coupled dressed state = JC |e>.
          program.initial_qubit = step.angle > 0.0 ? 1 : 0;
          saw_init = true;
          break;
        }
        if (step.note == "closing") break;  // frame-exit bookkeeping only
        throw ValidationError(
            "JC-frame compilation supports only the prep and closing qubit pulses");
      }
    }
  }
  program.validate();
  return program;
}

}  // namespace

CoefficientProgram compile(const PulseSchedule& schedule, const SystemParams& params) {
  schedule.validate();
  params.validate();
  if (schedule.frame == Frame::DriveFrame) return compile_drive(schedule, params);
  return compile_jc(schedule, params);
}

HamiltonianTerms jc_hamiltonian_terms(const SubsystemLayout& layout) {
  if (!layout.has("qubit"))
    throw ValidationError("JC Hamiltonian terms require a 'qubit' subsystem");
  const int dim = layout.total_dim();
  HamiltonianTerms terms{
      OperatorMatrix::hermitian(layout, MatrixXcd::Zero(dim, dim)), {}};
  const OperatorMatrix sp = embed(pauli(Pauli::Plus), layout, "qubit");
  for (int k = 0; k < layout.subsystem_count(); ++k) {
    const std::string& label = layout.label(k);
    if (label == "qubit") continue;
    const OperatorMatrix a = embed(annihilation(layout.dim(k)), layout, label);
    MatrixXcd half = a.mat() * sp.mat();  // a sigma_+
    MatrixXcd cos_quad = half + half.adjoint();
    MatrixXcd sin_quad = cxd(0, 1) * (half - half.adjoint());
    terms.channels.emplace(
        "jc_" + label,
        ChannelTerm{OperatorMatrix::hermitian(layout, std::move(cos_quad)),
                    OperatorMatrix::hermitian(layout, std::move(sin_quad))});
  }
  return terms;
}

}  // namespace sideband
