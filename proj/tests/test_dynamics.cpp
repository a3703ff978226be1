// Time-evolution engine: envelopes, integrator accuracy, and open-system
// physics against exact exponential-decay laws.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sideband/collapse.hpp"
#include "sideband/evolve.hpp"
#include "sideband/model.hpp"
#include "sideband/oracle.hpp"
#include "sideband/ops.hpp"
#include "sideband/program.hpp"

using namespace sideband;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

Segment hold_segment(double duration) {
  Segment s;
  s.duration = duration;
  s.tag = "hold";
  return s;
}

CoefficientProgram hold_program(double duration, Frame frame = Frame::JCFrame) {
  CoefficientProgram prog;
  prog.frame = frame;
  prog.segments = {hold_segment(duration)};
  return prog;
}

}  // namespace

TEST_CASE("envelope shapes interpolate between zero and peak") {
  Envelope ramp_up{EnvelopeShape::RampUpCosine, 2.0, 0.4};
  CHECK(ramp_up.value(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ramp_up.value(0.2) == doctest::Approx(1.0));  // half amplitude at midpoint
  CHECK(ramp_up.value(0.4) == doctest::Approx(2.0));
  // Raised-cosine edges start and end with zero slope.
  CHECK(std::abs(ramp_up.slope(0.0)) < 1e-12);
  CHECK(std::abs(ramp_up.slope(0.4)) < 1e-12);

  Envelope ramp_down{EnvelopeShape::RampDownCosine, 2.0, 0.4};
  CHECK(ramp_down.value(0.0) == doctest::Approx(2.0));
  CHECK(ramp_down.value(0.4) == doctest::Approx(0.0).epsilon(1e-14));

  Envelope lin{EnvelopeShape::RampUpLinear, 3.0, 0.5};
  CHECK(lin.value(0.25) == doctest::Approx(1.5));
  CHECK(lin.slope(0.1) == doctest::Approx(6.0));

  Envelope flat{EnvelopeShape::Constant, 1.7, 0.0};
  CHECK(flat.value(0.123) == doctest::Approx(1.7));
  CHECK(std::abs(flat.slope(0.123)) < 1e-14);
}

TEST_CASE("programs validate durations and event placement") {
  CoefficientProgram prog = hold_program(0.5);
  prog.validate();
  CHECK(prog.total_duration() == doctest::Approx(0.5));
  CHECK(prog.segment_start(0) == doctest::Approx(0.0));
  CHECK(prog.segment_start(1) == doctest::Approx(0.5));

  CoefficientProgram bad = prog;
  bad.segments[0].duration = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  CoefficientProgram ev = prog;
  InstantEvent e;
  e.before_segment = 5;  // out of range
  e.qubit_unitary = MatrixXcd::Identity(2, 2);
  ev.events = {e};
  CHECK_THROWS_AS(ev.validate(), ValidationError);

  CoefficientProgram wrong = prog;
  InstantEvent e2;
  e2.before_segment = 0;
  e2.qubit_unitary = MatrixXcd::Identity(3, 3);
  wrong.events = {e2};
  CHECK_THROWS_AS(wrong.validate(), ValidationError);
}

TEST_CASE("closed-system integration matches the brute-force propagator") {
  SystemParams params;
  CouplingSet cpl = couplings_from_params(params);
  SubsystemLayout lay({"mem1", "qubit"}, {6, 2});
  CouplingSet one = cpl;
  one.g_2 = 0.0;
  OperatorMatrix h = build_jc_hamiltonian(one, lay);

  const double t = 0.9;
  OperatorMatrix u = brute_force_propagator(h, t);
  auto psi0 = QuantumState::basis(lay, {0, 1}, Frame::JCFrame);
  VectorXcd want = u.mat() * psi0.vec();

  EvolveOptions opts;
  opts.rtol = 1e-11;
  opts.atol = 1e-13;
  auto traj = evolve_pure(h, hold_program(t), psi0, opts);
  CHECK((traj.final_state.vec() - want).norm() < 1e-9);
  CHECK(std::abs(traj.final_state.norm() - 1.0) < 1e-10);
  CHECK(traj.stats.final_defect < 1e-9);

  // The default observable columns exist and start at the initial values.
  REQUIRE(traj.column("sigma_z") != nullptr);
  REQUIRE(traj.column("n_mem1") != nullptr);
  CHECK(traj.column("sigma_z")->front() == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(traj.column("n_mem1")->front() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(traj.times.front() == doctest::Approx(0.0));
  CHECK(traj.times.back() == doctest::Approx(t));
}

TEST_CASE("tightening tolerances converges the pure integrator") {
  SystemParams params;
  CouplingSet cpl = couplings_from_params(params);
  SubsystemLayout lay({"mem1", "qubit"}, {6, 2});
  OperatorMatrix h = build_jc_hamiltonian(cpl, lay);
  auto psi0 = QuantumState::basis(lay, {0, 1}, Frame::JCFrame);

  EvolveOptions coarse;
  coarse.rtol = 1e-7;
  EvolveOptions fine;
  fine.rtol = 1e-11;
  fine.atol = 1e-14;
  auto a = evolve_pure(h, hold_program(1.3736), psi0, coarse);
  auto b = evolve_pure(h, hold_program(1.3736), psi0, fine);
  CHECK((a.final_state.vec() - b.final_state.vec()).norm() < 1e-6);
  // The tight run is the reference: halving its tolerance changes nothing
  // beyond 1e-9.
  EvolveOptions finest = fine;
  finest.rtol = 0.5e-11;
  auto c = evolve_pure(h, hold_program(1.3736), psi0, finest);
  CHECK((b.final_state.vec() - c.final_state.vec()).norm() < 1e-9);
  // Work scales with accuracy.
  CHECK(b.stats.rhs_evals > a.stats.rhs_evals);
}

TEST_CASE("instant events apply qubit unitaries between segments") {
  SubsystemLayout lay({"mem1", "qubit"}, {3, 2});
  OperatorMatrix h(lay, MatrixXcd::Zero(6, 6));  // free evolution

  CoefficientProgram prog = hold_program(0.1);
  InstantEvent flip;
  flip.before_segment = 1;  // after the only segment
  flip.qubit_unitary = qubit_rotation(Pauli::Y, kTwoPi / 2.0);
  flip.tag = "pi-pulse";
  prog.events = {flip};

  auto psi0 = QuantumState::basis(lay, {0, 0}, Frame::JCFrame);
  auto traj = evolve_pure(h, prog, psi0);
  // Ground flipped to excited: sigma_z = -1.
  double sz = traj.column("sigma_z")->back();
  CHECK(sz == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("qubit decay follows the exact exponential") {
  SystemParams params;
  SubsystemLayout lay = SubsystemLayout::single("qubit", 2);
  CollapseSet collapse = collapse_from_params(params, lay, Frame::DriveFrame);

  OperatorMatrix h(lay, MatrixXcd::Zero(2, 2));
  auto rho0 = QuantumState::basis(lay, {1}).as_density();
  const double t = 5.0;
  EvolveOptions opts;
  opts.rtol = 1e-10;
  auto traj = evolve_lindblad(h, hold_program(t, Frame::DriveFrame), rho0, collapse, opts);

  const double p_e = std::real(traj.final_state.rho()(1, 1));
  CHECK(p_e == doctest::Approx(std::exp(-t / params.t1_qubit)).epsilon(1e-6));
  CHECK(std::abs(traj.final_state.trace_real() - 1.0) < 1e-9);
  traj.final_state.validate_full();
}

TEST_CASE("equatorial coherence decays at the echo rate") {
  SystemParams params;
  SubsystemLayout lay = SubsystemLayout::single("qubit", 2);
  CollapseSet collapse = collapse_from_params(params, lay, Frame::DriveFrame);

  OperatorMatrix h(lay, MatrixXcd::Zero(2, 2));
  VectorXcd plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto rho0 = QuantumState::pure(lay, plus).as_density();

  const double t = 4.0;
  EvolveOptions opts;
  opts.rtol = 1e-10;
  opts.extras = {"sigma_x"};
  auto traj = evolve_lindblad(h, hold_program(t, Frame::DriveFrame), rho0, collapse, opts);
  const double sx = traj.column("sigma_x")->back();
  CHECK(sx == doctest::Approx(std::exp(-t / params.t2_echo_qubit)).epsilon(1e-4));
}

TEST_CASE("dephasing-free parameters produce no dephasing operator") {
  SystemParams p;
  p.t2_echo_qubit = 2.0 * p.t1_qubit;
  SubsystemLayout lay = SubsystemLayout::single("qubit", 2);
  CollapseSet set = collapse_from_params(p, lay, Frame::DriveFrame);
  // Only the decay operator survives; the zero-rate dephasing entry is culled.
  CHECK(set.ops.size() == 1);
  CHECK(set.ops[0].rate == doctest::Approx(1.0 / p.t1_qubit));
}

TEST_CASE("memory damping empties a coherent state at the mode rate") {
  SystemParams params;
  SubsystemLayout lay({"mem1", "qubit"}, {12, 2});
  CollapseSet collapse = collapse_from_params(params, lay, Frame::DriveFrame);

  OperatorMatrix h(lay, MatrixXcd::Zero(24, 24));
  const cxd alpha(1.2, 0.0);
  VectorXcd cvec = coherent_vector(12, alpha);
  VectorXcd psi = VectorXcd::Zero(24);
  for (int n = 0; n < 12; ++n) psi(lay.flat_index({n, 0})) = cvec(n);
  auto rho0 = QuantumState::pure(lay, psi).as_density();

  const double t = 30.0;
  EvolveOptions opts;
  opts.rtol = 1e-9;
  opts.samples_per_segment = 4;
  auto traj = evolve_lindblad(h, hold_program(t, Frame::DriveFrame), rho0, collapse, opts);
  const double n_want = std::norm(alpha) * std::exp(-t / params.t1_mem1);
  CHECK(traj.column("n_mem1")->back() == doctest::Approx(n_want).epsilon(1e-5));
}

TEST_CASE("empty collapse set reduces Lindblad to unitary dynamics") {
  SystemParams params;
  CouplingSet cpl = couplings_from_params(params);
  SubsystemLayout lay({"mem1", "qubit"}, {4, 2});
  CouplingSet one = cpl;
  one.g_2 = 0.0;
  OperatorMatrix h = build_jc_hamiltonian(one, lay);

  auto psi0 = QuantumState::basis(lay, {0, 1}, Frame::JCFrame);
  const double t = 0.7;
  EvolveOptions opts;
  opts.rtol = 1e-10;
  auto pure = evolve_pure(h, hold_program(t), psi0, opts);
  auto open = evolve_lindblad(h, hold_program(t), psi0.as_density(), CollapseSet{}, opts);

  MatrixXcd rho_pure =
      pure.final_state.vec() * pure.final_state.vec().adjoint();
  CHECK((open.final_state.rho() - rho_pure).norm() < 1e-7);
  open.final_state.validate_full();
}

TEST_CASE("open-system runs preserve trace, hermiticity, and positivity") {
  SystemParams params;
  CouplingSet cpl = couplings_from_params(params);
  SubsystemLayout lay({"mem1", "qubit"}, {5, 2});
  CouplingSet one = cpl;
  one.g_2 = 0.0;
  OperatorMatrix h = build_jc_hamiltonian(one, lay);
  CollapseSet collapse = collapse_from_params(params, lay, Frame::JCFrame);

  auto rho0 = QuantumState::basis(lay, {0, 1}, Frame::JCFrame).as_density();
  EvolveOptions opts;
  opts.samples_per_segment = 6;
  auto traj = evolve_lindblad(h, hold_program(2.0), rho0, collapse, opts);

  const MatrixXcd& rho = traj.final_state.rho();
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-8);
  CHECK((rho - rho.adjoint()).norm() < 1e-9);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
  CHECK(es.eigenvalues().minCoeff() > -1e-8);
  CHECK(traj.stats.final_defect < 1e-7);
}
