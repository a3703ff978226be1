// Operator algebra, tensor layout, and state container tests.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "sideband/layout.hpp"
#include "sideband/ops.hpp"
#include "sideband/state.hpp"

using namespace sideband;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

TEST_CASE("layout strides and flat indexing round-trip") {
  SubsystemLayout lay({"mem1", "mem2", "qubit"}, {5, 7, 2});
  CHECK(lay.subsystem_count() == 3);
  CHECK(lay.total_dim() == 5 * 7 * 2);
  CHECK(lay.dim_of("mem2") == 7);
  CHECK(lay.label(2) == "qubit");
  CHECK(lay.index_of("qubit") == 2);
  CHECK(lay.has("mem1"));
  CHECK(!lay.has("readout"));

  // Last subsystem is fastest-varying: stride(qubit) == 1.
  CHECK(lay.stride(2) == 1);
  CHECK(lay.stride(1) == 2);
  CHECK(lay.stride(0) == 14);

  // flat_index enumerates every basis state exactly once.
  std::vector<bool> seen(lay.total_dim(), false);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 7; ++b)
      for (int q = 0; q < 2; ++q) {
        Eigen::Index idx = lay.flat_index({a, b, q});
        REQUIRE(idx >= 0);
        REQUIRE(idx < lay.total_dim());
        CHECK(!seen[idx]);
        seen[idx] = true;
      }

  CHECK(lay == SubsystemLayout({"mem1", "mem2", "qubit"}, {5, 7, 2}));
  CHECK(!(lay == SubsystemLayout({"mem1", "qubit"}, {5, 2})));

  SubsystemLayout single = SubsystemLayout::single("mem1", 9);
  CHECK(single.subsystem_count() == 1);
  CHECK(single.total_dim() == 9);
}

TEST_CASE("ladder operators have sqrt(n) matrix elements") {
  const int d = 8;
  MatrixXcd a = annihilation(d).mat();
  for (int m = 0; m + 1 < d; ++m)
    CHECK(std::abs(a(m, m + 1) - std::sqrt(double(m + 1))) < 1e-14);
  CHECK(a.cwiseAbs().sum() == doctest::Approx(a.diagonal(1).cwiseAbs().sum()));

  MatrixXcd n = number_operator(d).mat();
  CHECK((n - a.adjoint() * a).norm() < 1e-13);

  // [a, a^dag] = 1 away from the truncation edge.
  MatrixXcd comm = a * a.adjoint() - a.adjoint() * a;
  MatrixXcd expect = MatrixXcd::Identity(d, d);
  CHECK((comm - expect).topLeftCorner(d - 1, d - 1).norm() < 1e-13);
}

TEST_CASE("qubit convention: index 0 is ground, sigma_plus raises it") {
  MatrixXcd sz = pauli(Pauli::Z).mat();
  CHECK(std::abs(sz(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(sz(1, 1) + 1.0) < 1e-15);

  MatrixXcd sp = pauli(Pauli::Plus).mat();
  CHECK(std::abs(sp(1, 0) - 1.0) < 1e-15);  // |e><g|
  CHECK(std::abs(sp(0, 1)) < 1e-15);

  MatrixXcd sm = pauli(Pauli::Minus).mat();
  CHECK((sm - sp.adjoint()).norm() < 1e-15);

  MatrixXcd sx = pauli(Pauli::X).mat();
  MatrixXcd sy = pauli(Pauli::Y).mat();
  CHECK((sx - (sp + sm)).norm() < 1e-15);
  CHECK((sy - cxd(0, -1) * (sp - sm)).norm() < 1e-14);
  // Algebra: sx*sy = i sz.
  CHECK((sx * sy - cxd(0, 1) * sz).norm() < 1e-14);
}

TEST_CASE("qubit rotations are unitary and act as half-angle rotations") {
  for (Pauli axis : {Pauli::X, Pauli::Y, Pauli::Z}) {
    MatrixXcd u = qubit_rotation(axis, 1.234);
    CHECK((u * u.adjoint() - MatrixXcd::Identity(2, 2)).norm() < 1e-14);
  }
  // R_y(pi/2)|g> = (|g> + |e>)/sqrt(2) with real amplitudes.
  MatrixXcd ry = qubit_rotation(Pauli::Y, kTwoPi / 4.0);
  Eigen::Vector2cd g(1.0, 0.0);
  Eigen::Vector2cd out = ry * g;
  CHECK(std::abs(out(0) - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(out(1) - 1.0 / std::sqrt(2.0)) < 1e-14);
  // R_y(pi)|g> = |e> up to the expected sign.
  MatrixXcd ry_pi = qubit_rotation(Pauli::Y, kTwoPi / 2.0);
  out = ry_pi * g;
  CHECK(std::abs(out(0)) < 1e-14);
  CHECK(std::abs(std::abs(out(1)) - 1.0) < 1e-14);
  // Composition: R(theta1) R(theta2) = R(theta1 + theta2).
  MatrixXcd lhs = qubit_rotation(Pauli::X, 0.7) * qubit_rotation(Pauli::X, 0.4);
  MatrixXcd rhs = qubit_rotation(Pauli::X, 1.1);
  CHECK((lhs - rhs).norm() < 1e-14);
}

TEST_CASE("embedding places operators on the right subsystem") {
  SubsystemLayout lay({"mem1", "mem2", "qubit"}, {4, 3, 2});
  OperatorMatrix n1 = embed(number_operator(4), lay, "mem1");
  OperatorMatrix n2 = embed(number_operator(3), lay, "mem2");
  OperatorMatrix sz = embed(pauli(Pauli::Z), lay, "qubit");

  // Operators on different subsystems commute.
  CHECK((n1.mat() * n2.mat() - n2.mat() * n1.mat()).norm() < 1e-14);
  CHECK((n1.mat() * sz.mat() - sz.mat() * n1.mat()).norm() < 1e-14);

  // Diagonal action on a basis state.
  auto st = QuantumState::basis(lay, {2, 1, 1});
  CHECK(std::real(expectation(st, n1)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::real(expectation(st, n2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::real(expectation(st, sz)) == doctest::Approx(-1.0).epsilon(1e-14));

  // expectation_on agrees with explicit embedding.
  cxd via_embed = expectation(st, n1);
  cxd via_target = expectation_on(st, number_operator(4).mat(), "mem1");
  CHECK(std::abs(via_embed - via_target) < 1e-14);

  // Identity embeds to identity.
  OperatorMatrix id = embed(identity_operator(3, "mem2"), lay, "mem2");
  CHECK((id.mat() - MatrixXcd::Identity(lay.total_dim(), lay.total_dim())).norm() < 1e-14);
}

TEST_CASE("displacement operator is unitary and generates coherent states") {
  const cxd alpha(0.9, -0.6);
  const int d = displacement_adequate_dim(std::abs(alpha));
  OperatorMatrix dop = displacement(alpha, d);
  CHECK(unitarity_defect(dop) < 1e-6);

  VectorXcd vac = VectorXcd::Zero(d);
  vac(0) = 1.0;
  VectorXcd got = dop.mat() * vac;
  VectorXcd want = coherent_vector(d, alpha);
  CHECK((got - want).norm() < 1e-6);

  // D(-alpha) = D(alpha)^dag.
  OperatorMatrix dminus = displacement(-alpha, d);
  CHECK((dminus.mat() - dop.mat().adjoint()).norm() < 1e-8);

  // Adequate dimension grows with amplitude.
  CHECK(displacement_adequate_dim(2.0) > displacement_adequate_dim(0.5));
  CHECK(displacement_adequate_dim(0.0) >= 2);
}

TEST_CASE("coherent vectors carry Poisson weights") {
  const cxd alpha(1.1, 0.4);
  const double na = std::norm(alpha);
  const int d = 24;
  VectorXcd v = coherent_vector(d, alpha);
  CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  double fact = 1.0;
  for (int n = 0; n < 6; ++n) {
    if (n > 0) fact *= n;
    double want = std::exp(-na) * std::pow(na, n) / fact;
    CHECK(std::abs(std::norm(v(n)) - want) < 1e-10);
  }
  // fock_vector is the n-th basis column.
  VectorXcd f3 = fock_vector(6, 3);
  CHECK(std::abs(f3(3) - 1.0) < 1e-15);
  CHECK(std::abs(f3.norm() - 1.0) < 1e-15);
}

TEST_CASE("partial trace factorizes products and mixes entangled pairs") {
  SubsystemLayout lay({"mem1", "qubit"}, {6, 2});

  // Product state: reduced mode state is the pure coherent state.
  VectorXcd cvec = coherent_vector(6, cxd(0.5, 0.2));
  VectorXcd psi = VectorXcd::Zero(12);
  for (int n = 0; n < 6; ++n) psi(lay.flat_index({n, 0})) = cvec(n);
  auto st = QuantumState::pure(lay, psi);
  auto red = partial_trace(st, {"mem1"});
  MatrixXcd want = cvec * cvec.adjoint();
  CHECK((red.rho() - want).norm() < 1e-12);

  // Entangled state: reduced qubit state is maximally mixed.
  VectorXcd bell = VectorXcd::Zero(12);
  bell(lay.flat_index({0, 0})) = 1.0 / std::sqrt(2.0);
  bell(lay.flat_index({1, 1})) = 1.0 / std::sqrt(2.0);
  auto ent = QuantumState::pure(lay, bell);
  auto qred = partial_trace(ent, {"qubit"});
  CHECK((qred.rho() - 0.5 * MatrixXcd::Identity(2, 2)).norm() < 1e-12);

  // Tracing out nothing returns the same density matrix.
  auto full = partial_trace(ent, {"mem1", "qubit"});
  CHECK((full.rho() - ent.as_density().rho()).norm() < 1e-12);
}

TEST_CASE("quantum state containers validate their invariants") {
  SubsystemLayout lay({"mem1", "qubit"}, {3, 2});

  auto st = QuantumState::basis(lay, {1, 0});
  CHECK(st.is_pure());
  CHECK(st.dim() == 6);
  CHECK(std::abs(st.norm() - 1.0) < 1e-15);
  st.validate_full();

  // Unnormalized pure vectors are rejected.
  VectorXcd bad = VectorXcd::Zero(6);
  bad(0) = 0.7;
  CHECK_THROWS_AS(QuantumState::pure(lay, bad), InvariantViolation);

  // Wrong-size vectors are rejected.
  VectorXcd wrong = VectorXcd::Zero(5);
  CHECK_THROWS_AS(QuantumState::pure(lay, wrong), ValidationError);

  // as_density is idempotent and trace-one.
  auto rho = st.as_density();
  CHECK(!rho.is_pure());
  CHECK(std::abs(rho.trace_real() - 1.0) < 1e-14);
  rho.validate_full();

  // Non-Hermitian density matrices are rejected.
  MatrixXcd nh = MatrixXcd::Zero(6, 6);
  nh(0, 0) = 0.9;
  nh(1, 1) = 0.1;
  nh(0, 1) = cxd(0.2, 0.0);  // missing the conjugate partner
  CHECK_THROWS_AS(QuantumState::density(lay, nh), InvariantViolation);

  // Frames are carried and renamed consistently.
  CHECK(std::string(frame_name(Frame::DriveFrame)) == "drive");
  CHECK(std::string(frame_name(Frame::JCFrame)) == "jc");
  auto fr = QuantumState::basis(lay, {0, 0}, Frame::JCFrame);
  CHECK(fr.frame() == Frame::JCFrame);
  fr.set_frame(Frame::DriveFrame);
  CHECK(fr.frame() == Frame::DriveFrame);
}

TEST_CASE("expectation values match closed forms on coherent states") {
  const cxd alpha(0.8, -0.3);
  const int d = 20;
  SubsystemLayout lay({"mem1"}, {d});
  auto st = QuantumState::pure(lay, coherent_vector(d, alpha));
  cxd n_expect = expectation(st, number_operator(d));
  CHECK(std::abs(n_expect - cxd(std::norm(alpha), 0.0)) < 1e-10);
  cxd a_expect = expectation(st, annihilation(d));
  CHECK(std::abs(a_expect - alpha) < 1e-10);
}
