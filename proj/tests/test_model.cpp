// Device parameters, effective couplings, and Hamiltonian builders.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sideband/model.hpp"
#include "sideband/ops.hpp"
#include "sideband/params.hpp"

using namespace sideband;
using Eigen::MatrixXcd;

TEST_CASE("default parameters reproduce the operating point") {
  SystemParams p;
  p.validate();
  CHECK(p.rabi_freq == doctest::Approx(6.0));
  CHECK(p.chi_1 == doctest::Approx(0.035));
  CHECK(p.chi_2 == doctest::Approx(0.020));
  CHECK(p.eps_1 == doctest::Approx(31.2));
  CHECK(p.eps_2 == doctest::Approx(54.6));
  CHECK(p.t1_qubit == doctest::Approx(22.8));
  CHECK(p.t2_echo_qubit == doctest::Approx(21.8));
  CHECK(p.t1_mem1 == doctest::Approx(145.0));
  CHECK(p.t1_mem2 == doctest::Approx(136.0));
  CHECK(!p.include_readout);
}

TEST_CASE("pure dephasing rate and coherence scaling") {
  SystemParams p;
  const double want = 1.0 / p.t2_echo_qubit - 0.5 / p.t1_qubit;
  CHECK(p.pure_dephasing_rate() == doctest::Approx(want).epsilon(1e-12));

  SystemParams better = p.with_coherence_multiplier(10.0);
  CHECK(better.t1_qubit == doctest::Approx(10.0 * p.t1_qubit));
  CHECK(better.t2_echo_qubit == doctest::Approx(10.0 * p.t2_echo_qubit));
  CHECK(better.t1_mem1 == doctest::Approx(10.0 * p.t1_mem1));
  CHECK(better.t1_mem2 == doctest::Approx(10.0 * p.t1_mem2));
  CHECK(better.pure_dephasing_rate() ==
        doctest::Approx(p.pure_dephasing_rate() / 10.0).epsilon(1e-12));
  // Drive parameters are untouched.
  CHECK(better.rabi_freq == doctest::Approx(p.rabi_freq));
  CHECK(better.eps_1 == doctest::Approx(p.eps_1));

  // T2 == 2*T1 is the dephasing-free edge and must be accepted.
  SystemParams edge = p;
  edge.t2_echo_qubit = 2.0 * edge.t1_qubit;
  edge.validate();
  CHECK(std::abs(edge.pure_dephasing_rate()) < 1e-15);
}

TEST_CASE("unphysical T2 is rejected naming the offending field") {
  SystemParams p;
  p.t2_echo_qubit = 2.0 * p.t1_qubit + 1.0;
  try {
    p.validate();
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("t2_echo_qubit") != std::string::npos);
  }

  SystemParams neg;
  neg.t1_mem1 = -1.0;
  CHECK_THROWS_AS(neg.validate(), ValidationError);
}

TEST_CASE("steady-state amplitudes and effective couplings") {
  SystemParams p;
  // abar = eps / Omega_R for the memory modes at the operating point.
  CHECK(std::abs(steady_state_amplitude(p, "mem1")) == doctest::Approx(31.2 / 6.0));
  CHECK(std::abs(steady_state_amplitude(p, "mem2")) == doctest::Approx(54.6 / 6.0));

  // g = |chi| * |abar|: both modes tuned to the same 0.182 MHz.
  CHECK(effective_coupling(p, "mem1") == doctest::Approx(0.182).epsilon(1e-12));
  CHECK(effective_coupling(p, "mem2") == doctest::Approx(0.182).epsilon(1e-12));

  CouplingSet cpl = couplings_from_params(p);
  CHECK(cpl.g_1 == doctest::Approx(0.182).epsilon(1e-12));
  CHECK(cpl.g_2 == doctest::Approx(0.182).epsilon(1e-12));
  CHECK(std::abs(cpl.abar_1) == doctest::Approx(5.2).epsilon(1e-12));
  CHECK(std::abs(cpl.abar_2) == doctest::Approx(9.1).epsilon(1e-12));

  // Scaling the drive scales abar linearly and g with it.
  SystemParams weaker = p;
  weaker.eps_1 = p.eps_1 / 2.0;
  CHECK(effective_coupling(weaker, "mem1") == doctest::Approx(0.091).epsilon(1e-12));
}

TEST_CASE("sideband-coupling Hamiltonian: hermitian, excitation-conserving") {
  SystemParams p;
  CouplingSet cpl = couplings_from_params(p);
  SubsystemLayout lay({"mem1", "mem2", "qubit"}, {5, 5, 2});
  OperatorMatrix h = build_jc_hamiltonian(cpl, lay);

  CHECK((h.mat() - h.mat().adjoint()).norm() < 1e-12);

  // Total excitation number commutes with the exchange Hamiltonian.
  MatrixXcd ntot = embed(number_operator(5), lay, "mem1").mat() +
                   embed(number_operator(5), lay, "mem2").mat() +
                   embed(OperatorMatrix(SubsystemLayout::single("qubit", 2),
                                        pauli(Pauli::Plus).mat() * pauli(Pauli::Minus).mat()),
                         lay, "qubit")
                       .mat();
  CHECK((h.mat() * ntot - ntot * h.mat()).norm() < 1e-10);

  // The exchange element <1,0,g|H|0,0,e> has magnitude 2*pi*g (angular units).
  Eigen::Index row = lay.flat_index({1, 0, 0});
  Eigen::Index col = lay.flat_index({0, 0, 1});
  CHECK(std::abs(h.mat()(row, col)) == doctest::Approx(kTwoPi * cpl.g_1).epsilon(1e-12));

  // sqrt(n) enhancement on the two-photon element.
  Eigen::Index row2 = lay.flat_index({2, 0, 0});
  Eigen::Index col2 = lay.flat_index({1, 0, 1});
  CHECK(std::abs(h.mat()(row2, col2)) ==
        doctest::Approx(kTwoPi * cpl.g_1 * std::sqrt(2.0)).epsilon(1e-12));

  // Vacuum with ground qubit is annihilated.
  CHECK(h.mat().col(lay.flat_index({0, 0, 0})).norm() < 1e-14);
}

TEST_CASE("drive-frame Hamiltonian exposes the documented channels") {
  SystemParams p;
  SubsystemLayout lay({"mem1", "mem2", "qubit"}, {4, 4, 2});
  HamiltonianTerms terms = build_drive_frame_hamiltonian(p, lay);

  CHECK((terms.static_part.mat() - terms.static_part.mat().adjoint()).norm() < 1e-12);
  REQUIRE(terms.channels.count("rabi") == 1);
  REQUIRE(terms.channels.count("drive_mem1") == 1);
  REQUIRE(terms.channels.count("drive_mem2") == 1);
  for (const auto& [name, ch] : terms.channels) {
    CAPTURE(name);
    CHECK((ch.cos_quad.mat() - ch.cos_quad.mat().adjoint()).norm() < 1e-12);
    CHECK((ch.sin_quad.mat() - ch.sin_quad.mat().adjoint()).norm() < 1e-12);
  }

  // Rabi channel acts on the qubit only: -(1/2) sigma_x embedded.
  MatrixXcd want_rabi = embed(pauli(Pauli::X), lay, "qubit").mat() * (-0.5);
  CHECK((terms.channels.at("rabi").cos_quad.mat() - want_rabi).norm() < 1e-12);

  // Mode drive channel is the displacement quadrature a^dag + a.
  MatrixXcd a1 = embed(annihilation(4), lay, "mem1").mat();
  CHECK((terms.channels.at("drive_mem1").cos_quad.mat() - (a1 + a1.adjoint())).norm() < 1e-12);

  // Static part: detuning -Omega_R on each mode plus dispersive shift, qubit
  // diagonal zero.  Check the number-like diagonal on |1,0,g> and |1,0,e>.
  const double w = kTwoPi;
  double e_g = std::real(terms.static_part.mat()(lay.flat_index({1, 0, 0}),
                                                 lay.flat_index({1, 0, 0})));
  double e_e = std::real(terms.static_part.mat()(lay.flat_index({1, 0, 1}),
                                                 lay.flat_index({1, 0, 1})));
  // -Omega_R - chi_1 sigma_z: sigma_z = +1 for ground.
  CHECK(e_g == doctest::Approx(w * (-p.rabi_freq - p.chi_1)).epsilon(1e-12));
  CHECK(e_e == doctest::Approx(w * (-p.rabi_freq + p.chi_1)).epsilon(1e-12));
}

TEST_CASE("bright and dark combinations behave as a canonical mode pair") {
  SubsystemLayout lay({"mem1", "mem2", "qubit"}, {5, 5, 2});
  auto [bright, dark] = bright_dark_operators(lay);

  MatrixXcd b = bright.mat(), d = dark.mat();
  const Eigen::Index n = b.rows();
  MatrixXcd id = MatrixXcd::Identity(n, n);

  // Canonical commutators on the interior (truncation spoils the edge).
  MatrixXcd proj = MatrixXcd::Zero(n, n);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int q = 0; q < 2; ++q) {
        Eigen::Index idx = lay.flat_index({i, j, q});
        proj(idx, idx) = 1.0;
      }
  CHECK((proj * (b * b.adjoint() - b.adjoint() * b - id) * proj).norm() < 1e-12);
  CHECK((proj * (d * d.adjoint() - d.adjoint() * d - id) * proj).norm() < 1e-12);
  CHECK((proj * (b * d.adjoint() - d.adjoint() * b) * proj).norm() < 1e-12);

  // Bright/dark reconstruct the bare modes: a1 = (B + D)/sqrt(2).
  MatrixXcd a1 = embed(annihilation(5), lay, "mem1").mat();
  MatrixXcd a2 = embed(annihilation(5), lay, "mem2").mat();
  CHECK(((b + d) / std::sqrt(2.0) - a1).norm() < 1e-12);
  CHECK(((b - d) / std::sqrt(2.0) - a2).norm() < 1e-12);

  // With equal couplings the dark mode decouples: [H, D^dag D] = 0.
  SystemParams p;
  OperatorMatrix h = build_jc_hamiltonian(couplings_from_params(p), lay);
  MatrixXcd ndark = d.adjoint() * d;
  CHECK((h.mat() * ndark - ndark * h.mat()).norm() < 1e-9);
}

TEST_CASE("qubit frame map sends x-eigenstates to the dressed basis") {
  MatrixXcd v = jc_qubit_map();
  CHECK((v * v.adjoint() - MatrixXcd::Identity(2, 2)).norm() < 1e-14);

  Eigen::Vector2cd plus_x(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  Eigen::Vector2cd minus_x(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
  Eigen::Vector2cd e_jc = v * plus_x;
  Eigen::Vector2cd g_jc = v * minus_x;
  CHECK(std::abs(e_jc(1) - 1.0) < 1e-14);
  CHECK(std::abs(e_jc(0)) < 1e-14);
  CHECK(std::abs(g_jc(0) - 1.0) < 1e-14);
  CHECK(std::abs(g_jc(1)) < 1e-14);
}
