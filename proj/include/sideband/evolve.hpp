// Public time-evolution API: adaptive RK45 integration of pure states
// (Schrodinger) and density matrices (Lindblad) over a CoefficientProgram,
// with standard observable recording.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sideband/collapse.hpp"
#include "sideband/lowered.hpp"
#include "sideband/model.hpp"
#include "sideband/program.hpp"
#include "sideband/state.hpp"

namespace sideband {

struct EvolveOptions {
  double dt_max = 0.0;  // 0 = no explicit cap (adaptive control + segment clamping)
  double rtol = 0.0;    // 0 = default: 1e-10 pure, 1e-8 density
  double atol = 1e-12;
  int samples_per_segment = 8;  // interior samples per segment (boundaries always)
  bool parallel = true;
  bool check_positivity = true;  // density runs: eigenvalue floor at samples
  // Extra observable columns: sigma_x, sigma_y, purity, n_bright, n_dark,
  // total_excitation, re_a_<mode>, im_a_<mode> (availability depends on the
  // layout).
  std::vector<std::string> extras;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> records;
  QuantumState final_state;
  EngineStats stats;

  // Column by name, nullptr when absent.
  const std::vector<double>* column(const std::string& name) const;
};

// Closed-system evolution under static H0 + named channels from `h`.
Trajectory evolve_pure(const HamiltonianTerms& h, const CoefficientProgram& program,
                       const QuantumState& psi0, const EvolveOptions& opts = {});
// Static-Hamiltonian form (program segments provide timing and events only).
Trajectory evolve_pure(const OperatorMatrix& h0, const CoefficientProgram& program,
                       const QuantumState& psi0, const EvolveOptions& opts = {});
Trajectory evolve_pure(const OperatorMatrix& h0, const CoefficientProgram& program,
                       const QuantumState& psi0, double dt_max);

// Open-system evolution; rho0 may be pure (promoted) or a density matrix.
Trajectory evolve_lindblad(const HamiltonianTerms& h, const CoefficientProgram& program,
                           const QuantumState& rho0, const CollapseSet& collapse,
                           const EvolveOptions& opts = {});
Trajectory evolve_lindblad(const OperatorMatrix& h0, const CoefficientProgram& program,
                           const QuantumState& rho0, const CollapseSet& collapse,
                           const EvolveOptions& opts = {});
Trajectory evolve_lindblad(const OperatorMatrix& h0, const CoefficientProgram& program,
                           const QuantumState& rho0, const CollapseSet& collapse,
                           double dt_max);

// Evolution over an already-lowered system (custom coefficient closures).
// `density` selects Lindblad (true) vs Schrodinger (false) integration; the
// initial state must match and determines the recorded frame.
Trajectory run_lowered(const LoweredSystem& sys, const CoefficientProgram& program,
                       const QuantumState& initial, bool density,
                       const EvolveOptions& opts = {});

}  // namespace sideband
