// Lowered form of a driven open system: the static diagonal is absorbed into
// the interaction picture, every remaining operator becomes a phased
// ApplyPlan, and time dependence is reduced to per-segment scalar coefficient
// closures. integrate_program() runs the adaptive RK45 engine on a lowered
// system over a CoefficientProgram.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sideband/collapse.hpp"
#include "sideband/kernels.hpp"
#include "sideband/model.hpp"
#include "sideband/program.hpp"

namespace sideband {

// Scalar coefficient c(segment, t_local, t_global) in rad/us.
using CoeffFn = std::function<cxd(int, double, double)>;

// One Hamiltonian term: c(t) A for Hermitian A with real c, or
// c(t) A + conj(c(t)) A^dag for a ladder-type pair term.
struct LoweredTerm {
  ApplyPlan op;      // A
  ApplyPlan op_dag;  // A^dag (unused when hermitian)
  bool hermitian = false;
  CoeffFn coeff;
  std::string tag;
};

struct LoweredCollapse {
  ApplyPlan op;   // L
  ApplyPlan ldl;  // L^dag L
  double rate = 0.0;
  std::string tag;
};

struct LoweredSystem {
  int dim = 0;
  SubsystemLayout layout;  // needed to embed boundary events
  VectorXd diag;           // absorbed static diagonal (rad/us)
  std::vector<LoweredTerm> terms;
  std::vector<LoweredCollapse> collapse;
};

// Lower builder output + program channels (and optional collapse set) into
// plan form. Throws ValidationError if the program references a channel the
// Hamiltonian does not provide.
LoweredSystem lower_system(const HamiltonianTerms& h, const CoefficientProgram& program,
                           const CollapseSet* collapse);

struct EngineOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double dt_max = 0.0;  // 0 = only segment/sample clamping
  int max_consecutive_rejects = 60;
  bool parallel = true;
  bool check_positivity = false;  // density runs: eigenvalue floor at samples
};

struct EngineStats {
  long steps = 0;
  long rejected = 0;
  long rhs_evals = 0;
  // |norm - 1| (pure) or |trace - 1| (density) of the raw final state, before
  // any caller-side normalization.  Stays within the drift budget enforced
  // during integration.
  double final_defect = 0.0;
};

// Called at each requested sample time with the lab-frame (unphased) state.
using SampleHook = std::function<void(double, const MatrixXcd&)>;

// Integrate `state` (dim x 1 pure amplitude vector, or dim x dim density
// matrix when `density`) across the whole program. `state` must be in the
// lab frame at t = 0 and is returned in the lab frame at the final time.
// `sample_times` must be sorted and within [0, total_duration].
EngineStats integrate_program(const LoweredSystem& sys, const CoefficientProgram& program,
                              MatrixXcd& state, bool density,
                              const std::vector<double>& sample_times,
                              const SampleHook& on_sample, const EngineOptions& opts);

}  // namespace sideband
