#include "sideband/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "sideband/ops.hpp"

namespace sideband {

namespace {

struct ObservableColumn {
  std::string name;
  MatrixXcd op;       // dense embedded operator; empty for purity
  bool is_purity = false;
};

// Standard + requested observable operators for the layout.
std::vector<ObservableColumn> build_observables(const SubsystemLayout& layout,
                                                const std::vector<std::string>& extras,
                                                bool density) {
  std::vector<ObservableColumn> cols;
  for (int k = 0; k < layout.subsystem_count(); ++k) {
    const std::string& label = layout.label(k);
    if (label == "qubit") continue;
    cols.push_back({"n_" + label,
                    embed(number_operator(layout.dim(k)), layout, label).mat(), false});
  }
  if (layout.has("qubit"))
    cols.push_back({"sigma_z", embed(pauli(Pauli::Z), layout, "qubit").mat(), false});

  for (const auto& name : extras) {
    if (name == "sigma_x" || name == "sigma_y") {
      if (!layout.has("qubit"))
        throw ValidationError("observable '" + name + "' needs a qubit in the layout");
      cols.push_back(
          {name,
           embed(pauli(name == "sigma_x" ? Pauli::X : Pauli::Y), layout, "qubit").mat(),
           false});
    } else if (name == "purity") {
      if (!density) throw ValidationError("purity is only recorded for density evolution");
      cols.push_back({name, MatrixXcd(), true});
    } else if (name == "n_bright" || name == "n_dark") {
      auto [bright, dark] = bright_dark_operators(layout);
      const MatrixXcd& m = (name == "n_bright") ? bright.mat() : dark.mat();
      cols.push_back({name, (m.adjoint() * m).eval(), false});
    } else if (name == "total_excitation") {
      MatrixXcd total = MatrixXcd::Zero(layout.total_dim(), layout.total_dim());
      for (int k = 0; k < layout.subsystem_count(); ++k) {
        if (layout.label(k) == "qubit") continue;
        total += embed(number_operator(layout.dim(k)), layout, layout.label(k)).mat();
      }
      if (layout.has("qubit")) {
        // qubit excitation (1 - sigma_z)/2
        total += 0.5 * (MatrixXcd::Identity(layout.total_dim(), layout.total_dim()) -
                        embed(pauli(Pauli::Z), layout, "qubit").mat());
      }
      cols.push_back({name, std::move(total), false});
    } else if (name.rfind("re_a_", 0) == 0 || name.rfind("im_a_", 0) == 0) {
      const std::string label = name.substr(5);
      if (!layout.has(label) || label == "qubit")
        throw ValidationError("observable '" + name + "' needs mode '" + label +
                              "' in the layout");
      MatrixXcd a = embed(annihilation(layout.dim_of(label)), layout, label).mat();
      // Recorded value is Re<a> or Im<a>; fold the Im into the operator so the
      // shared real-part evaluator applies.
      if (name[0] == 'i') a *= cxd(0, -1);
      cols.push_back({name, std::move(a), false});
    } else {
      throw ValidationError("unknown extra observable '" + name + "'");
    }
  }
  return cols;
}

double eval_observable(const ObservableColumn& col, const MatrixXcd& state, bool density) {
  if (col.is_purity) {
    return (state * state).trace().real();
  }
  if (density) {
    // tr(rho A) without forming the product matrix.
    return col.op.cwiseProduct(state.transpose()).sum().real();
  }
  const VectorXcd psi = state.col(0);
  return (psi.adjoint() * (col.op * psi))(0, 0).real();
}

std::vector<double> make_sample_times(const CoefficientProgram& program,
                                      int samples_per_segment) {
  std::vector<double> times;
  times.push_back(0.0);
  double t = 0.0;
  for (const auto& seg : program.segments) {
    for (int s = 1; s <= samples_per_segment; ++s) {
      times.push_back(t + seg.duration * s / (samples_per_segment + 1));
    }
    t += seg.duration;
    times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

Trajectory run_evolution(const HamiltonianTerms& h, const CoefficientProgram& program,
                         const QuantumState& initial, const CollapseSet* collapse,
                         bool density, const EvolveOptions& opts) {
  if (h.static_part.layout() != initial.layout())
    throw ValidationError("state layout does not match the Hamiltonian layout");
  LoweredSystem sys = lower_system(h, program, collapse);
  return run_lowered(sys, program, initial, density, opts);
}

HamiltonianTerms static_only(const OperatorMatrix& h0) {
  if (h0.hermitian_flag().value_or(false)) return HamiltonianTerms{h0, {}};
  if (h0.hermiticity_defect() > kHermitianTol)
    throw ValidationError("static Hamiltonian must be Hermitian");
  OperatorMatrix h = h0;
  h.declare_hermitian(true);
  return HamiltonianTerms{std::move(h), {}};
}

}  // namespace

const std::vector<double>* Trajectory::column(const std::string& name) const {
  for (const auto& [n, values] : records) {
    if (n == name) return &values;
  }
  return nullptr;
}

Trajectory run_lowered(const LoweredSystem& sys, const CoefficientProgram& program,
                       const QuantumState& initial, bool density, const EvolveOptions& opts) {
  if (sys.layout != initial.layout())
    throw ValidationError("state layout does not match the lowered system layout");
  initial.validate_cheap();

  EngineOptions eng;
  eng.rtol = opts.rtol > 0.0 ? opts.rtol : (density ? 1e-8 : 1e-10);
  eng.atol = opts.atol;
  eng.dt_max = opts.dt_max;
  eng.parallel = opts.parallel;
  eng.check_positivity = density && opts.check_positivity;

  auto observables = build_observables(initial.layout(), opts.extras, density);
  Trajectory traj;
  traj.records.reserve(observables.size());
  for (const auto& col : observables) traj.records.push_back({col.name, {}});

  MatrixXcd state;
  if (density) {
    state = initial.density_matrix();
  } else {
    if (!initial.is_pure()) throw ValidationError("evolve_pure requires a pure state");
    state = initial.vec();
  }

  const auto samples = make_sample_times(program, std::max(0, opts.samples_per_segment));
  SampleHook hook = [&](double t, const MatrixXcd& lab_state) {
    traj.times.push_back(t);
    for (size_t k = 0; k < observables.size(); ++k) {
      traj.records[k].second.push_back(eval_observable(observables[k], lab_state, density));
    }
  };

  traj.stats = integrate_program(sys, program, state, density, samples, hook, eng);

  // The integrator enforces its drift budget throughout; the residual defect is
  // recorded in stats.final_defect.  Normalize the packaged state so it meets
  // the stricter construction tolerance of QuantumState.
  if (density) {
    const double tr = state.trace().real();
    if (tr > 0.0) state /= tr;
    traj.final_state = QuantumState::density(initial.layout(), std::move(state),
                                             initial.frame());
  } else {
    VectorXcd psi = state.col(0);
    const double nrm = psi.norm();
    if (nrm > 0.0) psi /= nrm;
    traj.final_state = QuantumState::pure(initial.layout(), std::move(psi), initial.frame());
  }
  return traj;
}

Trajectory evolve_pure(const HamiltonianTerms& h, const CoefficientProgram& program,
                       const QuantumState& psi0, const EvolveOptions& opts) {
  return run_evolution(h, program, psi0, nullptr, false, opts);
}

Trajectory evolve_pure(const OperatorMatrix& h0, const CoefficientProgram& program,
                       const QuantumState& psi0, const EvolveOptions& opts) {
  return run_evolution(static_only(h0), program, psi0, nullptr, false, opts);
}

Trajectory evolve_pure(const OperatorMatrix& h0, const CoefficientProgram& program,
                       const QuantumState& psi0, double dt_max) {
  EvolveOptions opts;
  opts.dt_max = dt_max;
  return evolve_pure(h0, program, psi0, opts);
}

Trajectory evolve_lindblad(const HamiltonianTerms& h, const CoefficientProgram& program,
                           const QuantumState& rho0, const CollapseSet& collapse,
                           const EvolveOptions& opts) {
  return run_evolution(h, program, rho0, &collapse, true, opts);
}

Trajectory evolve_lindblad(const OperatorMatrix& h0, const CoefficientProgram& program,
                           const QuantumState& rho0, const CollapseSet& collapse,
                           const EvolveOptions& opts) {
  return run_evolution(static_only(h0), program, rho0, &collapse, true, opts);
}

Trajectory evolve_lindblad(const OperatorMatrix& h0, const CoefficientProgram& program,
                           const QuantumState& rho0, const CollapseSet& collapse,
                           double dt_max) {
  EvolveOptions opts;
  opts.dt_max = dt_max;
  return evolve_lindblad(h0, program, rho0, collapse, opts);
}

}  // namespace sideband
