#include "sideband/collapse.hpp"

#include <cmath>

#include "sideband/model.hpp"
#include "sideband/ops.hpp"

namespace sideband {

CollapseSet collapse_from_params(const SystemParams& params, const SubsystemLayout& layout,
                                 Frame frame) {
  params.validate();
  CollapseSet set;
  const SubsystemLayout qubit_sub = SubsystemLayout::single("qubit", 2);
  const MatrixXcd v = jc_qubit_map();

  auto add_qubit = [&](MatrixXcd op, double rate, const std::string& tag) {
    if (rate <= 0.0) return;
    if (frame == Frame::JCFrame) op = (v * op * v.adjoint()).eval();
    set.ops.push_back({embed(OperatorMatrix(qubit_sub, std::move(op)), layout, "qubit"),
                       rate, tag});
  };

  if (layout.has("qubit")) {
    add_qubit(pauli(Pauli::Minus).mat(), 1.0 / params.t1_qubit, "qubit_decay");
    add_qubit(pauli(Pauli::Z).mat() / std::sqrt(2.0), params.pure_dephasing_rate(),
              "qubit_dephasing");
  }

  struct ModeDamp {
    const char* label;
    double rate;
  };
  const ModeDamp modes[] = {{"mem1", 1.0 / params.t1_mem1},
                            {"mem2", 1.0 / params.t1_mem2},
                            {"readout", to_angular(params.kappa_r)}};
  for (const auto& m : modes) {
    if (!layout.has(m.label) || m.rate <= 0.0) continue;
    set.ops.push_back({embed(annihilation(layout.dim_of(m.label)), layout, m.label), m.rate,
                       std::string(m.label) + "_damping"});
  }
  return set;
}

}  // namespace sideband
