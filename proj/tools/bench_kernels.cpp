// Benchmark: sparse apply-plan kernels (serial vs OpenMP) against dense Eigen
// products, on operator shapes representative of protocol simulations.
//
// Usage: bench_kernels [reps]
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <random>

#include "sideband/kernels.hpp"
#include "sideband/layout.hpp"
#include "sideband/model.hpp"
#include "sideband/ops.hpp"
#include "sideband/params.hpp"

using namespace sideband;

namespace {

MatrixXcd random_density(int dim, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXcd a(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) a(i, j) = cxd(dist(gen), dist(gen));
  MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return rho;
}

double time_loop(int reps, const std::function<void()>& f) {
  f();  // warm-up
  double t0 = omp_get_wtime();
  for (int r = 0; r < reps; ++r) f();
  return (omp_get_wtime() - t0) / reps * 1e3;  // ms per call
}

void bench_case(const char* name, const MatrixXcd& h, int reps) {
  const int dim = static_cast<int>(h.rows());
  VectorXd diag = h.diagonal().real();
  ApplyPlan plan(h, diag);
  MatrixXcd x = random_density(dim, 1234u + static_cast<unsigned>(dim));
  MatrixXcd y = MatrixXcd::Zero(dim, dim);
  const double t_eval = 0.37;

  plan.phase_to(t_eval);
  MatrixXcd href = plan.dense_at(t_eval);

  double ms_serial = time_loop(reps, [&] {
    y.setZero();
    plan.accum_left(cxd(0.0, -1.0), x, y, false);
  });
  MatrixXcd y_serial = y;
  double ms_parallel = time_loop(reps, [&] {
    y.setZero();
    plan.accum_left(cxd(0.0, -1.0), x, y, true);
  });
  MatrixXcd y_parallel = y;
  MatrixXcd y_dense;
  double ms_dense = time_loop(reps, [&] { y_dense = cxd(0.0, -1.0) * (href * x); });

  double err_serial = (y_serial - y_dense).cwiseAbs().maxCoeff();
  double err_parallel = (y_parallel - y_dense).cwiseAbs().maxCoeff();

  std::printf("%-28s dim %4d nnz %6d | serial %8.3f ms  omp %8.3f ms  dense %8.3f ms | "
              "speedup %5.2fx | max|err| %.2e / %.2e\n",
              name, dim, plan.nnz(), ms_serial, ms_parallel, ms_dense,
              ms_serial / ms_parallel, err_serial, err_parallel);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 20;
  if (reps < 1) reps = 1;
  std::printf("apply-plan kernels, %d reps, omp_get_max_threads() = %d\n", reps,
              omp_get_max_threads());

  SystemParams params;

  {
    SubsystemLayout lay({"mem1", "qubit"}, {24, 2});
    CouplingSet cpl = couplings_from_params(params);
    bench_case("jc_single_mode", build_jc_hamiltonian(cpl, lay).mat(), reps);
  }
  {
    SubsystemLayout lay({"mem1", "mem2", "qubit"}, {12, 12, 2});
    CouplingSet cpl = couplings_from_params(params);
    bench_case("jc_two_mode", build_jc_hamiltonian(cpl, lay).mat(), reps);
  }
  {
    SubsystemLayout lay({"mem1", "qubit"}, {48, 2});
    HamiltonianTerms h = build_drive_frame_hamiltonian(params, lay);
    MatrixXcd m = h.static_part.mat();
    for (const auto& [name, term] : h.channels) m += term.cos_quad.mat();
    bench_case("drive_frame_sum", m, reps);
  }
  {
    SubsystemLayout lay({"mem1", "mem2", "qubit"}, {16, 16, 2});
    HamiltonianTerms h = build_drive_frame_hamiltonian(params, lay);
    MatrixXcd m = h.static_part.mat();
    for (const auto& [name, term] : h.channels) m += term.cos_quad.mat();
    bench_case("drive_frame_two_mode", m, reps);
  }
  return 0;
}
