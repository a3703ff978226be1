#include "sideband/expm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>

namespace sideband {
namespace {

// Pade numerator coefficients b_0..b_m for degree m (denominator uses the same
// coefficients with alternating signs applied to odd powers).
const double kB3[] = {120.0, 60.0, 12.0, 1.0};
const double kB5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
const double kB7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0};
const double kB9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                      2162160.0, 110880.0, 3960.0, 90.0, 1.0};
const double kB13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                       1187353796428800.0,  129060195264000.0,   10559470521600.0,
                       670442572800.0,      33522128640.0,       1323241920.0,
                       40840800.0,          960960.0,            16380.0,
                       182.0,               1.0};

// theta_m bounds from Higham (2005), double precision.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

// Assemble the degree-m Pade approximant r_m(A) = q_m(A)^{-1} p_m(A) given the
// even-power stack A2, A4, A6 (nullptrs where unused).
MatrixXcd pade_low(const MatrixXcd& a, const double* b, int m, const MatrixXcd& a2,
                   const MatrixXcd* a4, const MatrixXcd* a6) {
  const Eigen::Index n = a.rows();
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  MatrixXcd u_even;  // even part (goes to V), odd part premultiplied by A (goes to U)
  MatrixXcd v_even;
  switch (m) {
    case 3:
      u_even = b[3] * a2 + b[1] * id;
      v_even = b[2] * a2 + b[0] * id;
      break;
    case 5:
      u_even = b[5] * (*a4) + b[3] * a2 + b[1] * id;
      v_even = b[4] * (*a4) + b[2] * a2 + b[0] * id;
      break;
    case 7:
      u_even = b[7] * (*a6) + b[5] * (*a4) + b[3] * a2 + b[1] * id;
      v_even = b[6] * (*a6) + b[4] * (*a4) + b[2] * a2 + b[0] * id;
      break;
    case 9: {
      const MatrixXcd a8 = (*a4) * (*a4);
      u_even = b[9] * a8 + b[7] * (*a6) + b[5] * (*a4) + b[3] * a2 + b[1] * id;
      v_even = b[8] * a8 + b[6] * (*a6) + b[4] * (*a4) + b[2] * a2 + b[0] * id;
      break;
    }
    default:
      throw NumericalError("expm: unsupported low Pade degree");
  }
  const MatrixXcd u = a * u_even;
  const MatrixXcd p = v_even + u;
  const MatrixXcd q = v_even - u;
  return q.partialPivLu().solve(p);
}

MatrixXcd pade13(const MatrixXcd& a, const MatrixXcd& a2, const MatrixXcd& a4,
                 const MatrixXcd& a6) {
  const double* b = kB13;
  const Eigen::Index n = a.rows();
  const MatrixXcd id = MatrixXcd::Identity(n, n);
  const MatrixXcd w1 = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const MatrixXcd w2 = b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const MatrixXcd u = a * (a6 * w1 + w2);
  const MatrixXcd z1 = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const MatrixXcd v = a6 * z1 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  const MatrixXcd p = v + u;
  const MatrixXcd q = v - u;
  return q.partialPivLu().solve(p);
}

double one_norm(const MatrixXcd& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

MatrixXcd expm(const MatrixXcd& a) {
  if (a.rows() != a.cols()) throw ValidationError("expm: matrix must be square");
  const double nrm = one_norm(a);
  const MatrixXcd a2 = a * a;
  if (nrm <= kTheta3) return pade_low(a, kB3, 3, a2, nullptr, nullptr);
  const MatrixXcd a4 = a2 * a2;
  if (nrm <= kTheta5) return pade_low(a, kB5, 5, a2, &a4, nullptr);
  const MatrixXcd a6 = a4 * a2;
  if (nrm <= kTheta7) return pade_low(a, kB7, 7, a2, &a4, &a6);
  if (nrm <= kTheta9) return pade_low(a, kB9, 9, a2, &a4, &a6);

  // Scaling and squaring with the degree-13 approximant.
  int s = 0;
  double scaled = nrm;
  while (scaled > kTheta13) {
    scaled *= 0.5;
    ++s;
  }
  const double factor = std::ldexp(1.0, -s);  // 2^-s
  const MatrixXcd as = a * factor;
  MatrixXcd r = pade13(as, a2 * (factor * factor), a4 * std::pow(factor, 4),
                       a6 * std::pow(factor, 6));
  for (int k = 0; k < s; ++k) r = r * r;
  return r;
}

MatrixXcd expm_hermitian_propagator(const MatrixXcd& h, double t) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("expm_hermitian_propagator: eigendecomposition failed");
  }
  const VectorXd& ev = es.eigenvalues();
  VectorXcd phases(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    phases(k) = std::exp(cxd(0.0, -ev(k) * t));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace sideband
