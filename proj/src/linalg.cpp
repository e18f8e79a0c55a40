#include "spinsemi/linalg.hpp"

#include <cmath>
#include <string>

#include "spinsemi/errors.hpp"

namespace spinsemi {

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Operator trace_out_first(const Operator& x, int d1, int d2) {
  Operator out = Operator::Zero(d2, d2);
  for (int a = 0; a < d1; ++a) out += x.block(a * d2, a * d2, d2, d2);
  return out;
}

Operator trace_out_second(const Operator& x, int d1, int d2) {
  Operator out(d1, d1);
  for (int a = 0; a < d1; ++a)
    for (int b = 0; b < d1; ++b) out(a, b) = x.block(a * d2, b * d2, d2, d2).trace();
  return out;
}

Eigen::VectorXd hermitian_eigenvalues(const Operator& h) {
  Operator herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Operator hermitian_apply(const Operator& h, const std::function<double(double)>& f) {
  Operator herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(herm);
  Eigen::VectorXd fl = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::VectorXcd vec(const Operator& a) {
  return Eigen::Map<const Eigen::VectorXcd>(a.data(), a.size());
}

Operator unvec(const Eigen::VectorXcd& v, int rows, int cols) {
  return Eigen::Map<const Operator>(v.data(), rows, cols);
}

void require_density(const Operator& rho, const char* what) {
  if (rho.rows() != rho.cols()) throw ValidationError(std::string(what) + ": not square");
  double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kDensityTolerance * scale)
    throw ValidationError(std::string(what) + ": not Hermitian");
  double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kDensityTolerance) throw ValidationError(std::string(what) + ": trace is not one");
  if (hermitian_eigenvalues(rho).minCoeff() < -kDensityTolerance)
    throw ValidationError(std::string(what) + ": not positive semidefinite");
}

Operator matrix_unit(int n, int a, int b) {
  Operator e = Operator::Zero(n, n);
  e(a, b) = 1.0;
  return e;
}

double max_abs(const Operator& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace spinsemi
