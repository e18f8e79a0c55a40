#include "spinsemi/su2_rep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinsemi/errors.hpp"

namespace spinsemi {

double raising_coefficient(HalfInt J, HalfInt m) {
  double j = J.value(), mm = m.value();
  return std::sqrt(std::max(0.0, (j - mm) * (j + mm + 1)));
}

double lowering_coefficient(HalfInt J, HalfInt m) {
  double j = J.value(), mm = m.value();
  return std::sqrt(std::max(0.0, (j + mm) * (j - mm + 1)));
}

SpinOperators spin_operators(HalfInt J) {
  if (J.twice() < 0) throw ValidationError("negative spin");
  const int n = J.dim();
  SpinOperators s{J, Operator::Zero(n, n), Operator::Zero(n, n), Operator::Zero(n, n)};
  for (int k = 0; k < n; ++k) {
    HalfInt m = magnetic(J, k);
    s.Sz(k, k) = m.value();
    if (k > 0) s.Splus(k - 1, k) = raising_coefficient(J, m);
    if (k + 1 < n) s.Sminus(k + 1, k) = lowering_coefficient(J, m);
  }
  return s;
}

Operator SpinOperators::casimir() const {
  Operator x = Sx(), y = Sy();
  return x * x + y * y + Sz * Sz;
}

WignerRotation::WignerRotation(HalfInt J) : J_(J) {
  Eigen::SelfAdjointEigenSolver<Operator> es(spin_operators(J).Sy());
  vectors_ = es.eigenvectors();
  // The spectrum of S_y is exactly {-J, ..., J}; snapping removes eigensolver noise from the phases.
  values_ = es.eigenvalues().unaryExpr([](double v) { return 0.5 * std::round(2.0 * v); });
}

Eigen::MatrixXd WignerRotation::small_d(double theta) const {
  Eigen::VectorXcd phases(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) phases(k) = std::polar(1.0, -theta * values_(k));
  return (vectors_ * phases.asDiagonal() * vectors_.adjoint()).real();
}

Operator WignerRotation::rotation(double phi, double theta, double psi) const {
  const int n = J_.dim();
  Operator r = small_d(theta).cast<cplx>();
  for (int a = 0; a < n; ++a) {
    double ma = magnetic(J_, a).value();
    for (int b = 0; b < n; ++b) r(a, b) *= std::polar(1.0, -phi * ma - psi * magnetic(J_, b).value());
  }
  return r;
}

Operator wigner_rotation(HalfInt J, double phi, double theta, double psi) {
  return WignerRotation(J).rotation(phi, theta, psi);
}

SphericalAngles angles_of(const Eigen::Vector3d& omega) {
  if (std::abs(omega.norm() - 1.0) > 1e-9) throw ValidationError("direction is not a unit vector");
  double z = std::clamp(omega.z(), -1.0, 1.0);
  double phi = (omega.x() == 0.0 && omega.y() == 0.0) ? 0.0 : std::atan2(omega.y(), omega.x());
  return {std::acos(z), phi};
}

Eigen::Vector3d unit_vector(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

StateVector coherent_vector(HalfInt J, const Eigen::Vector3d& omega, HalfInt i, double psi) {
  if (abs(i) > J || !same_parity(i, J)) throw ValidationError("coherent index out of range");
  auto [theta, phi] = angles_of(omega);
  return wigner_rotation(J, phi, theta, psi).col(index_of(J, i));
}

Operator coherent_projector(HalfInt J, const Eigen::Vector3d& omega, HalfInt i) {
  StateVector v = coherent_vector(J, omega, i);
  return v * v.adjoint();
}

Eigen::MatrixXd beta_matrix(HalfInt J) {
  const int n = J.dim();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    // column |m> maps to (-1)^{J-m} |-m>; J - m = k.
    w(n - 1 - k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  }
  return w;
}

Operator beta_transpose(const Operator& rho, HalfInt J) {
  if (rho.rows() != J.dim() || rho.cols() != J.dim()) throw ValidationError("beta_transpose: dimension mismatch");
  Eigen::MatrixXd w = beta_matrix(J);
  return w * rho.transpose() * w.transpose();
}

Operator casimir_superop(const Operator& rho, HalfInt J) {
  SpinOperators s = spin_operators(J);
  double jj = J.value() * (J.value() + 1);
  return 2.0 * jj * rho - 2.0 * s.Sz * rho * s.Sz - s.Splus * rho * s.Sminus - s.Sminus * rho * s.Splus;
}

Eigen::MatrixXcd casimir_superop_matrix(HalfInt J) {
  const int n = J.dim();
  Eigen::MatrixXcd q(n * n, n * n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) q.col(a + n * b) = vec(casimir_superop(matrix_unit(n, a, b), J));
  return q;
}

double schatten_norm(const Operator& a, double p) {
  if (!(p >= 1.0)) throw ValidationError("Schatten exponent must be >= 1");
  Eigen::VectorXd s = Eigen::JacobiSVD<Operator>(a).singularValues();
  if (std::isinf(p)) return s.size() ? s.maxCoeff() : 0.0;
  if (p == 1.0) return s.sum();
  if (p == 2.0) return s.norm();
  double smax = s.size() ? s.maxCoeff() : 0.0;
  if (smax == 0.0) return 0.0;
  return smax * std::pow((s / smax).array().pow(p).sum(), 1.0 / p);
}

double von_neumann_entropy(const Operator& rho) {
  require_density(rho, "entropy argument");
  double h = 0.0;
  for (double l : hermitian_eigenvalues(rho))
    if (l > kEigenvalueClip) h -= l * std::log(l);
  return h;
}

}  // namespace spinsemi
