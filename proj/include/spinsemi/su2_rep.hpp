#pragma once

#include <Eigen/Dense>

#include "spinsemi/half_int.hpp"
#include "spinsemi/linalg.hpp"

namespace spinsemi {

// Spin matrices of the irrep H_J in the basis |J>, |J-1>, ..., |-J>.
struct SpinOperators {
  HalfInt J;
  Operator Sz, Splus, Sminus;

  Operator Sx() const { return 0.5 * (Splus + Sminus); }
  Operator Sy() const { return cplx(0.0, -0.5) * (Splus - Sminus); }
  Operator casimir() const;
};

SpinOperators spin_operators(HalfInt J);

// <m-1| S_- |m> and <m+1| S_+ |m>.
double lowering_coefficient(HalfInt J, HalfInt m);
double raising_coefficient(HalfInt J, HalfInt m);

// exp(-i theta S_y) and the rotation exp(-i phi S_z) exp(-i theta S_y) exp(-i psi S_z).
// Holds one spectral decomposition of S_y, reused for every angle.
class WignerRotation {
 public:
  explicit WignerRotation(HalfInt J);

  HalfInt spin() const { return J_; }
  Eigen::MatrixXd small_d(double theta) const;
  Operator rotation(double phi, double theta, double psi = 0.0) const;

 private:
  HalfInt J_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd values_;
};

Operator wigner_rotation(HalfInt J, double phi, double theta, double psi = 0.0);

struct SphericalAngles {
  double theta, phi;
};

// Throws ValidationError if omega is not a unit vector.
SphericalAngles angles_of(const Eigen::Vector3d& omega);
Eigen::Vector3d unit_vector(double theta, double phi);

// |omega; i> = R(omega) |i>.  psi is the optional third Euler angle fixing the phase.
StateVector coherent_vector(HalfInt J, const Eigen::Vector3d& omega, HalfInt i, double psi = 0.0);
Operator coherent_projector(HalfInt J, const Eigen::Vector3d& omega, HalfInt i);

// rho^beta = W rho^T W^{-1} with W|m> = (-1)^{J-m} |-m>.
Operator beta_transpose(const Operator& rho, HalfInt J);
Eigen::MatrixXd beta_matrix(HalfInt J);

// Ad-Casimir on B(H_J): Q(rho) = sum_j [S_j, [S_j, rho]].
Operator casimir_superop(const Operator& rho, HalfInt J);
Eigen::MatrixXcd casimir_superop_matrix(HalfInt J);

// Schatten p-norm; p = infinity gives the operator norm.
double schatten_norm(const Operator& a, double p);
double von_neumann_entropy(const Operator& rho);

}  // namespace spinsemi
