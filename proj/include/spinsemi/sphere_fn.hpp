#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "spinsemi/linalg.hpp"
#include "spinsemi/scalar_fn.hpp"

namespace spinsemi {

// Gauss-Legendre nodes in cos(theta) times a uniform phi grid; weights sum to one.
struct SphereGrid {
  int n_theta = 0;
  int n_phi = 0;
  int degree_exact = 0;
  std::vector<double> cos_theta;
  std::vector<double> theta;
  std::vector<double> theta_weight;  // sums to one; the node weight is theta_weight / n_phi
  std::vector<double> phi;

  double weight(int t) const { return theta_weight[t] / n_phi; }
  Eigen::Vector3d point(int t, int p) const;
  int size() const { return n_theta * n_phi; }
};

SphereGrid make_grid(int degree_needed);

// Grid samples, rows indexed by theta node and columns by phi node.
using GridValues = Eigen::ArrayXXcd;

// Band-limited function: coefficients of the orthonormal harmonics for the normalised measure
// (Y_00 = 1), Condon-Shortley phase, stored at index l^2 + l + m.
class SphereFunction {
 public:
  SphereFunction() : SphereFunction(0) {}
  explicit SphereFunction(int lmax);
  SphereFunction(int lmax, Eigen::VectorXcd coeffs);

  static SphereFunction constant(cplx c);
  static SphereFunction harmonic(int l, int m, cplx c = 1.0);
  static SphereFunction omega_x();
  static SphereFunction omega_y();
  static SphereFunction omega_z();

  int lmax() const { return lmax_; }
  static int index(int l, int m) { return l * l + l + m; }
  static int size_for(int lmax) { return (lmax + 1) * (lmax + 1); }

  cplx coeff(int l, int m) const;
  cplx& coeff_ref(int l, int m) { return c_(index(l, m)); }
  const Eigen::VectorXcd& coeffs() const { return c_; }
  Eigen::VectorXcd& coeffs() { return c_; }

  SphereFunction with_lmax(int lmax) const;  // truncate or zero-pad
  double l2_norm() const { return c_.norm(); }
  bool is_real(double tol = 1e-12) const;
  SphereFunction conj() const;

  cplx evaluate(const Eigen::Vector3d& omega) const;

  SphereFunction& operator+=(const SphereFunction& o);
  SphereFunction& operator-=(const SphereFunction& o);
  SphereFunction& operator*=(cplx s);
  friend SphereFunction operator+(SphereFunction a, const SphereFunction& b) { return a += b; }
  friend SphereFunction operator-(SphereFunction a, const SphereFunction& b) { return a -= b; }
  friend SphereFunction operator*(cplx s, SphereFunction a) { return a *= s; }

 private:
  int lmax_;
  Eigen::VectorXcd c_;
};

// Values of the normalised harmonics Y_lm(theta, phi) for all l <= lmax, |m| <= l.
Eigen::VectorXcd harmonics_at(int lmax, double cos_theta, double phi);

GridValues synthesis(const SphereFunction& f, const SphereGrid& grid);
// band: highest degree present in the sampled values; exactness needs grid degree >= lmax + band.
SphereFunction analysis(const GridValues& values, int lmax, const SphereGrid& grid, int band = -1);

SphereFunction laplacian(const SphereFunction& f);
SphereFunction neg_laplacian_power(const SphereFunction& f, double s);
// Multiplies f_lm by g(l).
SphereFunction apply_degree_multiplier(const SphereFunction& f, const std::function<double(int)>& g);
SphereFunction band_truncation(const SphereFunction& f, int L);  // projection onto degree L only
// Same projection through the zonal kernel (2L+1) P_L(w.w'), by quadrature on the grid.
GridValues band_projection_kernel(const GridValues& values, int L, const SphereGrid& grid);

enum class Axis { x, y, z };
// Components of L = -i w x grad; L_z Y_lm = m Y_lm.
SphereFunction angular_momentum(const SphereFunction& f, Axis axis);
SphereFunction raising(const SphereFunction& f);
SphereFunction lowering(const SphereFunction& f);

GridValues pointwise_product_values(const SphereFunction& f, const SphereFunction& g, const SphereGrid& grid);
SphereFunction product(const SphereFunction& f, const SphereFunction& g);

GridValues grad_dot(const SphereFunction& f, const SphereFunction& g, const SphereGrid& grid);
GridValues poisson_bracket(const SphereFunction& f, const SphereFunction& g, const SphereGrid& grid);

double integrate(const GridValues& values, const SphereGrid& grid);  // real part
cplx integrate_complex(const GridValues& values, const SphereGrid& grid);
double lp_norm(const GridValues& values, double p, const SphereGrid& grid);
double lp_norm(const SphereFunction& f, double p, const SphereGrid& grid);
// (sum_{n<=k} ||grad^n f||_p^p)^{1/p}, with |grad^n f|^2 the sum over all words of length n in L_x, L_y, L_z.
double sobolev_norm(const SphereFunction& f, int k, double p, const SphereGrid& grid);
// Largest difference quotient over grid pairs: a lower bound for the true seminorm.
double holder_seminorm(const GridValues& values, double alpha, const SphereGrid& grid);

struct ComposeResult {
  SphereFunction f;
  double aliasing_residual;
};

// phi applied pointwise to the real function f, then projected to degree <= lout.
ComposeResult compose(const ScalarFunction& phi, const SphereFunction& f, const SphereGrid& grid, int lout);
GridValues compose_values(const ScalarFunction& phi, const GridValues& values);

// f o R^{-1} for R = Rz(phi) Ry(theta) Rz(psi).
SphereFunction rotate(const SphereFunction& f, double phi, double theta, double psi = 0.0);
Eigen::Matrix3d rotation_matrix(double phi, double theta, double psi = 0.0);

}  // namespace spinsemi
