#pragma once

#include <map>
#include <memory>
#include <vector>

#include "spinsemi/half_int.hpp"
#include "spinsemi/linalg.hpp"
#include "spinsemi/sphere_fn.hpp"

namespace spinsemi {

// Coherent states |w; i> = R(w)|i> sampled on a quadrature grid, R = exp(-i phi S_z) exp(-i theta S_y) exp(-i psi S_z).
// The third angle psi = gauge * phi only changes phases; gauge = 0 is the default convention.
class CoherentFrame {
 public:
  CoherentFrame(HalfInt J, SphereGrid grid, double gauge = 0.0);
  // Grid resolving degree 2J + band, enough for Op of degree-band symbols and Husimi functions up to band.
  static CoherentFrame for_band(HalfInt J, int band, double gauge = 0.0);

  HalfInt spin() const { return J_; }
  const SphereGrid& grid() const { return grid_; }
  double gauge() const { return gauge_; }
  const Eigen::MatrixXd& small_d(int t) const { return d_[t]; }
  StateVector state(int t, int p, HalfInt i) const;

 private:
  HalfInt J_;
  SphereGrid grid_;
  double gauge_;
  std::vector<Eigen::MatrixXd> d_;
};

void require_coherent_index(HalfInt J, HalfInt i);

// (2J+1) sum_nodes w f |w;i><w;i| on sampled symbol values.
Operator op_quantize_values(const CoherentFrame& frame, HalfInt i, const GridValues& values);
Operator op_quantize(const CoherentFrame& frame, HalfInt i, const SphereFunction& f);
Operator op_quantize(HalfInt J, HalfInt i, const SphereFunction& f);

// <w;a| rho |w;b> on the frame's grid.
GridValues husimi_offdiag(const CoherentFrame& frame, HalfInt a, HalfInt b, const Operator& rho);
GridValues husimi_values(const CoherentFrame& frame, HalfInt i, const Operator& rho);
SphereFunction husimi(const CoherentFrame& frame, HalfInt i, const Operator& rho, int lout);
SphereFunction husimi(HalfInt J, HalfInt i, const Operator& rho, int lout);

// Op^i_J on a single harmonic from Clebsch-Gordan tables, independent of any quadrature.
Operator op_harmonic_from_cg(HalfInt J, HalfInt i, int l, int m);
Operator op_quantize_from_cg(HalfInt J, HalfInt i, const SphereFunction& f);

struct BerezinSpectrum {
  HalfInt J;
  std::vector<double> eigenvalues;  // l = 0..2J
  double operator[](int l) const { return l < int(eigenvalues.size()) ? eigenvalues[l] : 0.0; }
};

BerezinSpectrum berezin_spectrum(HalfInt J);

// Matrix of Hus_J Op_J on the harmonics l <= 2J, assembled column by column from the quadrature maps.
Eigen::MatrixXcd berezin_matrix(HalfInt J);

// Spectral calculus of the ad-Casimir on B(H_J); its eigenvalues are l(l+1), l = 0..2J.
class CasimirSpectrum {
 public:
  explicit CasimirSpectrum(HalfInt J);
  HalfInt spin() const { return J_; }
  // sum_l g(l) Pi_l rho.
  Operator apply(const Operator& rho, const std::function<double(int)>& g) const;
  Eigen::MatrixXcd superoperator(const std::function<double(int)>& g) const;
  const std::vector<int>& degrees() const { return degree_; }

 private:
  HalfInt J_;
  Eigen::MatrixXcd vectors_;
  std::vector<int> degree_;
};

struct InequalityCheck {
  std::string name;
  double lhs;
  double rhs;
  double slack() const { return rhs - lhs; }
  bool holds(double tol) const { return lhs <= rhs + tol; }
};

struct InversionReport {
  HalfInt J;
  double s;
  std::vector<InequalityCheck> checks;
  // Smallest constants for which the (1 - 4 Laplacian) and (1 + 4 Q) versions hold, keyed by p.
  std::map<double, double> constant_function;
  std::map<double, double> constant_operator;
};

InversionReport berezin_inversion_check(HalfInt J, const SphereFunction& f, double s, const Operator& rho);

// Symbol map sigma = Hus (Op Hus)^{-1/2} and quantizer (Op Hus)^{-1/2} Op, as matrices from vec(rho)
// to harmonic coefficients l <= 2J and back.
struct StratonovichWeyl {
  HalfInt J;
  Eigen::MatrixXcd symbol;
  Eigen::MatrixXcd quantizer;

  SphereFunction symbol_of(const Operator& rho) const;
  Operator quantize(const SphereFunction& f) const;
};

StratonovichWeyl stratonovich_weyl(HalfInt J);

}  // namespace spinsemi
