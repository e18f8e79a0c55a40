#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "spinsemi/half_int.hpp"

namespace spinsemi {

// Tables are built once per (J, K, M) and shared; construction is thread safe.
// Coefficients C^{M,m}_{J,j;K,m-j} of the isometry H_M -> H_J (x) H_K, Condon-Shortley phase
// (C^{M,M}_{J,J;K,M-J} > 0).  Row m = M..-M, column j = J..-J; entries with |m-j| > K are zero.
class CGTable {
 public:
  CGTable(HalfInt J, HalfInt K, HalfInt M);

  HalfInt J() const { return J_; }
  HalfInt K() const { return K_; }
  HalfInt M() const { return M_; }

  double operator()(HalfInt m, HalfInt j) const;
  const Eigen::MatrixXd& table() const { return *table_; }

  // (2J+1)(2K+1) x (2M+1) matrix of the embedding; row index j_idx*(2K+1) + k_idx.
  Eigen::MatrixXd isometry() const;

 private:
  HalfInt J_, K_, M_;
  std::shared_ptr<const Eigen::MatrixXd> table_;
};

void require_triangle(HalfInt J, HalfInt K, HalfInt M);

// Single coefficient <J j; K k | M m>; zero when m != j + k or a label is out of range.
double clebsch_gordan(HalfInt J, HalfInt j, HalfInt K, HalfInt k, HalfInt M, HalfInt m);

// Decay of the top row c_l = C^{M,M}_{J,M-K+l;K,K-l} with eps = (J-M+K)(J+M-K+1)/(M+K-J+1):
// c_l^2 <= eps^l c_0^2 and 0 <= 1 - c_0^2 <= eps.
struct TopRowDecay {
  double epsilon;
  std::vector<double> c;
  double worst_power_excess;  // max over l of c_l^2 - eps^l c_0^2
  double head_excess;         // 1 - c_0^2 - eps
  bool holds(double slack = 1e-12) const { return worst_power_excess <= slack && head_excess <= slack; }
};

TopRowDecay top_row_decay(HalfInt J, HalfInt K, HalfInt M);

}  // namespace spinsemi
