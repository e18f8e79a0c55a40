#include "spinsemi/clebsch.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "spinsemi/errors.hpp"
#include "spinsemi/su2_rep.hpp"

namespace spinsemi {

void require_triangle(HalfInt J, HalfInt K, HalfInt M) {
  if (J.twice() < 0 || K.twice() < 0 || M.twice() < 0) throw ValidationError("negative spin label");
  if (!triangle(J, K, M))
    throw ValidationError("labels violate the triangle rule: " + J.str() + ", " + K.str() + ", " + M.str());
}

namespace {

// Highest-weight row via the two-term recursion, in the top-row parameterisation l = 0..J+K-M.
std::vector<double> top_row(HalfInt J, HalfInt K, HalfInt M) {
  const double j = J.value(), k = K.value(), m = M.value();
  const int len = (J + K - M).twice() / 2 + 1;
  std::vector<double> c(len);
  c[0] = 1.0;
  for (int l = 0; l + 1 < len; ++l) {
    double num = (j - m + k - l) * (j + m - k + l + 1);
    double den = (l + 1) * (2 * k - l);
    c[l + 1] = -std::sqrt(num / den) * c[l];
  }
  double norm = 0.0;
  for (double v : c) norm += v * v;
  norm = std::sqrt(norm);
  // The last entry is C^{M,M}_{J,J;K,M-J}, fixed positive.
  double sign = c.back() > 0 ? 1.0 : -1.0;
  for (double& v : c) v *= sign / norm;
  return c;
}

}  // namespace

// Rows of every admissible M for one (J, K), built from the stretched state downwards.  Lowering alone
// amplifies any admixture of higher-M components, so each lowered row is orthogonalised against the
// rows of all larger M in the same magnetic sector.
namespace {

std::shared_ptr<const Eigen::MatrixXd> build_table(HalfInt J, HalfInt K, HalfInt M);

std::mutex cache_mutex;
std::map<std::tuple<int, int, int>, std::shared_ptr<const Eigen::MatrixXd>> cache;

std::shared_ptr<const Eigen::MatrixXd> cached_table(HalfInt J, HalfInt K, HalfInt M) {
  auto key = std::make_tuple(J.twice(), K.twice(), M.twice());
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto table = build_table(J, K, M);
  std::lock_guard<std::mutex> lock(cache_mutex);
  return cache.emplace(key, std::move(table)).first->second;
}

std::shared_ptr<const Eigen::MatrixXd> build_table(HalfInt J, HalfInt K, HalfInt M) {
  const int nJ = J.dim(), nM = M.dim();
  auto c = std::make_shared<Eigen::MatrixXd>(Eigen::MatrixXd::Zero(nM, nJ));

  std::vector<std::shared_ptr<const Eigen::MatrixXd>> higher;
  for (HalfInt Mp = M + HalfInt(1); Mp <= J + K; Mp += HalfInt(1)) higher.push_back(cached_table(J, K, Mp));

  std::vector<double> top = top_row(J, K, M);
  for (std::size_t l = 0; l < top.size(); ++l) {
    HalfInt jv = M - K + HalfInt(static_cast<int>(l));
    (*c)(0, index_of(J, jv)) = top[l];
  }

  for (int r = 1; r < nM; ++r) {
    HalfInt mnew = magnetic(M, r);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(nJ);
    for (int a = 0; a < nJ; ++a) {
      HalfInt jv = magnetic(J, a);
      HalfInt kv = mnew - jv;
      if (abs(kv) > K) continue;
      double x = 0.0;
      // J leg lowered from j+1.
      if (a > 0) x += (*c)(r - 1, a - 1) * lowering_coefficient(J, jv + HalfInt(1));
      // K leg lowered from k+1 with j unchanged.
      if (kv + HalfInt(1) <= K) x += (*c)(r - 1, a) * lowering_coefficient(K, kv + HalfInt(1));
      v(a) = x;
    }
    for (std::size_t h = 0; h < higher.size(); ++h) {
      HalfInt Mp = M + HalfInt(static_cast<int>(h) + 1);
      Eigen::VectorXd u = higher[h]->row(index_of(Mp, mnew)).transpose();
      v -= u.dot(v) * u;
    }
    c->row(r) = v.transpose() / v.norm();
  }
  return c;
}

}  // namespace

CGTable::CGTable(HalfInt J, HalfInt K, HalfInt M) : J_(J), K_(K), M_(M) {
  require_triangle(J, K, M);
  table_ = cached_table(J, K, M);
}

double CGTable::operator()(HalfInt m, HalfInt j) const {
  if (abs(m) > M_ || abs(j) > J_ || !same_parity(m, M_) || !same_parity(j, J_)) return 0.0;
  return (*table_)(index_of(M_, m), index_of(J_, j));
}

Eigen::MatrixXd CGTable::isometry() const {
  const int nJ = J_.dim(), nK = K_.dim(), nM = M_.dim();
  Eigen::MatrixXd iota = Eigen::MatrixXd::Zero(nJ * nK, nM);
  for (int r = 0; r < nM; ++r) {
    HalfInt m = magnetic(M_, r);
    for (int a = 0; a < nJ; ++a) {
      HalfInt kv = m - magnetic(J_, a);
      if (abs(kv) > K_) continue;
      iota(a * nK + index_of(K_, kv), r) = (*table_)(r, a);
    }
  }
  return iota;
}

double clebsch_gordan(HalfInt J, HalfInt j, HalfInt K, HalfInt k, HalfInt M, HalfInt m) {
  if (!triangle(J, K, M) || j + k != m) return 0.0;
  if (abs(j) > J || abs(k) > K || abs(m) > M) return 0.0;
  if (!same_parity(j, J) || !same_parity(k, K) || !same_parity(m, M)) return 0.0;
  return CGTable(J, K, M)(m, j);
}

TopRowDecay top_row_decay(HalfInt J, HalfInt K, HalfInt M) {
  require_triangle(J, K, M);
  const double j = J.value(), k = K.value(), m = M.value();
  TopRowDecay out;
  out.epsilon = (j - m + k) * (j + m - k + 1) / (m + k - j + 1);
  out.c = top_row(J, K, M);
  const double c02 = out.c[0] * out.c[0];
  out.worst_power_excess = -1e300;
  for (std::size_t l = 0; l < out.c.size(); ++l)
    out.worst_power_excess = std::max(out.worst_power_excess,
                                      out.c[l] * out.c[l] - std::pow(out.epsilon, static_cast<double>(l)) * c02);
  out.head_excess = 1.0 - c02 - out.epsilon;
  return out;
}

}  // namespace spinsemi
