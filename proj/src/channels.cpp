#include "spinsemi/channels.hpp"

#include <cmath>
#include <limits>

#include "spinsemi/clebsch.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/random.hpp"
#include "spinsemi/su2_rep.hpp"

namespace spinsemi {

namespace {

void require_dim(const Operator& rho, HalfInt J, const char* what) {
  if (rho.rows() != J.dim() || rho.cols() != J.dim())
    throw ValidationError(std::string(what) + ": expected a " + std::to_string(J.dim()) + "x" + std::to_string(J.dim()) +
                          " operator");
}

// Block a of an isometry into H_A (x) H_B: the (dim B) x (dim M) slice with first leg fixed to a.
std::vector<Eigen::MatrixXd> first_leg_blocks(const Eigen::MatrixXd& iota, int dimA, int dimB) {
  std::vector<Eigen::MatrixXd> out;
  for (int a = 0; a < dimA; ++a) out.push_back(iota.middleRows(a * dimB, dimB));
  return out;
}

// sum_{a,b} A_{ba} X_a X_b^T for real blocks X.
Operator contract_blocks(const std::vector<Eigen::MatrixXd>& x, const Operator& a) {
  const int n = static_cast<int>(x.size());
  Operator out = Operator::Zero(x[0].rows(), x[0].rows());
  for (int j = 0; j < n; ++j) {
    Operator y = Operator::Zero(x[0].rows(), x[0].cols());
    for (int jp = 0; jp < n; ++jp)
      if (a(jp, j) != 0.0) y += a(jp, j) * x[jp];
    out += x[j].cast<cplx>() * y.transpose();
  }
  return out;
}

}  // namespace

Operator channel_vertex_apply(HalfInt J, HalfInt K, HalfInt M, const Operator& rho, ChannelFormula formula) {
  require_triangle(J, K, M);
  require_dim(rho, J, "channel input");
  const int nJ = J.dim(), nK = K.dim(), nM = M.dim();
  switch (formula) {
    case ChannelFormula::projection: {
      auto x = first_leg_blocks(CGTable(J, K, M).isometry(), nJ, nK);
      return (double(nJ) / nM) * contract_blocks(x, beta_transpose(rho, J));
    }
    case ChannelFormula::embedding_up: {
      // iota^K_{J,M}: H_K -> H_J (x) H_M, blocks Y_j of size nM x nK.
      auto y = first_leg_blocks(CGTable(J, M, K).isometry(), nJ, nM);
      Operator out = Operator::Zero(nK, nK);
      for (int j = 0; j < nJ; ++j)
        for (int jp = 0; jp < nJ; ++jp)
          if (rho(j, jp) != 0.0) out += rho(j, jp) * (y[j].transpose() * y[jp]).cast<cplx>();
      return (double(nJ) / nK) * out;
    }
    case ChannelFormula::embedding_down: {
      // iota^J_{K,M}: H_J -> H_K (x) H_M; trace out the M leg.
      Eigen::MatrixXd iota = CGTable(K, M, J).isometry();
      Operator out = Operator::Zero(nK, nK);
      for (int m = 0; m < nM; ++m) {
        Eigen::MatrixXd z(nK, nJ);
        for (int k = 0; k < nK; ++k) z.row(k) = iota.row(k * nM + m);
        out += z.cast<cplx>() * rho * z.transpose();
      }
      return out;
    }
  }
  throw ValidationError("unknown channel formula");
}

std::vector<HalfInt> vertex_labels(HalfInt J, HalfInt K) {
  std::vector<HalfInt> out;
  for (HalfInt M = abs(K - J); M <= K + J; M += HalfInt(1)) out.push_back(M);
  return out;
}

HalfInt vertex_for_index(HalfInt K, HalfInt i) { return K + i; }
HalfInt index_for_vertex(HalfInt K, HalfInt M) { return M - K; }

ChannelWeights weights_from_indices(HalfInt J, HalfInt K, const std::map<HalfInt, double>& by_index) {
  ChannelWeights w;
  for (auto [i, lam] : by_index) {
    if (abs(i) > J || !same_parity(i, J)) throw ValidationError("vertex index " + i.str() + " out of range");
    w[vertex_for_index(K, i)] = lam;
  }
  validate_weights(J, K, w);
  return w;
}

void validate_weights(HalfInt J, HalfInt K, const ChannelWeights& weights) {
  double total = 0.0;
  for (auto [M, lam] : weights) {
    if (!triangle(J, K, M))
      throw ValidationError("vertex M=" + M.str() + " violates the triangle rule |K-J| <= M <= K+J for J=" + J.str() +
                            ", K=" + K.str());
    if (!(lam >= 0.0)) throw ValidationError("negative channel weight");
    total += lam;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("channel weights must sum to one");
}

Channel::Channel(HalfInt J, HalfInt K, ChannelWeights weights) : J_(J), K_(K), weights_(std::move(weights)) {
  validate_weights(J, K, weights_);
  for (auto [M, lam] : weights_) {
    if (lam == 0.0) continue;
    vertices_.push_back({M, lam, double(J.dim()) / M.dim(), first_leg_blocks(CGTable(J, K, M).isometry(), J.dim(), K.dim())});
  }
}

Channel Channel::vertex(HalfInt J, HalfInt K, HalfInt M) { return Channel(J, K, {{M, 1.0}}); }

Operator Channel::apply(const Operator& rho) const {
  require_dim(rho, J_, "channel input");
  Operator rb = beta_transpose(rho, J_);
  Operator out = Operator::Zero(K_.dim(), K_.dim());
  for (const auto& v : vertices_) out += (v.weight * v.scale) * contract_blocks(v.blocks, rb);
  return out;
}

Operator Channel::adjoint_apply(const Operator& sigma) const {
  require_dim(sigma, K_, "adjoint input");
  Operator out = Operator::Zero(J_.dim(), J_.dim());
  for (const auto& v : vertices_) out += v.weight * channel_adjoint(J_, K_, v.M, sigma);
  return out;
}

Eigen::MatrixXcd Channel::choi() const {
  const int nJ = J_.dim(), nK = K_.dim();
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(nK * nJ, nK * nJ);
  for (int a = 0; a < nJ; ++a)
    for (int b = 0; b < nJ; ++b) c += kron(apply(matrix_unit(nJ, a, b)), matrix_unit(nJ, a, b));
  return c;
}

Operator channel_mix(HalfInt J, HalfInt K, const ChannelWeights& weights, const Operator& rho) {
  return Channel(J, K, weights).apply(rho);
}

Operator channel_adjoint(HalfInt J, HalfInt K, HalfInt M, const Operator& sigma) {
  require_triangle(J, K, M);
  require_dim(sigma, K, "adjoint input");
  return (double(J.dim()) / K.dim()) * channel_vertex_apply(K, J, M, sigma);
}

Eigen::MatrixXcd choi_matrix(HalfInt J, HalfInt K, HalfInt M) { return Channel::vertex(J, K, M).choi(); }

Operator apply_choi(const Eigen::MatrixXcd& choi, const Operator& rho, HalfInt J, HalfInt K) {
  const int nJ = J.dim(), nK = K.dim();
  if (choi.rows() != nJ * nK) throw ValidationError("Choi matrix dimension mismatch");
  require_dim(rho, J, "channel input");
  Operator ident = Operator::Identity(nK, nK);
  return trace_out_second(choi * kron(ident, rho.transpose()), nK, nJ);
}

bool ChoiReport::ok(double tol) const {
  bool good = min_eigenvalue >= -tol && trace_preservation_residual <= tol && equivariance_residual <= tol;
  if (projection_residual) good = good && *projection_residual <= tol;
  return good;
}

ChoiReport choi_checks(const Eigen::MatrixXcd& choi, HalfInt J, HalfInt K, std::optional<HalfInt> vertex) {
  const int nJ = J.dim(), nK = K.dim();
  if (choi.rows() != nJ * nK || choi.cols() != nJ * nK) throw ValidationError("Choi matrix dimension mismatch");
  ChoiReport r{};
  Eigen::VectorXd ev = hermitian_eigenvalues(choi);
  r.min_eigenvalue = ev.minCoeff();
  r.trace = choi.trace().real();
  r.trace_preservation_residual = max_abs(trace_out_first(choi, nK, nJ) - Operator::Identity(nJ, nJ));
  r.equivariance_residual = 0.0;
  for (auto [phi, theta, psi] : {std::tuple{0.4, 1.3, -0.8}, {2.5, 0.7, 1.9}, {-1.1, 2.6, 0.3}}) {
    Operator u = kron(wigner_rotation(K, phi, theta, psi), wigner_rotation(J, phi, theta, psi).conjugate());
    r.equivariance_residual = std::max(r.equivariance_residual, max_abs(u * choi * u.adjoint() - choi));
  }
  if (vertex) {
    double top = ev.maxCoeff();
    Eigen::MatrixXcd p = choi / top;
    r.projection_residual = max_abs(p * p - p);
    int rank = 0;
    for (double l : ev)
      if (l > 1e-8 * top) ++rank;
    r.rank = rank;
  }
  return r;
}

double channel_pp_norm_closed_form(HalfInt J, HalfInt K, double p) {
  if (!(p >= 1.0)) throw ValidationError("norm exponent must be >= 1");
  double ratio = double(J.dim()) / K.dim();
  return std::pow(ratio, std::isinf(p) ? 1.0 : 1.0 - 1.0 / p);
}

double channel_pp_norm(HalfInt J, HalfInt K, const ChannelWeights& weights, double p, std::uint64_t seed) {
  if (!(p >= 1.0)) throw ValidationError("norm exponent must be >= 1");
  Channel ch(J, K, weights);
  const int n = J.dim();
  std::vector<Operator> candidates{Operator::Identity(n, n)};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) candidates.push_back(matrix_unit(n, a, b));
  for (HalfInt i = -J; i <= J; i += HalfInt(1)) candidates.push_back(coherent_projector(J, Eigen::Vector3d(0, 0, 1), i));
  Rng rng(seed);
  for (int k = 0; k < 16; ++k) {
    candidates.push_back(random_density(n, rng));
    candidates.push_back(random_hermitian(n, rng));
    candidates.push_back(random_matrix(n, rng));
  }
  double best = 0.0;
  for (const Operator& x : candidates) {
    double den = schatten_norm(x, p);
    if (den > 0) best = std::max(best, schatten_norm(ch.apply(x), p) / den);
  }
  return best;
}

}  // namespace spinsemi
