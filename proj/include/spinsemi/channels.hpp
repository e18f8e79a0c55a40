#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "spinsemi/half_int.hpp"
#include "spinsemi/linalg.hpp"

namespace spinsemi {

// Three equivalent constructions of the vertex channel Phi^M_{J,K}:
//   projection      (2J+1)/(2M+1) Tr_J[P^M_{J,K} (rho^beta (x) 1_K)]
//   embedding_up    (2J+1)/(2K+1) q^K_{J,M} (rho (x) 1_M) iota^K_{J,M}
//   embedding_down  Tr_M[iota^J_{K,M} rho q^J_{K,M}]
enum class ChannelFormula { projection, embedding_up, embedding_down };

Operator channel_vertex_apply(HalfInt J, HalfInt K, HalfInt M, const Operator& rho,
                              ChannelFormula formula = ChannelFormula::projection);

// Mixture weights keyed by the vertex label M.
using ChannelWeights = std::map<HalfInt, double>;

// M = |K-J|, ..., K+J.
std::vector<HalfInt> vertex_labels(HalfInt J, HalfInt K);
// Index view of the vertices: Phi^{K+i} with i in -J..J and K+i admissible.
HalfInt vertex_for_index(HalfInt K, HalfInt i);
HalfInt index_for_vertex(HalfInt K, HalfInt M);
ChannelWeights weights_from_indices(HalfInt J, HalfInt K, const std::map<HalfInt, double>& by_index);
void validate_weights(HalfInt J, HalfInt K, const ChannelWeights& weights);

class Channel {
 public:
  Channel(HalfInt J, HalfInt K, ChannelWeights weights);
  static Channel vertex(HalfInt J, HalfInt K, HalfInt M);

  HalfInt J() const { return J_; }
  HalfInt K() const { return K_; }
  const ChannelWeights& weights() const { return weights_; }

  Operator apply(const Operator& rho) const;
  Operator adjoint_apply(const Operator& sigma) const;
  Eigen::MatrixXcd choi() const;

 private:
  struct Vertex {
    HalfInt M;
    double weight;
    double scale;
    std::vector<Eigen::MatrixXd> blocks;  // block j of iota^M_{J,K}, (2K+1) x (2M+1)
  };
  HalfInt J_, K_;
  ChannelWeights weights_;
  std::vector<Vertex> vertices_;
};

Operator channel_mix(HalfInt J, HalfInt K, const ChannelWeights& weights, const Operator& rho);
// (Phi^M_{J,K})^* = (2J+1)/(2K+1) Phi^M_{K,J}.
Operator channel_adjoint(HalfInt J, HalfInt K, HalfInt M, const Operator& sigma);

// C = sum_ab Phi(E_ab) (x) E_ab on H_K (x) H_J^*, output leg first.
Eigen::MatrixXcd choi_matrix(HalfInt J, HalfInt K, HalfInt M);
// Phi(rho) = Tr_{H_J^*}[C (1 (x) rho^T)].
Operator apply_choi(const Eigen::MatrixXcd& choi, const Operator& rho, HalfInt J, HalfInt K);

struct ChoiReport {
  double min_eigenvalue;
  double trace;
  double trace_preservation_residual;  // || Tr_K C - 1_J ||
  double equivariance_residual;        // over a fixed set of rotations, R_K (x) conj(R_J)
  std::optional<double> projection_residual;  // vertex only: C/||C|| squared minus itself
  std::optional<int> rank;
  bool ok(double tol = 1e-10) const;
};

ChoiReport choi_checks(const Eigen::MatrixXcd& choi, HalfInt J, HalfInt K, std::optional<HalfInt> vertex = std::nullopt);

// ((2J+1)/(2K+1))^{1-1/p}.
double channel_pp_norm_closed_form(HalfInt J, HalfInt K, double p);
// Largest ||Phi(rho)||_p / ||rho||_p over structured and random inputs.
double channel_pp_norm(HalfInt J, HalfInt K, const ChannelWeights& weights, double p, std::uint64_t seed = 1);

}  // namespace spinsemi
