#pragma once

#include <cstdint>
#include <vector>

#include "spinsemi/channels.hpp"
#include "spinsemi/linalg.hpp"

namespace spinsemi {

struct MinimizeOptions {
  int restarts = 32;  // Haar-random starts, in addition to the 2J+1 basis states
  std::uint64_t seed = 1;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-10;
  bool parallel = true;  // spread starts over worker threads
};

struct MinimizeResult {
  double value = 0.0;
  StateVector state;
  std::vector<double> trace_log;  // objective after each accepted step of the winning start
  int best_start = 0;
  int unconverged_starts = 0;
};

// Output entropy S(Phi(|psi><psi|)) for a unit vector psi.
double output_entropy(const Channel& channel, const StateVector& psi);

// Riemannian gradient of output_entropy at psi: -2 (1 - psi psi^*) Phi^*(log sigma + 1) psi, sigma = Phi(|psi><psi|).
// The directional derivative along a tangent vector v is Re(grad^* v).
StateVector entropy_gradient(const Channel& channel, const StateVector& psi);

// Relative error between entropy_gradient and central differences along all 2(2J+1) real coordinate directions.
double gradient_check(const Channel& channel, const StateVector& psi, double step = 1e-5);

// Entropy is concave and the channel affine, so the minimum over density matrices is attained on pure states;
// the search runs over unit vectors only.
MinimizeResult min_output_entropy(const Channel& channel, const MinimizeOptions& options = {});

// S(Phi(|up;i><up;i|)); by covariance this is the value at every direction.
double coherent_baseline(const Channel& channel, HalfInt i);
// The same entropy at the coherent state pointing along omega.
double coherent_baseline_at(const Channel& channel, HalfInt i, const Eigen::Vector3d& omega);

struct ScanRow {
  HalfInt J, K;
  ChannelWeights weights;
  double minimum = 0.0;
  double best_coherent = 0.0;  // min over i of coherent_baseline
  HalfInt best_coherent_index;
  double bloch_coherent = 0.0;  // coherent_baseline at i = J
  int unconverged_starts = 0;
  double gap() const { return best_coherent - minimum; }
  bool flagged(double threshold) const { return gap() > threshold; }
};

struct ScanOptions {
  std::vector<HalfInt> J_values;
  HalfInt K_max;
  double step = 0.25;
  int restarts = 32;
  std::uint64_t seed = 1;
};

// Every output spin 1/2 <= K <= K_max and every point of the vertex simplex on the grid
// with spacing `step`.
std::vector<ScanRow> counterexample_scan(const ScanOptions& options);

// Weight vectors on the simplex with n vertices and grid spacing 1/divisions.
std::vector<std::vector<double>> simplex_grid(int n, int divisions);

}  // namespace spinsemi
