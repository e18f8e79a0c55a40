#pragma once

#include <cstdint>
#include <random>

#include "spinsemi/linalg.hpp"
#include "spinsemi/sphere_fn.hpp"

namespace spinsemi {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  cplx complex_normal() { return {normal(), normal()}; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Mixes a seed with a stream index so parallel jobs draw independent, reproducible streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Operator random_matrix(int n, Rng& rng);
Operator random_hermitian(int n, Rng& rng);
// Ginibre-distributed density matrix W W^dagger / Tr.
Operator random_density(int n, Rng& rng);
StateVector random_state(int n, Rng& rng);
Eigen::Vector3d random_direction(Rng& rng);
// Real function with independent Gaussian coefficients up to degree L, unit L^2 norm.
SphereFunction random_real_function(int L, Rng& rng);
SphereFunction random_complex_function(int L, Rng& rng);

}  // namespace spinsemi
