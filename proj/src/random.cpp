#include "spinsemi/random.hpp"

#include <cmath>

namespace spinsemi {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t(out[0]) << 32) | out[1];
}

Operator random_matrix(int n, Rng& rng) {
  Operator a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = rng.complex_normal();
  return a;
}

Operator random_hermitian(int n, Rng& rng) {
  Operator a = random_matrix(n, rng);
  return 0.5 * (a + a.adjoint());
}

Operator random_density(int n, Rng& rng) {
  Operator w = random_matrix(n, rng);
  Operator rho = w * w.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

StateVector random_state(int n, Rng& rng) {
  StateVector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

Eigen::Vector3d random_direction(Rng& rng) {
  Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
  return v / v.norm();
}

SphereFunction random_real_function(int L, Rng& rng) {
  SphereFunction f(L);
  for (int l = 0; l <= L; ++l) {
    f.coeff_ref(l, 0) = rng.normal();
    for (int m = 1; m <= l; ++m) {
      cplx c(rng.normal(), rng.normal());
      c /= std::sqrt(2.0);
      f.coeff_ref(l, m) = c;
      f.coeff_ref(l, -m) = ((m % 2) ? -1.0 : 1.0) * std::conj(c);
    }
  }
  f *= 1.0 / f.l2_norm();
  return f;
}

SphereFunction random_complex_function(int L, Rng& rng) {
  SphereFunction f(L);
  for (int k = 0; k < f.coeffs().size(); ++k) f.coeffs()(k) = rng.complex_normal();
  f *= 1.0 / f.l2_norm();
  return f;
}

}  // namespace spinsemi
