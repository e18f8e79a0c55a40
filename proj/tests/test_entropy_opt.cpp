#include <doctest.h>

#include <cmath>

#include "spinsemi/entropy_opt.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/quantize.hpp"
#include "spinsemi/random.hpp"
#include "spinsemi/su2_rep.hpp"

using namespace spinsemi;

TEST_CASE("simplex grid") {
  auto g = simplex_grid(3, 4);
  CHECK(g.size() == 15);
  for (const auto& w : g) CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0));
  CHECK(simplex_grid(1, 4).size() == 1);
  CHECK(simplex_grid(2, 4).front() == std::vector<double>{1.0, 0.0});
}

TEST_CASE("gradient agrees with finite differences") {
  Rng rng(51);
  for (auto [J, K] : {std::pair{HalfInt(1), HalfInt(3)}, {HalfInt(1), HalfInt(2)}, {half(3), HalfInt(2)}}) {
    ChannelWeights w;
    auto labels = vertex_labels(J, K);
    for (std::size_t v = 0; v < labels.size(); ++v) w[labels[v]] = 1.0 / labels.size();
    Channel mix(J, K, w), lower = Channel::vertex(J, K, K - J);
    for (int k = 0; k < 10; ++k) {
      StateVector psi = random_state(J.dim(), rng);
      CHECK(gradient_check(mix, psi) <= 1e-5);
      CHECK(gradient_check(lower, psi) <= 1e-5);
    }
  }
  // Every pure spin one-half state is coherent, so the output entropy is constant there.
  Channel half_mix(half(1), HalfInt(1), {{half(1), 0.3}, {half(3), 0.7}});
  CHECK(entropy_gradient(half_mix, random_state(2, rng)).norm() < 1e-10);
}

TEST_CASE("coherent states minimize the lowest vertex") {
  for (auto [J, K] : {std::pair{half(1), HalfInt(1)}, {HalfInt(1), HalfInt(2)}, {HalfInt(1), HalfInt(3)}}) {
    Channel ch = Channel::vertex(J, K, K - J);
    MinimizeOptions opt;
    opt.restarts = 8;
    opt.seed = 5;
    MinimizeResult r = min_output_entropy(ch, opt);
    double base = coherent_baseline(ch, J);
    CHECK(std::abs(r.value - base) <= 1e-7);
    CHECK(std::abs(r.state.norm() - 1.0) < 1e-12);
    CHECK(std::abs(output_entropy(ch, r.state) - r.value) < 1e-9);
    for (std::size_t k = 1; k < r.trace_log.size(); ++k) CHECK(r.trace_log[k] <= r.trace_log[k - 1] + 1e-12);
  }
}

TEST_CASE("trivial and identity channels") {
  Channel scalar = Channel::vertex(HalfInt(0), HalfInt(2), HalfInt(2));
  MinimizeResult r = min_output_entropy(scalar, {1, 3});
  CHECK(r.value == doctest::Approx(std::log(5.0)).epsilon(1e-13));
  CHECK(coherent_baseline(scalar, HalfInt(0)) == doctest::Approx(std::log(5.0)).epsilon(1e-13));

  Channel ident = Channel::vertex(HalfInt(1), HalfInt(1), HalfInt(0));
  Rng rng(52);
  CHECK(output_entropy(ident, random_state(3, rng)) < 1e-9);
  CHECK(min_output_entropy(ident, {4, 9}).value < 1e-9);
  CHECK_THROWS_AS(min_output_entropy(ident, {0, 9}), ValidationError);
}

TEST_CASE("coherent baselines") {
  Rng rng(53);
  HalfInt J(1), K(2);
  Channel top = Channel::vertex(J, K, K + J);
  // Phi^{K+J}(|up;J><up;J|) = (2J+1)/(2K+1) Op_K Hus_J^{-J}(|up;J><up;J|).
  Operator rho = coherent_projector(J, Eigen::Vector3d(0, 0, 1), J);
  Operator via = (3.0 / 5.0) * op_quantize(K, K, husimi(J, -J, rho, J.twice()));
  CHECK(coherent_baseline(top, J) == doctest::Approx(von_neumann_entropy(via)).epsilon(1e-12));

  ChannelWeights w{{HalfInt(1), 0.25}, {HalfInt(2), 0.25}, {HalfInt(3), 0.5}};
  Channel mix(J, K, w);
  for (HalfInt i = -J; i <= J; i += HalfInt(1))
    for (int k = 0; k < 3; ++k) CHECK(std::abs(coherent_baseline(mix, i) - coherent_baseline_at(mix, i, random_direction(rng))) < 1e-10);

  MinimizeResult r = min_output_entropy(mix, {6, 11});
  for (HalfInt i = -J; i <= J; i += HalfInt(1)) CHECK(r.value <= coherent_baseline(mix, i) + 1e-9);
}

TEST_CASE("scan structure and determinism") {
  ScanOptions opt;
  opt.J_values = {half(1)};
  opt.K_max = HalfInt(1);
  opt.step = 0.5;
  opt.restarts = 4;
  opt.seed = 7;
  auto rows = counterexample_scan(opt);
  CHECK(rows.size() == 6);  // K = 1/2, 1 with three grid points each
  auto again = counterexample_scan(opt);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].minimum == again[k].minimum);
    CHECK(rows[k].minimum <= rows[k].best_coherent + 1e-9);
    CHECK(rows[k].best_coherent <= rows[k].bloch_coherent);
    // Spin one-half has only coherent pure states.
    CHECK_FALSE(rows[k].flagged(1e-5));
  }
  opt.step = 0.3;
  CHECK_THROWS_AS(counterexample_scan(opt), ValidationError);
}
