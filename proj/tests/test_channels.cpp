#include <doctest.h>

#include <cmath>

#include "spinsemi/channels.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/quantize.hpp"
#include "spinsemi/random.hpp"
#include "spinsemi/su2_rep.hpp"

using namespace spinsemi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Operator eye(int n) { return Operator::Identity(n, n); }

const std::pair<HalfInt, HalfInt> kPairs[] = {{half(1), half(1)}, {HalfInt(1), HalfInt(2)}, {half(1), HalfInt(3)},
                                              {half(3), HalfInt(1)}, {HalfInt(2), half(3)}};

}  // namespace

TEST_CASE("three constructions of a vertex agree") {
  Rng rng(31);
  for (auto [J, K] : kPairs)
    for (HalfInt M : vertex_labels(J, K))
      for (int k = 0; k < 5; ++k) {
        Operator rho = random_matrix(J.dim(), rng);
        Operator a = channel_vertex_apply(J, K, M, rho, ChannelFormula::projection);
        Operator b = channel_vertex_apply(J, K, M, rho, ChannelFormula::embedding_up);
        Operator c = channel_vertex_apply(J, K, M, rho, ChannelFormula::embedding_down);
        CHECK(max_abs(a - b) < 1e-12);
        CHECK(max_abs(a - c) < 1e-12);
      }
}

TEST_CASE("vertices are trace preserving, unital up to scale and covariant") {
  Rng rng(32);
  for (auto [J, K] : kPairs)
    for (HalfInt M : vertex_labels(J, K)) {
      const int nJ = J.dim(), nK = K.dim();
      Operator rho = random_density(nJ, rng);
      Operator out = channel_vertex_apply(J, K, M, rho);
      CHECK(std::abs(out.trace() - 1.0) < 1e-12);
      CHECK(max_abs(channel_vertex_apply(J, K, M, eye(nJ)) - (double(nJ) / nK) * eye(nK)) < 1e-12);
      Operator rj = wigner_rotation(J, 0.9, 2.1, -0.5), rk = wigner_rotation(K, 0.9, 2.1, -0.5);
      CHECK(max_abs(channel_vertex_apply(J, K, M, rj * rho * rj.adjoint()) - rk * out * rk.adjoint()) < 1e-10);
    }
}

TEST_CASE("spin one-half to spin one-half") {
  HalfInt h = half(1);
  Rng rng(33);
  Operator rho = random_density(2, rng);
  CHECK(max_abs(channel_vertex_apply(h, h, HalfInt(0), rho) - rho) < 1e-12);
  // The other vertex maps (1 + r.sigma)/2 to 1/2 - r.sigma/6.
  Operator out = channel_vertex_apply(h, h, HalfInt(1), rho);
  Operator expect = 0.5 * eye(2) - (rho - 0.5 * eye(2)) / 3.0;
  CHECK(max_abs(out - expect) < 1e-12);
  CHECK(max_abs(channel_vertex_apply(h, h, HalfInt(1), rho) - rho) > 0.01);
}

TEST_CASE("mixtures and validation") {
  Rng rng(34);
  HalfInt J(1), K(2);
  Operator rho = random_density(3, rng);
  ChannelWeights w{{HalfInt(1), 0.2}, {HalfInt(2), 0.5}, {HalfInt(3), 0.3}};
  Operator mix = channel_mix(J, K, w, rho);
  Operator expect = Operator::Zero(5, 5);
  for (auto [M, lam] : w) expect += lam * channel_vertex_apply(J, K, M, rho);
  CHECK(max_abs(mix - expect) < 1e-13);
  CHECK(max_abs(channel_mix(J, K, {{HalfInt(2), 1.0}}, rho) - channel_vertex_apply(J, K, HalfInt(2), rho)) < 1e-14);
  ChannelWeights by_index = weights_from_indices(J, K, {{HalfInt(-1), 0.2}, {HalfInt(0), 0.5}, {HalfInt(1), 0.3}});
  CHECK(by_index == w);
  CHECK_THROWS_AS(Channel(J, K, {{HalfInt(4), 1.0}}), ValidationError);
  CHECK_THROWS_AS(Channel(J, K, {{HalfInt(1), 0.5}}), ValidationError);
  CHECK_THROWS_AS(Channel(J, K, {{HalfInt(1), -0.5}, {HalfInt(2), 1.5}}), ValidationError);
  CHECK_THROWS_AS(channel_vertex_apply(J, K, HalfInt(0), rho), ValidationError);
  CHECK_THROWS_AS(channel_vertex_apply(J, K, HalfInt(1), eye(4)), ValidationError);
  CHECK(vertex_labels(J, K).size() == 3);
  CHECK(vertex_labels(HalfInt(3), half(1)).size() == 2);
}

TEST_CASE("adjoints") {
  Rng rng(35);
  for (auto [J, K] : kPairs)
    for (HalfInt M : vertex_labels(J, K)) {
      for (int k = 0; k < 4; ++k) {
        Operator s = random_matrix(J.dim(), rng), t = random_matrix(K.dim(), rng);
        cplx lhs = (t.adjoint() * channel_vertex_apply(J, K, M, s)).trace();
        cplx rhs = (channel_adjoint(J, K, M, t).adjoint() * s).trace();
        CHECK(std::abs(lhs - rhs) < 1e-11);
      }
      CHECK(max_abs(channel_adjoint(J, K, M, eye(K.dim())) - eye(J.dim())) < 1e-12);
      // Adjoint of the adjoint, through the same proportionality in the other direction.
      Operator s = random_matrix(J.dim(), rng);
      Operator twice = (double(J.dim()) / K.dim()) * channel_adjoint(K, J, M, s);
      CHECK(max_abs(twice - channel_vertex_apply(J, K, M, s)) < 1e-12);
    }
}

TEST_CASE("Choi matrices") {
  Rng rng(36);
  for (auto [J, K] : kPairs) {
    std::vector<Eigen::MatrixXcd> chois;
    for (HalfInt M : vertex_labels(J, K)) {
      Eigen::MatrixXcd c = choi_matrix(J, K, M);
      ChoiReport r = choi_checks(c, J, K, M);
      CHECK(r.ok());
      CHECK(r.trace == doctest::Approx(J.dim()));
      CHECK(*r.rank == M.dim());
      CHECK(hermitian_eigenvalues(c).maxCoeff() == doctest::Approx(double(J.dim()) / M.dim()));
      Operator rho = random_matrix(J.dim(), rng);
      CHECK(max_abs(apply_choi(c, rho, J, K) - channel_vertex_apply(J, K, M, rho)) < 1e-10);
      chois.push_back(c);
    }
    // Distinct vertices have orthogonal Choi matrices, hence are affinely independent.
    for (std::size_t a = 0; a < chois.size(); ++a)
      for (std::size_t b = a + 1; b < chois.size(); ++b) CHECK(std::abs((chois[a].adjoint() * chois[b]).trace()) < 1e-10);
  }
  CHECK(*choi_checks(choi_matrix(half(1), half(1), HalfInt(0)), half(1), half(1), HalfInt(0)).rank == 1);
  HalfInt J(1), K(1);
  ChannelWeights w{{HalfInt(0), 0.25}, {HalfInt(1), 0.25}, {HalfInt(2), 0.5}};
  Eigen::MatrixXcd mix = Channel(J, K, w).choi();
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(9, 9);
  for (auto [M, lam] : w) expect += lam * choi_matrix(J, K, M);
  CHECK(max_abs(mix - expect) < 1e-12);
  CHECK(choi_checks(mix, J, K).ok());
}

TEST_CASE("p to p norms") {
  for (auto [J, K] : kPairs) {
    ChannelWeights w{{vertex_labels(J, K).front(), 1.0}};
    for (double p : {1.0, 2.0, 3.0, kInf}) {
      double closed = channel_pp_norm_closed_form(J, K, p);
      double est = channel_pp_norm(J, K, w, p);
      CHECK(est <= closed + 1e-10);
      CHECK(est >= closed - 1e-6);
    }
  }
  CHECK(channel_pp_norm_closed_form(HalfInt(1), HalfInt(3), 2) == doctest::Approx(std::sqrt(3.0 / 7)));
  CHECK(channel_pp_norm_closed_form(HalfInt(1), HalfInt(3), kInf) == doctest::Approx(3.0 / 7));
  CHECK(channel_pp_norm_closed_form(HalfInt(1), HalfInt(3), 1) == doctest::Approx(1.0));
}

TEST_CASE("extreme vertices factor through coherent-state maps") {
  Rng rng(37);
  for (auto [J, K] : {std::pair{half(1), HalfInt(1)}, {HalfInt(1), HalfInt(2)}, {HalfInt(1), half(3)}, {HalfInt(2), HalfInt(5)}}) {
    const int nJ = J.dim();
    const double c = double(nJ) / K.dim();
    CoherentFrame fk = CoherentFrame::for_band(K, 2 * K.twice());
    double top = 0.0, bottom = 0.0;
    for (int a = 0; a < nJ; ++a)
      for (int b = 0; b < nJ; ++b) {
        Operator e = matrix_unit(nJ, a, b);
        // Phi^{K+J} = c Op_K Hus_J^{-J}.
        SphereFunction h = husimi(J, -J, e, J.twice());
        top = std::max(top, max_abs(channel_vertex_apply(J, K, K + J, e) - c * op_quantize(fk, K, h)));
        // Hus_K Phi^{K-J} = c Hus_J^{J}.
        SphereFunction lhs = husimi(fk, K, channel_vertex_apply(J, K, K - J, e), 2 * K.twice());
        SphereFunction rhs = c * husimi(J, J, e, J.twice()).with_lmax(2 * K.twice());
        bottom = std::max(bottom, (lhs - rhs).coeffs().cwiseAbs().maxCoeff());
      }
    CHECK(top < 1e-10);
    CHECK(bottom < 1e-10);
  }
}
