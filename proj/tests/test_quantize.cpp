#include <doctest.h>

#include <cmath>

#include "spinsemi/errors.hpp"
#include "spinsemi/quantize.hpp"
#include "spinsemi/random.hpp"
#include "spinsemi/su2_rep.hpp"

using namespace spinsemi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<HalfInt> indices(HalfInt J) {
  std::vector<HalfInt> out;
  for (HalfInt i = -J; i <= J; i += HalfInt(1)) out.push_back(i);
  return out;
}

Operator identity(HalfInt J) { return Operator::Identity(J.dim(), J.dim()); }

}  // namespace

TEST_CASE("quantization of simple symbols") {
  for (HalfInt J : {half(1), HalfInt(1), half(3), HalfInt(4)})
    for (HalfInt i : indices(J)) {
      CHECK(max_abs(op_quantize(J, i, SphereFunction::constant(1.0)) - identity(J)) < 1e-11);
      Operator sz = spin_operators(J).Sz;
      // Op^i(w_z) = c S_z; the trace pairing with S_z fixes c = 3 i / ((J+1)(2J+1) J) ... check only for i = J.
      if (i == J) CHECK(max_abs(op_quantize(J, i, SphereFunction::omega_z()) - sz / (J.value() + 1)) < 1e-12);
    }
  Operator z = op_quantize(half(1), half(1), SphereFunction::harmonic(2, 1));
  CHECK(max_abs(z) < 1e-12);
  CHECK_THROWS_AS(op_quantize(CoherentFrame::for_band(HalfInt(1), 2), HalfInt(1), SphereFunction::harmonic(4, 0)),
                  ValidationError);
  CHECK_THROWS_AS(op_quantize(HalfInt(1), half(1), SphereFunction::constant(1.0)), ValidationError);
}

TEST_CASE("quadrature quantization agrees with the Clebsch-Gordan construction") {
  Rng rng(21);
  for (HalfInt J : {half(1), HalfInt(1), half(3), HalfInt(2), half(7)})
    for (HalfInt i : indices(J)) {
      SphereFunction f = random_complex_function(J.twice() + 2, rng);
      CHECK(max_abs(op_quantize(J, i, f) - op_quantize_from_cg(J, i, f)) < 1e-11);
    }
}

TEST_CASE("Husimi functions") {
  Rng rng(22);
  for (HalfInt J : {half(1), HalfInt(1), half(5)}) {
    const int n = J.dim();
    CoherentFrame frame = CoherentFrame::for_band(J, J.twice() + 3);
    Operator sz = spin_operators(J).Sz;
    for (HalfInt i : indices(J)) {
      SphereFunction one = husimi(frame, i, identity(J), J.twice() + 3);
      CHECK((one - SphereFunction::constant(1.0)).l2_norm() < 1e-12);
      SphereFunction hz = husimi(frame, i, sz, J.twice() + 3);
      CHECK((hz - i.value() * SphereFunction::omega_z()).l2_norm() < 1e-12);
      Operator rho = random_matrix(n, rng);
      SphereFunction h = husimi(frame, i, rho, J.twice() + 3);
      for (int l = J.twice() + 1; l <= J.twice() + 3; ++l) CHECK(band_truncation(h, l).l2_norm() < 1e-12);
      // (2J+1) Hus^i is the adjoint of Op^i.
      SphereFunction f = random_complex_function(3, rng).with_lmax(J.twice() + 3);
      cplx lhs = double(n) * f.coeffs().dot(h.with_lmax(J.twice() + 3).coeffs());
      cplx rhs = (op_quantize(frame, i, f).adjoint() * rho).trace();
      CHECK(std::abs(lhs - rhs) < 1e-11);
    }
  }
  CHECK_THROWS_AS(husimi(HalfInt(1), HalfInt(1), Operator::Identity(2, 2), 2), ValidationError);
  CHECK_THROWS_AS(husimi(HalfInt(2), HalfInt(1), Operator::Identity(5, 5), 3), ValidationError);
}

TEST_CASE("positivity, norm bounds and spectrum containment") {
  Rng rng(23);
  for (HalfInt J : {HalfInt(1), half(3), HalfInt(3)}) {
    CoherentFrame frame = CoherentFrame::for_band(J, 4);
    SphereFunction f = random_real_function(4, rng);
    GridValues fv = synthesis(f, make_grid(60));
    double fmin = fv.real().minCoeff(), fmax = fv.real().maxCoeff();
    SphereFunction pos = f - SphereFunction::constant(fmin - 1e-3);
    for (HalfInt i : indices(J)) {
      Operator op = op_quantize(frame, i, f);
      CHECK(max_abs(op - op.adjoint()) < 1e-12);
      Eigen::VectorXd ev = hermitian_eigenvalues(op);
      CHECK(ev.minCoeff() >= fmin - 1e-10);
      CHECK(ev.maxCoeff() <= fmax + 1e-10);
      CHECK(hermitian_eigenvalues(op_quantize(frame, i, pos)).minCoeff() >= -1e-11);
      CHECK(std::abs(op.trace() - double(J.dim()) * f.coeff(0, 0)) < 1e-11);
      SphereGrid fine = make_grid(60);
      for (double p : {1.0, 2.0, kInf}) {
        double bound = std::pow(J.dim(), std::isinf(p) ? 0.0 : 1.0 / p) * lp_norm(f, p, fine);
        CHECK(schatten_norm(op, p) <= bound * (1 + 1e-9));
      }
      Operator rho = random_density(J.dim(), rng);
      CHECK(husimi_values(frame, i, rho).real().minCoeff() >= -1e-11);
    }
  }
}

TEST_CASE("quantization is rotation covariant") {
  Rng rng(24);
  HalfInt J = half(5);
  SphereFunction f = random_complex_function(4, rng);
  const double phi = 1.3, theta = 0.6, psi = 2.2;
  Operator r = wigner_rotation(J, phi, theta, psi);
  for (HalfInt i : indices(J)) {
    Operator lhs = op_quantize(J, i, rotate(f, phi, theta, psi));
    CHECK(max_abs(lhs - r * op_quantize(J, i, f) * r.adjoint()) < 1e-10);
  }
}

TEST_CASE("Berezin spectrum") {
  BerezinSpectrum half_spin = berezin_spectrum(half(1));
  CHECK(half_spin.eigenvalues.size() == 2);
  CHECK(half_spin[1] == doctest::Approx(1.0 / 3));
  BerezinSpectrum one = berezin_spectrum(HalfInt(1));
  CHECK(one[1] == doctest::Approx(0.5));
  CHECK(one[2] == doctest::Approx(0.1));
  for (int t = 1; t <= 8; ++t) {
    HalfInt J = half(t);
    BerezinSpectrum s = berezin_spectrum(J);
    Eigen::MatrixXcd m = berezin_matrix(J);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    for (int l = 0; l <= J.twice(); ++l)
      for (int mm = -l; mm <= l; ++mm) expect(SphereFunction::index(l, mm), SphereFunction::index(l, mm)) = s[l];
    CHECK(max_abs(m - expect) < 1e-10);
    for (int l = 1; l <= J.twice(); ++l) CHECK(s[l] < s[l - 1]);
    BerezinSpectrum next = berezin_spectrum(half(t + 1));
    for (int l = 0; l <= J.twice(); ++l) CHECK(s[l] <= next[l]);
  }
}

TEST_CASE("off-diagonal Husimi functions") {
  Rng rng(25);
  HalfInt J = half(3);
  const int n = J.dim();
  CoherentFrame frame = CoherentFrame::for_band(J, 6);
  CoherentFrame shifted(J, frame.grid(), 0.37);
  Operator a = random_matrix(n, rng), b = random_matrix(n, rng);
  for (HalfInt x : indices(J)) {
    CHECK(husimi_offdiag(frame, x, x, a).isApprox(husimi_values(frame, x, a)));
    for (HalfInt y : indices(J)) {
      if (x != y) CHECK(husimi_offdiag(frame, x, y, identity(J)).abs().maxCoeff() < 1e-13);
      GridValues prod = husimi_offdiag(frame, x, y, a) * husimi_offdiag(frame, y, x, b);
      GridValues prod2 = husimi_offdiag(shifted, x, y, a) * husimi_offdiag(shifted, y, x, b);
      CHECK((prod - prod2).abs().maxCoeff() < 1e-12);
      CHECK((husimi_offdiag(frame, x, y, a).abs() - husimi_offdiag(shifted, x, y, a).abs()).abs().maxCoeff() < 1e-12);
      for (double p : {1.0, 2.0}) {
        double lhs = lp_norm(husimi_offdiag(frame, x, y, a), p, frame.grid());
        CHECK(lhs <= std::pow(n, -1.0 / p) * schatten_norm(a, p) * (1 + 1e-9));
      }
    }
  }
  // Hus(Op f Op g) = sum_k Hus^{J,J-k}(Op f) Hus^{J-k,J}(Op g).
  SphereFunction f = random_complex_function(3, rng), g = random_complex_function(3, rng);
  Operator of = op_quantize(frame, J, f), og = op_quantize(frame, J, g);
  GridValues sum = GridValues::Zero(frame.grid().n_theta, frame.grid().n_phi);
  for (HalfInt x : indices(J)) sum += husimi_offdiag(frame, J, x, of) * husimi_offdiag(frame, x, J, og);
  CHECK((sum - husimi_values(frame, J, of * og)).abs().maxCoeff() < 1e-10);
}

TEST_CASE("Stratonovich-Weyl correspondence") {
  Rng rng(26);
  for (HalfInt J : {half(1), HalfInt(1), half(3), HalfInt(2), HalfInt(3)}) {
    const int n = J.dim();
    StratonovichWeyl sw = stratonovich_weyl(J);
    CHECK((sw.symbol_of(identity(J)) - SphereFunction::constant(1.0)).l2_norm() < 1e-10);
    CHECK(max_abs(sw.quantizer * sw.symbol - Eigen::MatrixXcd::Identity(n * n, n * n)) < 1e-10);
    for (int k = 0; k < 5; ++k) {
      Operator a = random_matrix(n, rng), b = random_matrix(n, rng);
      cplx lhs = (a.adjoint() * b).trace() / double(n);
      cplx rhs = sw.symbol_of(a).coeffs().dot(sw.symbol_of(b).coeffs());
      CHECK(std::abs(lhs - rhs) < 1e-10);
      Operator h = random_hermitian(n, rng);
      CHECK(sw.symbol_of(h).is_real(1e-10));
    }
  }
}

TEST_CASE("inversion bounds on a single harmonic") {
  HalfInt J(2);
  Operator rho = Operator::Identity(5, 5) / 5.0;
  InversionReport r = berezin_inversion_check(J, SphereFunction::harmonic(1, 0), 1.0, rho);
  CHECK(r.checks[0].lhs == doctest::Approx(1.0 - J.value() / (J.value() + 1)));
  CHECK(r.checks[0].rhs == doctest::Approx(2.0 / 5.0));
  CHECK(r.checks[0].lhs < r.checks[0].rhs);
  InversionReport c = berezin_inversion_check(J, SphereFunction::constant(2.0), 0.5, rho);
  for (const auto& chk : c.checks) CHECK(chk.lhs < 1e-12);
}
