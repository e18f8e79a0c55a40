#include "spinsemi/quantize.hpp"

#include <cmath>

#include "spinsemi/clebsch.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/su2_rep.hpp"

namespace spinsemi {

void require_coherent_index(HalfInt J, HalfInt i) {
  if (abs(i) > J || !same_parity(i, J)) throw ValidationError("coherent index " + i.str() + " out of range for J=" + J.str());
}

CoherentFrame::CoherentFrame(HalfInt J, SphereGrid grid, double gauge) : J_(J), grid_(std::move(grid)), gauge_(gauge) {
  WignerRotation rot(J);
  d_.reserve(grid_.n_theta);
  for (double th : grid_.theta) d_.push_back(rot.small_d(th));
}

CoherentFrame CoherentFrame::for_band(HalfInt J, int band, double gauge) {
  return CoherentFrame(J, make_grid(J.twice() + band), gauge);
}

StateVector CoherentFrame::state(int t, int p, HalfInt i) const {
  require_coherent_index(J_, i);
  const int n = J_.dim();
  const double phi = grid_.phi[p];
  const double psi = gauge_ * phi;
  StateVector v(n);
  for (int a = 0; a < n; ++a)
    v(a) = d_[t](a, index_of(J_, i)) * std::polar(1.0, -phi * magnetic(J_, a).value() - psi * i.value());
  return v;
}

Operator op_quantize_values(const CoherentFrame& frame, HalfInt i, const GridValues& values) {
  const HalfInt J = frame.spin();
  require_coherent_index(J, i);
  const SphereGrid& grid = frame.grid();
  if (values.rows() != grid.n_theta || values.cols() != grid.n_phi) throw ValidationError("symbol sampled on a different grid");
  const int n = J.dim();
  const int col = index_of(J, i);
  // Fourier modes in phi, shift = m_a - m_b ranges over -(n-1)..(n-1).
  Eigen::MatrixXcd modes(grid.n_phi, 2 * n - 1);
  for (int p = 0; p < grid.n_phi; ++p)
    for (int s = -(n - 1); s <= n - 1; ++s) modes(p, s + n - 1) = std::polar(1.0 / grid.n_phi, -grid.phi[p] * s);
  Operator op = Operator::Zero(n, n);
  for (int t = 0; t < grid.n_theta; ++t) {
    Eigen::RowVectorXcd F = values.row(t).matrix() * modes;
    const Eigen::VectorXd d = frame.small_d(t).col(col);
    const double w = n * grid.theta_weight[t];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) op(a, b) += (w * d(a) * d(b)) * F(b - a + n - 1);
  }
  return op;
}

Operator op_quantize(const CoherentFrame& frame, HalfInt i, const SphereFunction& f) {
  if (frame.grid().degree_exact < frame.spin().twice() + f.lmax())
    throw ValidationError("grid too coarse to quantize a degree-" + std::to_string(f.lmax()) + " symbol");
  return op_quantize_values(frame, i, synthesis(f, frame.grid()));
}

Operator op_quantize(HalfInt J, HalfInt i, const SphereFunction& f) {
  return op_quantize(CoherentFrame::for_band(J, f.lmax()), i, f);
}

GridValues husimi_offdiag(const CoherentFrame& frame, HalfInt a, HalfInt b, const Operator& rho) {
  const HalfInt J = frame.spin();
  require_coherent_index(J, a);
  require_coherent_index(J, b);
  const int n = J.dim();
  if (rho.rows() != n || rho.cols() != n) throw ValidationError("operator dimension does not match the spin");
  const SphereGrid& grid = frame.grid();
  const int ca = index_of(J, a), cb = index_of(J, b);
  Eigen::MatrixXcd modes(2 * n - 1, grid.n_phi);
  for (int s = -(n - 1); s <= n - 1; ++s)
    for (int p = 0; p < grid.n_phi; ++p)
      modes(s + n - 1, p) = std::polar(1.0, grid.phi[p] * (s + frame.gauge() * (a - b).value()));
  GridValues out(grid.n_theta, grid.n_phi);
  Eigen::RowVectorXcd G(2 * n - 1);
  for (int t = 0; t < grid.n_theta; ++t) {
    const Eigen::MatrixXd& d = frame.small_d(t);
    G.setZero();
    // m_x - m_y = y - x.
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) G(y - x + n - 1) += d(x, ca) * d(y, cb) * rho(x, y);
    out.row(t) = (G * modes).array();
  }
  return out;
}

GridValues husimi_values(const CoherentFrame& frame, HalfInt i, const Operator& rho) {
  return husimi_offdiag(frame, i, i, rho);
}

SphereFunction husimi(const CoherentFrame& frame, HalfInt i, const Operator& rho, int lout) {
  const HalfInt J = frame.spin();
  if (lout < J.twice()) throw ValidationError("Husimi band must be at least 2J");
  return analysis(husimi_values(frame, i, rho), lout, frame.grid(), J.twice());
}

SphereFunction husimi(HalfInt J, HalfInt i, const Operator& rho, int lout) {
  return husimi(CoherentFrame::for_band(J, lout), i, rho, lout);
}

Operator op_harmonic_from_cg(HalfInt J, HalfInt i, int l, int m) {
  require_coherent_index(J, i);
  const int n = J.dim();
  Operator op = Operator::Zero(n, n);
  if (l > J.twice() || std::abs(m) > l) return op;
  CGTable cg(J, J, HalfInt(l));
  const double radial = cg(HalfInt(0), i) * n / std::sqrt(2.0 * l + 1);
  for (int ia = 0; ia < n; ++ia)
    for (int ib = 0; ib < n; ++ib) {
      HalfInt a = magnetic(J, ia), b = magnetic(J, ib);
      if ((a - b) != HalfInt(m)) continue;
      const int parity = ((b - i).twice() / 2) % 2;
      op(ia, ib) = (parity ? -1.0 : 1.0) * radial * cg(HalfInt(m), a);
    }
  return op;
}

Operator op_quantize_from_cg(HalfInt J, HalfInt i, const SphereFunction& f) {
  Operator op = Operator::Zero(J.dim(), J.dim());
  for (int l = 0; l <= std::min(f.lmax(), J.twice()); ++l)
    for (int m = -l; m <= l; ++m) {
      cplx c = f.coeff(l, m);
      if (c != 0.0) op += c * op_harmonic_from_cg(J, i, l, m);
    }
  return op;
}

BerezinSpectrum berezin_spectrum(HalfInt J) {
  BerezinSpectrum s{J, {}};
  const double twoJ = J.twice();
  double log_b = 0.0;
  s.eigenvalues.push_back(1.0);
  for (int l = 1; l <= J.twice(); ++l) {
    log_b += std::log((twoJ - l + 1) / (twoJ + l + 1));
    s.eigenvalues.push_back(std::exp(log_b));
  }
  return s;
}

Eigen::MatrixXcd berezin_matrix(HalfInt J) {
  const int L = J.twice();
  const int N = SphereFunction::size_for(L);
  CoherentFrame frame = CoherentFrame::for_band(J, L);
  Eigen::MatrixXcd m(N, N);
  for (int l = 0; l <= L; ++l)
    for (int mm = -l; mm <= l; ++mm) {
      SphereFunction y = SphereFunction::harmonic(l, mm).with_lmax(L);
      m.col(SphereFunction::index(l, mm)) = husimi(frame, J, op_quantize(frame, J, y), L).coeffs();
    }
  return m;
}

CasimirSpectrum::CasimirSpectrum(HalfInt J) : J_(J) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(casimir_superop_matrix(J));
  vectors_ = es.eigenvectors();
  for (double lam : es.eigenvalues())
    degree_.push_back(static_cast<int>(std::lround((std::sqrt(1.0 + 4.0 * std::max(lam, 0.0)) - 1.0) / 2.0)));
}

Eigen::MatrixXcd CasimirSpectrum::superoperator(const std::function<double(int)>& g) const {
  Eigen::VectorXd diag(degree_.size());
  for (std::size_t k = 0; k < degree_.size(); ++k) diag(k) = g(degree_[k]);
  return vectors_ * diag.asDiagonal() * vectors_.adjoint();
}

Operator CasimirSpectrum::apply(const Operator& rho, const std::function<double(int)>& g) const {
  const int n = J_.dim();
  Eigen::VectorXd diag(degree_.size());
  for (std::size_t k = 0; k < degree_.size(); ++k) diag(k) = g(degree_[k]);
  Eigen::VectorXcd coords = vectors_.adjoint() * vec(rho);
  return unvec(vectors_ * (diag.asDiagonal() * coords), n, n);
}

InversionReport berezin_inversion_check(HalfInt J, const SphereFunction& f, double s, const Operator& rho) {
  if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("smoothness exponent must lie in [0, 1]");
  const int n = J.dim();
  if (rho.rows() != n || rho.cols() != n) throw ValidationError("operator dimension does not match the spin");
  const double N = n;
  const int band = std::max(f.lmax(), J.twice());
  CoherentFrame frame = CoherentFrame::for_band(J, band);
  CasimirSpectrum casimir(J);

  SphereFunction fb = f.with_lmax(band);
  SphereFunction hus_op_f = husimi(frame, J, op_quantize(frame, J, fb), band);
  SphereFunction err_f = fb - hus_op_f;
  SphereFunction lap_f = laplacian(fb);

  Operator op_hus_rho = op_quantize(frame, J, husimi(frame, J, rho, J.twice()));
  Operator err_rho = rho - op_hus_rho;
  Operator q_rho = casimir.apply(rho, [](int l) { return double(l) * (l + 1); });
  auto q_power = [&](double t) {
    return casimir.apply(rho, [t](int l) { return l == 0 ? (t == 0.0 ? 1.0 : 0.0) : std::pow(double(l) * (l + 1), t); });
  };

  InversionReport r{J, s, {}, {}, {}};
  r.checks.push_back({"function", err_f.l2_norm(), std::pow(N, -s) * neg_laplacian_power(fb, s).l2_norm()});
  r.checks.push_back({"operator", err_rho.norm(), std::pow(N, -s) * q_power(s).norm()});
  r.checks.push_back({"function_second_order", (err_f + (1.0 / N) * lap_f).l2_norm(),
                      std::pow(N, -1 - s) * neg_laplacian_power(fb, 1 + s).l2_norm()});
  r.checks.push_back({"operator_second_order", (err_rho - (1.0 / N) * q_rho).norm(),
                      std::pow(N, -1 - s) * q_power(1 + s).norm()});

  SphereGrid fine = make_grid(4 * band + 8);
  GridValues err_vals = synthesis(err_f, fine);
  GridValues reg_vals = synthesis(fb - 4.0 * lap_f, fine);
  Operator reg_rho = rho + 4.0 * q_rho;
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    double denom_f = lp_norm(reg_vals, p, fine);
    double denom_r = schatten_norm(reg_rho, p);
    r.constant_function[p] = denom_f > 0 ? N * lp_norm(err_vals, p, fine) / denom_f : 0.0;
    r.constant_operator[p] = denom_r > 0 ? N * schatten_norm(err_rho, p) / denom_r : 0.0;
  }
  return r;
}

SphereFunction StratonovichWeyl::symbol_of(const Operator& rho) const {
  return SphereFunction(J.twice(), symbol * vec(rho));
}

Operator StratonovichWeyl::quantize(const SphereFunction& f) const {
  const int n = J.dim();
  return unvec(quantizer * f.with_lmax(J.twice()).coeffs(), n, n);
}

StratonovichWeyl stratonovich_weyl(HalfInt J) {
  const int n = J.dim();
  const int L = J.twice();
  const int N = n * n;
  CoherentFrame frame = CoherentFrame::for_band(J, L);
  Eigen::MatrixXcd hus(N, N), op(N, N);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) hus.col(a + n * b) = husimi(frame, J, matrix_unit(n, a, b), L).coeffs();
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m)
      op.col(SphereFunction::index(l, m)) = vec(op_quantize(frame, J, SphereFunction::harmonic(l, m).with_lmax(L)));
  // Op Hus = sum_l b_l Pi_l on B(H_J), so its inverse square root is spectral in the Casimir degree.
  BerezinSpectrum spec = berezin_spectrum(J);
  Eigen::MatrixXcd inv_sqrt = CasimirSpectrum(J).superoperator([&](int l) { return 1.0 / std::sqrt(spec[l]); });
  return {J, hus * inv_sqrt, inv_sqrt * op};
}

}  // namespace spinsemi
