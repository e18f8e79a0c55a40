#include "spinsemi/sphere_fn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_legendre.h>

#include "spinsemi/errors.hpp"
#include "spinsemi/half_int.hpp"
#include "spinsemi/su2_rep.hpp"

namespace spinsemi {

namespace {

constexpr double kPi = std::numbers::pi;

// Normalised associated Legendre values N_lm(x), m >= 0, with Y_lm = N_lm(cos theta) e^{i m phi}.
std::vector<double> legendre_table(int lmax, double x) {
  std::vector<double> out(gsl_sf_legendre_array_n(lmax));
  gsl_sf_legendre_array_e(GSL_SF_LEGENDRE_SPHARM, lmax, x, -1.0, out.data());
  const double scale = std::sqrt(4.0 * kPi);
  for (double& v : out) v *= scale;
  return out;
}

inline double legendre_at(const std::vector<double>& table, int l, int m) {
  return table[gsl_sf_legendre_array_index(l, m)];
}

void require_grid(const SphereGrid& grid, int degree, const char* what) {
  if (grid.degree_exact < degree)
    throw ValidationError(std::string(what) + ": grid resolves degree " + std::to_string(grid.degree_exact) +
                          ", need " + std::to_string(degree));
}

}  // namespace

Eigen::Vector3d SphereGrid::point(int t, int p) const {
  double s = std::sqrt(std::max(0.0, 1.0 - cos_theta[t] * cos_theta[t]));
  return {s * std::cos(phi[p]), s * std::sin(phi[p]), cos_theta[t]};
}

namespace {

std::pair<long double, long double> legendre_with_derivative(int n, long double x) {
  long double p0 = 1, p1 = x;
  for (int k = 2; k <= n; ++k) {
    long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1)};
}

}  // namespace

SphereGrid make_grid(int degree_needed) {
  if (degree_needed < 0) throw ValidationError("grid degree must be nonnegative");
  SphereGrid g;
  g.n_theta = (degree_needed + 2) / 2 + 1;  // ceil((d+1)/2) + 1
  g.n_phi = degree_needed + 2;
  g.degree_exact = std::min(2 * g.n_theta - 1, g.n_phi - 1);
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(g.n_theta);
  std::vector<std::pair<double, double>> nodes(g.n_theta);
  for (int t = 0; t < g.n_theta; ++t) gsl_integration_glfixed_point(-1.0, 1.0, t, &nodes[t].first, &nodes[t].second, table);
  gsl_integration_glfixed_table_free(table);
  // Polish nodes and weights: untabulated orders come back accurate to only about 1e-11.
  for (auto& [x, w] : nodes) {
    long double xl = x, dp = 1;
    for (int it = 0; it < 3; ++it) {
      auto [pn, d] = legendre_with_derivative(g.n_theta, xl);
      xl -= pn / d;
      dp = d;
    }
    dp = legendre_with_derivative(g.n_theta, xl).second;
    x = double(xl);
    w = double(2.0L / ((1.0L - xl * xl) * dp * dp));
  }
  // North pole first.
  std::sort(nodes.begin(), nodes.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (auto& [x, w] : nodes) {
    g.cos_theta.push_back(x);
    g.theta.push_back(std::acos(x));
    g.theta_weight.push_back(0.5 * w);
  }
  for (int p = 0; p < g.n_phi; ++p) g.phi.push_back(2.0 * kPi * p / g.n_phi);
  return g;
}

SphereFunction::SphereFunction(int lmax) : lmax_(lmax), c_(Eigen::VectorXcd::Zero(size_for(lmax))) {
  if (lmax < 0) throw ValidationError("negative band limit");
}

SphereFunction::SphereFunction(int lmax, Eigen::VectorXcd coeffs) : lmax_(lmax), c_(std::move(coeffs)) {
  if (lmax < 0 || c_.size() != size_for(lmax)) throw ValidationError("coefficient count does not match band limit");
}

SphereFunction SphereFunction::constant(cplx c) {
  SphereFunction f(0);
  f.c_(0) = c;
  return f;
}

SphereFunction SphereFunction::harmonic(int l, int m, cplx c) {
  if (l < 0 || std::abs(m) > l) throw ValidationError("harmonic index out of range");
  SphereFunction f(l);
  f.c_(index(l, m)) = c;
  return f;
}

// w_z = Y_10/sqrt3, w_x +- i w_y = -+ sqrt(2/3) Y_1,+-1.
SphereFunction SphereFunction::omega_z() { return harmonic(1, 0, 1.0 / std::sqrt(3.0)); }

SphereFunction SphereFunction::omega_x() {
  SphereFunction f(1);
  const double a = 1.0 / std::sqrt(6.0);
  f.coeff_ref(1, -1) = a;
  f.coeff_ref(1, 1) = -a;
  return f;
}

SphereFunction SphereFunction::omega_y() {
  SphereFunction f(1);
  const double a = 1.0 / std::sqrt(6.0);
  f.coeff_ref(1, -1) = cplx(0, a);
  f.coeff_ref(1, 1) = cplx(0, a);
  return f;
}

cplx SphereFunction::coeff(int l, int m) const {
  if (l < 0 || l > lmax_ || std::abs(m) > l) return 0.0;
  return c_(index(l, m));
}

SphereFunction SphereFunction::with_lmax(int lmax) const {
  SphereFunction out(lmax);
  int n = std::min(size_for(lmax), size_for(lmax_));
  out.c_.head(n) = c_.head(n);
  return out;
}

bool SphereFunction::is_real(double tol) const {
  for (int l = 0; l <= lmax_; ++l)
    for (int m = 0; m <= l; ++m) {
      cplx mirrored = (m % 2 ? -1.0 : 1.0) * std::conj(coeff(l, m));
      if (std::abs(coeff(l, -m) - mirrored) > tol) return false;
    }
  return true;
}

SphereFunction SphereFunction::conj() const {
  SphereFunction out(lmax_);
  for (int l = 0; l <= lmax_; ++l)
    for (int m = -l; m <= l; ++m) out.coeff_ref(l, m) = ((m % 2) ? -1.0 : 1.0) * std::conj(coeff(l, -m));
  return out;
}

cplx SphereFunction::evaluate(const Eigen::Vector3d& omega) const {
  auto [theta, phi] = angles_of(omega);
  return (harmonics_at(lmax_, std::cos(theta), phi).array() * c_.array()).sum();
}

SphereFunction& SphereFunction::operator+=(const SphereFunction& o) {
  if (o.lmax_ > lmax_) *this = with_lmax(o.lmax_);
  c_.head(o.c_.size()) += o.c_;
  return *this;
}

SphereFunction& SphereFunction::operator-=(const SphereFunction& o) {
  if (o.lmax_ > lmax_) *this = with_lmax(o.lmax_);
  c_.head(o.c_.size()) -= o.c_;
  return *this;
}

SphereFunction& SphereFunction::operator*=(cplx s) {
  c_ *= s;
  return *this;
}

Eigen::VectorXcd harmonics_at(int lmax, double cos_theta, double phi) {
  std::vector<double> table = legendre_table(lmax, std::clamp(cos_theta, -1.0, 1.0));
  Eigen::VectorXcd y(SphereFunction::size_for(lmax));
  for (int l = 0; l <= lmax; ++l)
    for (int m = 0; m <= l; ++m) {
      cplx v = legendre_at(table, l, m) * std::polar(1.0, m * phi);
      y(SphereFunction::index(l, m)) = v;
      if (m > 0) y(SphereFunction::index(l, -m)) = ((m % 2) ? -1.0 : 1.0) * std::conj(v);
    }
  return y;
}

GridValues synthesis(const SphereFunction& f, const SphereGrid& grid) {
  const int L = f.lmax();
  GridValues out(grid.n_theta, grid.n_phi);
  Eigen::MatrixXcd fourier(2 * L + 1, grid.n_phi);
  for (int m = -L; m <= L; ++m)
    for (int p = 0; p < grid.n_phi; ++p) fourier(m + L, p) = std::polar(1.0, m * grid.phi[p]);
  Eigen::RowVectorXcd g(2 * L + 1);
  for (int t = 0; t < grid.n_theta; ++t) {
    std::vector<double> table = legendre_table(L, grid.cos_theta[t]);
    g.setZero();
    for (int l = 0; l <= L; ++l)
      for (int m = 0; m <= l; ++m) {
        double n = legendre_at(table, l, m);
        g(m + L) += f.coeff(l, m) * n;
        if (m > 0) g(-m + L) += f.coeff(l, -m) * (((m % 2) ? -1.0 : 1.0) * n);
      }
    out.row(t) = (g * fourier).array();
  }
  return out;
}

SphereFunction analysis(const GridValues& values, int lmax, const SphereGrid& grid, int band) {
  if (values.rows() != grid.n_theta || values.cols() != grid.n_phi) throw ValidationError("analysis: shape mismatch");
  require_grid(grid, lmax + (band < 0 ? lmax : band), "analysis");
  const int L = lmax;
  Eigen::MatrixXcd fourier(grid.n_phi, 2 * L + 1);
  for (int m = -L; m <= L; ++m)
    for (int p = 0; p < grid.n_phi; ++p) fourier(p, m + L) = std::polar(1.0 / grid.n_phi, -m * grid.phi[p]);
  SphereFunction f(L);
  for (int t = 0; t < grid.n_theta; ++t) {
    Eigen::RowVectorXcd h = values.row(t).matrix() * fourier;
    std::vector<double> table = legendre_table(L, grid.cos_theta[t]);
    const double w = grid.theta_weight[t];
    for (int l = 0; l <= L; ++l)
      for (int m = 0; m <= l; ++m) {
        double n = w * legendre_at(table, l, m);
        f.coeff_ref(l, m) += n * h(m + L);
        if (m > 0) f.coeff_ref(l, -m) += (((m % 2) ? -1.0 : 1.0) * n) * h(-m + L);
      }
  }
  return f;
}

SphereFunction apply_degree_multiplier(const SphereFunction& f, const std::function<double(int)>& g) {
  SphereFunction out = f;
  for (int l = 0; l <= f.lmax(); ++l) {
    double s = g(l);
    out.coeffs().segment(l * l, 2 * l + 1) *= s;
  }
  return out;
}

SphereFunction laplacian(const SphereFunction& f) {
  return apply_degree_multiplier(f, [](int l) { return -double(l) * (l + 1); });
}

SphereFunction neg_laplacian_power(const SphereFunction& f, double s) {
  return apply_degree_multiplier(f, [s](int l) {
    if (l == 0) return s == 0.0 ? 1.0 : 0.0;
    return std::pow(double(l) * (l + 1), s);
  });
}

SphereFunction band_truncation(const SphereFunction& f, int L) {
  SphereFunction out(std::max(L, 0));
  if (L < 0 || L > f.lmax()) return out;
  out.coeffs().segment(L * L, 2 * L + 1) = f.coeffs().segment(L * L, 2 * L + 1);
  return out;
}

GridValues band_projection_kernel(const GridValues& values, int L, const SphereGrid& grid) {
  GridValues out = GridValues::Zero(grid.n_theta, grid.n_phi);
  std::vector<Eigen::Vector3d> pts;
  std::vector<double> w;
  std::vector<cplx> v;
  for (int t = 0; t < grid.n_theta; ++t)
    for (int p = 0; p < grid.n_phi; ++p) {
      pts.push_back(grid.point(t, p));
      w.push_back(grid.weight(t));
      v.push_back(values(t, p));
    }
  const std::size_t n = pts.size();
  for (std::size_t a = 0; a < n; ++a) {
    cplx acc = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      double x = std::clamp(pts[a].dot(pts[b]), -1.0, 1.0);
      acc += w[b] * std::legendre(L, x) * v[b];
    }
    out(a / grid.n_phi, a % grid.n_phi) = double(2 * L + 1) * acc;
  }
  return out;
}

SphereFunction raising(const SphereFunction& f) {
  SphereFunction out(f.lmax());
  for (int l = 0; l <= f.lmax(); ++l)
    for (int m = -l; m < l; ++m) out.coeff_ref(l, m + 1) = std::sqrt(double(l - m) * (l + m + 1)) * f.coeff(l, m);
  return out;
}

SphereFunction lowering(const SphereFunction& f) {
  SphereFunction out(f.lmax());
  for (int l = 0; l <= f.lmax(); ++l)
    for (int m = -l + 1; m <= l; ++m) out.coeff_ref(l, m - 1) = std::sqrt(double(l + m) * (l - m + 1)) * f.coeff(l, m);
  return out;
}

SphereFunction angular_momentum(const SphereFunction& f, Axis axis) {
  switch (axis) {
    case Axis::z: {
      SphereFunction out(f.lmax());
      for (int l = 0; l <= f.lmax(); ++l)
        for (int m = -l; m <= l; ++m) out.coeff_ref(l, m) = double(m) * f.coeff(l, m);
      return out;
    }
    case Axis::x:
      return 0.5 * (raising(f) + lowering(f));
    case Axis::y:
      return cplx(0, -0.5) * (raising(f) - lowering(f));
  }
  return f;
}

GridValues pointwise_product_values(const SphereFunction& f, const SphereFunction& g, const SphereGrid& grid) {
  return synthesis(f, grid) * synthesis(g, grid);
}

SphereFunction product(const SphereFunction& f, const SphereFunction& g) {
  const int L = f.lmax() + g.lmax();
  SphereGrid grid = make_grid(2 * L);
  return analysis(pointwise_product_values(f, g, grid), L, grid);
}

GridValues grad_dot(const SphereFunction& f, const SphereFunction& g, const SphereGrid& grid) {
  require_grid(grid, 2 * (f.lmax() + g.lmax()), "grad_dot");
  SphereFunction fg = product(f, g);
  GridValues lap_fg = synthesis(laplacian(fg), grid);
  return 0.5 * (lap_fg - synthesis(f, grid) * synthesis(laplacian(g), grid) -
                synthesis(g, grid) * synthesis(laplacian(f), grid));
}

GridValues poisson_bracket(const SphereFunction& f, const SphereFunction& g, const SphereGrid& grid) {
  require_grid(grid, 2 * (f.lmax() + g.lmax()), "poisson_bracket");
  const Axis axes[3] = {Axis::x, Axis::y, Axis::z};
  GridValues lf[3], lg[3];
  for (int j = 0; j < 3; ++j) {
    lf[j] = synthesis(angular_momentum(f, axes[j]), grid);
    lg[j] = synthesis(angular_momentum(g, axes[j]), grid);
  }
  GridValues out = GridValues::Zero(grid.n_theta, grid.n_phi);
  for (int t = 0; t < grid.n_theta; ++t)
    for (int p = 0; p < grid.n_phi; ++p) {
      Eigen::Vector3d w = grid.point(t, p);
      Eigen::Vector3cd a(lf[0](t, p), lf[1](t, p), lf[2](t, p));
      Eigen::Vector3cd b(lg[0](t, p), lg[1](t, p), lg[2](t, p));
      out(t, p) = -w.cast<cplx>().dot(a.cross(b));
    }
  return out;
}

cplx integrate_complex(const GridValues& values, const SphereGrid& grid) {
  cplx acc = 0.0;
  for (int t = 0; t < grid.n_theta; ++t) acc += grid.weight(t) * values.row(t).sum();
  return acc;
}

double integrate(const GridValues& values, const SphereGrid& grid) { return integrate_complex(values, grid).real(); }

double lp_norm(const GridValues& values, double p, const SphereGrid& grid) {
  if (!(p >= 1.0)) throw ValidationError("L^p exponent must be >= 1");
  Eigen::ArrayXXd a = values.abs();
  if (std::isinf(p)) return a.size() ? a.maxCoeff() : 0.0;
  double acc = 0.0;
  for (int t = 0; t < grid.n_theta; ++t) acc += grid.weight(t) * a.row(t).pow(p).sum();
  return std::pow(acc, 1.0 / p);
}

double lp_norm(const SphereFunction& f, double p, const SphereGrid& grid) { return lp_norm(synthesis(f, grid), p, grid); }

double sobolev_norm(const SphereFunction& f, int k, double p, const SphereGrid& grid) {
  if (k < 0 || k > 4) throw ValidationError("Sobolev order must lie in 0..4");
  if (!(p >= 1.0)) throw ValidationError("Sobolev exponent must be >= 1");
  const Axis axes[3] = {Axis::x, Axis::y, Axis::z};
  std::vector<SphereFunction> words{f};
  double total = 0.0;
  for (int n = 0; n <= k; ++n) {
    if (n > 0) {
      std::vector<SphereFunction> next;
      next.reserve(words.size() * 3);
      for (const auto& w : words)
        for (Axis a : axes) next.push_back(angular_momentum(w, a));
      words = std::move(next);
    }
    Eigen::ArrayXXd mag2 = Eigen::ArrayXXd::Zero(grid.n_theta, grid.n_phi);
    for (const auto& w : words) mag2 += synthesis(w, grid).abs2();
    double norm_n = lp_norm(GridValues(mag2.sqrt().cast<cplx>()), p, grid);
    total = std::isinf(p) ? std::max(total, norm_n) : total + std::pow(norm_n, p);
  }
  return std::isinf(p) ? total : std::pow(total, 1.0 / p);
}

double holder_seminorm(const GridValues& values, double alpha, const SphereGrid& grid) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("Holder exponent must lie in (0, 1]");
  std::vector<Eigen::Vector3d> pts;
  std::vector<cplx> v;
  for (int t = 0; t < grid.n_theta; ++t)
    for (int p = 0; p < grid.n_phi; ++p) {
      pts.push_back(grid.point(t, p));
      v.push_back(values(t, p));
    }
  double best = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      double d = (pts[a] - pts[b]).norm();
      if (d < 1e-14) continue;
      best = std::max(best, std::abs(v[a] - v[b]) / std::pow(d, alpha));
    }
  return best;
}

GridValues compose_values(const ScalarFunction& phi, const GridValues& values) {
  GridValues out(values.rows(), values.cols());
  const double scale = std::max(1.0, values.abs().maxCoeff());
  for (Eigen::Index t = 0; t < values.rows(); ++t)
    for (Eigen::Index p = 0; p < values.cols(); ++p) {
      cplx v = values(t, p);
      if (std::abs(v.imag()) > 1e-10 * scale) throw DomainError(phi.name + ": argument is not real");
      double x = v.real();
      if (!phi.in_domain(x, 1e-13 * scale))
        throw DomainError(phi.name + ": value " + std::to_string(x) + " outside the domain");
      x = std::clamp(x, phi.lo, phi.hi);
      out(t, p) = phi(x);
    }
  return out;
}

ComposeResult compose(const ScalarFunction& phi, const SphereFunction& f, const SphereGrid& grid, int lout) {
  GridValues v = compose_values(phi, synthesis(f, grid));
  // phi(f) is not band limited in general; the analysis is a quadrature projection.
  require_grid(grid, 2 * lout, "compose");
  SphereFunction out = analysis(v, lout, grid, lout);
  SphereGrid fine = make_grid(2 * grid.degree_exact + 2);
  GridValues exact = compose_values(phi, synthesis(f, fine));
  double residual = (synthesis(out, fine) - exact).abs().maxCoeff();
  return {out, residual};
}

Eigen::Matrix3d rotation_matrix(double phi, double theta, double psi) {
  auto rz = [](double a) {
    Eigen::Matrix3d r;
    r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return r;
  };
  Eigen::Matrix3d ry;
  ry << std::cos(theta), 0, std::sin(theta), 0, 1, 0, -std::sin(theta), 0, std::cos(theta);
  return rz(phi) * ry * rz(psi);
}

SphereFunction rotate(const SphereFunction& f, double phi, double theta, double psi) {
  SphereFunction out(f.lmax());
  for (int l = 0; l <= f.lmax(); ++l) {
    Operator d = wigner_rotation(HalfInt(l), phi, theta, psi);
    // Basis order of the rotation is m = l..-l; coefficients are stored m = -l..l.
    Eigen::VectorXcd in(2 * l + 1);
    for (int k = 0; k <= 2 * l; ++k) in(k) = f.coeff(l, l - k);
    Eigen::VectorXcd res = d * in;
    for (int k = 0; k <= 2 * l; ++k) out.coeff_ref(l, l - k) = res(k);
  }
  return out;
}

}  // namespace spinsemi
