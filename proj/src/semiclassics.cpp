#include "spinsemi/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spinsemi/clebsch.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/quantize.hpp"
#include "spinsemi/su2_rep.hpp"

namespace spinsemi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDomainSlack = 1e-10;

double phi_at(const ScalarFunction& phi, double x) {
  if (!phi.in_domain(x, kDomainSlack)) throw DomainError(phi.name + " evaluated outside its domain at " + std::to_string(x));
  return phi(std::clamp(x, phi.lo, phi.hi));
}

double integrate_phi(const ScalarFunction& phi, const GridValues& values, const SphereGrid& grid) {
  double acc = 0.0;
  for (int t = 0; t < grid.n_theta; ++t) {
    double row = 0.0;
    for (int p = 0; p < grid.n_phi; ++p) row += phi_at(phi, values(t, p).real());
    acc += grid.weight(t) * row;
  }
  return acc;
}

double trace_phi(const ScalarFunction& phi, const Operator& h) {
  Eigen::VectorXd ev = hermitian_eigenvalues(h);
  double acc = 0.0;
  for (int k = 0; k < ev.size(); ++k) acc += phi_at(phi, ev(k));
  return acc;
}

double p_power(double base, double p) { return std::isinf(p) ? 1.0 : std::pow(base, 1.0 / p); }

double grad_norm_sq(const SphereFunction& f) {
  double acc = 0.0;
  for (int l = 1; l <= f.lmax(); ++l)
    for (int m = -l; m <= l; ++m) acc += l * (l + 1) * std::norm(f.coeff(l, m));
  return acc;
}

// ||(1 - 4 Lap) f||_1
double smoothed_l1(const SphereFunction& f, const SphereGrid& grid) {
  return lp_norm(apply_degree_multiplier(f, [](int l) { return 1.0 + 4.0 * l * (l + 1); }), 1.0, grid);
}

Operator symmetrized(const Operator& a) { return 0.5 * (a + a.adjoint()); }

void require_real(const SphereFunction& f, const char* what) {
  if (!f.is_real(1e-12)) throw ValidationError(std::string(what) + " must be real-valued");
}

void require_convex(const ScalarFunction& phi, double a, double b) {
  if (!(b > a)) return;
  constexpr int kSamples = 24;
  for (int u = 0; u <= kSamples; ++u)
    for (int v = u + 2; v <= kSamples; v += 2) {
      double x = a + (b - a) * u / kSamples, y = a + (b - a) * v / kSamples;
      double fx = phi_at(phi, x), fy = phi_at(phi, y), fm = phi_at(phi, 0.5 * (x + y));
      double scale = 1.0 + std::abs(fx) + std::abs(fy);
      if (fm > 0.5 * (fx + fy) + 1e-12 * scale)
        throw ValidationError(phi.name + " fails the midpoint convexity test on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
}

}  // namespace

double Bound::measured_constant() const {
  if (shape > 0.0) return lhs / shape;
  return lhs > 0.0 ? kInf : 0.0;
}

const Bound& BoundSet::operator[](const std::string& name) const {
  for (const auto& b : bounds)
    if (b.name == name) return b;
  throw ValidationError("no bound named " + name);
}

bool BoundSet::holds(double tol) const {
  return std::all_of(bounds.begin(), bounds.end(), [tol](const Bound& b) { return b.holds(tol); });
}

void BoundSet::add(std::string name, double lhs, double shape, std::optional<double> constant) {
  bounds.push_back(Bound{std::move(name), lhs, shape, constant});
}

BoundSet product_residuals(HalfInt J, const SphereFunction& f, const SphereFunction& g, double p, double p1, double p2) {
  auto inv = [](double q) { return std::isinf(q) ? 0.0 : 1.0 / q; };
  if (!(p >= 1 && p1 >= 1 && p2 >= 1) || std::abs(inv(p) - inv(p1) - inv(p2)) > 1e-12)
    throw ValidationError("exponents must satisfy 1/p = 1/p1 + 1/p2 with p, p1, p2 >= 1");
  const double n = J.dim();
  const int L = f.lmax() + g.lmax();
  SphereGrid grid = make_grid(2 * std::max(J.twice(), L) + 16);
  CoherentFrame frame(J, grid);

  Operator A = op_quantize(J, J, f), B = op_quantize(J, J, g);
  Operator AB = A * B;
  GridValues fv = synthesis(f, grid), gv = synthesis(g, grid);
  GridValues fg = fv * gv;
  SphereFunction fg_fn = analysis(fg, L, grid, L);
  Operator Afg = op_quantize(J, J, fg_fn);
  GridValues hus_ab = husimi_values(frame, J, AB);

  BoundSet out;
  const double sob2 = sobolev_norm(f, 2, p1, grid) * sobolev_norm(g, 2, p2, grid);
  out.add("product_husimi", lp_norm(GridValues(hus_ab - fg), p, grid), sob2 / n);
  out.add("product_operator", schatten_norm(AB - Afg, p) / p_power(n, p), sob2 / n);

  SphereGrid lip_grid = make_grid(std::max(2 * L, 16));
  const double lip = holder_seminorm(synthesis(f, lip_grid), 1.0, lip_grid) * holder_seminorm(synthesis(g, lip_grid), 1.0, lip_grid);
  out.add("product_symmetrized", schatten_norm(0.5 * (AB + B * A) - Afg, 1.0) / n, lip / n);

  GridValues pb = poisson_bracket(f, g, grid);
  GridValues gd = grad_dot(f, g, grid);
  GridValues lap_fg = synthesis(laplacian(fg_fn), grid);
  const cplx I(0.0, 1.0);
  const double sob4 = sobolev_norm(f, 4, 2.0, grid) * sobolev_norm(g, 4, 2.0, grid) / (n * n);
  GridValues target = fg + (I * pb - gd + lap_fg) / n;
  out.add("second_order_husimi", lp_norm(GridValues(hus_ab - target), 1.0, grid), sob4);
  SphereFunction star = analysis(GridValues(fg + (I * pb - gd) / n), L, grid, L);
  out.add("second_order_operator", schatten_norm(AB - op_quantize(J, J, star), 1.0) / n, sob4);
  Operator bracket = op_quantize(J, J, analysis(pb, L, grid, L));
  out.add("commutator", schatten_norm(AB - B * A - (2.0 * I / n) * bracket, 1.0) / n, sob4);
  return out;
}

double trace_of_function(HalfInt J, const ScalarFunction& phi, const SphereFunction& f) {
  require_real(f, "trace functional input");
  return trace_phi(phi, symmetrized(op_quantize(J, J, f))) / J.dim();
}

double classical_integral(const ScalarFunction& phi, const SphereFunction& f, int degree) {
  require_real(f, "classical integral input");
  SphereGrid grid = make_grid(std::max(degree, 4 * f.lmax() + 48));
  return integrate_phi(phi, synthesis(f, grid), grid);
}

TraceReport trace_residuals(HalfInt J, const ScalarFunction& phi, const SphereFunction& f) {
  TraceReport r;
  r.quantum = trace_of_function(J, phi, f);
  r.classical = classical_integral(phi, f);
  r.error = r.classical - r.quantum;
  const double n = J.dim();

  SphereGrid grid = make_grid(4 * f.lmax() + 48);
  Eigen::ArrayXXd vals = synthesis(f, grid).real();
  if (phi.curvature_bound) {
    double c2 = phi.curvature_bound(vals.minCoeff(), vals.maxCoeff());
    if (std::isfinite(c2)) r.bounds.add("curvature", std::abs(r.error), c2 * grad_norm_sq(f) / n, 1.0);
  }
  if (phi.convex) {
    r.bounds.add("convex_sign", -r.error, 0.0, 1.0);
    if (phi.holder_exponent && phi.holder_seminorm) {
      double a = *phi.holder_exponent;
      r.bounds.add("convex_holder", r.error, *phi.holder_seminorm * std::pow(smoothed_l1(f, grid), a) / std::pow(n, a));
    }
  }
  return r;
}

SphereFunction upper_symbol(HalfInt J, const Operator& rho) {
  BerezinSpectrum b = berezin_spectrum(J);
  SphereFunction g = husimi(J, J, rho, J.twice());
  return apply_degree_multiplier(g, [&b](int l) { return 1.0 / b[l]; });
}

SandwichReport berezin_lieb_gap(HalfInt J, const ScalarFunction& phi, const Operator& rho) {
  if (max_abs(rho - rho.adjoint()) > 1e-10) throw ValidationError("Berezin-Lieb comparison needs a Hermitian operator");
  SphereFunction f = upper_symbol(J, rho);
  SphereGrid grid = make_grid(8 * std::max(J.twice(), 1) + 48);
  GridValues g = husimi_values(CoherentFrame(J, grid), J, rho);
  GridValues fv = synthesis(f, grid);
  Eigen::VectorXd ev = hermitian_eigenvalues(symmetrized(rho));
  double lo = std::min({g.real().minCoeff(), fv.real().minCoeff(), ev.minCoeff()});
  double hi = std::max({g.real().maxCoeff(), fv.real().maxCoeff(), ev.maxCoeff()});
  require_convex(phi, lo, hi);
  SandwichReport r;
  r.lower = integrate_phi(phi, g, grid);
  r.middle = trace_phi(phi, symmetrized(rho)) / J.dim();
  r.upper = integrate_phi(phi, fv, grid);
  return r;
}

SandwichReport berezin_lieb_gap(HalfInt J, const ScalarFunction& phi, const SphereFunction& f) {
  require_real(f, "upper symbol");
  Operator rho = symmetrized(op_quantize(J, J, f));
  SphereGrid grid = make_grid(8 * std::max({J.twice(), f.lmax(), 1}) + 48);
  GridValues g = husimi_values(CoherentFrame(J, grid), J, rho);
  GridValues fv = synthesis(f, grid);
  require_convex(phi, std::min(g.real().minCoeff(), fv.real().minCoeff()), std::max(g.real().maxCoeff(), fv.real().maxCoeff()));
  SandwichReport r;
  r.lower = integrate_phi(phi, g, grid);
  r.middle = trace_phi(phi, rho) / J.dim();
  r.upper = integrate_phi(phi, fv, grid);
  return r;
}

ChannelSpec ChannelSpec::vertex_index(HalfInt J, HalfInt K, HalfInt i) {
  ChannelSpec c{J, K, {{vertex_for_index(K, i), 1.0}}};
  validate_weights(J, K, c.weights);
  return c;
}

ChannelSpec ChannelSpec::mixture(HalfInt J, HalfInt K, ChannelWeights weights) {
  validate_weights(J, K, weights);
  return ChannelSpec{J, K, std::move(weights)};
}

HalfInt ChannelSpec::index() const {
  if (!is_vertex()) throw ValidationError("channel is not a vertex");
  return index_for_vertex(K, weights.begin()->first);
}

Operator ChannelSpec::apply(const Operator& rho) const { return channel_mix(J, K, weights, rho); }

GridValues mixed_husimi_values(const ChannelSpec& channel, const Operator& rho, const SphereGrid& grid) {
  CoherentFrame frame(channel.J, grid);
  GridValues h = GridValues::Zero(grid.n_theta, grid.n_phi);
  for (auto [M, lam] : channel.weights)
    if (lam != 0.0) h += lam * husimi_values(frame, -index_for_vertex(channel.K, M), rho);
  return h;
}

std::vector<BoundSet> channel_residuals(const ChannelSpec& channel, const Operator& rho, const std::vector<double>& ps) {
  const HalfInt J = channel.J, K = channel.K;
  if (!channel.is_vertex() && K.twice() < 2 * J.twice())
    throw DomainError("mixture bounds require K >= 2J");
  const double nJ = J.dim(), nK = K.dim(), c = nK / nJ;
  SphereGrid grid = make_grid(2 * K.twice() + J.twice() + 16);
  CoherentFrame frameK(K, grid);
  GridValues h = mixed_husimi_values(channel, rho, grid);
  Operator out = channel.apply(rho);
  Operator op_diff = c * out - op_quantize_values(frameK, K, h);
  GridValues hus_diff = c * husimi_values(frameK, K, out) - h;

  std::vector<BoundSet> all;
  for (double p : ps) {
    const double lhs_op = schatten_norm(op_diff, p) / p_power(c, p);
    const double lhs_hus = p_power(nJ, p) * lp_norm(hus_diff, p, grid);
    const double rho_p = schatten_norm(rho, p);
    BoundSet r;
    if (channel.is_vertex()) {
      const double i = channel.index().value(), j = J.value(), k = K.value();
      const double denom = 2 * k - j + i + 1;
      r.add("op_approx", lhs_op, (j - i) * (j + i + 1) / denom * rho_p, 12.0);
      r.add("hus_approx", lhs_hus, (j + i) * (j - i + 1) / denom * rho_p, 2.0);
    } else {
      r.add("op_approx", lhs_op, nJ * nJ / nK * rho_p, 6.0);
      r.add("hus_approx", lhs_hus, nJ * nJ / nK * rho_p, 1.0);
    }
    all.push_back(std::move(r));
  }
  return all;
}

BoundSet channel_residuals(const ChannelSpec& channel, const Operator& rho, double p) {
  return channel_residuals(channel, rho, std::vector<double>{p}).front();
}

TraceReport channel_trace_residuals(const ChannelSpec& channel, const ScalarFunction& phi, const Operator& rho) {
  require_density(rho, "channel input");
  const HalfInt J = channel.J, K = channel.K;
  const double nJ = J.dim(), nK = K.dim();
  TraceReport r;
  r.quantum = trace_phi(phi, symmetrized((nK / nJ) * channel.apply(rho))) / nK;
  SphereGrid grid = make_grid(8 * J.twice() + 64);
  r.classical = integrate_phi(phi, mixed_husimi_values(channel, rho, grid), grid);
  r.error = r.quantum - r.classical;

  std::optional<double> ratio, constant;
  if (channel.is_vertex()) {
    const double i = channel.index().value(), j = J.value();
    ratio = (j - std::abs(i) + 1) / (2 * K.value() - j + i + 1);
    constant = 10.0;
  } else if (K.twice() >= 2 * J.twice()) {
    ratio = nJ / nK;
    constant = 4.0;
  }
  if (!ratio) return r;
  if (phi.curvature_bound) {
    double c2 = phi.curvature_bound(0.0, 1.0);
    if (std::isfinite(c2)) r.bounds.add("curvature", std::abs(r.error), c2 * *ratio, constant);
  }
  if (phi.convex && phi.holder_exponent && phi.holder_seminorm)
    r.bounds.add("convex_holder", std::abs(r.error), *phi.holder_seminorm * std::pow(*ratio, *phi.holder_exponent));
  return r;
}

double EntropyReport::measured_constant() const {
  if (envelope_shape > 0.0) return std::abs(error) / envelope_shape;
  return error == 0.0 ? 0.0 : kInf;
}

EntropyReport entropy_expansion(const ChannelSpec& channel, const Operator& rho) {
  require_density(rho, "channel input");
  const HalfInt J = channel.J, K = channel.K;
  if (K.twice() < 2) throw DomainError("entropy expansion requires K >= 1");
  if (!channel.is_vertex() && K.twice() < 2 * J.twice()) throw DomainError("mixture entropy expansion requires K >= 2J");
  const double nJ = J.dim(), nK = K.dim();
  SphereGrid grid = make_grid(8 * J.twice() + 64);
  EntropyReport r;
  r.entropy = von_neumann_entropy(channel.apply(rho));
  r.approximation = std::log(nK / nJ) - nJ * integrate_phi(xlogx_fn(), mixed_husimi_values(channel, rho, grid), grid);
  r.error = r.entropy - r.approximation;
  if (channel.is_vertex()) {
    const double i = channel.index().value(), j = J.value();
    r.envelope_shape = std::log(nK) * nJ * (j - std::abs(i) + 1) / (2 * K.value() - j + i + 1);
  } else {
    r.envelope_shape = std::log(nK) * nJ * nJ / nK;
  }
  return r;
}

RateFit rate_fit(const std::vector<double>& xs, const std::vector<double>& errs, int discard) {
  if (xs.size() != errs.size()) throw ValidationError("rate fit needs matching x and error lists");
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  if (discard < 0 || order.size() < std::size_t(discard) + 4)
    throw ValidationError("rate fit needs at least 4 points after discarding the smallest ones");
  std::vector<double> lx, ly;
  for (std::size_t k = discard; k < order.size(); ++k) {
    double x = xs[order[k]], e = errs[order[k]];
    if (!(x > 0.0) || !(e > 0.0) || !std::isfinite(x) || !std::isfinite(e))
      throw ValidationError("rate fit needs positive finite abscissae and errors");
    lx.push_back(std::log(x));
    ly.push_back(std::log(e));
  }
  const double n = lx.size();
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n, my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
    syy += (ly[k] - my) * (ly[k] - my);
  }
  if (sxx < 1e-24) throw ValidationError("rate fit needs at least two distinct abscissae");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points_used = int(lx.size());
  return fit;
}

}  // namespace spinsemi
