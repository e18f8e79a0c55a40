#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spinsemi/channels.hpp"
#include "spinsemi/half_int.hpp"
#include "spinsemi/linalg.hpp"
#include "spinsemi/scalar_fn.hpp"
#include "spinsemi/sphere_fn.hpp"

namespace spinsemi {

// One inequality lhs <= constant * shape.  Without a known constant the bound is only measured.
struct Bound {
  std::string name;
  double lhs = 0.0;
  double shape = 0.0;
  std::optional<double> constant;

  bool asserted() const { return constant.has_value(); }
  double rhs() const { return constant ? *constant * shape : std::numeric_limits<double>::infinity(); }
  double slack() const { return rhs() - lhs; }
  bool holds(double tol = 1e-10) const { return !asserted() || lhs <= rhs() + tol; }
  double measured_constant() const;
};

struct BoundSet {
  std::vector<Bound> bounds;

  const Bound& operator[](const std::string& name) const;
  bool holds(double tol = 1e-10) const;
  void add(std::string name, double lhs, double shape, std::optional<double> constant = std::nullopt);
};

// Residuals of Op(f)Op(g) against Op(fg) and the first-order star product.  Requires 1/p = 1/p1 + 1/p2.
//   product_husimi        ||Hus(Op f Op g) - fg||_p
//   product_operator      (2J+1)^{-1/p} ||Op f Op g - Op(fg)||_p
//   product_symmetrized   (2J+1)^{-1} ||(Op f Op g + Op g Op f)/2 - Op(fg)||_1   (Lipschitz data of f, g)
//   second_order_husimi   ||Hus(Op f Op g) - (fg + (i{f,g} - grad f.grad g + Lap(fg))/(2J+1))||_1
//   second_order_operator (2J+1)^{-1} ||Op f Op g - Op(fg + (i{f,g} - grad f.grad g)/(2J+1))||_1
//   commutator            (2J+1)^{-1} ||[Op f, Op g] - 2i/(2J+1) Op{f,g}||_1
BoundSet product_residuals(HalfInt J, const SphereFunction& f, const SphereFunction& g, double p, double p1, double p2);

// (2J+1)^{-1} Tr phi(Op_J f) by spectral calculus.
double trace_of_function(HalfInt J, const ScalarFunction& phi, const SphereFunction& f);
// Integral of phi(f) over the sphere with normalized measure.
double classical_integral(const ScalarFunction& phi, const SphereFunction& f, int degree = 0);

struct TraceReport {
  double quantum = 0.0;
  double classical = 0.0;
  double error = 0.0;  // classical - quantum
  BoundSet bounds;
};

// Bounds: "curvature" (|E| <= sup|phi''| ||grad f||_2^2 / (2J+1), when phi'' is bounded on the range of f),
// "convex_sign" (E >= 0 for convex phi), "convex_holder" (measured, needs Holder data of phi).
TraceReport trace_residuals(HalfInt J, const ScalarFunction& phi, const SphereFunction& f);

struct SandwichReport {
  double lower = 0.0;   // integral of phi(Hus rho)
  double middle = 0.0;  // Tr phi(rho) / (2J+1)
  double upper = 0.0;   // integral of phi(f), rho = Op f
  bool ordered(double slack = 1e-10) const { return lower <= middle + slack && middle <= upper + slack; }
};

// Rejects phi failing a midpoint convexity test on the relevant range.
SandwichReport berezin_lieb_gap(HalfInt J, const ScalarFunction& phi, const Operator& rho);
SandwichReport berezin_lieb_gap(HalfInt J, const ScalarFunction& phi, const SphereFunction& f);
// Upper symbol of degree <= 2J obtained by inverting the Berezin transform.
SphereFunction upper_symbol(HalfInt J, const Operator& rho);

// A vertex Phi^{K+i} (given by its index i) or a mixture of vertices.
struct ChannelSpec {
  HalfInt J, K;
  ChannelWeights weights;

  static ChannelSpec vertex_index(HalfInt J, HalfInt K, HalfInt i);
  static ChannelSpec mixture(HalfInt J, HalfInt K, ChannelWeights weights);
  bool is_vertex() const { return weights.size() == 1; }
  HalfInt index() const;  // index of a vertex
  Operator apply(const Operator& rho) const;
};

// Vertex: "op_approx" with constant 12 and "hus_approx" with constant 2.
// Mixture (requires K >= 2J): "op_approx" with constant 6 and "hus_approx" with constant 1.
BoundSet channel_residuals(const ChannelSpec& channel, const Operator& rho, double p);
std::vector<BoundSet> channel_residuals(const ChannelSpec& channel, const Operator& rho, const std::vector<double>& ps);

// (2K+1)^{-1} Tr phi(((2K+1)/(2J+1)) Phi(rho)) - integral of phi(Hus^{(lambda)} rho), with the curvature bound
// (constant 10 for vertices, 4 for mixtures with K >= 2J) and a measured Holder bound for convex phi.
TraceReport channel_trace_residuals(const ChannelSpec& channel, const ScalarFunction& phi, const Operator& rho);

struct EntropyReport {
  double entropy = 0.0;
  double approximation = 0.0;  // log((2K+1)/(2J+1)) - (2J+1) integral of h log h
  double error = 0.0;          // entropy - approximation
  double envelope_shape = 0.0; // envelope without its constant
  double measured_constant() const;
};

EntropyReport entropy_expansion(const ChannelSpec& channel, const Operator& rho);

// Husimi function of rho for the channel's weights: sum_i lambda_i Hus^{-i}, sampled on a grid.
GridValues mixed_husimi_values(const ChannelSpec& channel, const Operator& rho, const SphereGrid& grid);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points_used = 0;
};

// Least squares of log(err) against log(x) after dropping the `discard` smallest x values.
RateFit rate_fit(const std::vector<double>& xs, const std::vector<double>& errs, int discard = 0);

}  // namespace spinsemi
