#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace spinsemi {

// A real function of one variable together with the metadata the trace bounds consume.
// Nothing here is derived symbolically; each registry entry supplies its own data.
struct ScalarFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;  // optional, used by the entropy gradient
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  // sup |phi''| over [a, b]; returns +inf where phi'' is unbounded.
  std::function<double(double, double)> curvature_bound;
  std::optional<double> holder_exponent;
  std::optional<double> holder_seminorm;
  bool convex = false;
  bool affine = false;

  double operator()(double x) const { return value(x); }
  bool in_domain(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

ScalarFunction identity_fn();
ScalarFunction affine_fn(double a, double b);  // a x + b
ScalarFunction square_fn();
ScalarFunction exp_fn();
ScalarFunction xlogx_fn();  // 0 log 0 = 0
// -|x|^alpha on [0, inf): convex, alpha-Holder with seminorm 1.
ScalarFunction abs_alpha_fn(double alpha);

// Registry lookup: "identity", "square", "exp", "xlogx", "abs_alpha(0.5)", "affine(a,b)".
ScalarFunction scalar_function(const std::string& spec);

}  // namespace spinsemi
