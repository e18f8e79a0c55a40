#include "spinsemi/scalar_fn.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include "spinsemi/errors.hpp"

namespace spinsemi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ScalarFunction identity_fn() { return affine_fn(1.0, 0.0); }

ScalarFunction affine_fn(double a, double b) {
  ScalarFunction f;
  f.name = (a == 1.0 && b == 0.0) ? "identity" : "affine";
  f.value = [a, b](double x) { return a * x + b; };
  f.derivative = [a](double) { return a; };
  f.curvature_bound = [](double, double) { return 0.0; };
  f.holder_exponent = 1.0;
  f.holder_seminorm = std::abs(a);
  f.convex = true;
  f.affine = true;
  return f;
}

ScalarFunction square_fn() {
  ScalarFunction f;
  f.name = "square";
  f.value = [](double x) { return x * x; };
  f.derivative = [](double x) { return 2 * x; };
  f.curvature_bound = [](double, double) { return 2.0; };
  f.convex = true;
  return f;
}

ScalarFunction exp_fn() {
  ScalarFunction f;
  f.name = "exp";
  f.value = [](double x) { return std::exp(x); };
  f.derivative = [](double x) { return std::exp(x); };
  f.curvature_bound = [](double, double b) { return std::exp(b); };
  f.convex = true;
  return f;
}

ScalarFunction xlogx_fn() {
  ScalarFunction f;
  f.name = "xlogx";
  f.value = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
  f.derivative = [](double x) { return std::log(x) + 1.0; };
  f.lo = 0.0;
  f.curvature_bound = [](double a, double) { return a > 0 ? 1.0 / a : kInf; };
  f.convex = true;
  return f;
}

ScalarFunction abs_alpha_fn(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("abs_alpha exponent must lie in (0, 1]");
  ScalarFunction f;
  std::ostringstream name;
  name << "abs_alpha(" << alpha << ")";
  f.name = name.str();
  f.value = [alpha](double x) { return -std::pow(std::abs(x), alpha); };
  f.derivative = [alpha](double x) { return -alpha * std::pow(x, alpha - 1.0); };
  f.lo = 0.0;
  f.curvature_bound = [alpha](double a, double) {
    if (alpha == 1.0) return 0.0;
    return a > 0 ? alpha * (1.0 - alpha) * std::pow(a, alpha - 2.0) : kInf;
  };
  f.holder_exponent = alpha;
  f.holder_seminorm = 1.0;
  f.convex = true;
  f.affine = alpha == 1.0;
  return f;
}

ScalarFunction scalar_function(const std::string& spec) {
  static const std::regex abs_re(R"(\s*abs_alpha\(\s*([-+0-9.eE]+)\s*\)\s*)");
  static const std::regex aff_re(R"(\s*affine\(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*\)\s*)");
  std::smatch m;
  if (spec == "identity") return identity_fn();
  if (spec == "square") return square_fn();
  if (spec == "exp") return exp_fn();
  if (spec == "xlogx") return xlogx_fn();
  if (std::regex_match(spec, m, abs_re)) return abs_alpha_fn(std::stod(m[1]));
  if (std::regex_match(spec, m, aff_re)) return affine_fn(std::stod(m[1]), std::stod(m[2]));
  throw ValidationError("unknown scalar function: " + spec);
}

}  // namespace spinsemi
