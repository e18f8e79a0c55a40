#pragma once

#include <string>
#include <vector>

#include "spinsemi/report.hpp"
#include "spinsemi/sphere_fn.hpp"

namespace spinsemi {

struct Assertion {
  std::string name;
  bool passed = true;
  long violations = 0;
  std::string detail;
};

struct VerifyResult {
  Json report;
  std::vector<Assertion> assertions;

  bool passed() const;
  const Assertion& assertion(const std::string& name) const;
};

// Reads a JSON config; malformed files raise ValidationError naming the problem.
Json load_config(const std::string& path);

// Test functions by name: omega_x, omega_y, omega_z, constant(c), band_random(L, seed),
// positive_band_random(L, seed) = 1 + band_random / (2B), B an upper bound on sup|band_random|; values in [1/2, 3/2].
SphereFunction test_function(const std::string& name);

// A spin list from JSON: a single label, a list of labels, or {"from", "to", "step"}.
std::vector<HalfInt> spin_list(const Json& node);
// A number or one of the strings "inf", "infinity".
double exponent_value(const Json& node);

VerifyResult verify_inversion(const Json& config);
VerifyResult verify_products(const Json& config);
VerifyResult verify_traces(const Json& config);
VerifyResult verify_channels(const Json& config);
VerifyResult verify_entropy(const Json& config);

// Dispatches on "inversion", "products", "traces", "channels", "entropy".
VerifyResult run_verify(const std::string& which, const Json& config);

}  // namespace spinsemi
