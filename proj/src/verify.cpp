#include "spinsemi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "spinsemi/entropy_opt.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/parallel.hpp"
#include "spinsemi/quantize.hpp"
#include "spinsemi/random.hpp"
#include "spinsemi/semiclassics.hpp"
#include "spinsemi/su2_rep.hpp"

namespace spinsemi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDiscard = 2;
constexpr double kExactTolerance = 1e-11;

const Json& need(const Json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) throw ValidationError("config: missing '" + std::string(key) + "' in " + where);
  return node.at(key);
}

template <class T>
T get_or(const Json& node, const char* key, T fallback) {
  if (!node.contains(key)) return fallback;
  try {
    return node.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config: bad value for '" + std::string(key) + "': " + e.what());
  }
}

std::vector<std::string> string_list(const Json& node, const std::string& where) {
  if (!node.is_array()) throw ValidationError("config: " + where + " must be a list of names");
  std::vector<std::string> out;
  for (const auto& e : node) {
    if (!e.is_string()) throw ValidationError("config: " + where + " must contain strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::uint64_t config_seed(const Json& config) { return get_or<std::uint64_t>(config, "seed", 1); }

HalfInt spin_value(const Json& node) {
  try {
    if (node.is_string()) return HalfInt::parse(node.get<std::string>());
    if (node.is_number()) {
      std::ostringstream s;
      s << node.get<double>();
      return HalfInt::parse(s.str());
    }
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("config: bad spin label: ") + e.what());
  }
  throw ValidationError("config: spin labels must be strings or numbers");
}

Json bound_json(const Bound& b) {
  Json j;
  j["lhs"] = b.lhs;
  j["shape"] = b.shape;
  if (b.asserted()) {
    j["constant"] = *b.constant;
    j["rhs"] = b.rhs();
    j["holds"] = b.holds();
  } else {
    j["measured_constant"] = b.measured_constant();
  }
  return j;
}

Json bounds_json(const BoundSet& set) {
  Json j = Json::object();
  for (const auto& b : set.bounds) j[b.name] = bound_json(b);
  return j;
}

std::string p_key(double p) { return std::isinf(p) ? "inf" : format_number(p); }

Json fit_json(const RateFit& f) {
  return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}, {"points_used", f.points_used}};
}

Json fit_window(const char* abscissa) { return Json{{"abscissa", abscissa}, {"discarded_smallest", kDiscard}}; }

// Smallest and largest measured constant over the upper half of a sweep (by abscissa).
struct Stability {
  double lo = kInf, hi = 0.0;
  double ratio() const { return lo > 0.0 && std::isfinite(lo) ? hi / lo : kInf; }
};

Stability upper_half_stability(const std::vector<double>& xs, const std::vector<double>& cs) {
  std::vector<std::size_t> order(xs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  Stability s;
  for (std::size_t k = order.size() / 2; k < order.size(); ++k) {
    double c = cs[order[k]];
    s.lo = std::min(s.lo, c);
    s.hi = std::max(s.hi, c);
  }
  return s;
}

Json stability_json(const Stability& s, double max_ratio) {
  return Json{{"min", s.lo}, {"max", s.hi}, {"ratio", s.ratio()}, {"stable", s.ratio() <= max_ratio}};
}

bool all_positive(const std::vector<double>& v) {
  return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
}

std::optional<RateFit> try_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (!all_positive(ys) || xs.size() < std::size_t(kDiscard + 4)) return std::nullopt;
  return rate_fit(xs, ys, kDiscard);
}

Json assertions_json(const std::vector<Assertion>& as) {
  Json arr = Json::array();
  for (const auto& a : as)
    arr.push_back(Json{{"name", a.name}, {"passed", a.passed}, {"violations", a.violations}, {"detail", a.detail}});
  return arr;
}

void finish(VerifyResult& r) {
  r.report["assertions"] = assertions_json(r.assertions);
  r.report["passed"] = r.passed();
}

Assertion count_assertion(std::string name, long violations, std::string detail) {
  return Assertion{std::move(name), violations == 0, violations, std::move(detail)};
}

Assertion slope_assertion(const std::string& name, const std::optional<RateFit>& fit, double slope, double tol) {
  Assertion a{name, false, 1, ""};
  if (!fit) {
    a.detail = "no positive series to fit";
    return a;
  }
  a.passed = std::abs(fit->slope - slope) <= tol;
  a.violations = a.passed ? 0 : 1;
  a.detail = "slope " + format_number(fit->slope) + ", expected " + format_number(slope) + " +- " + format_number(tol);
  return a;
}

// Dirichlet(1) weights over the vertices of the channel simplex.
ChannelWeights random_weights(HalfInt J, HalfInt K, Rng& rng) {
  ChannelWeights w;
  double total = 0.0;
  for (HalfInt M : vertex_labels(J, K)) {
    double e = -std::log(1.0 - rng.uniform());
    w[M] = e;
    total += e;
  }
  for (auto& [M, v] : w) v /= total;
  return w;
}

Json weights_json(const ChannelWeights& w) {
  Json j = Json::object();
  for (auto [M, v] : w) j[M.str()] = v;
  return j;
}

Operator north_coherent(HalfInt J, HalfInt i) { return coherent_projector(J, Eigen::Vector3d(0, 0, 1), i); }

std::vector<HalfInt> indices_of(HalfInt J) {
  std::vector<HalfInt> out;
  for (HalfInt i = -J; i <= J; i += HalfInt(1)) out.push_back(i);
  return out;
}

std::vector<HalfInt> k_range(HalfInt from, HalfInt to, HalfInt step) {
  if (step.twice() <= 0) throw ValidationError("config: K step must be positive");
  std::vector<HalfInt> out;
  for (HalfInt K = from; K <= to; K += step) out.push_back(K);
  return out;
}

// 1 + g / (2B) where B = sum_l sqrt(2l+1) |g_l|_2 bounds sup|g| (addition theorem), so the values lie in [1/2, 3/2].
SphereFunction positive_shift(const SphereFunction& g) {
  double bound = 0.0;
  for (int l = 0; l <= g.lmax(); ++l) {
    double band = 0.0;
    for (int m = -l; m <= l; ++m) band += std::norm(g.coeff(l, m));
    bound += std::sqrt((2.0 * l + 1.0) * band);
  }
  return SphereFunction::constant(1.0).with_lmax(g.lmax()) + (bound > 0.0 ? 0.5 / bound : 0.0) * g;
}

}  // namespace

bool VerifyResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

const Assertion& VerifyResult::assertion(const std::string& name) const {
  for (const auto& a : assertions)
    if (a.name == name) return a;
  throw ValidationError("no assertion named " + name);
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
}

SphereFunction test_function(const std::string& name) {
  static const std::regex constant_re(R"(\s*constant\(\s*([-+0-9.eE]+)\s*\)\s*)");
  static const std::regex random_re(R"(\s*(positive_)?band_random\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*)");
  std::smatch m;
  if (name == "omega_x") return SphereFunction::omega_x();
  if (name == "omega_y") return SphereFunction::omega_y();
  if (name == "omega_z") return SphereFunction::omega_z();
  if (std::regex_match(name, m, constant_re)) return SphereFunction::constant(std::stod(m[1]));
  if (std::regex_match(name, m, random_re)) {
    const int L = std::stoi(m[2]);
    Rng rng(std::stoull(m[3]));
    SphereFunction f = random_real_function(L, rng);
    return m[1].matched ? positive_shift(f) : f;
  }
  throw ValidationError("unknown test function '" + name + "'");
}

std::vector<HalfInt> spin_list(const Json& node) {
  if (node.is_array()) {
    std::vector<HalfInt> out;
    for (const auto& e : node) out.push_back(spin_value(e));
    return out;
  }
  if (node.is_object()) {
    HalfInt from = spin_value(need(node, "from", "spin range")), to = spin_value(need(node, "to", "spin range"));
    HalfInt step = node.contains("step") ? spin_value(node.at("step")) : HalfInt(1);
    return k_range(from, to, step);
  }
  return {spin_value(node)};
}

double exponent_value(const Json& node) {
  if (node.is_number()) return node.get<double>();
  if (node.is_string() && (node == "inf" || node == "infinity")) return kInf;
  throw ValidationError("config: exponents must be numbers or \"inf\"");
}

VerifyResult verify_inversion(const Json& config) {
  const Json& c = need(config, "inversion", "config");
  const auto Js = spin_list(need(c, "J", "inversion"));
  std::vector<double> ss;
  for (const auto& s : need(c, "s", "inversion")) ss.push_back(s.get<double>());
  const auto names = string_list(need(c, "functions", "inversion"), "inversion.functions");
  const double tol = get_or(c, "tolerance", 1e-10);
  const std::uint64_t seed = config_seed(config);
  std::vector<SphereFunction> fns;
  for (const auto& n : names) fns.push_back(test_function(n));

  struct Cell {
    Json records = Json::array();
    long violations = 0;
    std::map<std::string, double> constants;
  };
  const std::size_t nf = fns.size();
  auto cells = parallel_map(Js.size() * nf, [&](std::size_t job) {
    const HalfInt J = Js[job / nf];
    const std::size_t fi = job % nf;
    Rng rng(derive_seed(seed, 1000 * J.twice() + fi));
    Operator rho = random_density(J.dim(), rng);
    Cell cell;
    for (double s : ss) {
      InversionReport r = berezin_inversion_check(J, fns[fi], s, rho);
      Json checks = Json::object();
      for (const auto& ch : r.checks) {
        checks[ch.name] = Json{{"lhs", ch.lhs}, {"rhs", ch.rhs}, {"slack", ch.slack()}};
        if (!ch.holds(tol)) ++cell.violations;
      }
      Json consts = Json::object();
      for (auto [p, v] : r.constant_function) {
        consts["function_p" + p_key(p)] = v;
        cell.constants["function_p" + p_key(p)] = std::max(cell.constants["function_p" + p_key(p)], v);
      }
      for (auto [p, v] : r.constant_operator) {
        consts["operator_p" + p_key(p)] = v;
        cell.constants["operator_p" + p_key(p)] = std::max(cell.constants["operator_p" + p_key(p)], v);
      }
      cell.records.push_back(Json{{"J", J.str()}, {"function", names[fi]}, {"s", s}, {"checks", checks}, {"measured_constants", consts}});
    }
    return cell;
  });

  VerifyResult out;
  out.report["command"] = "verify inversion";
  out.report["seed"] = seed;
  out.report["tolerance"] = tol;
  Json points = Json::array();
  long violations = 0;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> families;
  for (std::size_t job = 0; job < cells.size(); ++job) {
    for (auto& rec : cells[job].records) points.push_back(std::move(rec));
    violations += cells[job].violations;
    for (auto [name, v] : cells[job].constants) {
      families[name].first.push_back(Js[job / nf].dim());
      families[name].second.push_back(v);
    }
  }
  out.report["points"] = std::move(points);
  Json stab = Json::object();
  for (auto& [name, xy] : families) stab[name] = stability_json(upper_half_stability(xy.first, xy.second), 3.0);
  out.report["measured_constant_stability"] = stab;
  out.assertions.push_back(count_assertion("inversion_bounds", violations, "checks with lhs > rhs + tolerance"));
  finish(out);
  return out;
}

VerifyResult verify_products(const Json& config) {
  const Json& c = need(config, "products", "config");
  const auto Js = spin_list(need(c, "J", "products"));
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : need(c, "pairs", "products")) {
    auto names = string_list(p, "products.pairs entry");
    if (names.size() != 2) throw ValidationError("config: each products.pairs entry needs two function names");
    pairs.emplace_back(names[0], names[1]);
  }
  std::vector<std::array<double, 3>> exps;
  for (const auto& e : need(c, "exponents", "products")) {
    if (!e.is_array() || e.size() != 3) throw ValidationError("config: each products.exponents entry is [p, p1, p2]");
    exps.push_back({exponent_value(e[0]), exponent_value(e[1]), exponent_value(e[2])});
  }
  const std::uint64_t seed = config_seed(config);
  std::vector<std::pair<SphereFunction, SphereFunction>> fns;
  for (const auto& [a, b] : pairs) fns.emplace_back(test_function(a), test_function(b));

  const std::size_t nJ = Js.size(), nE = exps.size();
  auto sets = parallel_map(pairs.size() * nE * nJ, [&](std::size_t job) {
    const std::size_t pi = job / (nE * nJ), ei = (job / nJ) % nE, ji = job % nJ;
    return product_residuals(Js[ji], fns[pi].first, fns[pi].second, exps[ei][0], exps[ei][1], exps[ei][2]);
  });

  VerifyResult out;
  out.report["command"] = "verify products";
  out.report["seed"] = seed;
  out.report["rate_fit"] = fit_window("2J+1");
  Json series = Json::array();
  std::map<std::string, std::optional<RateFit>> fits;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi)
    for (std::size_t ei = 0; ei < nE; ++ei) {
      Json rows = Json::array();
      std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_name;
      std::vector<double> xs;
      for (std::size_t ji = 0; ji < nJ; ++ji) {
        const BoundSet& set = sets[(pi * nE + ei) * nJ + ji];
        rows.push_back(Json{{"J", Js[ji].str()}, {"residuals", bounds_json(set)}});
        xs.push_back(Js[ji].dim());
        for (const auto& b : set.bounds) {
          by_name[b.name].first.push_back(b.lhs);
          by_name[b.name].second.push_back(b.measured_constant());
        }
      }
      Json fit_block = Json::object();
      for (auto& [name, vals] : by_name) {
        auto fit = try_fit(xs, vals.first);
        fits[name + "|" + std::to_string(pi) + "|" + std::to_string(ei)] = fit;
        fit_block[name] = Json{{"fit", fit ? fit_json(*fit) : Json()},
                               {"measured_constant", stability_json(upper_half_stability(xs, vals.second), 3.0)}};
      }
      series.push_back(Json{{"f", pairs[pi].first},
                            {"g", pairs[pi].second},
                            {"p", exps[ei][0]},
                            {"p1", exps[ei][1]},
                            {"p2", exps[ei][2]},
                            {"points", rows},
                            {"summary", fit_block}});
    }
  out.report["series"] = std::move(series);
  if (c.contains("expected_slopes"))
    for (const auto& e : c.at("expected_slopes")) {
      const auto pi = get_or<std::size_t>(e, "pair", 0), ei = get_or<std::size_t>(e, "exponents", 0);
      const auto name = get_or<std::string>(e, "residual", "");
      const std::string key = name + "|" + std::to_string(pi) + "|" + std::to_string(ei);
      if (!fits.count(key)) throw ValidationError("config: expected slope refers to an unknown series " + key);
      out.assertions.push_back(slope_assertion("slope:" + name + ":pair" + std::to_string(pi) + ":exponents" + std::to_string(ei),
                                               fits[key], get_or(e, "slope", -1.0), get_or(e, "tolerance", 0.1)));
    }
  finish(out);
  return out;
}

VerifyResult verify_traces(const Json& config) {
  const Json& c = need(config, "traces", "config");
  const auto Js = spin_list(need(c, "J", "traces"));
  const std::uint64_t seed = config_seed(config);
  struct Case {
    std::string phi_name, f_name;
    ScalarFunction phi;
    SphereFunction f;
    std::optional<std::pair<double, double>> slope;
  };
  std::vector<Case> cases;
  for (const auto& e : need(c, "cases", "traces")) {
    Case k{get_or<std::string>(e, "phi", ""), get_or<std::string>(e, "f", ""), {}, SphereFunction(0), std::nullopt};
    k.phi = scalar_function(k.phi_name);
    k.f = test_function(k.f_name);
    if (e.contains("expected_slope"))
      k.slope = std::pair{get_or(e.at("expected_slope"), "slope", -1.0), get_or(e.at("expected_slope"), "tolerance", 0.1)};
    cases.push_back(std::move(k));
  }
  const std::size_t nJ = Js.size();
  auto reports = parallel_map(cases.size() * nJ, [&](std::size_t job) {
    const Case& k = cases[job / nJ];
    return trace_residuals(Js[job % nJ], k.phi, k.f);
  });

  VerifyResult out;
  out.report["command"] = "verify traces";
  out.report["seed"] = seed;
  out.report["rate_fit"] = fit_window("2J+1");
  long curvature_bad = 0, sign_bad = 0, affine_bad = 0;
  Json series = Json::array();
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const Case& k = cases[ci];
    Json rows = Json::array();
    std::vector<double> xs, errs;
    bool monotone = true;
    for (std::size_t ji = 0; ji < nJ; ++ji) {
      const TraceReport& r = reports[ci * nJ + ji];
      rows.push_back(Json{{"J", Js[ji].str()},
                          {"quantum", r.quantum},
                          {"classical", r.classical},
                          {"error", r.error},
                          {"bounds", bounds_json(r.bounds)}});
      for (const auto& b : r.bounds.bounds) {
        if (b.name == "curvature" && !b.holds()) ++curvature_bad;
        if (b.name == "convex_sign" && !b.holds()) ++sign_bad;
      }
      if (k.phi.affine && std::abs(r.error) > kExactTolerance) ++affine_bad;
      if (!errs.empty() && std::abs(r.error) > errs.back() * (1 + 1e-9) + 1e-14) monotone = false;
      xs.push_back(Js[ji].dim());
      errs.push_back(std::abs(r.error));
    }
    auto fit = try_fit(xs, errs);
    series.push_back(Json{{"phi", k.phi_name},
                          {"f", k.f_name},
                          {"points", rows},
                          {"fit", fit ? fit_json(*fit) : Json()},
                          {"error_decreasing_in_J", monotone}});
    if (k.slope) out.assertions.push_back(slope_assertion("slope:" + k.phi_name + ":" + k.f_name, fit, k.slope->first, k.slope->second));
  }
  out.report["series"] = std::move(series);
  out.assertions.push_back(count_assertion("trace_curvature", curvature_bad, "|E| > sup|phi''| ||grad f||^2 / (2J+1)"));
  out.assertions.push_back(count_assertion("trace_convex_sign", sign_bad, "E < 0 for convex phi"));
  out.assertions.push_back(count_assertion("trace_affine_exact", affine_bad, "|E| > 1e-11 for affine phi"));

  if (c.contains("berezin_lieb")) {
    const Json& bl = c.at("berezin_lieb");
    const int count = get_or(bl, "cases", 50);
    const auto bJs = spin_list(need(bl, "J", "traces.berezin_lieb"));
    const auto phis = string_list(need(bl, "phi", "traces.berezin_lieb"), "traces.berezin_lieb.phi");
    const int band = get_or(bl, "band", 2);
    if (bJs.empty() || phis.empty()) throw ValidationError("config: traces.berezin_lieb needs spins and phi names");
    auto sandwiches = parallel_map(std::size_t(count), [&](std::size_t k) {
      const HalfInt J = bJs[k % bJs.size()];
      ScalarFunction phi = scalar_function(phis[k % phis.size()]);
      Rng rng(derive_seed(seed, 7000 + k));
      if (std::isinf(phi.lo)) return std::pair{berezin_lieb_gap(J, phi, Operator(random_hermitian(J.dim(), rng) / std::sqrt(J.dim()))), phi.name};
      return std::pair{berezin_lieb_gap(J, phi, positive_shift(random_real_function(band, rng))), phi.name};
    });
    Json rows = Json::array();
    long bad = 0;
    for (std::size_t k = 0; k < sandwiches.size(); ++k) {
      const auto& [s, name] = sandwiches[k];
      if (!s.ordered()) ++bad;
      rows.push_back(Json{{"case", k},
                          {"J", bJs[k % bJs.size()].str()},
                          {"phi", name},
                          {"lower", s.lower},
                          {"middle", s.middle},
                          {"upper", s.upper},
                          {"ordered", s.ordered()}});
    }
    out.report["berezin_lieb"] = std::move(rows);
    out.assertions.push_back(count_assertion("berezin_lieb", bad, "cases violating lower <= middle <= upper (slack 1e-10)"));
  }
  finish(out);
  return out;
}

VerifyResult verify_channels(const Json& config) {
  const Json& c = need(config, "channels", "config");
  const auto Js = spin_list(need(c, "J", "channels"));
  const HalfInt K_max = spin_value(need(c, "K_max", "channels"));
  const HalfInt K_step = c.contains("K_step") ? spin_value(c.at("K_step")) : half(1);
  std::vector<double> ps;
  for (const auto& p : need(c, "p", "channels")) ps.push_back(exponent_value(p));
  const int n_rho = get_or(c, "rho_per_point", 5);
  const int n_mix = get_or(c, "mixtures_per_point", 2);
  const std::uint64_t seed = config_seed(config);

  struct Point {
    HalfInt J, K;
  };
  std::vector<Point> grid_points;
  for (HalfInt J : Js)
    for (HalfInt K : k_range(HalfInt::from_twice(2 * J.twice()), K_max, K_step)) grid_points.push_back({J, K});

  // The same input operators are used for every K so that each series varies only with K.
  auto inputs = [&](HalfInt J, int count, std::uint64_t stream, bool density) {
    std::vector<Operator> out;
    for (int r = 0; r < count; ++r) {
      Rng rng(derive_seed(seed, stream + 100 * J.twice() + r));
      out.push_back(density ? random_density(J.dim(), rng) : random_matrix(J.dim(), rng));
    }
    return out;
  };

  struct Cell {
    Json vertex = Json::array(), mixture = Json::array();
    long vertex_bad = 0, exact_bad = 0, mixture_bad = 0;
    std::map<std::string, double> op_mean;  // keyed by "i|p"
  };
  auto cells = parallel_map(grid_points.size(), [&](std::size_t job) {
    const auto [J, K] = grid_points[job];
    Cell cell;
    auto rhos = inputs(J, n_rho, 10000, false);
    for (HalfInt i : indices_of(J)) {
      ChannelSpec ch = ChannelSpec::vertex_index(J, K, i);
      for (int r = 0; r < n_rho; ++r) {
        auto sets = channel_residuals(ch, rhos[r], ps);
        for (std::size_t q = 0; q < ps.size(); ++q) {
          const BoundSet& s = sets[q];
          if (!s.holds()) ++cell.vertex_bad;
          if (i == J && s["op_approx"].lhs > 1e-10) ++cell.exact_bad;
          if (i == -J && s["hus_approx"].lhs > 1e-10) ++cell.exact_bad;
          cell.op_mean[i.str() + "|" + p_key(ps[q])] += s["op_approx"].lhs / n_rho;
          cell.vertex.push_back(Json{{"J", J.str()}, {"K", K.str()}, {"i", i.str()}, {"rho", r}, {"p", ps[q]}, {"bounds", bounds_json(s)}});
        }
      }
    }
    for (int m = 0; m < n_mix; ++m) {
      Rng rng(derive_seed(seed, 20000 + 1000 * J.twice() + 10 * K.twice() + m));
      ChannelSpec ch = ChannelSpec::mixture(J, K, random_weights(J, K, rng));
      auto sets = channel_residuals(ch, random_matrix(J.dim(), rng), ps);
      for (std::size_t q = 0; q < ps.size(); ++q) {
        if (!sets[q].holds()) ++cell.mixture_bad;
        cell.mixture.push_back(Json{{"J", J.str()}, {"K", K.str()}, {"weights", weights_json(ch.weights)}, {"p", ps[q]}, {"bounds", bounds_json(sets[q])}});
      }
    }
    return cell;
  });

  VerifyResult out;
  out.report["command"] = "verify channels";
  out.report["seed"] = seed;
  out.report["rate_fit"] = fit_window("2K+1");
  Json vertex = Json::array(), mixture = Json::array();
  long vertex_bad = 0, exact_bad = 0, mixture_bad = 0;
  for (auto& cell : cells) {
    for (auto& v : cell.vertex) vertex.push_back(std::move(v));
    for (auto& v : cell.mixture) mixture.push_back(std::move(v));
    vertex_bad += cell.vertex_bad;
    exact_bad += cell.exact_bad;
    mixture_bad += cell.mixture_bad;
  }
  out.report["vertex_points"] = std::move(vertex);
  out.report["mixture_points"] = std::move(mixture);

  Json series = Json::array();
  for (HalfInt J : Js)
    for (HalfInt i : indices_of(J)) {
      if (i == J) continue;
      for (double p : ps) {
        std::vector<double> xs, ys;
        for (std::size_t g = 0; g < grid_points.size(); ++g)
          if (grid_points[g].J == J) {
            xs.push_back(grid_points[g].K.dim());
            ys.push_back(cells[g].op_mean[i.str() + "|" + p_key(p)]);
          }
        auto fit = try_fit(xs, ys);
        series.push_back(Json{{"J", J.str()}, {"i", i.str()}, {"p", p}, {"residual", "op_approx"}, {"fit", fit ? fit_json(*fit) : Json()}});
      }
    }
  out.report["op_approx_series"] = std::move(series);
  Json pooled = Json::array();
  for (HalfInt J : Js) {
    std::vector<double> xs, ys;
    for (std::size_t g = 0; g < grid_points.size(); ++g)
      if (grid_points[g].J == J) {
        double sum = 0.0;
        int count = 0;
        for (HalfInt i : indices_of(J))
          for (double p : ps)
            if (i != J) {
              sum += cells[g].op_mean[i.str() + "|" + p_key(p)];
              ++count;
            }
        xs.push_back(grid_points[g].K.dim());
        ys.push_back(sum / count);
      }
    auto fit = try_fit(xs, ys);
    pooled.push_back(Json{{"J", J.str()}, {"residual", "op_approx averaged over i != J, p and rho"}, {"fit", fit ? fit_json(*fit) : Json()}});
  }
  out.report["op_approx_pooled"] = std::move(pooled);
  out.assertions.push_back(count_assertion("vertex_bounds", vertex_bad, "vertex residuals above 12 or 2 times their shapes"));
  out.assertions.push_back(count_assertion("vertex_exact", exact_bad, "identity cases i = J and i = -J above 1e-10"));
  out.assertions.push_back(count_assertion("mixture_bounds", mixture_bad, "mixture residuals above 6 or 1 times their shapes"));

  if (c.contains("trace")) {
    const Json& t = c.at("trace");
    const auto phi_names = string_list(need(t, "phi", "channels.trace"), "channels.trace.phi");
    const int t_rho = get_or(t, "rho_per_point", 2);
    const int t_mix = get_or(t, "mixtures_per_point", 2);
    std::vector<ScalarFunction> phis;
    for (const auto& n : phi_names) phis.push_back(scalar_function(n));
    struct TraceCell {
      Json rows = Json::array();
      long vertex_bad = 0, mixture_bad = 0, affine_bad = 0;
    };
    auto tcells = parallel_map(grid_points.size(), [&](std::size_t job) {
      const auto [J, K] = grid_points[job];
      TraceCell cell;
      auto rhos = inputs(J, t_rho, 30000, true);
      std::vector<std::pair<ChannelSpec, Json>> channels;
      for (HalfInt i : indices_of(J)) channels.emplace_back(ChannelSpec::vertex_index(J, K, i), Json(i.str()));
      for (int m = 0; m < t_mix; ++m) {
        Rng rng(derive_seed(seed, 40000 + 1000 * J.twice() + 10 * K.twice() + m));
        ChannelSpec ch = ChannelSpec::mixture(J, K, random_weights(J, K, rng));
        channels.emplace_back(ch, weights_json(ch.weights));
      }
      for (const auto& [ch, label] : channels)
        for (std::size_t f = 0; f < phis.size(); ++f)
          for (int r = 0; r < t_rho; ++r) {
            TraceReport rep = channel_trace_residuals(ch, phis[f], rhos[r]);
            for (const auto& b : rep.bounds.bounds)
              if (b.name == "curvature" && !b.holds()) ++(ch.is_vertex() ? cell.vertex_bad : cell.mixture_bad);
            if (phis[f].affine && std::abs(rep.error) > kExactTolerance) ++cell.affine_bad;
            cell.rows.push_back(Json{{"J", J.str()},
                                     {"K", K.str()},
                                     {ch.is_vertex() ? "i" : "weights", label},
                                     {"phi", phi_names[f]},
                                     {"rho", r},
                                     {"quantum", rep.quantum},
                                     {"classical", rep.classical},
                                     {"error", rep.error},
                                     {"bounds", bounds_json(rep.bounds)}});
          }
      return cell;
    });
    Json rows = Json::array();
    long vb = 0, mb = 0, ab = 0;
    for (auto& cell : tcells) {
      for (auto& r : cell.rows) rows.push_back(std::move(r));
      vb += cell.vertex_bad;
      mb += cell.mixture_bad;
      ab += cell.affine_bad;
    }
    out.report["trace_points"] = std::move(rows);
    out.assertions.push_back(count_assertion("trace_vertex_curvature", vb, "|E| > 10 sup|phi''| (J-|i|+1)/(2K-J+i+1)"));
    out.assertions.push_back(count_assertion("trace_mixture_curvature", mb, "|E| > 4 sup|phi''| (2J+1)/(2K+1)"));
    out.assertions.push_back(count_assertion("trace_affine_exact", ab, "|E| > 1e-11 for affine phi"));
  }
  finish(out);
  return out;
}

VerifyResult verify_entropy(const Json& config) {
  const Json& c = need(config, "entropy", "config");
  const std::uint64_t seed = config_seed(config);
  VerifyResult out;
  out.report["command"] = "verify entropy";
  out.report["seed"] = seed;

  if (c.contains("corollary")) {
    const Json& e = c.at("corollary");
    const HalfInt J = spin_value(need(e, "J", "entropy.corollary")), i = spin_value(need(e, "i", "entropy.corollary"));
    const auto Ks = spin_list(need(e, "K", "entropy.corollary"));
    const double max_ratio = get_or(e, "max_ratio", 3.0);
    auto reps = parallel_map(Ks.size(), [&](std::size_t k) {
      return entropy_expansion(ChannelSpec::vertex_index(J, Ks[k], i), north_coherent(J, J));
    });
    Json rows = Json::array();
    std::vector<double> xs, cs;
    for (std::size_t k = 0; k < Ks.size(); ++k) {
      rows.push_back(Json{{"K", Ks[k].str()},
                          {"entropy", reps[k].entropy},
                          {"approximation", reps[k].approximation},
                          {"error", reps[k].error},
                          {"envelope_shape", reps[k].envelope_shape},
                          {"measured_constant", reps[k].measured_constant()}});
      xs.push_back(Ks[k].dim());
      cs.push_back(reps[k].measured_constant());
    }
    Stability s = upper_half_stability(xs, cs);
    out.report["corollary"] = Json{{"J", J.str()}, {"i", i.str()}, {"input", "coherent projector |up;J>"}, {"points", rows},
                                   {"upper_half", stability_json(s, max_ratio)}};
    Assertion a{"corollary_stability", s.ratio() <= max_ratio, s.ratio() <= max_ratio ? 0 : 1,
                "max/min measured constant over the upper half = " + format_number(s.ratio())};
    out.assertions.push_back(a);
  }

  if (c.contains("mixture")) {
    const Json& e = c.at("mixture");
    const HalfInt J = spin_value(need(e, "J", "entropy.mixture")), K = spin_value(need(e, "K", "entropy.mixture"));
    const int states = get_or(e, "states", 3);
    Json rows = Json::array();
    for (int k = 0; k < states; ++k) {
      Rng rng(derive_seed(seed, 50000 + k));
      ChannelSpec ch = ChannelSpec::mixture(J, K, random_weights(J, K, rng));
      EntropyReport r = entropy_expansion(ch, random_density(J.dim(), rng));
      rows.push_back(Json{{"weights", weights_json(ch.weights)},
                          {"entropy", r.entropy},
                          {"approximation", r.approximation},
                          {"error", r.error},
                          {"envelope_shape", r.envelope_shape},
                          {"measured_constant", r.measured_constant()}});
    }
    out.report["mixture"] = Json{{"J", J.str()}, {"K", K.str()}, {"points", rows}};
  }

  if (c.contains("minimize")) {
    const Json& e = c.at("minimize");
    const double tol = get_or(e, "tolerance", 1e-7);
    MinimizeOptions opt;
    opt.restarts = get_or(e, "restarts", 32);
    Json rows = Json::array();
    long bad = 0, inconsistent = 0;
    std::size_t k = 0;
    for (const auto& pr : need(e, "pairs", "entropy.minimize")) {
      const HalfInt J = spin_value(pr.at(0)), K = spin_value(pr.at(1));
      Channel ch = Channel::vertex(J, K, K - J);
      opt.seed = derive_seed(seed, 60000 + k++);
      MinimizeResult r = min_output_entropy(ch, opt);
      const double base = coherent_baseline(ch, J);
      const double recomputed = output_entropy(ch, r.state);
      bool monotone = true;
      for (std::size_t t = 1; t < r.trace_log.size(); ++t) monotone = monotone && r.trace_log[t] <= r.trace_log[t - 1] + 1e-12;
      const bool consistent = std::abs(recomputed - r.value) <= 1e-9 && std::abs(r.state.norm() - 1.0) <= 1e-12 && monotone;
      if (std::abs(r.value - base) > tol) ++bad;
      if (!consistent) ++inconsistent;
      rows.push_back(Json{{"J", J.str()},
                          {"K", K.str()},
                          {"vertex", (K - J).str()},
                          {"minimum", r.value},
                          {"coherent_baseline", base},
                          {"difference", r.value - base},
                          {"recomputed", recomputed},
                          {"unconverged_starts", r.unconverged_starts}});
    }
    out.report["minimize"] = std::move(rows);
    out.assertions.push_back(count_assertion("lieb_solovej", bad, "lowest-vertex minimum differs from the coherent baseline"));
    out.assertions.push_back(count_assertion("optimizer_consistency", inconsistent, "state norm, recomputed entropy or monotone descent"));
  }

  if (c.contains("gradient")) {
    const Json& e = c.at("gradient");
    const int states = get_or(e, "states", 10);
    const double step = get_or(e, "step", 1e-5), tol = get_or(e, "tolerance", 1e-5);
    Json rows = Json::array();
    long bad = 0;
    std::size_t k = 0;
    for (const auto& pr : need(e, "pairs", "entropy.gradient")) {
      const HalfInt J = spin_value(pr.at(0)), K = spin_value(pr.at(1));
      ChannelWeights uniform;
      auto labels = vertex_labels(J, K);
      for (HalfInt M : labels) uniform[M] = 1.0 / labels.size();
      Channel mix(J, K, uniform);
      double worst = 0.0;
      for (int s = 0; s < states; ++s) {
        Rng rng(derive_seed(seed, 70000 + 100 * k + s));
        worst = std::max(worst, gradient_check(mix, random_state(J.dim(), rng), step));
      }
      ++k;
      if (!(worst <= tol)) ++bad;
      rows.push_back(Json{{"J", J.str()}, {"K", K.str()}, {"channel", "uniform mixture"}, {"states", states}, {"max_relative_error", worst}});
    }
    out.report["gradient"] = std::move(rows);
    out.assertions.push_back(count_assertion("gradient", bad, "relative error against central differences above tolerance"));
  }
  finish(out);
  return out;
}

VerifyResult run_verify(const std::string& which, const Json& config) {
  if (which == "inversion") return verify_inversion(config);
  if (which == "products") return verify_products(config);
  if (which == "traces") return verify_traces(config);
  if (which == "channels") return verify_channels(config);
  if (which == "entropy") return verify_entropy(config);
  throw ValidationError("unknown verify target '" + which + "'");
}

}  // namespace spinsemi
