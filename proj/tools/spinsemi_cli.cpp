#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spinsemi/channels.hpp"
#include "spinsemi/entropy_opt.hpp"
#include "spinsemi/errors.hpp"
#include "spinsemi/quantize.hpp"
#include "spinsemi/report.hpp"
#include "spinsemi/verify.hpp"

using namespace spinsemi;

namespace {

constexpr int kAssertionFailure = 1;
constexpr int kUsageError = 2;

HalfInt parse_spin(const std::string& text, const char* flag) {
  try {
    return HalfInt::parse(text);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(flag) + ": " + e.what());
  }
}

// "M:w,M:w" with M a half-integer label.
ChannelWeights parse_weights(const std::string& text) {
  ChannelWeights w;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("--weights: expected M:w, got '" + item + "'");
    HalfInt M = parse_spin(item.substr(0, colon), "--weights");
    double v = 0.0;
    try {
      v = std::stod(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("--weights: bad weight in '" + item + "'");
    }
    if (w.count(M)) throw ValidationError("--weights: vertex " + M.str() + " given twice");
    w[M] = v;
  }
  if (w.empty()) throw ValidationError("--weights: no vertices given");
  return w;
}

std::string weights_text(const ChannelWeights& w) {
  std::string out;
  for (auto [M, v] : w) out += (out.empty() ? "" : ";") + M.str() + "=" + format_number(v);
  return out;
}

Operator read_operator(const std::string& path) {
  Json j = load_config(path);
  if (!j.contains("dim") || !j.contains("entries")) throw ValidationError(path + ": operator files need 'dim' and 'entries'");
  const int n = j.at("dim").get<int>();
  const Json& e = j.at("entries");
  if (n <= 0 || !e.is_array() || e.size() != std::size_t(n) * n)
    throw ValidationError(path + ": 'entries' must hold dim*dim [re, im] pairs");
  Operator rho(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const Json& z = e[std::size_t(r) * n + c];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw ValidationError(path + ": entry (" + std::to_string(r) + ", " + std::to_string(c) + ") is not [re, im]");
      rho(r, c) = {z[0].get<double>(), z[1].get<double>()};
    }
  return rho;
}

Json operator_json(const Operator& op) {
  Json entries = Json::array();
  for (int r = 0; r < op.rows(); ++r)
    for (int c = 0; c < op.cols(); ++c) entries.push_back(Json::array({op(r, c).real(), op(r, c).imag()}));
  return Json{{"dim", op.rows()}, {"entries", entries}};
}

Json state_json(const StateVector& psi) {
  Json out = Json::array();
  for (int k = 0; k < psi.size(); ++k) out.push_back(Json::array({psi(k).real(), psi(k).imag()}));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin coherent states, equivariant channels and their semiclassical limits"};
  app.require_subcommand(1);

  std::string J_text, K_text, M_text, weights_arg, rho_path, out_path, config_path = SPINSEMI_DEFAULT_CONFIG, which;
  int restarts = 32;
  std::uint64_t seed = 1;
  std::vector<std::string> scan_J;
  std::string Kmax_text;
  double step = 0.25;

  auto* spectrum = app.add_subcommand("spectrum", "Berezin transform eigenvalues as CSV");
  spectrum->add_option("--J", J_text, "input spin")->required();

  auto* verify = app.add_subcommand("verify", "Run a semiclassics sweep and emit a JSON report");
  verify->add_option("target", which, "inversion, products, traces, channels or entropy")
      ->required()
      ->check(CLI::IsMember({"inversion", "products", "traces", "channels", "entropy"}));
  verify->add_option("--config", config_path, "sweep configuration");
  verify->add_option("--out", out_path, "report file (default: standard output)");

  auto* channel = app.add_subcommand("channel", "Equivariant channels");
  channel->require_subcommand(1);
  auto* apply = channel->add_subcommand("apply", "Apply a vertex or mixture channel to an operator file");
  apply->add_option("--J", J_text)->required();
  apply->add_option("--K", K_text)->required();
  auto* M_opt = apply->add_option("--M", M_text, "vertex label");
  auto* w_opt = apply->add_option("--weights", weights_arg, "mixture as M:w,M:w");
  M_opt->excludes(w_opt);
  apply->add_option("--rho", rho_path)->required();
  apply->add_option("--out", out_path)->required();

  auto* entropy = app.add_subcommand("entropy", "Output entropy");
  entropy->require_subcommand(1);
  auto* minimize = entropy->add_subcommand("minimize", "Minimal output entropy by multi-start descent");
  minimize->add_option("--J", J_text)->required();
  minimize->add_option("--K", K_text)->required();
  minimize->add_option("--weights", weights_arg, "mixture as M:w,M:w")->required();
  minimize->add_option("--restarts", restarts);
  minimize->add_option("--seed", seed);

  auto* scan = app.add_subcommand("scan", "Parameter scans");
  scan->require_subcommand(1);
  auto* counter = scan->add_subcommand("counterexamples", "Minimal output entropy against coherent baselines");
  counter->add_option("--J", scan_J, "input spins")->required();
  counter->add_option("--Kmax", Kmax_text)->required();
  counter->add_option("--step", step);
  counter->add_option("--seed", seed);
  counter->add_option("--restarts", restarts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    if (*spectrum) {
      BerezinSpectrum s = berezin_spectrum(parse_spin(J_text, "--J"));
      std::cout << "ell,eigenvalue\n";
      for (std::size_t l = 0; l < s.eigenvalues.size(); ++l) std::cout << l << "," << format_number(s.eigenvalues[l]) << "\n";
      return 0;
    }
    if (*verify) {
      VerifyResult r = run_verify(which, load_config(config_path));
      write_text(out_path, dump_report(r.report));
      for (const auto& a : r.assertions)
        std::cerr << (a.passed ? "PASS " : "FAIL ") << a.name << " (" << a.violations << " violations)\n";
      return r.passed() ? 0 : kAssertionFailure;
    }
    if (*apply) {
      const HalfInt J = parse_spin(J_text, "--J"), K = parse_spin(K_text, "--K");
      ChannelWeights w;
      if (!M_text.empty())
        w[parse_spin(M_text, "--M")] = 1.0;
      else if (!weights_arg.empty())
        w = parse_weights(weights_arg);
      else
        throw ValidationError("channel apply needs --M or --weights");
      Channel ch(J, K, w);
      write_text(out_path, dump_report(operator_json(ch.apply(read_operator(rho_path)))));
      return 0;
    }
    if (*minimize) {
      const HalfInt J = parse_spin(J_text, "--J"), K = parse_spin(K_text, "--K");
      Channel ch(J, K, parse_weights(weights_arg));
      MinimizeOptions opt;
      opt.restarts = restarts;
      opt.seed = seed;
      MinimizeResult r = min_output_entropy(ch, opt);
      Json out{{"J", J.str()},
               {"K", K.str()},
               {"weights", weights_text(ch.weights())},
               {"restarts", restarts},
               {"seed", seed},
               {"value", r.value},
               {"state", state_json(r.state)},
               {"unconverged_starts", r.unconverged_starts}};
      std::cout << dump_report(out);
      return 0;
    }
    if (*counter) {
      ScanOptions opt;
      for (const auto& s : scan_J) opt.J_values.push_back(parse_spin(s, "--J"));
      opt.K_max = parse_spin(Kmax_text, "--Kmax");
      opt.step = step;
      opt.seed = seed;
      opt.restarts = restarts;
      auto rows = counterexample_scan(opt);
      std::cout << "J,K,weights,minimum,best_coherent,best_coherent_index,bloch_coherent,gap,unconverged_starts\n";
      for (const auto& r : rows)
        std::cout << r.J.str() << "," << r.K.str() << "," << weights_text(r.weights) << "," << format_number(r.minimum) << ","
                  << format_number(r.best_coherent) << "," << r.best_coherent_index.str() << "," << format_number(r.bloch_coherent)
                  << "," << format_number(r.gap()) << "," << r.unconverged_starts << "\n";
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAssertionFailure;
  }
  return kUsageError;
}
