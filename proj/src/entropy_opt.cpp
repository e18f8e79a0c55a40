#include "spinsemi/entropy_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinsemi/errors.hpp"
#include "spinsemi/parallel.hpp"
#include "spinsemi/quantize.hpp"
#include "spinsemi/random.hpp"
#include "spinsemi/su2_rep.hpp"

namespace spinsemi {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kFlat = 1e-15;

Operator projector(const StateVector& psi) { return psi * psi.adjoint(); }

struct Run {
  double value = 0.0;
  StateVector state;
  std::vector<double> trace_log;
  bool converged = false;
};

Run descend(const Channel& channel, StateVector psi, const MinimizeOptions& opt) {
  Run run;
  psi.normalize();
  double f = output_entropy(channel, psi);
  StateVector g = entropy_gradient(channel, psi);
  StateVector psi_prev, g_prev;
  double step = 0.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double gn2 = g.squaredNorm();
    if (std::sqrt(gn2) < opt.gradient_tolerance) {
      run.converged = true;
      break;
    }
    if (it == 0) {
      step = 0.1 / std::sqrt(gn2);
    } else {
      // Barzilai-Borwein trial step.
      StateVector s = psi - psi_prev, y = g - g_prev;
      double sy = std::abs(s.dot(y).real());
      if (sy > 0.0) step = std::clamp(s.squaredNorm() / sy, 1e-8, 1e3);
    }
    StateVector cand;
    double fc = f;
    bool accepted = false;
    for (; step > 1e-16; step *= 0.5) {
      cand = (psi - step * g).normalized();
      fc = output_entropy(channel, cand);
      if (fc <= f - kArmijo * step * gn2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      run.converged = std::sqrt(gn2) < 1e-6;
      break;
    }
    psi_prev = psi;
    g_prev = g;
    psi = cand;
    const double decrease = f - fc;
    f = fc;
    g = entropy_gradient(channel, psi);
    run.trace_log.push_back(f);
    if (decrease < kFlat) {
      run.converged = true;
      break;
    }
  }
  run.value = output_entropy(channel, psi);
  run.state = psi;
  return run;
}

}  // namespace

double output_entropy(const Channel& channel, const StateVector& psi) {
  return von_neumann_entropy(channel.apply(projector(psi)));
}

StateVector entropy_gradient(const Channel& channel, const StateVector& psi) {
  Operator sigma = channel.apply(projector(psi));
  sigma = 0.5 * (sigma + sigma.adjoint());
  // For a trace functional the Daleckii-Krein first derivative collapses to phi'(sigma).
  Operator log1 = hermitian_apply(sigma, [](double x) { return std::log(std::max(x, kEigenvalueClip)) + 1.0; });
  StateVector g = -2.0 * channel.adjoint_apply(log1) * psi;
  g -= psi * psi.dot(g);
  return g;
}

double gradient_check(const Channel& channel, const StateVector& psi, double step) {
  StateVector u = psi.normalized();
  StateVector g = entropy_gradient(channel, u);
  const int n = int(u.size());
  Eigen::VectorXd analytic(2 * n), numeric(2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    StateVector v = StateVector::Zero(n);
    v(k % n) = k < n ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    analytic(k) = g.dot(v).real();
    numeric(k) = (output_entropy(channel, (u + step * v).normalized()) - output_entropy(channel, (u - step * v).normalized())) /
                 (2.0 * step);
  }
  const double scale = analytic.norm();
  return scale > 0.0 ? (analytic - numeric).norm() / scale : numeric.norm();
}

MinimizeResult min_output_entropy(const Channel& channel, const MinimizeOptions& options) {
  if (options.restarts < 1) throw ValidationError("restarts must be at least 1");
  const int n = channel.J().dim();
  const std::size_t starts = n + options.restarts;
  auto run_start = [&](std::size_t k) {
    StateVector psi;
    if (int(k) < n) {
      psi = StateVector::Unit(n, int(k));
    } else {
      Rng rng(derive_seed(options.seed, k));
      psi = random_state(n, rng);
    }
    return descend(channel, psi, options);
  };
  std::vector<Run> runs;
  if (options.parallel) {
    runs = parallel_map(starts, run_start);
  } else {
    for (std::size_t k = 0; k < starts; ++k) runs.push_back(run_start(k));
  }
  MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!runs[k].converged) ++best.unconverged_starts;
    if (runs[k].value < best.value) {
      best.value = runs[k].value;
      best.state = runs[k].state;
      best.trace_log = runs[k].trace_log;
      best.best_start = int(k);
    }
  }
  return best;
}

double coherent_baseline(const Channel& channel, HalfInt i) {
  require_coherent_index(channel.J(), i);
  return output_entropy(channel, StateVector::Unit(channel.J().dim(), index_of(channel.J(), i)));
}

double coherent_baseline_at(const Channel& channel, HalfInt i, const Eigen::Vector3d& omega) {
  return output_entropy(channel, coherent_vector(channel.J(), omega, i));
}

std::vector<std::vector<double>> simplex_grid(int n, int divisions) {
  if (n < 1 || divisions < 1) throw ValidationError("simplex grid needs at least one vertex and one division");
  std::vector<std::vector<double>> out;
  std::vector<int> counts(n, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      counts[pos] = left;
      std::vector<double> w(n);
      for (int k = 0; k < n; ++k) w[k] = double(counts[k]) / divisions;
      out.push_back(std::move(w));
      return;
    }
    for (int c = left; c >= 0; --c) {
      counts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  rec(rec, 0, divisions);
  return out;
}

std::vector<ScanRow> counterexample_scan(const ScanOptions& options) {
  const double divisions_real = 1.0 / options.step;
  const int divisions = int(std::lround(divisions_real));
  if (!(options.step > 0.0) || std::abs(divisions_real - divisions) > 1e-9)
    throw ValidationError("simplex step must be 1/n for a positive integer n");

  struct Cell {
    HalfInt J, K;
    ChannelWeights weights;
  };
  std::vector<Cell> cells;
  for (HalfInt J : options.J_values)
    for (HalfInt K = half(1); K <= options.K_max; K += half(1)) {
      std::vector<HalfInt> labels = vertex_labels(J, K);
      for (const auto& w : simplex_grid(int(labels.size()), divisions)) {
        ChannelWeights weights;
        for (std::size_t v = 0; v < labels.size(); ++v)
          if (w[v] > 0.0) weights[labels[v]] = w[v];
        cells.push_back({J, K, weights});
      }
    }

  if (!cells.empty()) {
    // Covariance check for the baseline: north pole against a random direction.
    Rng rng(derive_seed(options.seed, 0xC0FFEE));
    Channel ch(cells.back().J, cells.back().K, cells.back().weights);
    const HalfInt J = cells.back().J;
    for (HalfInt i = -J; i <= J; i += HalfInt(1))
      if (std::abs(coherent_baseline(ch, i) - coherent_baseline_at(ch, i, random_direction(rng))) > 1e-10)
        throw std::runtime_error("coherent baseline depends on the direction");
  }

  return parallel_map(cells.size(), [&](std::size_t c) {
    const Cell& cell = cells[c];
    Channel ch(cell.J, cell.K, cell.weights);
    MinimizeOptions opt;
    opt.restarts = options.restarts;
    opt.seed = derive_seed(options.seed, c);
    opt.parallel = false;
    MinimizeResult r = min_output_entropy(ch, opt);
    ScanRow row;
    row.J = cell.J;
    row.K = cell.K;
    row.weights = cell.weights;
    row.minimum = r.value;
    row.unconverged_starts = r.unconverged_starts;
    row.best_coherent = std::numeric_limits<double>::infinity();
    for (HalfInt i = -cell.J; i <= cell.J; i += HalfInt(1)) {
      double b = coherent_baseline(ch, i);
      if (b < row.best_coherent) {
        row.best_coherent = b;
        row.best_coherent_index = i;
      }
    }
    row.bloch_coherent = coherent_baseline(ch, cell.J);
    return row;
  });
}

}  // namespace spinsemi
