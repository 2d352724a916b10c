#include "pseudomode/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pseudomode/loss_core.hpp"

namespace pseudomode {

namespace {

void require_raw(std::span<const double> raw, const char* op) {
  if (raw.empty()) throw std::invalid_argument(std::string(op) + ": empty dataset");
  for (double v : raw)
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(op) + ": dataset contains a non-finite value");
}

EstimateReport degenerate_report(const SampleSet& samples, Method method, double k, double m,
                                 double epsilon) {
  EstimateReport r;
  r.method = method;
  r.location_raw = samples.offset;
  r.location_normalized = 0.0;
  r.objective_value = average_loss(samples, k, m, 0.0);
  r.evaluations = 0;
  r.certified = true;
  r.k = k;
  r.m = m;
  r.epsilon = epsilon;
  return r;
}

}  // namespace

SampleSet normalize(std::span<const double> raw) {
  require_raw(raw, "normalize");
  const auto [mn, mx] = std::minmax_element(raw.begin(), raw.end());
  SampleSet s;
  s.offset = *mn;
  s.scale = *mx - *mn;
  s.values.reserve(raw.size());
  if (s.scale == 0.0) {
    s.values.assign(raw.size(), 0.0);
    return s;
  }
  for (double v : raw) s.values.push_back((v - s.offset) / s.scale);
  return s;
}

Baselines baselines(std::span<const double> raw, MedianRule rule) {
  require_raw(raw, "baselines");
  Baselines b;

  NeumaierSum sum;
  for (double v : raw) sum.add(v);
  b.mean = sum.value() / static_cast<double>(raw.size());

  std::vector<double> sorted(raw.begin(), raw.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (rule == MedianRule::Midpoint && n % 2 == 0)
    b.median = 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  else
    b.median = sorted[(n - 1) / 2];

  b.mode = sorted[0];
  std::size_t best_run = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    if (j - i > best_run) {  // strict: ties keep the earlier, smaller value
      best_run = j - i;
      b.mode = sorted[i];
    }
    i = j;
  }
  return b;
}

double average_loss(const SampleSet& samples, double k, double m, double x) {
  if (samples.values.empty()) throw std::invalid_argument("average_loss: empty sample set");
  const SmoothedHammingLoss loss(k, m);
  NeumaierSum sum;
  for (double s : samples.values) sum.add(loss.value(x - s));
  return sum.value() / static_cast<double>(samples.count());
}

GridMinimum grid_oracle(const SampleSet& samples, double k, double m, std::size_t grid_size) {
  if (samples.values.empty()) throw std::invalid_argument("grid_oracle: empty sample set");
  if (!(k > 0.0)) throw std::invalid_argument("grid_oracle: k must be > 0");
  if (!(m > -2.0)) throw std::invalid_argument("grid_oracle: m must be > -2");
  if (grid_size < 2) throw std::invalid_argument("grid_oracle: grid_size must be >= 2");

  std::vector<double> sorted = samples.values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double step = 1.0 / static_cast<double>(grid_size - 1);
  const double shrink = std::exp(-k * step);
  const double grow = std::exp(k * step);

  // e[j] tracks exp(-k |x - s_j|); left of the split it shrinks per step,
  // right of it it grows toward 1, and each sample reseeds exactly once when
  // the sweep crosses it.
  std::vector<double> e(n);
  for (std::size_t j = 0; j < n; ++j) e[j] = std::exp(-k * sorted[j]);
  std::size_t split = 0;
  while (split < n && sorted[split] <= 0.0) ++split;

  GridMinimum best{0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = static_cast<double>(i) * step;
    if (i > 0) {
      const std::size_t crossed = split;
      while (split < n && sorted[split] <= x) ++split;
      for (std::size_t j = 0; j < crossed; ++j) e[j] *= shrink;
      for (std::size_t j = crossed; j < split; ++j) e[j] = std::exp(-k * (x - sorted[j]));
      for (std::size_t j = split; j < n; ++j) e[j] *= grow;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ej = e[j];
      acc -= ej / (1.0 + m * ej + ej * ej);
    }
    const double value = acc / static_cast<double>(n);
    if (value < best.value) best = {x, value};
  }
  return best;
}

EstimateReport pseudo_mode(const SampleSet& samples, double k, double m, OptimizerKind kind,
                           double epsilon, std::size_t budget) {
  if (samples.values.empty()) throw std::invalid_argument("pseudo_mode: empty sample set");
  if (!(epsilon > 0.0)) throw std::invalid_argument("pseudo_mode: epsilon must be > 0");
  const SmoothedHammingLoss loss(k, m);  // validates k, m

  const Method method =
      kind == OptimizerKind::Lipschitz ? Method::PseudoLipschitz : Method::PseudoQuasiConvex;
  if (samples.scale == 0.0) return degenerate_report(samples, method, k, m, epsilon);

  EstimateReport r;
  r.method = method;
  r.k = k;
  r.m = m;
  r.epsilon = epsilon;

  if (kind == OptimizerKind::QuasiConvex) {
    if (m != 2.0)
      throw std::invalid_argument("pseudo_mode: the quasi-convex path requires m == 2");
    if (k != 2.633)
      r.warnings.push_back("quasi-convexity of the objective is certified near k = 2.633; "
                           "results for other k are best-effort");
    const ObjectiveConfig config{k, m, Aggregation::Average};
    QuasiOptions options;
    options.epsilon = epsilon;
    options.max_evals = budget;
    const QuasiOptResult q = quasiconvex_optimize(
        [&](double x) { return objective_value(config, samples, x); }, options);
    r.location_normalized = q.best_x;
    r.objective_value = q.best_value;
    r.evaluations = q.evaluations;
    r.certified = q.certified;
    r.quasi_trace = q.trace;
    if (q.contiguity_violated)
      r.warnings.push_back("tied minimizers were not contiguous; bracket widened to their span");
  } else {
    std::function<double(double)> objective;
    if (m == 2.0) {
      const ObjectiveConfig config{k, m, Aggregation::Average};
      objective = [&samples, config](double x) { return objective_value(config, samples, x); };
    } else {
      objective = [&samples, k, m](double x) { return average_loss(samples, k, m, x); };
    }
    const GlobalOptResult g = lipschitz_optimize(objective, loss.lipschitz_bound(), epsilon, budget);
    r.location_normalized = g.best_x;
    r.objective_value = g.best_value;
    r.evaluations = g.evaluations;
    r.certified = g.certified;
    r.lipschitz_trace = g.trace;
  }
  r.location_raw = samples.denormalize(r.location_normalized);
  return r;
}

EstimateReport estimate(std::span<const double> raw, Method method,
                        const EstimatorParams& params) {
  require_raw(raw, "estimate");
  const SampleSet samples = normalize(raw);

  switch (method) {
    case Method::PseudoLipschitz:
      return pseudo_mode(samples, params.k, params.m, OptimizerKind::Lipschitz, params.epsilon,
                         params.budget);
    case Method::PseudoQuasiConvex:
      return pseudo_mode(samples, params.k, params.m, OptimizerKind::QuasiConvex, params.epsilon,
                         params.budget);
    case Method::GridOracle: {
      if (samples.scale == 0.0)
        return degenerate_report(samples, method, params.k, params.m, params.epsilon);
      const GridMinimum gm = grid_oracle(samples, params.k, params.m, params.oracle_grid);
      EstimateReport r;
      r.method = method;
      r.location_normalized = gm.x;
      r.location_raw = samples.denormalize(gm.x);
      r.objective_value = gm.value;
      r.evaluations = params.oracle_grid;
      r.certified = true;
      r.k = params.k;
      r.m = params.m;
      r.epsilon = params.epsilon;
      return r;
    }
    default: {
      const Baselines b = baselines(raw, params.median_rule);
      EstimateReport r;
      r.method = method;
      r.location_raw = method == Method::Mean ? b.mean
                       : method == Method::Median ? b.median
                                                  : b.mode;
      r.location_normalized =
          samples.scale > 0.0 ? (r.location_raw - samples.offset) / samples.scale : 0.0;
      r.objective_value = average_loss(samples, params.k, params.m, r.location_normalized);
      r.evaluations = 0;
      r.certified = true;
      r.k = params.k;
      r.m = params.m;
      r.epsilon = params.epsilon;
      return r;
    }
  }
}

}  // namespace pseudomode
