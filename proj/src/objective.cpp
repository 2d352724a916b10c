#include "pseudomode/objective.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pseudomode {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-sample pieces of C on E = exp(-k|x - x_n|), stable for any k*x.
inline double term_value(double e) {
  const double den = 1.0 + e;
  return -e / (den * den);
}

inline double term_d1_mag(double k, double e) {
  const double den = 1.0 + e;
  return k * e * (1.0 - e) / (den * den * den);
}

inline double term_d2(double k, double e) {
  const double den = 1.0 + e;
  const double den2 = den * den;
  return -k * k * e * (e * e - 4.0 * e + 1.0) / (den2 * den2);
}

void require_m2(const ObjectiveConfig& config, const char* op) {
  config.validate();
  if (config.m != 2.0)
    throw std::invalid_argument(std::string(op) +
                                ": objective formulas fix m = 2; compose loss_core terms for other m");
}

void require_samples(const SampleSet& samples, const char* op) {
  if (samples.values.empty())
    throw std::invalid_argument(std::string(op) + ": empty sample set");
}

struct Derivatives {
  double value;
  double d1;
  double d2;
};

Derivatives evaluate_all(const ObjectiveConfig& config, const SampleSet& samples, double x) {
  NeumaierSum v, g, h;
  const double k = config.k;
  for (double s : samples.values) {
    const double d = x - s;
    const double e = std::exp(-std::abs(k * d));
    v.add(term_value(e));
    const double mag = term_d1_mag(k, e);
    g.add(d < 0.0 ? -mag : mag);
    h.add(term_d2(k, e));
  }
  const double scale =
      config.aggregation == Aggregation::Average ? 1.0 / static_cast<double>(samples.count()) : 1.0;
  return {v.value() * scale, g.value() * scale, h.value() * scale};
}

}  // namespace

SampleSet SampleSet::from_normalized(std::vector<double> values, double offset, double scale) {
  if (values.empty()) throw std::invalid_argument("SampleSet: empty sample list");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("SampleSet: normalized values must lie in [0, 1]");
  if (!(scale >= 0.0) || !std::isfinite(scale) || !std::isfinite(offset))
    throw std::invalid_argument("SampleSet: offset/scale must be finite, scale >= 0");
  SampleSet s;
  s.values = std::move(values);
  s.offset = offset;
  s.scale = scale;
  return s;
}

double alpha_n(const ObjectiveConfig& config, const SampleSet& samples, double x, std::size_t n) {
  config.validate();
  if (n >= samples.count()) throw std::out_of_range("alpha_n: sample index out of range");
  return 2.0 * std::cosh(config.k * (x - samples.values[n]));
}

double alpha_n_d1(const ObjectiveConfig& config, const SampleSet& samples, double x,
                  std::size_t n) {
  config.validate();
  if (n >= samples.count()) throw std::out_of_range("alpha_n_d1: sample index out of range");
  return 2.0 * config.k * std::sinh(config.k * (x - samples.values[n]));
}

double objective_value(const ObjectiveConfig& config, const SampleSet& samples, double x) {
  require_m2(config, "objective_value");
  require_samples(samples, "objective_value");
  return evaluate_all(config, samples, x).value;
}

double objective_d1(const ObjectiveConfig& config, const SampleSet& samples, double x) {
  require_m2(config, "objective_d1");
  require_samples(samples, "objective_d1");
  return evaluate_all(config, samples, x).d1;
}

double objective_d2(const ObjectiveConfig& config, const SampleSet& samples, double x) {
  require_m2(config, "objective_d2");
  require_samples(samples, "objective_d2");
  return evaluate_all(config, samples, x).d2;
}

WeightDistribution weights(const ObjectiveConfig& config, const SampleSet& samples, double x) {
  require_m2(config, "weights");
  require_samples(samples, "weights");
  const std::size_t n = samples.count();
  WeightDistribution w;
  w.probs.resize(n);
  NeumaierSum z;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::cosh(config.k * (x - samples.values[i]));
    const double den = a + 2.0;
    w.probs[i] = 1.0 / (den * den);
    z.add(w.probs[i]);
  }
  w.partition = z.value();
  for (double& p : w.probs) p /= w.partition;
  return w;
}

double certificate_factor(const ObjectiveConfig& config, const SampleSet& samples, double x) {
  require_m2(config, "certificate_factor");
  require_samples(samples, "certificate_factor");
  const double k = config.k;
  NeumaierSum z, up, down;
  for (double s : samples.values) {
    const double d = x - s;
    const double ep = std::exp(k * d);
    const double em = std::exp(-k * d);
    const double den = ep + em + 2.0;
    const double w = 1.0 / (den * den);
    z.add(w);
    up.add(w * ep);
    down.add(w * em);
  }
  const double zz = z.value();
  return (up.value() / zz) * (down.value() / zz);
}

double certificate_bound(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("certificate_bound: k must be > 0");
  return 1.0 + 0.25 * (std::exp(k) + std::exp(-k) - 2.0);
}

double effective_count(const ObjectiveConfig& config, const SampleSet& samples) {
  return config.aggregation == Aggregation::Sum ? static_cast<double>(samples.count()) : 1.0;
}

double default_quasi_delta(const ObjectiveConfig& config, const SampleSet& samples) {
  return 1e-3 * config.k * effective_count(config, samples);
}

CheckReport quasiconvexity_check(const ObjectiveConfig& config, const SampleSet& samples,
                                 double delta, std::size_t grid_size) {
  require_m2(config, "quasiconvexity_check");
  require_samples(samples, "quasiconvexity_check");
  if (!(delta >= 0.0)) throw std::invalid_argument("quasiconvexity_check: delta must be >= 0");
  if (grid_size < 2) throw std::invalid_argument("quasiconvexity_check: grid_size must be >= 2");
  const double tol_zero = 1e-10 * config.k * config.k * effective_count(config, samples);
  const double step = 1.0 / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = static_cast<double>(i) * step;
    const Derivatives d = evaluate_all(config, samples, x);
    if (std::abs(d.d1) <= delta && d.d2 < -tol_zero) return {false, x};
  }
  return {true, kNaN};
}

CheckReport exp_convexify_check(const ObjectiveConfig& config, const SampleSet& samples,
                                double lambda, std::size_t grid_size, double lo, double hi) {
  require_m2(config, "exp_convexify_check");
  require_samples(samples, "exp_convexify_check");
  if (!(lambda >= 0.0)) throw std::invalid_argument("exp_convexify_check: lambda must be >= 0");
  if (grid_size < 2 || !(lo < hi))
    throw std::invalid_argument("exp_convexify_check: bad grid");
  const double tol_zero = 1e-10 * config.k * config.k * effective_count(config, samples);
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const Derivatives d = evaluate_all(config, samples, x);
    if (d.d2 + lambda * d.d1 * d.d1 < -tol_zero) return {false, x};
  }
  return {true, kNaN};
}

UnimodalityReport check_grid_unimodality(const ObjectiveConfig& config, const SampleSet& samples,
                                         std::size_t grid_size) {
  require_m2(config, "check_grid_unimodality");
  require_samples(samples, "check_grid_unimodality");
  if (grid_size < 3) throw std::invalid_argument("check_grid_unimodality: grid too small");
  const double step = 1.0 / static_cast<double>(grid_size - 1);
  double prev = objective_value(config, samples, 0.0);
  int prev_sign = 0;
  int changes = 0;
  bool seen_ascent = false;
  UnimodalityReport report{true, 0, kNaN};
  for (std::size_t i = 1; i < grid_size; ++i) {
    const double x = static_cast<double>(i) * step;
    const double v = objective_value(config, samples, x);
    const double diff = v - prev;
    prev = v;
    int sign = 0;
    if (diff > 1e-14) sign = 1;
    else if (diff < -1e-14) sign = -1;
    if (sign == 0) continue;  // ties collapse
    if (prev_sign != 0 && sign != prev_sign) ++changes;
    if (sign > 0) seen_ascent = true;
    if (sign < 0 && seen_ascent && report.unimodal) {
      report.unimodal = false;
      report.first_violation_x = x - step;
    }
    prev_sign = sign;
  }
  report.sign_changes = changes;
  return report;
}

SquareMatrix f_hessian(double k, std::span<const double> positions,
                       std::span<const double> probs) {
  if (!(k > 0.0)) throw std::invalid_argument("f_hessian: k must be > 0");
  if (positions.size() != probs.size() || positions.empty())
    throw std::invalid_argument("f_hessian: positions and probs must match and be nonempty");
  for (double p : probs)
    if (!(p >= 0.0)) throw std::invalid_argument("f_hessian: probs must be nonnegative");
  const std::size_t n = positions.size();
  SquareMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = 2.0 * std::cosh(k * (positions[i] - positions[j]));
      const double off = -k * k * probs[i] * probs[j] * c;
      h.at(i, j) = off;
      h.at(j, i) = off;
    }
    double diag = 0.0;  // own formula, not the negated off-diagonal sum
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      diag += probs[j] * 2.0 * std::cosh(k * (positions[i] - positions[j]));
    }
    h.at(i, i) = k * k * probs[i] * diag;
  }
  return h;
}

}  // namespace pseudomode
