#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pseudomode {

/// Normalized samples plus the affine map back to raw units: raw = offset + scale * t.
struct SampleSet {
  std::vector<double> values;  // each in [0, 1], input order preserved
  double offset = 0.0;
  double scale = 0.0;          // 0 marks a constant raw dataset

  std::size_t count() const { return values.size(); }
  double raw(std::size_t i) const { return offset + scale * values[i]; }
  double denormalize(double t) const { return offset + scale * t; }

  static SampleSet from_normalized(std::vector<double> values, double offset, double scale);
};

enum class Aggregation { Sum, Average };

/// Parameters of the sample objective C(x) = agg_n -1/(alpha_n(x) + 2).
///
/// The formulas in this module hard-code the +2 shift, so every operation
/// here requires m == 2; other m values are served by composing loss_core
/// terms (see the estimator).
struct ObjectiveConfig {
  double k = 2.633;
  double m = 2.0;
  Aggregation aggregation = Aggregation::Average;

  void validate() const {
    if (!(k > 0.0)) throw std::invalid_argument("ObjectiveConfig: k must be > 0");
    if (!(m > -2.0)) throw std::invalid_argument("ObjectiveConfig: m must be > -2");
  }
};

/// Softmax-like weights (alpha_n(x)+2)^{-2} / Z over the samples.
struct WeightDistribution {
  std::vector<double> probs;  // sums to 1 within 1e-12
  double partition;           // Z, the unnormalized mass
};

struct CheckReport {
  bool passed;
  double first_violation_x;  // NaN when passed
};

struct UnimodalityReport {
  bool unimodal;
  int sign_changes;          // count of descent<->ascent switches in first differences
  double first_violation_x;  // NaN when unimodal
};

/// Dense symmetric matrix in row-major order, sized for small sample counts.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit SquareMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Compensated accumulator (Neumaier variant); order-dependent but exact to
/// one rounding of the running compensation, used for reproducible sums.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// e^{k(x-x_n)} + e^{-k(x-x_n)} >= 2, equality iff x = x_n; saturates to +inf.
double alpha_n(const ObjectiveConfig& config, const SampleSet& samples, double x, std::size_t n);

// d/dx alpha_n; satisfies alpha_n_d1^2 = k^2 (alpha_n^2 - 4).
double alpha_n_d1(const ObjectiveConfig& config, const SampleSet& samples, double x,
                  std::size_t n);

// C(x), C'(x), C''(x); compensated sums in ascending sample-index order.
double objective_value(const ObjectiveConfig& config, const SampleSet& samples, double x);
double objective_d1(const ObjectiveConfig& config, const SampleSet& samples, double x);
double objective_d2(const ObjectiveConfig& config, const SampleSet& samples, double x);

WeightDistribution weights(const ObjectiveConfig& config, const SampleSet& samples, double x);

// E_p[e^{k(x-x_n)}] * E_p[e^{-k(x-x_n)}] under the weights at x; >= 1.
double certificate_factor(const ObjectiveConfig& config, const SampleSet& samples, double x);

// 1 + (e^k + e^{-k} - 2)/4; certificates need this below 4.
double certificate_bound(double k);

// Grid scan of [0, 1]: wherever |C'| <= delta, require C'' >= -tol_zero with
// tol_zero = 1e-10 * k^2 * N_eff.  Reports the first violating x.
CheckReport quasiconvexity_check(const ObjectiveConfig& config, const SampleSet& samples,
                                 double delta, std::size_t grid_size);

// Grid scan of [lo, hi]: require C'' + lambda * C'^2 >= -tol_zero everywhere.
CheckReport exp_convexify_check(const ObjectiveConfig& config, const SampleSet& samples,
                                double lambda, std::size_t grid_size, double lo = 0.0,
                                double hi = 1.0);

// Sign sequence of grid first differences, ties within 1e-14 collapsed; at
// most one descent-to-ascent switch passes.
UnimodalityReport check_grid_unimodality(const ObjectiveConfig& config, const SampleSet& samples,
                                         std::size_t grid_size);

// delta and tolerance defaults used by the checks above; N_eff is the sample
// count under Sum aggregation and 1 under Average.
double effective_count(const ObjectiveConfig& config, const SampleSet& samples);
double default_quasi_delta(const ObjectiveConfig& config, const SampleSet& samples);

// Hessian of F(x_1..x_N) = sum_{m,n} p_m p_n e^{k(x_n - x_m)} with the
// weights held fixed; symmetric, zero row sums, positive semidefinite.
SquareMatrix f_hessian(double k, std::span<const double> positions,
                       std::span<const double> probs);

}  // namespace pseudomode
