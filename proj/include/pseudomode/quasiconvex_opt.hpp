#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pseudomode {

struct SamplePoint {
  double x;
  double value;
};

/// Index range [lo, hi] spanning the tied-minimum points of a sampled sweep.
struct MinimizerRange {
  std::size_t lo;
  std::size_t hi;
  bool contiguous;  // false when a non-minimizer sits between two minimizers
};

// Points with value <= min + tie_tol, over samples sorted by x.  When the
// tied set is not contiguous the range widens to the full minimizer span and
// the flag reports the anomaly.
MinimizerRange minimizer_set(std::span<const SamplePoint> sampled, double tie_tol);

enum class QuasiStop {
  BracketWidth,      // certified: minimizer bracket narrowed to epsilon
  PlateauResolved,   // tied flat region sampled down to epsilon spacing
  SampleAnchor,      // a tied minimizer hit a caller-supplied coordinate
  BudgetExhausted,
  ResolutionFloor,   // adjacent points too close for midpoints to exist
};

struct QuasiIterationRecord {
  std::size_t iteration;
  std::vector<double> queries;  // coordinates evaluated this round, ascending
  double bracket_low;
  double bracket_high;
  double width;
};

struct QuasiOptions {
  double epsilon = 1e-6;
  double tie_tol = -1.0;            // negative: 1e-13 * max(1, |min value|), per round
  std::size_t max_evals = 100000;
  std::vector<double> anchors;      // optional early-stop coordinates (sample-set mode)
};

struct QuasiOptResult {
  double best_x = 0.0;
  double best_value = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 1.0;
  std::size_t evaluations = 0;
  bool certified = false;
  QuasiStop reason = QuasiStop::BudgetExhausted;
  bool contiguity_violated = false;
  std::vector<QuasiIterationRecord> trace;
};

// Derivative-free refinement over [0, 1]: keep the tied-minimum points plus
// one neighbor on each side, insert midpoints of the kept points, repeat.
// Certified once the kept bracket is narrower than epsilon.  Evaluations are
// memoized by coordinate, so revisited points cost nothing.
QuasiOptResult quasiconvex_optimize(const std::function<double(double)>& objective,
                                    const QuasiOptions& options);

}  // namespace pseudomode
