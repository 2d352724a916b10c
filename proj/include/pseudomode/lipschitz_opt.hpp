#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace pseudomode {

/// Midpoint query of a bracket plus the lower-bound score used to rank it.
struct ScoredQuery {
  double query;
  double score;
};

// score = min(v_left, v_right) - lipschitz * (x_right - x_left) / 2, a valid
// lower bound on any lipschitz-bounded objective over [x_left, x_right].
ScoredQuery score(double x_left, double x_right, double v_left, double v_right, double lipschitz);

/// Search bracket with its endpoint values and stored score.
struct CandidateInterval {
  double x_left;
  double x_right;
  double v_left;
  double v_right;
  double score;

  double query() const { return 0.5 * (x_left + x_right); }
};

/// Min-heap order: lowest score first, ties broken toward the smaller x_left.
struct IntervalScoreOrder {
  bool operator()(const CandidateInterval& a, const CandidateInterval& b) const {
    if (a.score != b.score) return a.score > b.score;
    return a.x_left > b.x_left;
  }
};

struct LipschitzTraceEntry {
  std::size_t index;   // 1-based evaluation number
  double x;
  double value;
  double score;        // score of the extracted bracket; NaN for the two seeds
  double best_value;
  double gap;          // certified gap after this step; inf until a bound exists
};

struct GlobalOptResult {
  double best_x = 0.0;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  double certified_gap = 0.0;  // best_value minus the best proven lower bound
  bool certified = false;
  std::vector<LipschitzTraceEntry> trace;
};

// Global minimization over [0, 1] by best-first bracket splitting.  Stops
// once the certified gap reaches epsilon or max_evals objective evaluations
// ran.  Brackets narrower than 1e-14 are not refined further and queries are
// deduplicated against earlier evaluations at the same resolution.
GlobalOptResult lipschitz_optimize(const std::function<double(double)>& objective,
                                   double lipschitz, double epsilon,
                                   std::size_t max_evals = 1000000);

}  // namespace pseudomode
