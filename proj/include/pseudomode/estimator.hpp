#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pseudomode/lipschitz_opt.hpp"
#include "pseudomode/objective.hpp"
#include "pseudomode/quasiconvex_opt.hpp"

namespace pseudomode {

enum class Method { Mean, Median, ExactMode, PseudoLipschitz, PseudoQuasiConvex, GridOracle };
enum class MedianRule { Lower, Midpoint };
enum class OptimizerKind { Lipschitz, QuasiConvex };

struct EstimatorParams {
  double k = 2.633;
  double m = 2.0;
  double epsilon = 1e-6;
  std::size_t budget = 1000000;
  std::size_t oracle_grid = 1000001;
  MedianRule median_rule = MedianRule::Lower;
};

struct EstimateReport {
  Method method = Method::PseudoQuasiConvex;
  double location_raw = 0.0;
  double location_normalized = 0.0;
  double objective_value = 0.0;  // average objective at the location, normalized domain
  std::size_t evaluations = 0;
  bool certified = false;
  double k = 2.633;
  double m = 2.0;
  double epsilon = 1e-6;
  std::vector<std::string> warnings;
  std::vector<LipschitzTraceEntry> lipschitz_trace;
  std::vector<QuasiIterationRecord> quasi_trace;
};

// Min-max map of raw data onto [0, 1].  Constant data yields scale 0 with all
// normalized values at 0, which downstream code treats as already solved.
SampleSet normalize(std::span<const double> raw);

struct Baselines {
  double mean;
  double median;  // lower median by default: sorted[(n-1)/2]
  double mode;    // most frequent exact value, ties toward the smallest
};

Baselines baselines(std::span<const double> raw, MedianRule rule = MedianRule::Lower);

// Average of the bounded even loss over the samples, valid for any m > -2.
double average_loss(const SampleSet& samples, double k, double m, double x);

struct GridMinimum {
  double x;      // normalized coordinate of the grid argmin, smallest on ties
  double value;
};

// Exhaustive scan of the average objective on a uniform [0, 1] grid.  Runs on
// a per-sample exp recurrence, so cost is one multiply per sample per point.
GridMinimum grid_oracle(const SampleSet& samples, double k, double m, std::size_t grid_size);

// Minimize the average objective over the normalized domain and map back to
// raw units.  QuasiConvex requires m == 2 and is certified around k = 2.633;
// Lipschitz accepts any valid (k, m) via the loss-level bound on |C'|.
EstimateReport pseudo_mode(const SampleSet& samples, double k, double m, OptimizerKind kind,
                           double epsilon, std::size_t budget = 1000000);

// One entry point over all methods; baseline methods report zero evaluations.
EstimateReport estimate(std::span<const double> raw, Method method, const EstimatorParams& params);

}  // namespace pseudomode
