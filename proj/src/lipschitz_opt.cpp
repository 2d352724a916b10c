#include "pseudomode/lipschitz_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>

namespace pseudomode {

namespace {
constexpr double kCoordinateResolution = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

ScoredQuery score(double x_left, double x_right, double v_left, double v_right,
                  double lipschitz) {
  if (!(x_right > x_left)) throw std::invalid_argument("score: empty bracket");
  if (!(lipschitz > 0.0)) throw std::invalid_argument("score: lipschitz must be > 0");
  return {0.5 * (x_left + x_right),
          std::min(v_left, v_right) - 0.5 * lipschitz * (x_right - x_left)};
}

GlobalOptResult lipschitz_optimize(const std::function<double(double)>& objective,
                                   double lipschitz, double epsilon, std::size_t max_evals) {
  if (!objective) throw std::invalid_argument("lipschitz_optimize: objective not callable");
  if (!(lipschitz > 0.0)) throw std::invalid_argument("lipschitz_optimize: lipschitz must be > 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("lipschitz_optimize: epsilon must be > 0");
  if (max_evals < 2) throw std::invalid_argument("lipschitz_optimize: max_evals must be >= 2");

  GlobalOptResult res;
  res.best_value = kInf;

  std::map<double, double> seen;
  auto evaluate = [&](double x) {
    auto it = seen.lower_bound(x - kCoordinateResolution);
    if (it != seen.end() && std::abs(it->first - x) <= kCoordinateResolution) return it->second;
    const double v = objective(x);
    ++res.evaluations;
    seen.emplace(x, v);
    if (v < res.best_value || (v == res.best_value && x < res.best_x)) {
      res.best_value = v;
      res.best_x = x;
    }
    return v;
  };

  std::priority_queue<CandidateInterval, std::vector<CandidateInterval>, IntervalScoreOrder> queue;
  // Lower bound over brackets dropped at the width floor; they are never
  // refined again, so their scores stay part of the certificate.
  double floor_bound = kInf;
  double proven_bound = -kInf;

  auto push_child = [&](double xl, double xr, double vl, double vr) {
    const ScoredQuery sq = score(xl, xr, vl, vr, lipschitz);
    if (xr - xl <= 2.0 * kCoordinateResolution)
      floor_bound = std::min(floor_bound, sq.score);
    else
      queue.push({xl, xr, vl, vr, sq.score});
  };

  auto current_bound = [&]() {
    const double queue_min = queue.empty() ? kInf : queue.top().score;
    return std::min(queue_min, floor_bound);
  };

  const double v0 = evaluate(0.0);
  res.trace.push_back({res.evaluations, 0.0, v0, kNaN, res.best_value, kInf});
  const double v1 = evaluate(1.0);
  res.trace.push_back({res.evaluations, 1.0, v1, kNaN, res.best_value, kInf});
  push_child(0.0, 1.0, v0, v1);

  while (true) {
    proven_bound = std::max(proven_bound, current_bound());
    const double gap = std::max(0.0, res.best_value - proven_bound);
    if (gap <= epsilon) {
      res.certified = true;
      res.certified_gap = gap;
      break;
    }
    if (queue.empty() || res.evaluations >= max_evals) {
      res.certified = false;
      res.certified_gap = gap;
      break;
    }

    const CandidateInterval top = queue.top();
    queue.pop();
    const double q = top.query();
    const double v = evaluate(q);
    push_child(top.x_left, q, top.v_left, v);
    push_child(q, top.x_right, v, top.v_right);

    proven_bound = std::max(proven_bound, current_bound());
    res.trace.push_back({res.evaluations, q, v, top.score, res.best_value,
                         std::max(0.0, res.best_value - proven_bound)});
  }
  return res;
}

}  // namespace pseudomode
