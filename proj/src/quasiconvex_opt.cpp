#include "pseudomode/quasiconvex_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace pseudomode {

MinimizerRange minimizer_set(std::span<const SamplePoint> sampled, double tie_tol) {
  if (sampled.empty()) throw std::invalid_argument("minimizer_set: no samples");
  if (!(tie_tol >= 0.0)) throw std::invalid_argument("minimizer_set: tie_tol must be >= 0");
  double min_value = sampled[0].value;
  for (const SamplePoint& p : sampled) min_value = std::min(min_value, p.value);
  const double cut = min_value + tie_tol;
  std::size_t lo = sampled.size(), hi = 0;
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    if (sampled[i].value <= cut) {
      lo = std::min(lo, i);
      hi = i;
    }
  }
  bool contiguous = true;
  for (std::size_t i = lo; i <= hi; ++i)
    if (sampled[i].value > cut) contiguous = false;
  return {lo, hi, contiguous};
}

QuasiOptResult quasiconvex_optimize(const std::function<double(double)>& objective,
                                    const QuasiOptions& options) {
  if (!objective) throw std::invalid_argument("quasiconvex_optimize: objective not callable");
  if (!(options.epsilon > 0.0))
    throw std::invalid_argument("quasiconvex_optimize: epsilon must be > 0");
  if (options.max_evals < 3)
    throw std::invalid_argument("quasiconvex_optimize: max_evals must be >= 3");

  QuasiOptResult res;
  res.best_value = std::numeric_limits<double>::infinity();

  std::map<double, double> seen;
  bool budget_hit = false;
  auto evaluate = [&](double x) {
    auto it = seen.find(x);
    if (it != seen.end()) return it->second;
    if (res.evaluations >= options.max_evals) {
      budget_hit = true;
      return std::numeric_limits<double>::quiet_NaN();
    }
    const double v = objective(x);
    ++res.evaluations;
    seen.emplace(x, v);
    if (v < res.best_value || (v == res.best_value && x < res.best_x)) {
      res.best_value = v;
      res.best_x = x;
    }
    return v;
  };

  std::vector<double> anchors = options.anchors;
  std::sort(anchors.begin(), anchors.end());
  auto anchor_match = [&](double x) {
    auto it = std::lower_bound(anchors.begin(), anchors.end(), x - 1e-12);
    return it != anchors.end() && std::abs(*it - x) <= 1e-12;
  };

  std::vector<SamplePoint> points;
  for (double x : {0.0, 0.5, 1.0}) points.push_back({x, evaluate(x)});
  res.trace.push_back({0, {0.0, 0.5, 1.0}, 0.0, 1.0, 1.0});

  for (std::size_t iter = 1;; ++iter) {
    const double tie = options.tie_tol >= 0.0
                           ? options.tie_tol
                           : 1e-13 * std::max(1.0, std::abs(res.best_value));
    const MinimizerRange range = minimizer_set(points, tie);
    if (!range.contiguous) res.contiguity_violated = true;

    const std::size_t p_lo = range.lo > 0 ? range.lo - 1 : 0;
    const std::size_t p_hi = range.hi + 1 < points.size() ? range.hi + 1 : points.size() - 1;
    res.bracket_low = points[p_lo].x;
    res.bracket_high = points[p_hi].x;
    const double width = res.bracket_high - res.bracket_low;

    QuasiIterationRecord record{iter, {}, res.bracket_low, res.bracket_high, width};

    if (width <= options.epsilon) {
      res.certified = true;
      res.reason = QuasiStop::BracketWidth;
      res.trace.push_back(std::move(record));
      break;
    }
    if (!anchors.empty()) {
      bool hit = false;
      for (std::size_t i = range.lo; i <= range.hi && !hit; ++i) {
        if (anchor_match(points[i].x)) {
          res.best_x = points[i].x;
          res.best_value = points[i].value;
          hit = true;
        }
      }
      if (hit) {
        res.certified = false;
        res.reason = QuasiStop::SampleAnchor;
        res.trace.push_back(std::move(record));
        break;
      }
    }
    if (range.hi - range.lo >= 2) {
      double max_gap = 0.0;
      for (std::size_t i = range.lo; i < range.hi; ++i)
        max_gap = std::max(max_gap, points[i + 1].x - points[i].x);
      if (max_gap <= options.epsilon) {
        res.certified = false;
        res.reason = QuasiStop::PlateauResolved;
        res.trace.push_back(std::move(record));
        break;
      }
    }

    std::vector<SamplePoint> next;
    next.reserve(2 * (p_hi - p_lo) + 1);
    for (std::size_t i = p_lo; i <= p_hi; ++i) {
      next.push_back(points[i]);
      if (i == p_hi) break;
      const double mid = 0.5 * (points[i].x + points[i + 1].x);
      if (mid <= points[i].x || mid >= points[i + 1].x) continue;  // fp floor
      const bool fresh = !seen.count(mid);
      const double v = evaluate(mid);
      if (budget_hit) break;
      if (fresh) record.queries.push_back(mid);
      next.push_back({mid, v});
    }
    if (budget_hit) {
      res.certified = false;
      res.reason = QuasiStop::BudgetExhausted;
      res.trace.push_back(std::move(record));
      break;
    }
    if (next.size() == p_hi - p_lo + 1) {  // no midpoint fit between kept points
      res.certified = width <= options.epsilon;
      res.reason = QuasiStop::ResolutionFloor;
      res.trace.push_back(std::move(record));
      break;
    }
    std::sort(next.begin(), next.end(),
              [](const SamplePoint& a, const SamplePoint& b) { return a.x < b.x; });
    points = std::move(next);
    res.trace.push_back(std::move(record));
  }
  return res;
}

}  // namespace pseudomode
