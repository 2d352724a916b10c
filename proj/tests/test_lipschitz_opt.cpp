#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

#include "pseudomode/detail/splitmix.hpp"
#include "pseudomode/lipschitz_opt.hpp"
#include "pseudomode/loss_core.hpp"
#include "pseudomode/objective.hpp"

using namespace pseudomode;

TEST_CASE("score is the classic bracket lower bound") {
  const ScoredQuery sq = score(0.0, 1.0, 3.0, 5.0, 2.0);
  CHECK(sq.query == 0.5);
  CHECK(sq.score == 2.0);

  CHECK_THROWS_AS(score(0.5, 0.5, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(score(0.6, 0.5, 1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(score(0.0, 1.0, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(score(0.0, 1.0, 1.0, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("score never exceeds the true bracket minimum") {
  const auto f = [](double x) { return std::sin(3.0 * x); };
  const double lipschitz = 3.0;
  pseudomode::detail::SplitMix64 rng(0x5c0eULL);
  for (int i = 0; i < 200; ++i) {
    double a = rng.next_double();
    double b = rng.next_double();
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) b = a + 1e-3;
    const ScoredQuery sq = score(a, b, f(a), f(b), lipschitz);
    double dense_min = f(a);
    for (int g = 0; g <= 1000; ++g)
      dense_min = std::min(dense_min, f(a + (b - a) * g / 1000.0));
    CHECK(sq.score <= dense_min + 1e-12);
    CHECK(sq.query == 0.5 * (a + b));
  }
}

TEST_CASE("interval order pops lowest score then smaller left edge") {
  std::priority_queue<CandidateInterval, std::vector<CandidateInterval>, IntervalScoreOrder> q;
  q.push({0.9, 1.0, 0.0, 0.0, 1.0});
  q.push({0.3, 0.4, 0.0, 0.0, 2.0});
  q.push({0.1, 0.2, 0.0, 0.0, 1.0});
  CHECK(q.top().x_left == 0.1);
  q.pop();
  CHECK(q.top().x_left == 0.9);
  q.pop();
  CHECK(q.top().x_left == 0.3);
}

TEST_CASE("certified run on a vee reaches the kink") {
  const auto f = [](double x) { return std::abs(x - 1.0 / 3.0); };
  const GlobalOptResult r = lipschitz_optimize(f, 1.0, 1e-6);
  CHECK(r.certified);
  CHECK(r.certified_gap <= 1e-6);
  // value accuracy transfers to location accuracy at unit slope
  CHECK(std::abs(r.best_x - 1.0 / 3.0) <= 1e-6);
  CHECK(r.best_value >= 0.0);
  CHECK(r.evaluations >= 2);
}

TEST_CASE("certified run on a lipschitz wave matches a dense scan") {
  const auto f = [](double x) { return std::sin(6.0 * x) + x; };
  const double lipschitz = 7.0;
  const GlobalOptResult r = lipschitz_optimize(f, lipschitz, 1e-4);
  CHECK(r.certified);
  CHECK(r.certified_gap <= 1e-4);

  double dense_min = f(0.0);
  const int grid = 1000000;
  for (int g = 0; g <= grid; ++g)
    dense_min = std::min(dense_min, f(static_cast<double>(g) / grid));
  CHECK(r.best_value <= dense_min + 1e-4);
  CHECK(r.best_value >= dense_min - lipschitz * 0.5 / grid - 1e-12);
}

TEST_CASE("budget exhaustion leaves an honest positive gap") {
  const auto f = [](double x) { return std::sin(6.0 * x) + x; };
  const GlobalOptResult r = lipschitz_optimize(f, 7.0, 1e-12, 10);
  CHECK_FALSE(r.certified);
  CHECK(r.evaluations == 10);
  CHECK(r.certified_gap > 0.0);
}

TEST_CASE("trace semantics") {
  const auto f = [](double x) { return (x - 0.7) * (x - 0.7); };
  const GlobalOptResult r = lipschitz_optimize(f, 2.0, 1e-5);
  REQUIRE(r.trace.size() >= 3);
  CHECK(r.trace[0].x == 0.0);
  CHECK(r.trace[1].x == 1.0);
  CHECK(std::isnan(r.trace[0].score));
  CHECK(std::isnan(r.trace[1].score));
  CHECK(std::isinf(r.trace[0].gap));

  for (std::size_t i = 2; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].best_value <= r.trace[i - 1].best_value);
    CHECK(r.trace[i].gap <= r.trace[i - 1].gap + 1e-15);
    CHECK_FALSE(std::isnan(r.trace[i].score));
  }
  CHECK(r.evaluations <= r.trace.size());
  CHECK(r.trace.back().best_value == r.best_value);
}

TEST_CASE("repeated runs are bitwise identical") {
  const auto f = [](double x) { return std::cos(5.0 * x) + 0.3 * x; };
  const GlobalOptResult a = lipschitz_optimize(f, 6.0, 1e-5);
  const GlobalOptResult b = lipschitz_optimize(f, 6.0, 1e-5);
  CHECK(a.best_x == b.best_x);
  CHECK(a.best_value == b.best_value);
  CHECK(a.evaluations == b.evaluations);
  CHECK(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].x == b.trace[i].x);
    CHECK(a.trace[i].gap == b.trace[i].gap);
  }
}

TEST_CASE("argument validation") {
  const auto f = [](double x) { return x; };
  CHECK_THROWS_AS(lipschitz_optimize(f, 0.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(lipschitz_optimize(f, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lipschitz_optimize(f, 1.0, 1e-6, 1), std::invalid_argument);
  CHECK_THROWS_AS(lipschitz_optimize(nullptr, 1.0, 1e-6), std::invalid_argument);
}

TEST_CASE("two-atom objective meets a dense scan within epsilon") {
  const ObjectiveConfig config{3.0, 2.0, Aggregation::Average};
  const SampleSet samples = SampleSet::from_normalized({0.0, 1.0}, 0.0, 1.0);
  const auto f = [&](double x) { return objective_value(config, samples, x); };

  const SmoothedHammingLoss loss(3.0, 2.0);
  const double lipschitz = loss.lipschitz_bound();
  CHECK(lipschitz == doctest::Approx(3.0 / 9.0).epsilon(1e-15));

  const double epsilon = 1e-4;
  const GlobalOptResult r = lipschitz_optimize(f, lipschitz, epsilon);
  CHECK(r.certified);

  const int grid = 200000;
  double dense_min = f(0.0);
  for (int g = 0; g <= grid; ++g)
    dense_min = std::min(dense_min, f(static_cast<double>(g) / grid));
  CHECK(r.best_value <= dense_min + epsilon);
  CHECK(r.best_value >= dense_min - lipschitz * 0.5 / grid - 1e-12);
}
