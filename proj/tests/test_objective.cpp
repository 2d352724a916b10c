#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pseudomode/detail/splitmix.hpp"
#include "pseudomode/objective.hpp"
#include "support/finite_diff.hpp"

using namespace pseudomode;
using testsupport::central_d1;

namespace {

SampleSet make_samples(std::vector<double> values) {
  return SampleSet::from_normalized(std::move(values), 0.0, 1.0);
}

SampleSet random_samples(pseudomode::detail::SplitMix64& rng, std::size_t max_n) {
  const std::size_t n = 1 + rng.next() % max_n;
  std::vector<double> values(n);
  for (double& v : values) v = rng.next_double();
  return make_samples(std::move(values));
}

constexpr double kDefault = 2.633;

}  // namespace

TEST_CASE("sample set validation") {
  CHECK_THROWS_AS(make_samples({}), std::invalid_argument);
  CHECK_THROWS_AS(make_samples({0.5, 1.2}), std::invalid_argument);
  CHECK_THROWS_AS(make_samples({-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(SampleSet::from_normalized({0.5}, 0.0, -1.0), std::invalid_argument);
  const SampleSet s = SampleSet::from_normalized({0.0, 0.5, 1.0}, 10.0, 4.0);
  CHECK(s.count() == 3);
  CHECK(s.raw(1) == 12.0);
  CHECK(s.denormalize(0.25) == 11.0);
}

TEST_CASE("objective config requires m = 2 for the closed forms") {
  const ObjectiveConfig bad{2.633, 3.0, Aggregation::Average};
  const SampleSet s = make_samples({0.5});
  CHECK_THROWS_AS(objective_value(bad, s, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((ObjectiveConfig{0.0, 2.0, Aggregation::Sum}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((ObjectiveConfig{1.0, -2.5, Aggregation::Sum}.validate()),
                  std::invalid_argument);
}

TEST_CASE("alpha evaluations") {
  const ObjectiveConfig config{1.0, 2.0, Aggregation::Sum};
  const SampleSet s = make_samples({0.25, 0.75});
  CHECK(alpha_n(config, s, 0.25, 0) == 2.0);
  CHECK(alpha_n(config, s, 0.25 + std::acosh(2.0), 0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(alpha_n(config, s, 0.5, 2), std::out_of_range);

  // alpha'^2 = k^2 (alpha^2 - 4) across random probes.
  pseudomode::detail::SplitMix64 rng(0xa1faULL);
  for (int i = 0; i < 100; ++i) {
    const double k = 0.2 + 8.0 * rng.next_double();
    const ObjectiveConfig c{k, 2.0, Aggregation::Sum};
    const double x = rng.next_double() * 3.0 - 1.0;
    const double a = alpha_n(c, s, x, i % 2);
    const double da = alpha_n_d1(c, s, x, i % 2);
    CHECK(da * da == doctest::Approx(k * k * (a * a - 4.0)).epsilon(1e-10));
  }
}

TEST_CASE("objective pinned values and symmetry") {
  const ObjectiveConfig avg{kDefault, 2.0, Aggregation::Average};
  const SampleSet single = make_samples({0.37});
  CHECK(objective_value(avg, single, 0.37) == -0.25);

  const SampleSet pair = make_samples({0.0, 1.0});
  // Independent two-term computation straight from the defining formula.
  const double e = std::exp(kDefault * 0.5);
  const double independent = -1.0 / (e + 1.0 / e + 2.0);
  const double v = objective_value(avg, pair, 0.5);
  CHECK(v == doctest::Approx(independent).epsilon(1e-12));
  CHECK(v == doctest::Approx(-0.16670).epsilon(5e-4));

  pseudomode::detail::SplitMix64 rng(0x55aaULL);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.next_double();
    CHECK(objective_value(avg, pair, x) ==
          doctest::Approx(objective_value(avg, pair, 1.0 - x)).epsilon(1e-14));
  }
  // Sum mode is exactly N times the average.
  const ObjectiveConfig sum{kDefault, 2.0, Aggregation::Sum};
  CHECK(objective_value(sum, pair, 0.3) ==
        doctest::Approx(2.0 * objective_value(avg, pair, 0.3)).epsilon(1e-15));
}

TEST_CASE("objective first derivative") {
  const ObjectiveConfig avg{kDefault, 2.0, Aggregation::Average};
  const SampleSet pair = make_samples({0.0, 1.0});
  CHECK(objective_d1(avg, pair, 0.5) == 0.0);
  const SampleSet single = make_samples({0.6});
  CHECK(objective_d1(avg, single, 0.6) == 0.0);

  // Difference-quotient consistency.
  pseudomode::detail::SplitMix64 rng(0xfd12ULL);
  for (int i = 0; i < 200; ++i) {
    SampleSet s = random_samples(rng, 20);
    const double k = 0.5 + 5.0 * rng.next_double();
    const ObjectiveConfig c{k, 2.0, i % 2 == 0 ? Aggregation::Sum : Aggregation::Average};
    const double x = rng.next_double();
    const double n_eff = effective_count(c, s);
    const double fd = central_d1([&](double t) { return objective_value(c, s, t); }, x, 1e-6);
    CHECK(objective_d1(c, s, x) ==
          doctest::Approx(fd).epsilon(1e-5).scale(0.01 * k * n_eff));
    const double fd2 = central_d1([&](double t) { return objective_d1(c, s, t); }, x, 1e-6);
    CHECK(objective_d2(c, s, x) ==
          doctest::Approx(fd2).epsilon(1e-5).scale(0.01 * k * k * n_eff));
  }
}

TEST_CASE("objective second derivative signs") {
  const double k = 1.7;
  const ObjectiveConfig c{k, 2.0, Aggregation::Sum};
  const SampleSet single = make_samples({0.2});
  CHECK(objective_d2(c, single, 0.2) == doctest::Approx(k * k / 8.0).epsilon(1e-14));
  const double x4 = 0.2 + std::acosh(2.0) / k;
  CHECK(std::abs(objective_d2(c, single, x4)) <= 1e-12 * k * k);
  const double x_far = 0.2 + std::acosh(3.0) / k;
  CHECK(objective_d2(c, single, x_far) < 0.0);
}

TEST_CASE("expectation identities") {
  pseudomode::detail::SplitMix64 rng(0x1d311ULL);
  for (int i = 0; i < 1000; ++i) {
    SampleSet s = random_samples(rng, 30);
    const double k = 0.5 + 9.5 * rng.next_double();
    const ObjectiveConfig c{k, 2.0, Aggregation::Sum};
    const double x = rng.next_double();
    const WeightDistribution w = weights(c, s, x);
    double mean_dalpha = 0.0;
    double mean_four_minus_alpha = 0.0;
    for (std::size_t n = 0; n < s.count(); ++n) {
      mean_dalpha += w.probs[n] * alpha_n_d1(c, s, x, n);
      mean_four_minus_alpha += w.probs[n] * (4.0 - alpha_n(c, s, x, n));
    }
    CHECK(objective_d1(c, s, x) ==
          doctest::Approx(w.partition * mean_dalpha).epsilon(1e-10));
    CHECK(objective_d2(c, s, x) ==
          doctest::Approx(k * k * w.partition * mean_four_minus_alpha).epsilon(1e-10));
  }
}

TEST_CASE("weights") {
  const ObjectiveConfig c{kDefault, 2.0, Aggregation::Sum};
  const SampleSet single = make_samples({0.4});
  const WeightDistribution w1 = weights(c, single, 0.4);
  CHECK(w1.probs.size() == 1);
  CHECK(w1.probs[0] == 1.0);
  CHECK(w1.partition == doctest::Approx(1.0 / 16.0).epsilon(1e-15));

  const SampleSet pair = make_samples({0.2, 0.8});
  const WeightDistribution w2 = weights(c, pair, 0.5);
  CHECK(w2.probs[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w2.probs[1] == doctest::Approx(0.5).epsilon(1e-14));

  pseudomode::detail::SplitMix64 rng(0x3e1fULL);
  for (int i = 0; i < 100; ++i) {
    SampleSet s = random_samples(rng, 12);
    const double x = rng.next_double();
    const WeightDistribution w = weights(c, s, x);
    double total = 0.0;
    for (std::size_t n = 0; n < s.count(); ++n) {
      total += w.probs[n];
      const double a = alpha_n(c, s, x, n);
      CHECK(w.probs[n] * w.partition ==
            doctest::Approx(1.0 / ((a + 2.0) * (a + 2.0))).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("certificate factor basics and tight bound") {
  const ObjectiveConfig c{kDefault, 2.0, Aggregation::Sum};
  CHECK(certificate_factor(c, make_samples({0.3}), 0.8) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(certificate_factor(c, make_samples({0.6, 0.6, 0.6}), 0.1) ==
        doctest::Approx(1.0).epsilon(1e-14));

  const SampleSet pair = make_samples({0.0, 1.0});
  const double bound = certificate_bound(kDefault);
  double max_f = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double x = i / 2000.0;
    const double f = certificate_factor(c, pair, x);
    max_f = std::max(max_f, f);
    CHECK(f <= bound + 1e-12);
  }
  // Equidistant from a two-point set the bound is attained exactly.
  CHECK(certificate_factor(c, pair, 0.5) == doctest::Approx(bound).epsilon(1e-12));
  CHECK(max_f == doctest::Approx(bound).epsilon(1e-12));
}

TEST_CASE("certificate factor equals the quadratic double sum") {
  pseudomode::detail::SplitMix64 rng(0xdb15ULL);
  for (int i = 0; i < 50; ++i) {
    SampleSet s = random_samples(rng, 20);
    const double k = 0.5 + 4.0 * rng.next_double();
    const ObjectiveConfig c{k, 2.0, Aggregation::Sum};
    const double x = rng.next_double();
    const WeightDistribution w = weights(c, s, x);
    double double_sum = 0.0;
    for (std::size_t a = 0; a < s.count(); ++a)
      for (std::size_t b = 0; b < s.count(); ++b)
        double_sum += w.probs[a] * w.probs[b] *
                      std::exp(k * (s.values[b] - s.values[a]));
    CHECK(certificate_factor(c, s, x) == doctest::Approx(double_sum).epsilon(1e-11));
  }
}

TEST_CASE("certificate bound pinned values") {
  CHECK(certificate_bound(1e-9) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(certificate_bound(std::acosh(7.0)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(certificate_bound(2.633) == doctest::Approx(3.9968).epsilon(1e-4));
  CHECK(certificate_bound(2.633) < 4.0);
  CHECK_THROWS_AS(certificate_bound(0.0), std::invalid_argument);
}

TEST_CASE("quasiconvexity check") {
  pseudomode::detail::SplitMix64 rng(0x9c01ULL);
  for (int i = 0; i < 20; ++i) {
    SampleSet s = random_samples(rng, 50);
    const ObjectiveConfig c{kDefault, 2.0, Aggregation::Average};
    const CheckReport r = quasiconvexity_check(c, s, default_quasi_delta(c, s), 10000);
    CHECK(r.passed);
  }

  // Two far atoms at large k give a bimodal objective: the interior critical
  // point is a local max, so the check fails there.
  const ObjectiveConfig c10{10.0, 2.0, Aggregation::Sum};
  const CheckReport bimodal = quasiconvexity_check(c10, make_samples({0.0, 1.0}), 1e-3, 10000);
  CHECK_FALSE(bimodal.passed);
  CHECK(bimodal.first_violation_x == doctest::Approx(0.5).epsilon(0.05));

  // A single atom keeps the check green across moderate k.
  for (double k : {0.5, 2.633, 5.0, 12.0}) {
    const ObjectiveConfig c{k, 2.0, Aggregation::Average};
    const CheckReport r =
        quasiconvexity_check(c, make_samples({0.5}), default_quasi_delta(c, make_samples({0.5})),
                             10000);
    CHECK(r.passed);
  }
}

TEST_CASE("exponential convexification check") {
  const ObjectiveConfig c{kDefault, 2.0, Aggregation::Sum};
  CHECK(exp_convexify_check(c, make_samples({0.0, 0.5, 1.0}), 1e6, 10000).passed);
  // lambda = 0 is plain convexity, which fails once the tail shows inside
  // the domain; an atom at the corner exposes it.
  const CheckReport corner = exp_convexify_check(c, make_samples({0.0}), 0.0, 10000);
  CHECK_FALSE(corner.passed);
  CHECK(corner.first_violation_x > 0.49);
  // A centered single atom at this k keeps the whole interval convex.
  CHECK(exp_convexify_check(c, make_samples({0.5}), 0.0, 10000).passed);
}

TEST_CASE("grid unimodality and monotone composition") {
  pseudomode::detail::SplitMix64 rng(0x4d0dULL);
  const ObjectiveConfig c{kDefault, 2.0, Aggregation::Average};
  for (int i = 0; i < 20; ++i) {
    SampleSet s = random_samples(rng, 50);
    const UnimodalityReport u = check_grid_unimodality(c, s, 10000);
    CHECK(u.unimodal);
    CHECK(u.sign_changes <= 1);

    // argmin of exp(C) on the grid equals argmin of C at index level.
    std::size_t arg_plain = 0, arg_exp = 0;
    double best_plain = 1e300, best_exp = 1e300;
    for (std::size_t g = 0; g < 512; ++g) {
      const double x = static_cast<double>(g) / 511.0;
      const double v = objective_value(c, s, x);
      const double ev = std::exp(v);
      if (v < best_plain) {
        best_plain = v;
        arg_plain = g;
      }
      if (ev < best_exp) {
        best_exp = ev;
        arg_exp = g;
      }
    }
    CHECK(arg_plain == arg_exp);
  }

  // Two far atoms at large k: the curve falls into each atom, so it ascends
  // to a bump then descends, violating descend-then-ascend.
  const ObjectiveConfig c10{10.0, 2.0, Aggregation::Average};
  const UnimodalityReport bimodal = check_grid_unimodality(c10, make_samples({0.0, 1.0}), 10000);
  CHECK_FALSE(bimodal.unimodal);
  CHECK(bimodal.sign_changes >= 1);
  CHECK(bimodal.first_violation_x > 0.4);
}

TEST_CASE("certificate soundness implies the quasiconvexity check") {
  pseudomode::detail::SplitMix64 rng(0x50fdULL);
  for (int i = 0; i < 30; ++i) {
    SampleSet s = random_samples(rng, 25);
    const double k = 0.5 + 2.2 * rng.next_double();
    const ObjectiveConfig c{k, 2.0, Aggregation::Average};
    double max_f = 0.0;
    for (int g = 0; g <= 1000; ++g)
      max_f = std::max(max_f, certificate_factor(c, s, g / 1000.0));
    if (max_f <= 4.0 - 1e-3) {
      CHECK(quasiconvexity_check(c, s, default_quasi_delta(c, s), 1000).passed);
    }
  }
}

TEST_CASE("non-convexity witness for every k") {
  for (double k : {0.5, 1.0, 2.633, 10.0}) {
    const ObjectiveConfig c{k, 2.0, Aggregation::Average};
    const SampleSet s = make_samples({0.5});
    double min_d2 = 1e300;
    for (int g = 0; g <= 1000; ++g) {
      const double x = 0.5 + (2.5 * std::acosh(3.0) / k) * (g / 1000.0);
      min_d2 = std::min(min_d2, objective_d2(c, s, x));
    }
    CHECK(min_d2 < 0.0);
  }
}

TEST_CASE("sample reflection symmetry") {
  pseudomode::detail::SplitMix64 rng(0x5f1eULL);
  const ObjectiveConfig c{kDefault, 2.0, Aggregation::Average};
  for (int i = 0; i < 20; ++i) {
    SampleSet s = random_samples(rng, 15);
    std::vector<double> reflected;
    for (double v : s.values) reflected.push_back(1.0 - v);
    const SampleSet r = make_samples(std::move(reflected));
    const double x = rng.next_double();
    CHECK(objective_value(c, s, x) ==
          doctest::Approx(objective_value(c, r, 1.0 - x)).epsilon(1e-12));
  }
}

TEST_CASE("f hessian structure") {
  // Pinned 2x2 instance: equal weights at 0 and 1, k = 1.
  const std::vector<double> pos{0.0, 1.0};
  const std::vector<double> prob{0.5, 0.5};
  const SquareMatrix h = f_hessian(1.0, pos, prob);
  const double expected = 0.25 * (std::exp(1.0) + std::exp(-1.0));
  CHECK(h.at(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(h.at(1, 1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(h.at(0, 1) == doctest::Approx(-expected).epsilon(1e-12));
  CHECK(h.at(1, 0) == doctest::Approx(-expected).epsilon(1e-12));

  pseudomode::detail::SplitMix64 rng(0xf3551ULL);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + rng.next() % 7;
    std::vector<double> positions(n), probs(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      positions[j] = rng.next_double();
      probs[j] = 0.05 + rng.next_double();
      total += probs[j];
    }
    for (double& p : probs) p /= total;
    const double k = 0.5 + 4.0 * rng.next_double();
    const SquareMatrix h2 = f_hessian(k, positions, probs);

    Eigen::MatrixXd m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      double offdiag = 0.0;
      double row_sum = 0.0;
      for (std::size_t col = 0; col < n; ++col) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = h2.at(r, col);
        row_sum += h2.at(r, col);
        if (col != r) {
          CHECK(h2.at(r, col) < 0.0);
          offdiag += std::abs(h2.at(r, col));
        }
      }
      CHECK(h2.at(r, r) > 0.0);
      CHECK(h2.at(r, r) == doctest::Approx(offdiag).epsilon(1e-9));
      CHECK(std::abs(row_sum) <= 1e-9 * h2.at(r, r));
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("compensated summation matches an extended-precision oracle") {
  NeumaierSum sum;
  sum.add(1e16);
  sum.add(1.0);
  sum.add(-1e16);
  CHECK(sum.value() == 1.0);

  pseudomode::detail::SplitMix64 rng(0x5c3dULL);
  NeumaierSum s2;
  long double oracle = 0.0L;
  for (int i = 0; i < 10000; ++i) {
    const double v = (rng.next_double() - 0.5) * std::pow(10.0, static_cast<double>(i % 12));
    s2.add(v);
    oracle += static_cast<long double>(v);
  }
  CHECK(s2.value() == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-14));
}

TEST_CASE("square matrix indexing is row major") {
  SquareMatrix m(2);
  m.a = {1.0, 2.0, 3.0, 4.0};
  CHECK(m.at(0, 1) == 2.0);
  CHECK(m.at(1, 0) == 3.0);
}
