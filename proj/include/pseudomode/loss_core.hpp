#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>

namespace pseudomode {

enum class Region { Convex, Concave, Tail };

/// Alpha thresholds splitting a bounded even loss into convex / concave / tail pieces.
struct RegionBoundaries {
  double alpha_convex_end;   // positive root of alpha^2 - m*alpha - 8 = 0
  double alpha_concave_end;  // positive root of alpha^2 - 4m*alpha + m^2 - 24 = 0
  bool degenerate;           // set when a root collapses onto alpha = 2
};

RegionBoundaries region_boundaries(double m);

/// Bounded even loss -1/(e^{kx} + e^{-kx} + m), k > 0, m > -2.
///
/// All evaluations run on E = e^{-k|x|} in (0, 1], so no intermediate can
/// overflow; for k|x| beyond the exp underflow point the loss saturates to -0.
class SmoothedHammingLoss {
 public:
  SmoothedHammingLoss(double k, double m) : k_(k), m_(m) {
    if (!(k > 0.0)) throw std::invalid_argument("SmoothedHammingLoss: k must be > 0");
    if (!(m > -2.0)) throw std::invalid_argument("SmoothedHammingLoss: m must be > -2");
    const RegionBoundaries rb = region_boundaries(m);
    alpha_convex_end_ = rb.alpha_convex_end;
    alpha_concave_end_ = rb.alpha_concave_end;
  }

  double k() const { return k_; }
  double m() const { return m_; }

  // e^{kx} + e^{-kx}; saturates to +inf for extreme arguments.
  double alpha(double x) const { return 2.0 * std::cosh(k_ * x); }

  double value(double x) const {
    const double e = std::exp(-std::abs(k_ * x));
    return -e / (1.0 + m_ * e + e * e);
  }

  double d1(double x) const {
    const double e = std::exp(-std::abs(k_ * x));
    const double den = 1.0 + m_ * e + e * e;
    const double mag = k_ * e * (1.0 - e * e) / (den * den);
    return x < 0.0 ? -mag : mag;
  }

  double d2(double x) const {
    const double e = std::exp(-std::abs(k_ * x));
    const double p = 1.0 + e * e;
    const double den = 1.0 + m_ * e + e * e;
    const double num = 8.0 * e * e * e + m_ * e * e * p - e * p * p;
    return k_ * k_ * num / (den * den * den);
  }

  double d3(double x) const {
    const double e = std::exp(-std::abs(k_ * x));
    const double p = 1.0 + e * e;
    const double den = 1.0 + m_ * e + e * e;
    const double quad = p * p - 4.0 * m_ * e * p + (m_ * m_ - 24.0) * e * e;
    const double den2 = den * den;
    const double mag = k_ * k_ * k_ * e * (1.0 - e * e) * quad / (den2 * den2);
    return x < 0.0 ? -mag : mag;
  }

  // Half-open alpha intervals; a boundary point belongs to the region on its right.
  Region region(double x) const {
    const double a = alpha(x);
    if (a < alpha_convex_end_) return Region::Convex;
    if (a < alpha_concave_end_) return Region::Concave;
    return Region::Tail;
  }

  // Upper bound on |d1| over the real line.  k/9 for m = 2; otherwise the
  // exact maximum k*sqrt(a*^2-4)/(a*+m)^2 taken at a* = alpha_convex_end.
  double lipschitz_bound() const {
    if (m_ == 2.0) return k_ / 9.0;
    const double a = alpha_convex_end_;
    return k_ * std::sqrt(a * a - 4.0) / ((a + m_) * (a + m_));
  }

  double alpha_convex_end() const { return alpha_convex_end_; }
  double alpha_concave_end() const { return alpha_concave_end_; }

 private:
  double k_;
  double m_;
  double alpha_convex_end_;
  double alpha_concave_end_;
};

/// Clipped quadratic: alpha*x^2 inside sigma1, linear ramp to 1 at sigma2, flat 1 beyond.
class PiecewiseLoss {
 public:
  PiecewiseLoss(double sigma1, double sigma2, double alpha);

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  double d3(double /*x*/) const { return 0.0; }

  double sigma1() const { return sigma1_; }
  double sigma2() const { return sigma2_; }
  double alpha() const { return alpha_; }

 private:
  double sigma1_, sigma2_, alpha_;
  double ramp_slope_;  // (1 - alpha*sigma1^2) / (sigma2 - sigma1)
};

/// delta * sqrt(1 + x^2/delta^2) = sqrt(delta^2 + x^2).
class PseudoHuberLoss {
 public:
  explicit PseudoHuberLoss(double delta) : delta_(delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("PseudoHuberLoss: delta must be > 0");
  }

  double value(double x) const { return std::hypot(delta_, x); }
  double d1(double x) const { return x / std::hypot(delta_, x); }
  double d2(double x) const {
    const double r2 = delta_ * delta_ + x * x;
    return delta_ * delta_ / (r2 * std::sqrt(r2));
  }
  double d3(double x) const {
    const double r2 = delta_ * delta_ + x * x;
    return -3.0 * delta_ * delta_ * x / (r2 * r2 * std::sqrt(r2));
  }

  double delta() const { return delta_; }

 private:
  double delta_;
};

/// (1/a) * log(e^{ax} + e^{-ax} + beta); log-cosh plus log 2 when beta = 0.
class GeneralizedHuberLoss {
 public:
  GeneralizedHuberLoss(double a, double beta) : a_(a), beta_(beta) {
    if (!(a > 0.0)) throw std::invalid_argument("GeneralizedHuberLoss: a must be > 0");
    if (!(beta > -2.0)) throw std::invalid_argument("GeneralizedHuberLoss: beta must be > -2");
  }

  double value(double x) const {
    const double u = std::abs(a_ * x);
    const double e = std::exp(-u);
    return (u + std::log1p(e * (beta_ + e))) / a_;
  }
  double d1(double x) const {
    const double e = std::exp(-std::abs(a_ * x));
    const double mag = (1.0 - e * e) / (1.0 + beta_ * e + e * e);
    return x < 0.0 ? -mag : mag;
  }
  double d2(double x) const {
    const double e = std::exp(-std::abs(a_ * x));
    const double den = 1.0 + beta_ * e + e * e;
    return a_ * e * (beta_ * (1.0 + e * e) + 4.0 * e) / (den * den);
  }
  double d3(double x) const {
    const double e = std::exp(-std::abs(a_ * x));
    const double den = 1.0 + beta_ * e + e * e;
    const double num = beta_ * beta_ * e - beta_ * (1.0 + e * e) - 8.0 * e;
    const double mag = a_ * a_ * (1.0 - e * e) * e * num / (den * den * den);
    return x < 0.0 ? -mag : mag;
  }

  double a() const { return a_; }
  double beta() const { return beta_; }

 private:
  double a_, beta_;
};

/// Tagged union over the loss families sharing the value/d1/d2/d3 surface.
class LossCatalogEntry {
 public:
  using Holder =
      std::variant<PiecewiseLoss, PseudoHuberLoss, GeneralizedHuberLoss, SmoothedHammingLoss>;

  explicit LossCatalogEntry(Holder loss) : loss_(std::move(loss)) {}

  double value(double x) const {
    return std::visit([x](const auto& l) { return l.value(x); }, loss_);
  }
  double d1(double x) const {
    return std::visit([x](const auto& l) { return l.d1(x); }, loss_);
  }
  double d2(double x) const {
    return std::visit([x](const auto& l) { return l.d2(x); }, loss_);
  }
  double d3(double x) const {
    return std::visit([x](const auto& l) { return l.d3(x); }, loss_);
  }

  const Holder& holder() const { return loss_; }

 private:
  Holder loss_;
};

/// Thrown when a user-supplied building block leaves the finite range.
class SaturationError : public std::runtime_error {
 public:
  explicit SaturationError(const std::string& what) : std::runtime_error(what) {}
};

/// Value plus first two derivatives of a user-supplied scalar function.
struct FunctionContract {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

struct NearZeroQuadratic {
  double a;            // coefficient of x^2
  double b;            // constant term, the loss value at 0
  bool curvature_ok;   // a > 0; a <= 0 flags a spec without positive curvature at 0
};

/// Loss assembled from a convex divergent f and a monotone increasing g.
///
/// Composite mode evaluates g(f(x) + f(-x)); dissected mode evaluates
/// g(f(x)) + g(f(-x)).  Convexity of f and monotonicity of g are sampled at
/// construction (100 secant tests over [check_low, check_high]), not proven.
class ExtendedLossSpec {
 public:
  enum class Mode { Composite, Dissected };

  ExtendedLossSpec(FunctionContract f, FunctionContract g, Mode mode,
                   double check_low = -5.0, double check_high = 5.0);

  double eval(double x) const;

  // Quadratic a*x^2 + b matching the loss near 0 up to o(x^2).
  NearZeroQuadratic near_zero() const;

  // Samples g'(f(x))f'(x) - g'(f(-x))f'(-x) >= 0 over x in (0, check_high].
  // Meaningful for dissected mode, where it is required but not enforced.
  bool dissected_validity_check(std::size_t n_samples = 100) const;

  Mode mode() const { return mode_; }
  const FunctionContract& f() const { return f_; }
  const FunctionContract& g() const { return g_; }

 private:
  FunctionContract f_;
  FunctionContract g_;
  Mode mode_;
  double check_low_, check_high_;
};

}  // namespace pseudomode
