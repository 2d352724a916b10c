#include "pseudomode/loss_core.hpp"

#include <algorithm>
#include <cmath>

#include "pseudomode/detail/splitmix.hpp"

namespace pseudomode {

RegionBoundaries region_boundaries(double m) {
  if (!(m > -2.0)) throw std::invalid_argument("region_boundaries: m must be > -2");
  RegionBoundaries rb;
  rb.alpha_convex_end = 0.5 * (m + std::sqrt(m * m + 32.0));
  rb.alpha_concave_end = 2.0 * m + std::sqrt(3.0 * m * m + 24.0);
  rb.degenerate = rb.alpha_convex_end <= 2.0 || rb.alpha_concave_end <= 2.0;
  return rb;
}

PiecewiseLoss::PiecewiseLoss(double sigma1, double sigma2, double alpha)
    : sigma1_(sigma1), sigma2_(sigma2), alpha_(alpha) {
  if (!(sigma1 > 0.0) || !(sigma2 > sigma1))
    throw std::invalid_argument("PiecewiseLoss: need 0 < sigma1 < sigma2");
  if (!(alpha > 0.0)) throw std::invalid_argument("PiecewiseLoss: alpha must be > 0");
  if (alpha * sigma1 * sigma1 > 1.0)
    throw std::invalid_argument("PiecewiseLoss: alpha*sigma1^2 > 1 breaks monotonicity");
  ramp_slope_ = (1.0 - alpha_ * sigma1_ * sigma1_) / (sigma2_ - sigma1_);
}

double PiecewiseLoss::value(double x) const {
  const double ax = std::abs(x);
  if (ax <= sigma1_) return alpha_ * x * x;
  if (ax <= sigma2_) return 1.0 + ramp_slope_ * (ax - sigma2_);
  return 1.0;
}

double PiecewiseLoss::d1(double x) const {
  const double ax = std::abs(x);
  if (ax <= sigma1_) return 2.0 * alpha_ * x;
  if (ax <= sigma2_) return x < 0.0 ? -ramp_slope_ : ramp_slope_;
  return 0.0;
}

double PiecewiseLoss::d2(double x) const {
  return std::abs(x) <= sigma1_ ? 2.0 * alpha_ : 0.0;
}

ExtendedLossSpec::ExtendedLossSpec(FunctionContract f, FunctionContract g, Mode mode,
                                   double check_low, double check_high)
    : f_(std::move(f)), g_(std::move(g)), mode_(mode),
      check_low_(check_low), check_high_(check_high) {
  if (!f_.value || !g_.value || !g_.d1 || !f_.d2)
    throw std::invalid_argument("ExtendedLossSpec: value/d1/d2 contracts must be callable");
  if (!(check_low_ < check_high_))
    throw std::invalid_argument("ExtendedLossSpec: empty check range");

  detail::SplitMix64 rng(0x5eedULL);
  const double span = check_high_ - check_low_;
  for (int i = 0; i < 100; ++i) {
    const double x = check_low_ + span * rng.next_double();
    const double y = check_low_ + span * rng.next_double();
    const double fx = f_.value(x);
    const double fy = f_.value(y);
    if (!std::isfinite(fx) || !std::isfinite(fy))
      throw std::invalid_argument("ExtendedLossSpec: f not finite on the check range");
    const double chord = 0.5 * (fx + fy);
    const double mid = f_.value(0.5 * (x + y));
    const double slack = 1e-9 * std::max({1.0, std::abs(fx), std::abs(fy)});
    if (mid > chord + slack)
      throw std::invalid_argument("ExtendedLossSpec: f failed a convexity secant test");
    const double u = mode_ == Mode::Composite ? fx + f_.value(-x) : fx;
    if (!(g_.d1(u) > 0.0))
      throw std::invalid_argument("ExtendedLossSpec: g is not increasing on the sampled range");
  }
  // Divergence spot check on the right end of the range.
  if (!(f_.value(check_high_) > f_.value(0.5 * (check_low_ + check_high_))))
    throw std::invalid_argument("ExtendedLossSpec: f does not grow toward the right check end");
}

double ExtendedLossSpec::eval(double x) const {
  const double fp = f_.value(x);
  if (!std::isfinite(fp)) throw SaturationError("extended loss: f(x) overflowed");
  const double fn = f_.value(-x);
  if (!std::isfinite(fn)) throw SaturationError("extended loss: f(-x) overflowed");
  if (mode_ == Mode::Composite) {
    const double v = g_.value(fp + fn);
    if (!std::isfinite(v)) throw SaturationError("extended loss: g(f(x)+f(-x)) overflowed");
    return v;
  }
  const double gp = g_.value(fp);
  const double gn = g_.value(fn);
  if (!std::isfinite(gp) || !std::isfinite(gn))
    throw SaturationError("extended loss: g(f(+-x)) overflowed");
  return gp + gn;
}

NearZeroQuadratic ExtendedLossSpec::near_zero() const {
  const double f0 = f_.value(0.0);
  NearZeroQuadratic q;
  if (mode_ == Mode::Composite) {
    q.a = g_.d1(2.0 * f0) * f_.d2(0.0);
    q.b = g_.value(2.0 * f0);
  } else {
    if (!g_.d2 || !f_.d1)
      throw std::invalid_argument("ExtendedLossSpec: dissected near-zero needs g.d2 and f.d1");
    const double fp0 = f_.d1(0.0);
    q.a = g_.d2(f0) * fp0 * fp0 + g_.d1(f0) * f_.d2(0.0);
    q.b = 2.0 * g_.value(f0);
  }
  q.curvature_ok = q.a > 0.0;
  return q;
}

bool ExtendedLossSpec::dissected_validity_check(std::size_t n_samples) const {
  if (!f_.d1) throw std::invalid_argument("dissected_validity_check: needs f.d1");
  detail::SplitMix64 rng(0xd15cULL);
  const double hi = std::max(std::abs(check_low_), std::abs(check_high_));
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double x = hi * rng.next_double();
    const double up = g_.d1(f_.value(x)) * f_.d1(x);
    const double dn = g_.d1(f_.value(-x)) * f_.d1(-x);
    if (up - dn < -1e-12 * std::max({1.0, std::abs(up), std::abs(dn)})) return false;
  }
  return true;
}

}  // namespace pseudomode
