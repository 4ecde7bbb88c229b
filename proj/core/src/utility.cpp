#include "dsched/utility.hpp"

#include <cmath>
#include <limits>

namespace dsched {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PowerUtility::PowerUtility(double scale, double curvature)
    : v_(scale), psi_(curvature) {
  if (!(v_ > 0.0)) throw std::domain_error("PowerUtility: scale must be > 0");
  if (!(psi_ > 0.0 && psi_ < 1.0))
    throw std::domain_error("PowerUtility: curvature must be in (0,1)");
  offset_ = v_ * std::pow(kShift, 1.0 - psi_) / (1.0 - psi_);
  grad0_ = v_ * std::pow(kShift, -psi_);
}

double PowerUtility::eval(double x) const {
  if (x < 0.0) throw std::domain_error("PowerUtility::eval: x < 0");
  return v_ * std::pow(kShift + x, 1.0 - psi_) / (1.0 - psi_) - offset_;
}

double PowerUtility::grad(double x) const {
  if (x < 0.0) throw std::domain_error("PowerUtility::grad: x < 0");
  return v_ * std::pow(kShift + x, -psi_);
}

double PowerUtility::inverse_grad(double alpha) const {
  if (!(alpha > 0.0))
    throw std::domain_error("PowerUtility::inverse_grad: alpha <= 0");
  if (alpha >= grad0_) return 0.0;
  return std::pow(v_ / alpha, 1.0 / psi_) - kShift;
}

double PowerUtility::conjugate(double alpha) const {
  if (alpha < 0.0) throw std::domain_error("PowerUtility::conjugate: alpha < 0");
  if (alpha >= grad0_) return 0.0;  // infimum attained at x = 0
  if (alpha == 0.0) return -kInf;
  double x = inverse_grad(alpha);
  if (!std::isfinite(x)) return -kInf;
  return alpha * x - eval(x);
}

BoostedUtility::BoostedUtility(const Utility& base, double scale, double bonus)
    : base_(&base), scale_(scale), bonus_(bonus) {
  if (!(scale_ > 0.0))
    throw std::domain_error("BoostedUtility: scale must be > 0");
  if (bonus_ < 0.0) throw std::domain_error("BoostedUtility: bonus < 0");
}

double BoostedUtility::eval(double x) const {
  return scale_ * base_->eval(x) + bonus_ * x;
}

double BoostedUtility::grad(double x) const {
  return scale_ * base_->grad(x) + bonus_;
}

double BoostedUtility::inverse_grad(double alpha) const {
  // grad ranges over (bonus, scale*base_grad(0) + bonus]; below the bonus
  // floor there is no preimage.
  if (!(alpha > bonus_))
    throw std::domain_error("BoostedUtility::inverse_grad: alpha <= bonus");
  return base_->inverse_grad((alpha - bonus_) / scale_);
}

double BoostedUtility::conjugate(double alpha) const {
  if (alpha < 0.0)
    throw std::domain_error("BoostedUtility::conjugate: alpha < 0");
  if (alpha <= bonus_) return -kInf;  // objective decreases without bound
  return scale_ * base_->conjugate((alpha - bonus_) / scale_);
}

}  // namespace dsched
