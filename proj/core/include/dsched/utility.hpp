#pragma once

#include <stdexcept>

namespace dsched {

// Concave reward over the amount of a job served. Implementations are
// normalized so eval(0) == 0, strictly concave, non-decreasing and
// differentiable on x >= 0, with grad(x) > 0 strictly decreasing.
class Utility {
 public:
  virtual ~Utility() = default;

  // Reward for a served amount x >= 0.
  virtual double eval(double x) const = 0;

  // Marginal reward at x >= 0.
  virtual double grad(double x) const = 0;

  // Concave conjugate inf_{x>=0} alpha*x - eval(x). Never positive.
  virtual double conjugate(double alpha) const = 0;

  // Inverse of grad, clamped to 0 for alpha >= grad(0). Requires alpha > 0.
  virtual double inverse_grad(double alpha) const = 0;

  double grad_at_zero() const { return grad(0.0); }
};

// The power family  v * ((c + x)^(1-psi) - c^(1-psi)) / (1 - psi)  with
// shift c = 0.1, scale v > 0 and curvature psi in (0,1). The constant term
// normalizes eval(0) to 0 without changing the gradient or the conjugate
// argmin.
class PowerUtility final : public Utility {
 public:
  static constexpr double kShift = 0.1;

  PowerUtility(double scale, double curvature);

  double eval(double x) const override;
  double grad(double x) const override;
  double conjugate(double alpha) const override;
  double inverse_grad(double alpha) const override;

  double scale() const { return v_; }
  double curvature() const { return psi_; }

 private:
  double v_;
  double psi_;
  double offset_;  // v * c^(1-psi) / (1-psi)
  double grad0_;   // v * c^(-psi)
};

// V * f(x) + q * x: a base reward scaled by V > 0 plus a linear service
// bonus q >= 0. Inherits strict concavity and eval(0) == 0 from the base;
// conjugate and inverse gradient reduce to the base ones by shift/scale.
class BoostedUtility final : public Utility {
 public:
  BoostedUtility(const Utility& base, double scale, double bonus);

  double eval(double x) const override;
  double grad(double x) const override;
  double conjugate(double alpha) const override;
  double inverse_grad(double alpha) const override;

 private:
  const Utility* base_;
  double scale_;
  double bonus_;
};

}  // namespace dsched
