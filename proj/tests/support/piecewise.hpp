#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "dsched/utility.hpp"

namespace dsched::testing {

// Concave piecewise-linear mock of the utility interface, for exercising the
// generic eval/grad/conjugate contract without the power family.
// Segments carry strictly decreasing positive slopes; the last slope extends
// to infinity.
class PiecewiseLinearUtility final : public Utility {
 public:
  // breaks: segment right endpoints (ascending); slopes: one more than
  // breaks, strictly decreasing, positive.
  PiecewiseLinearUtility(std::vector<double> breaks, std::vector<double> slopes)
      : breaks_(std::move(breaks)), slopes_(std::move(slopes)) {
    if (slopes_.size() != breaks_.size() + 1)
      throw std::invalid_argument("PiecewiseLinearUtility: sizes mismatch");
  }

  double eval(double x) const override {
    if (x < 0.0) throw std::domain_error("eval: x < 0");
    double value = 0.0, prev = 0.0;
    for (size_t i = 0; i < breaks_.size(); ++i) {
      const double upper = std::min(x, breaks_[i]);
      if (upper > prev) value += slopes_[i] * (upper - prev);
      prev = breaks_[i];
      if (x <= prev) return value;
    }
    if (x > prev) value += slopes_.back() * (x - prev);
    return value;
  }

  double grad(double x) const override {
    if (x < 0.0) throw std::domain_error("grad: x < 0");
    for (size_t i = 0; i < breaks_.size(); ++i)
      if (x < breaks_[i]) return slopes_[i];
    return slopes_.back();
  }

  double conjugate(double alpha) const override {
    if (alpha < 0.0) throw std::domain_error("conjugate: alpha < 0");
    // inf_x alpha x - f(x): decreasing in x while alpha < slope; the infimum
    // sits at the last breakpoint whose slope exceeds alpha (or +inf when
    // even the tail slope does, which we exclude by requiring alpha >= tail).
    if (alpha < slopes_.back())
      throw std::domain_error("conjugate: unbounded below for this mock");
    double best = 0.0, value = 0.0, prev = 0.0;
    for (size_t i = 0; i < breaks_.size(); ++i) {
      value += (alpha - slopes_[i]) * (breaks_[i] - prev);
      prev = breaks_[i];
      best = std::min(best, value);
    }
    return best;
  }

  double inverse_grad(double alpha) const override {
    if (!(alpha > 0.0)) throw std::domain_error("inverse_grad: alpha <= 0");
    if (alpha >= slopes_.front()) return 0.0;
    for (size_t i = 0; i < breaks_.size(); ++i)
      if (alpha >= slopes_[i + 1]) return breaks_[i];
    return breaks_.empty() ? 0.0 : breaks_.back();
  }

 private:
  std::vector<double> breaks_;
  std::vector<double> slopes_;
};

}  // namespace dsched::testing
