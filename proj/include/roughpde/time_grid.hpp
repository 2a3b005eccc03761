#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "roughpde/errors.hpp"

namespace rpde {

/// Ordered time partition 0 = t_0 < t_1 < ... < t_N = T.
class TimePartition {
 public:
  TimePartition() = default;
  explicit TimePartition(std::vector<double> points);

  static TimePartition uniform(double horizon, std::size_t steps);

  /// Dyadic refinement: every interval is split into 2^level equal parts.
  TimePartition refine(int level) const;

  double horizon() const { return points_.back(); }
  std::size_t steps() const { return points_.size() - 1; }
  std::size_t size() const { return points_.size(); }
  double t(std::size_t k) const { return points_[k]; }
  double dt(std::size_t k) const { return points_[k + 1] - points_[k]; }
  const std::vector<double>& points() const { return points_; }

  /// Index of a partition point equal to `time` (within 1e-12*T slack).
  std::size_t index_of(double time) const;

  bool operator==(const TimePartition& o) const { return points_ == o.points_; }

 private:
  std::vector<double> points_;
};

// ---------------------------------------------------------------------------
// Two-index maps and the delta operator
// ---------------------------------------------------------------------------

/// Scalar two-index map h_{st}, addressed by partition indices.
using TwoIndexFn = std::function<double(std::size_t, std::size_t)>;

/// delta h_{s theta t} = h_{st} - h_{s theta} - h_{theta t}.
/// Throws on an out-of-order index triple.
double delta_op(const TwoIndexFn& h, std::size_t s, std::size_t theta, std::size_t t);

/// [h]_alpha = max over grid pairs s<t of |h_{st}| / (t-s)^alpha.
double holder_seminorm(const TwoIndexFn& h, const TimePartition& part, double alpha);

// ---------------------------------------------------------------------------
// Controls
// ---------------------------------------------------------------------------

/// Superadditive control function omega(s,t) on the simplex of a partition.
class Control {
 public:
  /// (t-s)^a, a >= 1.
  static Control power(const TimePartition& part, double a);
  /// (int_s^t f)^a for nonnegative f tabulated per interval, a >= 1.
  static Control integral(const TimePartition& part, std::vector<double> f_per_interval,
                          double a);
  /// Arbitrary tabulated values on the simplex grid (superadditivity asserted,
  /// not guaranteed).
  static Control tabulated(const TimePartition& part, TwoIndexFn values);

  double eval(std::size_t i, std::size_t j) const;
  const TimePartition& partition() const { return part_; }

 private:
  TimePartition part_;
  TwoIndexFn eval_;
};

struct ControlViolation {
  std::size_t s, theta, t;
  double defect;  // omega(s,theta)+omega(theta,t) - omega(s,t), positive when violated
};

/// Checks omega(s,theta)+omega(theta,t) <= omega(s,t) on every grid triple.
std::vector<ControlViolation> control_superadditivity_check(const Control& omega,
                                                            double tol = 1e-12);

// ---------------------------------------------------------------------------
// Log-log exponent fits (shared by the remainder ledger and experiments)
// ---------------------------------------------------------------------------

struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double stderr_exponent = 0.0;
  std::size_t levels = 0;
};

/// OLS fit of log(value) against log(scale); entries with value <= floor are
/// dropped (they are at roundoff and would bias the slope).
ExponentFit fit_exponent(const std::vector<double>& scales, const std::vector<double>& values,
                         double floor = 1e-300);

}  // namespace rpde
