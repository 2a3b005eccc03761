#include "roughpde/time_grid.hpp"

#include <algorithm>
#include <cmath>

namespace rpde {

TimePartition::TimePartition(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ConfigError("time partition needs at least 2 points");
  if (points_.front() != 0.0) throw ConfigError("time partition must start at 0");
  for (std::size_t k = 0; k + 1 < points_.size(); ++k)
    if (!(points_[k] < points_[k + 1]))
      throw ConfigError("time partition points must be strictly increasing");
}

TimePartition TimePartition::uniform(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps == 0) throw ConfigError("uniform partition: T > 0, steps >= 1");
  std::vector<double> pts(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k)
    pts[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  pts.back() = horizon;
  return TimePartition(std::move(pts));
}

TimePartition TimePartition::refine(int level) const {
  if (level < 0) throw ConfigError("refine: level must be >= 0");
  std::size_t sub = std::size_t{1} << level;
  std::vector<double> pts;
  pts.reserve(steps() * sub + 1);
  for (std::size_t k = 0; k < steps(); ++k)
    for (std::size_t j = 0; j < sub; ++j)
      pts.push_back(points_[k] + dt(k) * static_cast<double>(j) / static_cast<double>(sub));
  pts.push_back(points_.back());
  return TimePartition(std::move(pts));
}

std::size_t TimePartition::index_of(double time) const {
  double tol = 1e-12 * std::max(1.0, horizon());
  auto it = std::lower_bound(points_.begin(), points_.end(), time - tol);
  if (it == points_.end() || std::abs(*it - time) > tol)
    throw ConfigError("time " + std::to_string(time) + " is not a partition point");
  return static_cast<std::size_t>(it - points_.begin());
}

double delta_op(const TwoIndexFn& h, std::size_t s, std::size_t theta, std::size_t t) {
  if (!(s <= theta && theta <= t)) throw ConfigError("delta: indices must satisfy s <= theta <= t");
  return h(s, t) - h(s, theta) - h(theta, t);
}

double holder_seminorm(const TwoIndexFn& h, const TimePartition& part, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("holder_seminorm: alpha must be positive");
  if (part.size() < 2) throw ConfigError("holder_seminorm: empty partition");
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < part.size(); ++i)
    for (std::size_t j = i + 1; j < part.size(); ++j) {
      double gap = part.t(j) - part.t(i);
      best = std::max(best, std::abs(h(i, j)) / std::pow(gap, alpha));
    }
  return best;
}

Control Control::power(const TimePartition& part, double a) {
  if (!(a >= 1.0)) throw ConfigError("power control requires exponent >= 1");
  Control c;
  c.part_ = part;
  c.eval_ = [part, a](std::size_t i, std::size_t j) {
    return std::pow(part.t(j) - part.t(i), a);
  };
  return c;
}

Control Control::integral(const TimePartition& part, std::vector<double> f_per_interval,
                          double a) {
  if (!(a >= 1.0)) throw ConfigError("integral control requires exponent >= 1");
  if (f_per_interval.size() != part.steps())
    throw ConfigError("integral control: one value per partition interval expected");
  for (double v : f_per_interval)
    if (v < 0.0) throw ConfigError("integral control requires nonnegative integrand");
  std::vector<double> cumulative(part.size(), 0.0);
  for (std::size_t k = 0; k < part.steps(); ++k)
    cumulative[k + 1] = cumulative[k] + f_per_interval[k] * part.dt(k);
  Control c;
  c.part_ = part;
  c.eval_ = [cumulative, a](std::size_t i, std::size_t j) {
    return std::pow(cumulative[j] - cumulative[i], a);
  };
  return c;
}

Control Control::tabulated(const TimePartition& part, TwoIndexFn values) {
  Control c;
  c.part_ = part;
  c.eval_ = std::move(values);
  return c;
}

double Control::eval(std::size_t i, std::size_t j) const {
  if (j < i) throw ConfigError("control evaluated off the simplex");
  return eval_(i, j);
}

std::vector<ControlViolation> control_superadditivity_check(const Control& omega, double tol) {
  std::vector<ControlViolation> out;
  std::size_t n = omega.partition().size();
  for (std::size_t s = 0; s + 2 < n + 1; ++s)
    for (std::size_t th = s; th < n; ++th)
      for (std::size_t t = th; t < n; ++t) {
        double defect = omega.eval(s, th) + omega.eval(th, t) - omega.eval(s, t);
        if (defect > tol) out.push_back({s, th, t, defect});
      }
  return out;
}

ExponentFit fit_exponent(const std::vector<double>& scales, const std::vector<double>& values,
                         double floor) {
  if (scales.size() != values.size()) throw ConfigError("fit_exponent: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (values[i] > floor && scales[i] > 0.0) {
      xs.push_back(std::log(scales[i]));
      ys.push_back(std::log(values[i]));
    }
  }
  if (xs.size() < 2) throw NumericError("fit_exponent: need at least 2 usable levels");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  ExponentFit fit;
  fit.levels = xs.size();
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.exponent * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ss += r * r;
  }
  if (xs.size() > 2) fit.stderr_exponent = std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n));
  return fit;
}

}  // namespace rpde
