#pragma once

#include <cstdint>
#include <vector>

#include "roughpde/time_grid.hpp"

namespace rpde {

/// Finite-dimensional rough path: values Z at partition points plus the
/// level-2 data I^{mu nu}_{st} = int_s^t Z^mu_{sr} dZ^nu_r of its
/// piecewise-linear interpolation.  The symmetric part of I is structurally
/// (1/2) Z (x) Z, the antisymmetric part is the Levy area, so geometricity is
/// built in; an explicit area perturbation can be injected for audit tests.
class FiniteRoughPath {
 public:
  /// values[k][mu]: component mu at partition point k.
  FiniteRoughPath(TimePartition part, std::vector<std::vector<double>> values, double alpha);

  std::size_t dim() const { return dim_; }
  double alpha() const { return alpha_; }
  const TimePartition& partition() const { return part_; }

  double value(std::size_t k, std::size_t mu) const { return values_[k][mu]; }
  double increment(std::size_t i, std::size_t j, std::size_t mu) const {
    return values_[j][mu] - values_[i][mu];
  }

  /// Level-2 matrix I_{ij} (row mu, column nu), flattened row-major.
  std::vector<double> second_level(std::size_t i, std::size_t j) const;
  /// Antisymmetric part of the level 2 (identically zero for dim 1 paths).
  std::vector<double> levy_area(std::size_t i, std::size_t j) const;

  /// Bumps the Levy area on pair (i,j): A^{mu nu} += eps, A^{nu mu} -= eps.
  void perturb_levy(std::size_t i, std::size_t j, std::size_t mu, std::size_t nu, double eps);

  /// max over grid triples and components of |delta I - Z (x) Z|.
  double chen_residual() const;

 private:
  TimePartition part_;
  std::vector<std::vector<double>> values_;
  std::size_t dim_;
  double alpha_;
  struct Perturbation {
    std::size_t i, j, mu, nu;
    double eps;
  };
  std::vector<Perturbation> perturbations_;
};

/// Canonical (piecewise-linear) lift of tabulated path values.
FiniteRoughPath pl_lift(const TimePartition& part, std::vector<std::vector<double>> values,
                        double alpha);

/// Fractional Brownian path on the uniform n-step partition of [0,T],
/// covariance R(s,t) = (s^{2H}+t^{2H}-|t-s|^{2H})/2, sampled by dense
/// Cholesky factorization.  Deterministic per seed.  Returns n+1 values
/// starting at 0.
std::vector<double> fbm_sample(double hurst, std::size_t n, double horizon, std::uint64_t seed);

/// Dense fBm covariance matrix over times t_1..t_n (excludes t=0), row-major.
std::vector<double> fbm_covariance(double hurst, const std::vector<double>& times);

}  // namespace rpde
