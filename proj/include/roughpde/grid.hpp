#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roughpde/errors.hpp"

namespace rpde {

/// Uniform periodic grid on [0,2pi)^d, d in {1,2}.
struct PeriodicGrid {
  int d = 1;
  int n = 8;  // nodes per axis, even, >= 8

  PeriodicGrid() = default;
  PeriodicGrid(int dim, int nodes) : d(dim), n(nodes) {
    if (d < 1 || d > 2) throw ConfigError("grid dimension must be 1 or 2");
    if (n < 8 || n % 2 != 0) throw ConfigError("grid nodes must be even and >= 8");
  }

  double h() const { return 2.0 * M_PI / n; }
  std::size_t nodes() const { return d == 1 ? std::size_t(n) : std::size_t(n) * n; }
  double x(int i) const { return h() * i; }
  bool operator==(const PeriodicGrid& o) const { return d == o.d && n == o.n; }
  bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }
};

/// Scalar grid field.  Vector-valued data is a std::vector<Field>.
class Field {
 public:
  Field() = default;
  explicit Field(PeriodicGrid g, double fill = 0.0) : grid_(g), v_(g.nodes(), fill) {}

  static Field from_fn(PeriodicGrid g, const std::function<double(double)>& f);
  static Field from_fn(PeriodicGrid g, const std::function<double(double, double)>& f);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  const std::vector<double>& data() const { return v_; }
  std::vector<double>& data() { return v_; }

  // 2D addressing (row-major: index = i + n*j)
  double at(int i, int j) const { return v_[idx(i, j)]; }
  double& at(int i, int j) { return v_[idx(i, j)]; }
  std::size_t idx(int i, int j) const { return std::size_t(i) + std::size_t(grid_.n) * j; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

  bool finite() const;

 private:
  PeriodicGrid grid_;
  std::vector<double> v_;
};

Field cwise_mul(const Field& a, const Field& b);
Field axpy(double a, const Field& x, const Field& y);  // a*x + y

// ---------------------------------------------------------------------------
// Finite differences (periodic, 2nd order central; 4th order also available)
// ---------------------------------------------------------------------------

/// First derivative along axis (0 or 1), 2nd-order central differences.
Field dx(const Field& f, int axis = 0);
/// Second derivative d^2/daxis1 daxis2, 2nd-order central differences.
Field dxx(const Field& f, int axis1 = 0, int axis2 = 0);
/// First derivative, 4th-order central differences.
Field dx4(const Field& f, int axis = 0);
Field laplace(const Field& f);
Field divergence(const std::vector<Field>& comps);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double lp_norm(const Field& f, double p);  // p in [1, inf]; rectangle rule
double linf_norm(const Field& f);
double l2_inner(const Field& a, const Field& b);

/// W^{k,p} with grid derivatives: for p < inf the l^p sum over all derivative
/// multi-indices of order <= k, for p = inf the max.  `fourth_order` switches
/// the derivative stencils (used for sheet-space norms).
double sobolev_norm(const Field& f, int k, double p, bool fourth_order = false);

/// W^{-k,2} via the Fourier multiplier (1+|xi|^2)^{-k/2}, Parseval-normalized.
double neg_sobolev_norm(const Field& f, int k);

/// W^{-k,p}, p != 2: max over a fixed trigonometric dictionary D of
/// |<f,phi>| / |phi|_{W^{k,p'}}.  A norm-equivalent surrogate; callers see
/// `surrogate = true`.
struct NormValue {
  double value;
  bool surrogate;
};
NormValue neg_sobolev_dict_norm(const Field& f, int k, double p);

struct NormSpec {
  enum Kind { Lp, Wkp, NegSobolev } kind = Lp;
  int k = 0;
  double p = 2.0;
};
NormValue norm(const Field& f, const NormSpec& spec);

// ---------------------------------------------------------------------------
// Inequality diagnostics
// ---------------------------------------------------------------------------

/// Admissibility of (rho, sigma) for the space-time interpolation inequality:
/// 1/rho + d/(2 sigma) >= d/4 plus the per-dimension ranges.  Throws
/// PreconditionError naming the violated range when `throwing`.
bool interp_exponents_admissible(double rho, double sigma, int d, bool throwing = false);

/// ||f||_{L^rho(0,T;L^sigma)} / (||grad f||_{L2L2} + ||f||_{LinfL2}) for a
/// space-time trace given per partition point.  Zero trace gives 0.
double interp_check(const std::vector<Field>& trace, const std::vector<double>& times, double rho,
                    double sigma);

/// |v|_{L4}^4 / (|v|_{L2}^3 |v_x|_{L2} + |v|_{L2}^4) on the 1-d torus.
double gn_check(const Field& v);

/// Discrete L^rho(0,T;L^sigma) norm of a trace (rectangle rule in time).
double space_time_norm(const std::vector<Field>& trace, const std::vector<double>& times,
                       double rho, double sigma);

// ---------------------------------------------------------------------------
// Nonlinear diffusion coefficient
// ---------------------------------------------------------------------------

/// Scalar diffusion a(t,x,z) with partial derivatives and ellipticity lambda.
struct NonlinearDiffusion {
  std::function<double(double, double, double)> a;
  std::function<double(double, double, double)> a_x;  // D_2 a
  std::function<double(double, double, double)> a_z;  // D_3 a
  double lambda = 1.0;
};

/// Samples the coercivity sandwich lambda <= a(t,x,z) <= 1/lambda at random
/// points; returns the number of violations.
std::size_t ellipticity_check(const NonlinearDiffusion& nd, double horizon, std::size_t samples,
                              std::uint64_t seed);

}  // namespace rpde
