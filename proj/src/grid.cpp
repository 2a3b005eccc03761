#include "roughpde/grid.hpp"

#include <algorithm>
#include <complex>
#include <random>

namespace rpde {

Field Field::from_fn(PeriodicGrid g, const std::function<double(double)>& f) {
  if (g.d != 1) throw ConfigError("1-argument field function on a 2-d grid");
  Field out(g);
  for (int i = 0; i < g.n; ++i) out[i] = f(g.x(i));
  return out;
}

Field Field::from_fn(PeriodicGrid g, const std::function<double(double, double)>& f) {
  if (g.d != 2) throw ConfigError("2-argument field function on a 1-d grid");
  Field out(g);
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) out.at(i, j) = f(g.x(i), g.x(j));
  return out;
}

Field& Field::operator+=(const Field& o) {
  if (grid_ != o.grid_) throw ConfigError("field shape mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  if (grid_ != o.grid_) throw ConfigError("field shape mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

bool Field::finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

Field cwise_mul(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) throw ConfigError("field shape mismatch");
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Field axpy(double a, const Field& x, const Field& y) {
  if (x.grid() != y.grid()) throw ConfigError("field shape mismatch");
  Field out = y;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * x[i];
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

namespace {

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

template <typename Stencil>
Field apply_axis(const Field& f, int axis, Stencil stencil) {
  const PeriodicGrid& g = f.grid();
  if (axis < 0 || axis >= g.d) throw ConfigError("derivative axis out of range");
  Field out(g);
  int n = g.n;
  if (g.d == 1) {
    for (int i = 0; i < n; ++i)
      out[i] = stencil([&](int off) { return f[wrap(i + off, n)]; });
  } else {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        out.at(i, j) = stencil([&](int off) {
          return axis == 0 ? f.at(wrap(i + off, n), j) : f.at(i, wrap(j + off, n));
        });
  }
  return out;
}

}  // namespace

Field dx(const Field& f, int axis) {
  double inv2h = 1.0 / (2.0 * f.grid().h());
  return apply_axis(f, axis, [inv2h](auto at) { return (at(1) - at(-1)) * inv2h; });
}

Field dx4(const Field& f, int axis) {
  double invh = 1.0 / f.grid().h();
  return apply_axis(f, axis, [invh](auto at) {
    return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) * invh / 12.0;
  });
}

Field dxx(const Field& f, int axis1, int axis2) {
  const PeriodicGrid& g = f.grid();
  if (axis1 == axis2) {
    double invh2 = 1.0 / (g.h() * g.h());
    return apply_axis(f, axis1,
                      [invh2](auto at) { return (at(1) - 2.0 * at(0) + at(-1)) * invh2; });
  }
  return dx(dx(f, axis1), axis2);
}

Field laplace(const Field& f) {
  Field out = dxx(f, 0, 0);
  if (f.grid().d == 2) out += dxx(f, 1, 1);
  return out;
}

Field divergence(const std::vector<Field>& comps) {
  if (comps.empty()) throw ConfigError("divergence of empty component list");
  if (static_cast<int>(comps.size()) != comps.front().grid().d)
    throw ConfigError("divergence: one component per axis expected");
  Field out = dx(comps[0], 0);
  for (std::size_t a = 1; a < comps.size(); ++a) out += dx(comps[a], static_cast<int>(a));
  return out;
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double linf_norm(const Field& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

double lp_norm(const Field& f, double p) {
  if (std::isinf(p)) return linf_norm(f);
  if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be in [1, inf]");
  double cell = std::pow(f.grid().h(), f.grid().d);
  // max-factored accumulation keeps huge exponents finite
  double m = linf_norm(f);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]) / m, p);
  return m * std::pow(cell * s, 1.0 / p);
}

double l2_inner(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) throw ConfigError("inner product shape mismatch");
  double cell = std::pow(a.grid().h(), a.grid().d);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return cell * s;
}

namespace {

void collect_derivatives(const Field& f, int k, bool fourth, std::vector<Field>& out) {
  out.push_back(f);
  std::vector<Field> frontier{f};
  auto d1 = [fourth](const Field& g, int axis) { return fourth ? dx4(g, axis) : dx(g, axis); };
  for (int order = 1; order <= k; ++order) {
    std::vector<Field> next;
    for (const Field& g : frontier)
      for (int axis = 0; axis < f.grid().d; ++axis) next.push_back(d1(g, axis));
    for (const Field& g : next) out.push_back(g);
    frontier = std::move(next);
  }
}

}  // namespace

double sobolev_norm(const Field& f, int k, double p, bool fourth_order) {
  if (k < 0 || k > 3) throw ConfigError("sobolev_norm supports k in 0..3");
  std::vector<Field> derivs;
  collect_derivatives(f, k, fourth_order, derivs);
  if (std::isinf(p)) {
    double m = 0.0;
    for (const Field& g : derivs) m = std::max(m, linf_norm(g));
    return m;
  }
  double s = 0.0;
  for (const Field& g : derivs) s += std::pow(lp_norm(g, p), p);
  return std::pow(s, 1.0 / p);
}

// --- DFT helpers (radix-2 when possible, naive otherwise) -------------------

namespace {

using cd = std::complex<double>;

void fft_radix2(std::vector<cd>& a, bool invert) {
  std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * M_PI / static_cast<double>(len) * (invert ? 1 : -1);
    cd wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        cd u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (invert)
    for (cd& x : a) x /= static_cast<double>(n);
}

void dft_naive(std::vector<cd>& a) {
  std::size_t n = a.size();
  std::vector<cd> out(n, cd(0.0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j)
      out[k] += a[j] * std::polar(1.0, -2.0 * M_PI * double(k) * double(j) / double(n));
  a = std::move(out);
}

void dft(std::vector<cd>& a) {
  std::size_t n = a.size();
  if ((n & (n - 1)) == 0)
    fft_radix2(a, false);
  else
    dft_naive(a);
}

int freq_of(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace

double neg_sobolev_norm(const Field& f, int k) {
  const PeriodicGrid& g = f.grid();
  int n = g.n;
  if (g.d == 1) {
    std::vector<cd> a(f.data().begin(), f.data().end());
    dft(a);
    // Parseval-normalized coefficients: |f|_{L2}^2 = sum |fhat|^2 with
    // fhat_xi = sqrt(2pi)/n * DFT_xi
    double scale = 2.0 * M_PI / (static_cast<double>(n) * n);
    double s = 0.0;
    for (int kk = 0; kk < n; ++kk) {
      double xi = freq_of(kk, n);
      s += std::pow(1.0 + xi * xi, -k) * std::norm(a[kk]) * scale;
    }
    return std::sqrt(s);
  }
  // 2-d: row-column transform
  std::vector<cd> a(f.data().begin(), f.data().end());
  std::vector<cd> tmp(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) tmp[i] = a[i + std::size_t(n) * j];
    dft(tmp);
    for (int i = 0; i < n; ++i) a[i + std::size_t(n) * j] = tmp[i];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) tmp[j] = a[i + std::size_t(n) * j];
    dft(tmp);
    for (int j = 0; j < n; ++j) a[i + std::size_t(n) * j] = tmp[j];
  }
  double scale = std::pow(2.0 * M_PI, 2) / std::pow(static_cast<double>(n), 4);
  double s = 0.0;
  for (int kj = 0; kj < n; ++kj)
    for (int ki = 0; ki < n; ++ki) {
      double xi2 = double(freq_of(ki, n)) * freq_of(ki, n) + double(freq_of(kj, n)) * freq_of(kj, n);
      s += std::pow(1.0 + xi2, -k) * std::norm(a[ki + std::size_t(n) * kj]) * scale;
    }
  return std::sqrt(s);
}

NormValue neg_sobolev_dict_norm(const Field& f, int k, double p) {
  const PeriodicGrid& g = f.grid();
  if (g.d != 1) throw ConfigError("dictionary negative norms implemented for d=1 only");
  double pprime = std::isinf(p) ? 1.0 : (p > 1.0 ? p / (p - 1.0) : INFINITY);
  double best = 0.0;
  auto consider = [&](const Field& phi) {
    double denom = sobolev_norm(phi, k, pprime);
    if (denom > 0.0) best = std::max(best, std::abs(l2_inner(f, phi)) / denom);
  };
  consider(Field(g, 1.0));
  for (int j = 1; j <= 16; ++j) {
    consider(Field::from_fn(g, [j](double x) { return std::cos(j * x); }));
    consider(Field::from_fn(g, [j](double x) { return std::sin(j * x); }));
  }
  return {best, true};
}

NormValue norm(const Field& f, const NormSpec& spec) {
  switch (spec.kind) {
    case NormSpec::Lp:
      return {lp_norm(f, spec.p), false};
    case NormSpec::Wkp:
      if (spec.k < 0 || spec.k > 3) throw ConfigError("unsupported Sobolev order");
      return {sobolev_norm(f, spec.k, spec.p), false};
    case NormSpec::NegSobolev:
      if (spec.k < 1 || spec.k > 3) throw ConfigError("unsupported negative Sobolev order");
      if (spec.p == 2.0) return {neg_sobolev_norm(f, spec.k), false};
      return neg_sobolev_dict_norm(f, spec.k, spec.p);
  }
  throw ConfigError("unknown norm kind");
}

// ---------------------------------------------------------------------------
// Inequality diagnostics
// ---------------------------------------------------------------------------

bool interp_exponents_admissible(double rho, double sigma, int d, bool throwing) {
  auto fail = [&](const std::string& what) -> bool {
    if (throwing) throw PreconditionError("interpolation exponents rejected: " + what);
    return false;
  };
  double lhs = 1.0 / rho + d / (2.0 * sigma);
  if (!(lhs >= d / 4.0 - 1e-14)) return fail("1/rho + d/(2 sigma) >= d/4 violated");
  if (d == 1) {
    if (!(rho >= 4.0)) return fail("rho in [4,inf] required for d=1");
    if (!(sigma >= 2.0)) return fail("sigma in [2,inf] required for d=1");
  } else if (d == 2) {
    if (!(rho > 2.0)) return fail("rho in (2,inf] required for d=2");
    if (!(sigma >= 2.0) || std::isinf(sigma)) return fail("sigma in [2,inf) required for d=2");
  } else {
    return fail("dimension not supported");
  }
  return true;
}

double space_time_norm(const std::vector<Field>& trace, const std::vector<double>& times,
                       double rho, double sigma) {
  if (trace.size() != times.size() || trace.size() < 2)
    throw ConfigError("space-time norm: trace/times mismatch");
  std::vector<double> snorm(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) snorm[k] = lp_norm(trace[k], sigma);
  if (std::isinf(rho)) return *std::max_element(snorm.begin(), snorm.end());
  double m = *std::max_element(snorm.begin(), snorm.end());
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < trace.size(); ++k)
    s += std::pow(snorm[k] / m, rho) * (times[k + 1] - times[k]);
  return m * std::pow(s, 1.0 / rho);
}

double interp_check(const std::vector<Field>& trace, const std::vector<double>& times, double rho,
                    double sigma) {
  int d = trace.front().grid().d;
  interp_exponents_admissible(rho, sigma, d, /*throwing=*/true);
  double lhs = space_time_norm(trace, times, rho, sigma);
  if (lhs == 0.0) return 0.0;
  double grad2 = 0.0;
  double sup2 = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    double g2 = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      double gn = lp_norm(dx(trace[k], axis), 2.0);
      g2 += gn * gn;
    }
    if (k + 1 < trace.size()) grad2 += g2 * (times[k + 1] - times[k]);
    double l2 = lp_norm(trace[k], 2.0);
    sup2 = std::max(sup2, l2);
  }
  return lhs / (std::sqrt(grad2) + sup2);
}

double gn_check(const Field& v) {
  if (v.grid().d != 1) throw ConfigError("gn_check: d=1 only");
  double l4 = lp_norm(v, 4.0);
  if (l4 == 0.0) return 0.0;
  double l2 = lp_norm(v, 2.0);
  double g2 = lp_norm(dx(v), 2.0);
  return std::pow(l4, 4.0) / (std::pow(l2, 3.0) * g2 + std::pow(l2, 4.0));
}

std::size_t ellipticity_check(const NonlinearDiffusion& nd, double horizon, std::size_t samples,
                              std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> ut(0.0, horizon), ux(0.0, 2.0 * M_PI), uz(-10.0, 10.0);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    double a = nd.a(ut(eng), ux(eng), uz(eng));
    if (!(a >= nd.lambda && a <= 1.0 / nd.lambda)) ++bad;
  }
  return bad;
}

}  // namespace rpde
