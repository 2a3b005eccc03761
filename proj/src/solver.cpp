#include "roughpde/solver.hpp"

#include <algorithm>
#include <cmath>

namespace rpde {

TimeField constant_field(const Field& f) {
  return [f](std::size_t) { return f; };
}

TimeField zero_field(PeriodicGrid g) {
  return [g](std::size_t) { return Field(g); };
}

DiffusionSpec DiffusionSpec::none() { return {}; }

DiffusionSpec DiffusionSpec::constant(PeriodicGrid g, double a) {
  DiffusionSpec spec;
  spec.kind = Kind::field;
  Field f(g, a);
  spec.a_field = constant_field(f);
  spec.lambda = std::min(a, 1.0 / a);
  return spec;
}

DiffusionSpec DiffusionSpec::field(TimeField a, double lambda) {
  DiffusionSpec spec;
  spec.kind = Kind::field;
  spec.a_field = std::move(a);
  spec.lambda = lambda;
  return spec;
}

DiffusionSpec DiffusionSpec::nonlinear(NonlinearDiffusion nl) {
  DiffusionSpec spec;
  spec.kind = Kind::nonlinear;
  spec.lambda = nl.lambda;
  spec.nl = std::move(nl);
  return spec;
}

// ---------------------------------------------------------------------------
// Linear solves
// ---------------------------------------------------------------------------

namespace {

// Thomas algorithm for a tridiagonal system (no wraparound).
std::vector<double> thomas(std::vector<double> lower, std::vector<double> diag,
                           std::vector<double> upper, std::vector<double> rhs) {
  std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

// Cyclic tridiagonal solve via the Sherman-Morrison correction.
std::vector<double> cyclic_thomas(const std::vector<double>& lower, std::vector<double> diag,
                                  const std::vector<double>& upper,
                                  const std::vector<double>& rhs) {
  std::size_t n = diag.size();
  double alpha = upper[n - 1];  // M[n-1][0]
  double beta = lower[0];       // M[0][n-1]
  double gamma = -diag[0];
  std::vector<double> d = diag;
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;
  std::vector<double> x = thomas(lower, d, upper, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  std::vector<double> z = thomas(lower, d, upper, u);
  double factor = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= factor * z[i];
  return x;
}

// Face-averaged divergence-form diffusion applied to u (d = 1 or 2).
Field apply_diffusion(const Field& a, const Field& u) {
  const PeriodicGrid& g = u.grid();
  double inv_h2 = 1.0 / (g.h() * g.h());
  Field out(g);
  int n = g.n;
  if (g.d == 1) {
    for (int i = 0; i < n; ++i) {
      int ip = (i + 1) % n, im = (i + n - 1) % n;
      double ap = 0.5 * (a[i] + a[ip]), am = 0.5 * (a[i] + a[im]);
      out[i] = (ap * (u[ip] - u[i]) - am * (u[i] - u[im])) * inv_h2;
    }
    return out;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int ip = (i + 1) % n, im = (i + n - 1) % n;
      int jp = (j + 1) % n, jm = (j + n - 1) % n;
      double axp = 0.5 * (a.at(i, j) + a.at(ip, j)), axm = 0.5 * (a.at(i, j) + a.at(im, j));
      double ayp = 0.5 * (a.at(i, j) + a.at(i, jp)), aym = 0.5 * (a.at(i, j) + a.at(i, jm));
      out.at(i, j) = (axp * (u.at(ip, j) - u.at(i, j)) - axm * (u.at(i, j) - u.at(im, j)) +
                      ayp * (u.at(i, jp) - u.at(i, j)) - aym * (u.at(i, j) - u.at(i, jm))) *
                     inv_h2;
    }
  return out;
}

// Solves (I - h A) x = rhs with A the face-averaged diffusion.
Field implicit_solve(const Field& a, double h, const Field& rhs, double& residual) {
  const PeriodicGrid& g = rhs.grid();
  int n = g.n;
  double inv_h2 = 1.0 / (g.h() * g.h());
  if (g.d == 1) {
    std::vector<double> lower(n), diag(n), upper(n), b(n);
    for (int i = 0; i < n; ++i) {
      int ip = (i + 1) % n, im = (i + n - 1) % n;
      double ap = 0.5 * (a[i] + a[ip]), am = 0.5 * (a[i] + a[im]);
      diag[i] = 1.0 + h * (ap + am) * inv_h2;
      upper[i] = -h * ap * inv_h2;
      lower[i] = -h * am * inv_h2;
      b[i] = rhs[i];
    }
    auto xv = cyclic_thomas(lower, diag, upper, b);
    Field x(g);
    for (int i = 0; i < n; ++i) x[i] = xv[i];
    Field check = x - apply_diffusion(a, x) * h;
    residual = std::max(residual, linf_norm(check - rhs));
    return x;
  }
  // d = 2: preconditioned conjugate gradients, matrix-free.
  auto apply_m = [&](const Field& v) { return v - apply_diffusion(a, v) * h; };
  Field x = rhs;
  Field r = rhs - apply_m(x);
  double diag_scale = 1.0 + 4.0 * h * inv_h2;  // Jacobi estimate
  Field z = r * (1.0 / diag_scale);
  Field p = z;
  double rz = l2_inner(r, z);
  double target = 1e-13 * std::max(1.0, lp_norm(rhs, 2.0));
  for (int it = 0; it < 10000; ++it) {
    if (lp_norm(r, 2.0) <= target) break;
    Field mp = apply_m(p);
    double alpha = rz / l2_inner(p, mp);
    x += p * alpha;
    r -= mp * alpha;
    Field z2 = r * (1.0 / diag_scale);
    double rz2 = l2_inner(r, z2);
    p = z2 + p * (rz2 / rz);
    rz = rz2;
  }
  residual = std::max(residual, linf_norm(apply_m(x) - rhs));
  return x;
}

}  // namespace

Field implicit_diffusion_step(const Field& a, double h, const Field& rhs) {
  double residual = 0.0;
  return implicit_solve(a, h, rhs, residual);
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

namespace {

struct LowerOrder {
  const ParabolicProblem& pb;

  bool any() const { return pb.cap_F || pb.vel_b || pb.coef_c || pb.flux_f1 || pb.src_f0; }

  Field drift(std::size_t k, const Field& u) const {
    Field out(u.grid());
    if (pb.cap_F) out += dx(cwise_mul(pb.cap_F(k), u));
    if (pb.vel_b) out -= cwise_mul(pb.vel_b(k), dx(u));
    if (pb.coef_c) out -= cwise_mul(pb.coef_c(k), u);
    if (pb.flux_f1) out += dx(pb.flux_f1(k));
    if (pb.src_f0) out -= pb.src_f0(k);
    return out;
  }
};

Field diffusion_coefficient(const ParabolicProblem& pb, std::size_t step_index, double t,
                            const Field& u) {
  if (pb.diffusion.kind == DiffusionSpec::Kind::field) return pb.diffusion.a_field(step_index);
  // nonlinear: coefficient frozen at the current iterate
  const auto& nl = pb.diffusion.nl;
  Field a(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) a[i] = nl.a(t, u.grid().x(int(i)), u[i]);
  return a;
}

void check_coercivity(const ParabolicProblem& pb, const Field& a, std::size_t step) {
  double lo = pb.diffusion.lambda, hi = 1.0 / pb.diffusion.lambda;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] >= lo - 1e-12 && a[i] <= hi + 1e-12))
      throw NumericError("coercivity violated at step " + std::to_string(step));
}

ParabolicProblem reversed_problem(const ParabolicProblem& pb) {
  std::size_t n = pb.part.steps();
  double dt0 = pb.part.dt(0);
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(pb.part.dt(k) - dt0) > 1e-12 * pb.part.horizon())
      throw ConfigError("backward solve requires a uniform partition");
  ParabolicProblem rev = pb;
  rev.backward = false;
  auto flip = [n](TimeField f) -> TimeField {
    if (!f) return nullptr;
    return [f, n](std::size_t k) { return f(n - k); };
  };
  rev.cap_F = flip(pb.cap_F);
  rev.vel_b = flip(pb.vel_b);
  rev.coef_c = flip(pb.coef_c);
  rev.flux_f1 = flip(pb.flux_f1);
  rev.src_f0 = flip(pb.src_f0);
  if (pb.diffusion.kind == DiffusionSpec::Kind::field) rev.diffusion.a_field = flip(pb.diffusion.a_field);
  if (pb.diffusion.kind == DiffusionSpec::Kind::nonlinear) {
    double horizon = pb.part.horizon();
    NonlinearDiffusion nl = pb.diffusion.nl;
    auto wrap = [horizon](std::function<double(double, double, double)> f) {
      return [f, horizon](double t, double x, double z) { return f(horizon - t, x, z); };
    };
    rev.diffusion.nl.a = wrap(nl.a);
    if (nl.a_x) rev.diffusion.nl.a_x = wrap(nl.a_x);
    if (nl.a_z) rev.diffusion.nl.a_z = wrap(nl.a_z);
  }
  if (pb.driver) rev.driver = pb.driver->reflect();
  return rev;
}

}  // namespace

std::vector<double> Trajectory::energy_series() const {
  std::vector<double> e(fields.size());
  double grad_acc = 0.0;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    double l2v = lp_norm(fields[k], 2.0);
    e[k] = l2v * l2v + grad_acc;
    if (k + 1 < fields.size()) {
      double g2 = 0.0;
      for (int axis = 0; axis < fields[k].grid().d; ++axis) {
        double gn = lp_norm(dx(fields[k], axis), 2.0);
        g2 += gn * gn;
      }
      grad_acc += g2 * part.dt(k);
    }
  }
  return e;
}

Trajectory solve(const ParabolicProblem& problem) {
  if (problem.datum.grid() != problem.grid) throw ConfigError("solve: datum grid mismatch");
  if (!problem.datum.finite()) throw ConfigError("solve: datum not finite");
  if (problem.grid.d == 2 && LowerOrder{problem}.any())
    throw ConfigError("solve: lower-order data supported for d=1 only");

  if (problem.backward) {
    ParabolicProblem rev = reversed_problem(problem);
    Trajectory fwd = solve(rev);
    Trajectory out;
    out.part = problem.part;
    std::size_t n = problem.part.steps();
    out.fields.resize(n + 1, Field(problem.grid));
    for (std::size_t k = 0; k <= n; ++k) out.fields[k] = fwd.fields[n - k];
    out.diag.assign(fwd.diag.rbegin(), fwd.diag.rend());
    return out;
  }

  std::size_t nsteps = problem.part.steps();
  // map stepping points into the driver partition
  std::vector<std::size_t> dmap;
  if (problem.driver) {
    for (std::size_t k = 0; k <= nsteps; ++k)
      dmap.push_back(problem.driver->partition().index_of(problem.part.t(k)));
  }

  Trajectory traj;
  traj.part = problem.part;
  traj.fields.reserve(nsteps + 1);
  traj.diag.resize(nsteps);
  Field u = problem.datum;
  traj.fields.push_back(u);

  LowerOrder lower{problem};
  double hx = problem.grid.h();

  for (std::size_t k = 0; k < nsteps; ++k) {
    StepDiagnostics& diag = traj.diag[k];

    // sub-pairs in driver indices, bisected until the transport increments
    // fit under the CFL bound (brackets are re-queried per sub-pair)
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    if (problem.driver) {
      diag.cfl_factor = problem.driver->transport_sup(dmap[k], dmap[k + 1]) / hx;
      std::vector<std::pair<std::size_t, std::size_t>> work{{dmap[k], dmap[k + 1]}};
      while (!work.empty()) {
        auto [p, q] = work.back();
        work.pop_back();
        double sup = problem.driver->transport_sup(p, q);
        if (sup <= problem.cfl_safety * hx || problem.diffusion.kind != DiffusionSpec::Kind::none) {
          // implicit diffusion runs unconditionally; the CFL split only
          // guards the explicit pure-transport stepping
          if (sup <= problem.cfl_safety * hx || q - p == 1) {
            spans.push_back({p, q});
            continue;
          }
        }
        if (q - p == 1)
          throw NumericError("CFL violation at step " + std::to_string(k) +
                             " beyond the substep budget");
        std::size_t mid = (p + q) / 2;
        work.push_back({mid, q});
        work.push_back({p, mid});
        if (spans.size() + work.size() > problem.max_substeps)
          throw NumericError("CFL substep budget exhausted at step " + std::to_string(k));
      }
      std::sort(spans.begin(), spans.end());
      diag.substeps = spans.size();
    } else {
      spans.push_back({0, 0});  // one plain step, no driver
    }

    for (auto [p, q] : spans) {
      double t0 = problem.driver ? problem.driver->partition().t(p) : problem.part.t(k);
      double h = problem.driver ? (problem.driver->partition().t(q) - t0) : problem.part.dt(k);

      Field rhs = u;
      if (problem.driver) {
        Field r1 = problem.driver->level(1, p, q).apply(u);
        Field r2 = problem.driver->level(2, p, q).apply(u);
        diag.rough1_mag = std::max(diag.rough1_mag, lp_norm(r1, 2.0));
        diag.rough2_mag = std::max(diag.rough2_mag, lp_norm(r2, 2.0));
        rhs += r1;
        rhs += r2;
      }
      if (lower.any()) rhs += lower.drift(k, u) * h;

      if (problem.diffusion.kind == DiffusionSpec::Kind::none) {
        u = rhs;
      } else {
        Field a = diffusion_coefficient(problem, k, t0, u);
        if (problem.diffusion.kind == DiffusionSpec::Kind::nonlinear)
          check_coercivity(problem, a, k);
        u = implicit_solve(a, h, rhs, diag.solve_residual);
      }
    }

    if (!u.finite())
      throw NumericError("solution lost finiteness at step " + std::to_string(k));
    traj.fields.push_back(u);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Remainder ledger
// ---------------------------------------------------------------------------

RemainderLedger remainder_ledger(const Trajectory& traj, const ParabolicProblem& problem,
                                 int min_level) {
  std::size_t n = traj.part.steps();
  LowerOrder lower{problem};

  // full drift at every stored point, then prefix trapezoid sums
  std::vector<Field> drift(n + 1, Field(problem.grid));
  for (std::size_t k = 0; k <= n; ++k) {
    const Field& u = traj.fields[k];
    Field d(problem.grid);
    if (problem.diffusion.kind != DiffusionSpec::Kind::none) {
      Field a = diffusion_coefficient(problem, std::min(k, n - 1), traj.part.t(k), u);
      d += apply_diffusion(a, u);
    }
    if (lower.any()) d += lower.drift(std::min(k, n - 1), u);
    drift[k] = std::move(d);
  }
  std::vector<Field> prefix(n + 1, Field(problem.grid));
  for (std::size_t k = 0; k < n; ++k)
    prefix[k + 1] = prefix[k] + (drift[k] + drift[k + 1]) * (0.5 * traj.part.dt(k));

  std::vector<std::size_t> dmap;
  if (problem.driver)
    for (std::size_t k = 0; k <= n; ++k)
      dmap.push_back(problem.driver->partition().index_of(traj.part.t(k)));

  RemainderLedger ledger;
  int max_level = 0;
  while ((std::size_t(1) << (max_level + 1)) <= n) ++max_level;
  if (max_level - min_level + 1 < 3)
    throw NumericError("remainder ledger needs at least 3 dyadic levels");

  for (int m = min_level; m <= max_level; ++m) {
    std::size_t span = std::size_t(1) << m;
    double nat_sum = 0.0, ru_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p + span <= n; p += span) {
      std::size_t q = p + span;
      Field nat = traj.fields[q] - traj.fields[p] - (prefix[q] - prefix[p]);
      Field ru = traj.fields[q] - traj.fields[p];
      if (problem.driver) {
        Field q1 = problem.driver->level(1, dmap[p], dmap[q]).apply(traj.fields[p]);
        nat -= q1;
        ru -= q1;
        nat -= problem.driver->level(2, dmap[p], dmap[q]).apply(traj.fields[p]);
      }
      LedgerSample s;
      s.p = p;
      s.q = q;
      s.length = traj.part.t(q) - traj.part.t(p);
      s.nat_w32 = neg_sobolev_norm(nat, 3);
      s.ru_w22 = neg_sobolev_norm(ru, 2);
      nat_sum += s.nat_w32;
      ru_sum += s.ru_w22;
      ++count;
      ledger.samples.push_back(s);
    }
    if (count == 0) continue;
    ledger.level_lengths.push_back(traj.part.horizon() * double(span) / double(n));
    ledger.level_nat_means.push_back(nat_sum / double(count));
    ledger.level_ru_means.push_back(ru_sum / double(count));
  }
  ledger.nat_fit = fit_exponent(ledger.level_lengths, ledger.level_nat_means, 1e-14);
  ledger.ru_fit = fit_exponent(ledger.level_lengths, ledger.level_ru_means, 1e-14);
  return ledger;
}

// ---------------------------------------------------------------------------
// Rough Gronwall
// ---------------------------------------------------------------------------

GronwallReport rough_gronwall_certify(const std::vector<double>& e, const Control& omega,
                                      double kappa, double smallness, const TwoIndexFn& phi,
                                      double constant, double slack) {
  std::size_t n = e.size();
  if (omega.partition().size() != n) throw ConfigError("gronwall: series/control size mismatch");
  GronwallReport rep;
  rep.sup_e = *std::max_element(e.begin(), e.end());
  rep.hypothesis_holds = true;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    double running_sup = e[s];
    for (std::size_t t = s + 1; t < n; ++t) {
      running_sup = std::max(running_sup, e[t]);
      double w = omega.eval(s, t);
      if (w > smallness) continue;
      double lhs = e[t] - e[s];
      double rhs = running_sup * std::pow(w, kappa) + (phi ? phi(s, t) : 0.0);
      if (lhs > rhs + slack * (1.0 + std::abs(e[s]))) {
        rep.hypothesis_holds = false;
        rep.violations.push_back({s, t});
      }
    }
  }
  double sup_phi = 0.0;
  if (phi)
    for (std::size_t t = 0; t < n; ++t) sup_phi = std::max(sup_phi, std::abs(phi(0, t)));
  rep.bound = std::exp(omega.eval(0, n - 1) / constant) * (e.front() + sup_phi);
  rep.bound_satisfied = rep.hypothesis_holds && rep.sup_e <= rep.bound * (1.0 + 1e-12);
  return rep;
}

double gronwall_scan_constant(const std::vector<double>& e, const Control& omega, double kappa,
                              double smallness, const TwoIndexFn& phi) {
  for (int i = -60; i <= 60; ++i) {
    double c = std::pow(10.0, -double(i) / 10.0);  // scan from large to small C
    GronwallReport rep = rough_gronwall_certify(e, omega, kappa, smallness, phi, c);
    if (!rep.hypothesis_holds) return 0.0;
    if (rep.bound_satisfied) continue;
    // previous (larger) C was the last workable one
    double prev = std::pow(10.0, -double(i - 1) / 10.0);
    return i == -60 ? 0.0 : prev;
  }
  return std::pow(10.0, -6.0);
}

// ---------------------------------------------------------------------------
// LPS, Moser, Bihari
// ---------------------------------------------------------------------------

bool lps_check(double r, double q, int d, bool strict) {
  if (!(r >= 1.0) || !(q >= 1.0)) throw ConfigError("lps_check: exponents must be in [1, inf]");
  double lhs = (std::isinf(r) ? 0.0 : 1.0 / r) + (std::isinf(q) ? 0.0 : d / (2.0 * q));
  return strict ? lhs < 1.0 : lhs <= 1.0 + 1e-14;
}

double moser_recursion_bound(double c, double tau, double beta, double u0, int n) {
  double bn = std::pow(beta, n);
  double e1 = (bn - 1.0) / (beta - 1.0);
  double e2 = (bn - 1.0) / ((beta - 1.0) * (beta - 1.0)) - double(n) / (beta - 1.0);
  return std::pow(c, e1) * std::pow(tau, e2) * std::pow(u0, bn);
}

MoserReport moser_bound(const ParabolicProblem& problem, const Trajectory& traj, int rungs) {
  if (!problem.driver) throw PreconditionError("moser_bound: rough driver required");
  const auto& prov = problem.driver->provenance();
  if (!prov || !prov->first_is_zero(0) || !prov->first_is_zero(-1))
    throw PreconditionError("moser_bound: driver must be pure transport (no Y^0/Y^{-1})");
  int d = problem.grid.d;
  if (!lps_check(problem.lps_r, problem.lps_q, d, /*strict=*/true))
    throw PreconditionError("moser_bound: strict LPS condition fails for the recorded exponents");

  double r = problem.lps_r, q = problem.lps_q;
  double rho0 = std::isinf(r) ? 2.0 : 2.0 * r / (r - 1.0);
  double sigma0 = std::isinf(q) ? 2.0 : 2.0 * q / (q - 1.0);
  double room = (2.0 / d) * (1.0 - (std::isinf(r) ? 0.0 : 1.0 / r) - d / (2.0 * q));
  double eps = room > 1.25 ? 1.0 : 0.8 * room;
  double beta = 1.0 + eps;

  MoserReport rep;
  rep.eps = eps;
  rep.beta = beta;
  for (int nn = 0; nn <= rungs + 1; ++nn) {
    rep.rho_ladder.push_back(rho0 * std::pow(beta, nn));
    rep.sigma_ladder.push_back(sigma0 * std::pow(beta, nn));
    if (nn >= 1 && !interp_exponents_admissible(rep.rho_ladder.back(), rep.sigma_ladder.back(), d))
      throw NumericError("moser_bound: ladder rung left the admissible range (internal)");
  }

  std::vector<double> times = traj.part.points();
  auto st_norm = [&](double rho, double sigma) {
    return space_time_norm(traj.fields, times, rho, sigma);
  };

  // log U_n with U_0 = ||z||_{rho_1,sigma_1}, U_n = ||z||^{beta^n} + 1
  rep.log_u.push_back(std::log(std::max(st_norm(rep.rho_ladder[1], rep.sigma_ladder[1]), 1e-300)));
  for (int nn = 1; nn <= rungs; ++nn) {
    double s = st_norm(rep.rho_ladder[nn + 1], rep.sigma_ladder[nn + 1]);
    double a = std::pow(beta, nn) * std::log(std::max(s, 1e-300));
    rep.log_u.push_back(a > 40.0 ? a : std::log1p(std::exp(a)));
  }

  double log_beta = std::log(beta);
  double log_chat = -INFINITY;
  for (int nn = 0; nn + 1 <= rungs; ++nn)
    log_chat = std::max(log_chat,
                        rep.log_u[nn + 1] - double(nn) * log_beta - beta * rep.log_u[nn]);
  rep.c_hat = std::exp(log_chat);

  // certified limit: max over finite rungs of bound_n^{beta^{-n}} and the
  // asymptote C^{1/eps} beta^{1/eps^2} U_0
  double best = log_chat / eps + log_beta / (eps * eps) + rep.log_u[0];
  for (int nn = 0; nn <= rungs; ++nn) {
    double bn = std::pow(beta, nn);
    double log_bound = ((bn - 1.0) / eps) * log_chat +
                       ((bn - 1.0) / (eps * eps) - double(nn) / eps) * log_beta +
                       bn * rep.log_u[0];
    best = std::max(best, log_bound / bn);
  }
  rep.limit_bound = std::exp(best);

  rep.recursion_ok = true;
  for (int nn = 0; nn + 1 <= rungs; ++nn)
    if (rep.log_u[nn + 1] >
        log_chat + double(nn) * log_beta + beta * rep.log_u[nn] + 1e-9)
      rep.recursion_ok = false;

  for (const Field& f : traj.fields) rep.sup_z = std::max(rep.sup_z, linf_norm(f));
  rep.sup_bounded = rep.sup_z <= rep.limit_bound * (1.0 + 1e-12);
  return rep;
}

double BihariEnvelope::operator()(double t) const {
  double arg = 1.0 - 2.0 * ctilde * y0 * y0 * t;
  if (arg <= 0.0) return INFINITY;
  return y0 / std::sqrt(arg);
}

BihariEnvelope bihari_envelope(double e0, double ctilde, double horizon) {
  if (!(e0 >= 0.0) || !(ctilde > 0.0)) throw ConfigError("bihari_envelope: E0 >= 0, C > 0");
  BihariEnvelope env;
  env.ctilde = ctilde;
  env.y0 = ctilde * (1.0 + e0);
  env.t_blowup = 1.0 / (2.0 * ctilde * env.y0 * env.y0);
  env.t_star = std::min(horizon, 0.9 * env.t_blowup);
  return env;
}

}  // namespace rpde
