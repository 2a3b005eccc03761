#pragma once

#include <functional>
#include <optional>

#include "roughpde/drivers.hpp"

namespace rpde {

/// Per-point coefficient/data field: k -> field at partition point k.
using TimeField = std::function<Field(std::size_t)>;

TimeField constant_field(const Field& f);
TimeField zero_field(PeriodicGrid g);

struct DiffusionSpec {
  enum class Kind { none, field, nonlinear };
  Kind kind = Kind::none;
  TimeField a_field;      // Kind::field
  NonlinearDiffusion nl;  // Kind::nonlinear, d = 1
  double lambda = 1.0;

  static DiffusionSpec none();
  static DiffusionSpec constant(PeriodicGrid g, double a);
  static DiffusionSpec field(TimeField a, double lambda);
  static DiffusionSpec nonlinear(NonlinearDiffusion nl);
};

/// dz = [ d_x(a d_x z + F z) - b d_x z - c z + d_x f1 - f0 ] dt + dQ(z),
/// stepped semi-implicitly: diffusion implicit with the coefficient frozen at
/// the previous iterate, everything else explicit.
struct ParabolicProblem {
  PeriodicGrid grid;
  TimePartition part;  // stepping partition; driver partition must refine it
  DiffusionSpec diffusion;
  std::optional<Driver> driver;

  TimeField cap_F, vel_b, coef_c, flux_f1, src_f0;  // any may be null (absent)

  Field datum;  // initial datum, or terminal datum when backward
  bool backward = false;

  double cfl_safety = 0.9;
  std::size_t max_substeps = 4096;
  double lps_r = INFINITY, lps_q = 2.0;  // recorded integrability of b/F/f
};

struct StepDiagnostics {
  double solve_residual = 0.0;
  double cfl_factor = 0.0;  // |X_{st}|_inf / h_x before substepping
  std::size_t substeps = 1;
  double rough1_mag = 0.0, rough2_mag = 0.0;  // L2 magnitudes of the rough increments
};

struct Trajectory {
  TimePartition part;
  std::vector<Field> fields;  // one per partition point
  std::vector<StepDiagnostics> diag;

  const Field& at(std::size_t k) const { return fields[k]; }
  double l2(std::size_t k) const { return lp_norm(fields[k], 2.0); }
  /// E_t = |u_t|_{L2}^2 + int_0^t |grad u|_{L2}^2 dr (left rule).
  std::vector<double> energy_series() const;
};

Trajectory solve(const ParabolicProblem& problem);

/// One implicit diffusion step: solves (I - h A) x = rhs with A the
/// face-averaged divergence-form operator for coefficient field `a`
/// (direct cyclic solve for d=1, preconditioned CG for d=2).  This is the
/// exact solve the stepper uses.
Field implicit_diffusion_step(const Field& a, double h, const Field& rhs);

// ---------------------------------------------------------------------------
// Remainder ledger
// ---------------------------------------------------------------------------

struct LedgerSample {
  std::size_t p, q;
  double length;
  double nat_w32;  // |u_nat|_{W^{-3,2}}
  double ru_w22;   // |R^u|_{W^{-2,2}}
};

struct RemainderLedger {
  std::vector<LedgerSample> samples;
  std::vector<double> level_lengths;
  std::vector<double> level_nat_means, level_ru_means;
  ExponentFit nat_fit, ru_fit;
};

/// Samples u_nat over dyadic pairs of the trajectory and fits the scaling
/// exponents; drift integrals by per-step trapezoid on the stored fields.
/// Pairs shorter than 2^min_level steps are skipped.
RemainderLedger remainder_ledger(const Trajectory& traj, const ParabolicProblem& problem,
                                 int min_level = 0);

// ---------------------------------------------------------------------------
// Rough Gronwall certification
// ---------------------------------------------------------------------------

struct GronwallReport {
  bool hypothesis_holds = false;
  std::vector<std::array<std::size_t, 2>> violations;  // pairs failing the increment bound
  double bound = 0.0;
  bool bound_satisfied = false;
  double sup_e = 0.0;
};

/// Verifies E_{st} <= (sup_{[s,t]} E) omega(s,t)^kappa + phi(s,t) on grid
/// pairs with omega(s,t) <= L, then evaluates the conclusion
/// sup e <= exp(omega(0,T)/C) [E_0 + sup_t |phi(0,t)|].
GronwallReport rough_gronwall_certify(const std::vector<double>& e, const Control& omega,
                                      double kappa, double smallness, const TwoIndexFn& phi,
                                      double constant, double slack = 1e-12);

/// Smallest C from a log-spaced scan for which the certified bound dominates
/// sup E (returns 0 when the hypothesis itself fails).
double gronwall_scan_constant(const std::vector<double>& e, const Control& omega, double kappa,
                              double smallness, const TwoIndexFn& phi);

// ---------------------------------------------------------------------------
// LPS gate, Moser estimator, Bihari envelope
// ---------------------------------------------------------------------------

/// 1/r + d/(2q) tested against 1 (strict or not); infinities as reciprocal 0.
bool lps_check(double r, double q, int d, bool strict);

/// Closed-form bound of the recursion U_{n+1} <= C tau^n U_n^beta.
double moser_recursion_bound(double c, double tau, double beta, double u0, int n);

struct MoserReport {
  double eps = 0.0, beta = 0.0;
  std::vector<double> rho_ladder, sigma_ladder;
  std::vector<double> log_u;  // log U_n
  double c_hat = 0.0;         // smallest empirical recursion constant
  double limit_bound = 0.0;   // lim bound_n^{beta^{-n}}
  double sup_z = 0.0;
  bool recursion_ok = false;
  bool sup_bounded = false;
};

/// Moser iteration report for a pure-transport-input trajectory: exponent
/// ladder, iterate norms, empirical recursion constant and the L-infinity
/// certificate sup|z| <= C_hat^{1/eps} beta^{1/eps^2} U_0.
MoserReport moser_bound(const ParabolicProblem& problem, const Trajectory& traj,
                        int rungs = 6);

struct BihariEnvelope {
  double y0 = 0.0;
  double t_blowup = 0.0;  // 1/(2 C y0^2)
  double t_star = 0.0;    // min(T, 0.9 t_blowup)
  double ctilde = 0.0;
  double operator()(double t) const;
};

/// Comparison solution of y' = C y^3 with y_0 = C (1 + E_0).
BihariEnvelope bihari_envelope(double e0, double ctilde, double horizon);

}  // namespace rpde
