#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "roughpde/solver.hpp"

namespace rpde {

// ---------------------------------------------------------------------------
// Regularized |x| family and other renormalization nonlinearities
// ---------------------------------------------------------------------------

/// a_n = exp(-n(n+1)/2): the breakpoints with int_{a_n}^{a_{n-1}} dt/t = n.
double beta_breakpoint(int n);

/// Twice differentiable scalar nonlinearity with pointwise derivatives.
struct BetaFamily {
  std::string name;
  std::function<double(double)> beta, beta1, beta2;

  static BetaFamily identity();
  static BetaFamily square();
  static BetaFamily constant(double value);
  /// beta_n -> |x|: mollifier rho_n supported in (a_n, a_{n-1}) realized as a
  /// plateau of 1/(n theta) with linear log-space tapers, scaled to unit mass
  /// (stays under the 2/(n theta) ceiling).
  static BetaFamily regularized_abs(int n);
};

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  void add_row(std::vector<double> row) { rows.push_back(std::move(row)); }
};

struct ExperimentReport {
  std::string scenario;
  std::string digest;  // filled by the runner from the manifest
  Table table;
  std::vector<std::pair<std::string, double>> headline;
  bool pass = true;
  std::string detail;

  void head(const std::string& k, double v) { headline.emplace_back(k, v); }
  double head_value(const std::string& k) const;
  void fail(const std::string& why);
};

// ---------------------------------------------------------------------------
// Shared scenario inputs
// ---------------------------------------------------------------------------

/// Canonical sheet X_t(x) = amplitude * phi(t) * (offset + shape(x)) on a
/// fresh uniform partition; phi is tabulated per partition point.
struct LinearSheetSpec {
  PeriodicGrid grid{1, 128};
  TimePartition part;
  double amplitude = 0.3;
  std::function<double(double)> phi;    // time profile, phi(0) arbitrary
  std::function<double(double)> shape;  // spatial profile (d=1)
  double alpha = 1.0;
};
EnhancementTriad make_linear_sheet(const LinearSheetSpec& spec);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct HeatConfig {
  int n_exact = 128;
  int steps_exact = 64;
  int n_time = 512;
  std::vector<int> steps_time{64, 128, 256};
  std::vector<int> n_space{16, 32, 64};
  int steps_space = 4096;
  double horizon = 0.5;
};
ExperimentReport heat_experiment(const HeatConfig& cfg = {});

struct TransportConfig {
  int n = 512;
  std::vector<int> steps{64, 128, 256};
  double amplitude = 0.2;
  double horizon = 1.0;
};
ExperimentReport transport_experiment(const TransportConfig& cfg = {});

struct QuasilinearConfig {
  int n = 128;
  int steps = 256;
  double horizon = 1.0;
  double amplitude = 0.3;
  double datum_scale = 1.0;
  std::uint64_t seed = 7;
  bool fbm = false;
  double hurst = 0.45;
  int fbm_level = 6;
};
ExperimentReport quasilinear_experiment(const QuasilinearConfig& cfg = {});

struct RemainderConfig {
  int n = 128;
  int steps = 512;
  double horizon = 1.0;
  double amplitude = 0.4;
  int min_level = 3;
};
ExperimentReport remainder_experiment(const RemainderConfig& cfg = {});

struct RenormConfig {
  int base_n = 64;
  int base_steps = 64;
  int levels = 3;
  double horizon = 0.5;
  double amplitude = 0.3;
  std::string beta = "square";  // identity | square | constant
};
ExperimentReport renorm_experiment(const RenormConfig& cfg = {});

struct ProductConfig {
  int n = 128;
  int steps = 256;
  double horizon = 0.5;
  double amplitude = 0.3;
};
ExperimentReport product_experiment(const ProductConfig& cfg = {});

struct DualityConfig {
  int n = 256;
  int steps = 4096;
  double horizon = 1.0;
  double diffusion = 2e-4;
  double amplitude = 0.15;
  bool halve = true;
};
ExperimentReport duality_experiment(const DualityConfig& cfg = {});

struct DivfreeConfig {
  int n = 128;
  int solve_steps = 512;
  int base_level = 4;  // coarsest mollification: 2^base_level input intervals
  int levels = 3;
  double horizon = 1.0;
  double hurst = 0.45;
  double amplitude = 0.35;
  std::uint64_t seed = 11;
  int beta_rungs = 4;
};
ExperimentReport divfree_experiment(const DivfreeConfig& cfg = {});

struct TransportMomentsConfig {
  int n = 128;
  int steps = 256;
  int levels = 3;
  double horizon = 1.0;
  double amplitude = 0.25;
  std::vector<int> orders{2, 4, 6};
};
ExperimentReport transport_moments_experiment(const TransportMomentsConfig& cfg = {});

struct DualWeightConfig {
  int n = 128;
  std::vector<int> steps{128, 256, 512};
  double horizon = 1.0;
  double amplitude = 0.25;
  double velocity = 0.3;
  bool trivial_case = false;  // b = 0, x-constant X: m stays 1
};
ExperimentReport dual_weight_experiment(const DualWeightConfig& cfg = {});

struct GradientConfig {
  int n = 128;
  int steps = 256;
  double horizon = 1.0;
  double amplitude = 0.2;
  double datum_scale = 0.1;
  bool doubling_check = true;
  bool linear_diffusion = false;  // a independent of z: the cubic term drops
};
ExperimentReport gradient_experiment(const GradientConfig& cfg = {});

struct WongZakaiConfig {
  int n = 128;
  int solve_steps = 512;
  int base_level = 4;
  int levels = 3;
  double horizon = 1.0;
  double hurst = 0.45;
  double amplitude = 0.35;
  std::uint64_t seed = 3;
  bool smooth_input = false;  // C^1 control variant
};
ExperimentReport wong_zakai_experiment(const WongZakaiConfig& cfg = {});

struct MoserConfig {
  int n = 128;
  int steps = 256;
  double horizon = 1.0;
  double amplitude = 0.25;
  double forcing = 0.1;
};
ExperimentReport moser_experiment(const MoserConfig& cfg = {});

}  // namespace rpde
