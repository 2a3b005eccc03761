#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "roughpde/grid.hpp"
#include "roughpde/rough_path.hpp"
#include "roughpde/time_grid.hpp"

namespace rpde {

/// Space-dependent coefficient path tabulated on time partition x grid.
/// `transport[i][k]` is the i-th spatial component at partition point k;
/// the zero-order and source slots may be empty (identically zero).
struct CoefficientSheet {
  PeriodicGrid grid;
  TimePartition part;
  double alpha = 1.0;
  std::vector<std::vector<Field>> transport;
  std::vector<Field> zero_order;
  std::vector<Field> source;
};

/// sigma[i][mu]: component (spatial axis i, noise direction mu).
struct SigmaField {
  PeriodicGrid grid;
  std::vector<std::vector<Field>> comps;
};

/// Per-relation Chen residuals of a triad, in grid sup norm over all
/// audited triples.
struct TriadChenReport {
  double first_levels = 0.0;
  std::vector<double> brackets;  // one entry per bracket component 0..d
  double affine = 0.0;
  std::size_t triples = 0;
  double max() const;
};

/// Two-level enhancement of a (d+2)-component coefficient path: first-level
/// components Y^i for i = -1,0,1..d, bracket sheets <Y^j d(d_j Y^i)> for
/// i = 0..d, and the combined affine bracket.  Vanishing entries are stored
/// as structural zeros; bracket evaluation is lazy and memoized (thread-safe).
class EnhancementTriad {
 public:
  int dim() const;
  double alpha() const;
  const PeriodicGrid& grid() const;
  const TimePartition& partition() const;

  /// comp in {-1, 0, 1..d}.
  bool first_is_zero(int comp) const;
  const Field& first_at(int comp, std::size_t k) const;
  Field first_increment(int comp, std::size_t i, std::size_t j) const;
  /// Spatial derivative (4th-order stencil) of a first-level component,
  /// cached per (comp, time, axis).
  const Field& first_deriv(int comp, std::size_t k, int axis) const;

  /// comp in {0, 1..d}: the bracket sheet <Y^j, d_j Y^comp>_{st}.
  bool bracket_is_zero(int comp) const;
  Field bracket(int comp, std::size_t i, std::size_t j) const;

  bool affine_is_zero() const;
  Field affine(std::size_t i, std::size_t j) const;

  struct Impl;
  explicit EnhancementTriad(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// Canonical lift of a time-piecewise-linear sheet: brackets by exact
/// per-segment integration.
EnhancementTriad canonical_lift(const CoefficientSheet& sheet);

/// X^i = sigma^i_mu Z^mu with brackets from the level-2 data of Z.
EnhancementTriad sheet_from_sigma(const SigmaField& sigma, const FiniteRoughPath& rp);

enum class DerivativeMode { transport_source, dual_multiplicative };

/// d=1 derived triads: the derivative enhancement of a transport-with-source
/// triad (mode transport_source, input must have no zero-order slot), or the
/// multiplicative dual enhancement ([0,-dX,-X]; [dL - (dX)^2/2, L]; 0) of a
/// plain sheet (mode dual_multiplicative).
EnhancementTriad derivative_triad(const EnhancementTriad& input, DerivativeMode mode);

/// Plain transport triad ([0,0,sign*X]; [0,L]; 0) from a plain sheet.
EnhancementTriad pure_transport_triad(const EnhancementTriad& sheet, double sign);

/// d=1 transport-with-source triad for the additive-input transport problem:
/// ([sign*dX, 0, sign*X]; [0, L]; dL - (dX)^2/2).
EnhancementTriad transport_triad(const EnhancementTriad& sheet, double sign);

/// Triad driving exp(-Phi) for a transport-with-source input (Z^0 = 0):
/// first level (0, -Z^{-1}, Z^i), brackets (-(affine of input), L), affine 0.
EnhancementTriad exp_transform_triad(const EnhancementTriad& transport);

/// Time reversal: first levels read backwards; brackets transform as
/// <A,B>~_{st} = (A B)|_{(T-t,T-s)} - <A,B>_{(T-t,T-s)} (Chen-preserving).
EnhancementTriad reverse_triad(const EnhancementTriad& input);

/// Flips the sign of every first-level component; brackets are bilinear in
/// two first-level factors and stay put.
EnhancementTriad negate_triad(const EnhancementTriad& input);

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

/// Generalized Chen residuals over all grid triples (or a uniformly
/// subsampled set when the simplex exceeds `max_triples`).
TriadChenReport gene_chen_residual(const EnhancementTriad& triad,
                                   std::size_t max_triples = 2'000'000);

/// rho_alpha distance: Holder-in-time W^{3,inf} seminorm of the first-level
/// difference + 2alpha W^{2,inf} seminorm of the bracket difference
/// + 2alpha W^{1,inf} seminorm of the affine difference.
double rho_alpha_metric(const EnhancementTriad& a, const EnhancementTriad& b,
                        std::size_t max_pairs = 200'000);

}  // namespace rpde
