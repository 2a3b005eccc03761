#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "roughpde/sheet.hpp"

namespace rpde {

/// One level of a driver at a fixed time pair, materialized as a local
/// stencil: sum of terms c * D^a f ("pre") and D^a (c * f) ("post"), plus an
/// affine offset field.  D^a ranges over Id, d_x, d_y and the second
/// derivatives; all stencils are periodic central differences.
class GridOp {
 public:
  struct Term {
    int ox = 0, oy = 0;  // derivative orders per axis, ox+oy <= 2
    Field c;
  };

  GridOp() = default;
  explicit GridOp(PeriodicGrid g) : grid_(g) {}

  void add_pre(int ox, int oy, Field c) { pre_.push_back({ox, oy, std::move(c)}); }
  void add_post(int ox, int oy, Field c) { post_.push_back({ox, oy, std::move(c)}); }
  void set_offset(Field f) { offset_ = std::move(f); }

  Field apply(const Field& f) const;
  Field apply_linear(const Field& f) const;
  const std::optional<Field>& offset() const { return offset_; }

  /// Discrete adjoint of the linear part; exact under summation by parts.
  /// Throws if an offset is present.
  GridOp adjoint() const;
  GridOp negated() const;

  bool trivial() const { return pre_.empty() && post_.empty() && !offset_; }
  const PeriodicGrid& grid() const { return grid_; }

 private:
  PeriodicGrid grid_;
  std::vector<Term> pre_, post_;
  std::optional<Field> offset_;
};

/// 3x3 block operator for the product driver, acting on stacked fields.
struct GridOp3 {
  std::array<GridOp, 9> block;  // row-major
  std::array<std::optional<Field>, 3> offset;
  std::array<Field, 3> apply(const std::array<Field, 3>& u) const;
  std::array<Field, 3> apply_linear(const std::array<Field, 3>& u) const;
};

enum class DriverFlavor { plain, affine, backward, product3 };

/// Two-level operator family indexed by grid time pairs.  Levels are built
/// lazily per pair and memoized (thread-safe); drivers are immutable and
/// cheap to copy.
class Driver {
 public:
  DriverFlavor flavor() const;
  double alpha() const;
  const TimePartition& partition() const;
  const PeriodicGrid& grid() const;

  /// lvl in {1,2}; scalar flavors only.
  GridOp level(int lvl, std::size_t p, std::size_t q) const;
  /// product3 flavor only.
  GridOp3 level3(int lvl, std::size_t p, std::size_t q) const;

  /// sup norm of the transport increment over (p,q); drives the CFL check.
  double transport_sup(std::size_t p, std::size_t q) const;

  /// The triad the driver was built from, when there is one.
  const std::optional<EnhancementTriad>& provenance() const;

  /// Time reflection P~_{st} = -P_{T-t,T-s} (maps backward drivers to
  /// forward ones and vice versa).
  Driver reflect() const;

  struct Impl;
  explicit Driver(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

/// Linear unbounded rough driver B of a plain sheet: B^1 = X^i d_i,
/// B^2 = (1/2) X^i X^j d_ij + L^i d_i.  Errors on nonzero Y^0/Y^{-1} slots.
/// `halved` switches the 1/2 on the second-order term (the audit CLI exposes
/// the un-halved variant for comparison; it does not satisfy Chen).
Driver build_B(const EnhancementTriad& sheet, bool halved = true);

/// Affine driver Q of a full triad, Euler-Taylor normalization.
Driver build_Q(const EnhancementTriad& triad);

/// Backward driver P^i = -(B^i)^* via exact discrete adjoints.
Driver build_P_backward(const Driver& b);

/// 3x3 product driver for two triads sharing the transport part.
Driver build_product_driver(const EnhancementTriad& yt, const EnhancementTriad& zt);

/// Generalized bracket [B] = B^2 - (1/2) B^1 B^1 as a first-order operator;
/// coefficient fields per time pair.
struct BracketOperator {
  std::vector<Field> coeff(std::size_t p, std::size_t q) const;  // one field per axis
  Field apply(std::size_t p, std::size_t q, const Field& f) const;
  Field divergence_field(std::size_t p, std::size_t q) const;
  EnhancementTriad sheet;
};
BracketOperator bracket(const Driver& b);

/// Chen residual audit of a driver: max over (sub-sampled) triples and probe
/// fields of the flavor's relation, measured in the W^{-2,2} grid surrogate.
struct DriverChenReport {
  double max_residual = 0.0;
  std::size_t triples = 0;
};
DriverChenReport chen_residual_driver(const Driver& d, const std::vector<Field>& probes,
                                      std::size_t max_triples = 200'000);

/// Default low-frequency trigonometric probe set (degree <= 3 plus constant).
std::vector<Field> default_probes(const PeriodicGrid& g);

/// Empirical graded Holder constant: max over sampled pairs, levels i and
/// probes of |level_i(s,t) phi|_{W^{-i,2}} / ((t-s)^{i alpha} |phi|_{L2}).
double holder_constant_audit(const Driver& d, const std::vector<Field>& probes,
                             std::size_t max_pairs = 20'000);

}  // namespace rpde
