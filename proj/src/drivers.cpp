#include "roughpde/drivers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <unordered_map>

namespace rpde {

namespace {

Field apply_deriv(const Field& f, int ox, int oy) {
  if (ox == 0 && oy == 0) return f;
  if (ox == 1 && oy == 0) return dx(f, 0);
  if (ox == 0 && oy == 1) return dx(f, 1);
  if (ox == 2 && oy == 0) return dxx(f, 0, 0);
  if (ox == 0 && oy == 2) return dxx(f, 1, 1);
  if (ox == 1 && oy == 1) return dxx(f, 0, 1);
  throw ConfigError("unsupported derivative order in stencil");
}

}  // namespace

Field GridOp::apply_linear(const Field& f) const {
  Field out(grid_);
  for (const Term& t : pre_) out += cwise_mul(t.c, apply_deriv(f, t.ox, t.oy));
  for (const Term& t : post_) out += apply_deriv(cwise_mul(t.c, f), t.ox, t.oy);
  return out;
}

Field GridOp::apply(const Field& f) const {
  Field out = apply_linear(f);
  if (offset_) out += *offset_;
  return out;
}

GridOp GridOp::adjoint() const {
  if (offset_) throw ConfigError("adjoint of an affine level is not defined");
  GridOp out(grid_);
  for (const Term& t : pre_) {
    double sign = ((t.ox + t.oy) % 2 == 0) ? 1.0 : -1.0;
    out.add_post(t.ox, t.oy, t.c * sign);
  }
  for (const Term& t : post_) {
    double sign = ((t.ox + t.oy) % 2 == 0) ? 1.0 : -1.0;
    out.add_pre(t.ox, t.oy, t.c * sign);
  }
  return out;
}

GridOp GridOp::negated() const {
  GridOp out(grid_);
  for (const Term& t : pre_) out.add_pre(t.ox, t.oy, t.c * -1.0);
  for (const Term& t : post_) out.add_post(t.ox, t.oy, t.c * -1.0);
  if (offset_) out.set_offset(*offset_ * -1.0);
  return out;
}

std::array<Field, 3> GridOp3::apply_linear(const std::array<Field, 3>& u) const {
  std::array<Field, 3> out{Field(u[0].grid()), Field(u[0].grid()), Field(u[0].grid())};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (!block[r * 3 + c].trivial()) out[r] += block[r * 3 + c].apply_linear(u[c]);
  return out;
}

std::array<Field, 3> GridOp3::apply(const std::array<Field, 3>& u) const {
  std::array<Field, 3> out = apply_linear(u);
  for (int r = 0; r < 3; ++r)
    if (offset[r]) out[r] += *offset[r];
  return out;
}

// ---------------------------------------------------------------------------
// Driver plumbing
// ---------------------------------------------------------------------------

struct Driver::Impl {
  DriverFlavor flavor = DriverFlavor::plain;
  double alpha = 1.0;
  TimePartition part;
  PeriodicGrid grid;
  std::optional<EnhancementTriad> provenance;

  std::function<GridOp(int, std::size_t, std::size_t)> build;
  std::function<GridOp3(int, std::size_t, std::size_t)> build3;
  std::function<double(std::size_t, std::size_t)> transport_sup;

  mutable std::mutex mu;
  mutable std::unordered_map<std::uint64_t, GridOp> cache;
  mutable std::unordered_map<std::uint64_t, GridOp3> cache3;
};

namespace {
inline std::uint64_t op_key(int lvl, std::size_t p, std::size_t q) {
  return (std::uint64_t(lvl) << 56) | (std::uint64_t(p) << 28) | std::uint64_t(q);
}
}  // namespace

DriverFlavor Driver::flavor() const { return impl_->flavor; }
double Driver::alpha() const { return impl_->alpha; }
const TimePartition& Driver::partition() const { return impl_->part; }
const PeriodicGrid& Driver::grid() const { return impl_->grid; }
const std::optional<EnhancementTriad>& Driver::provenance() const { return impl_->provenance; }

GridOp Driver::level(int lvl, std::size_t p, std::size_t q) const {
  if (impl_->flavor == DriverFlavor::product3)
    throw ConfigError("scalar level requested from a product driver");
  if (lvl != 1 && lvl != 2) throw ConfigError("driver level must be 1 or 2");
  std::uint64_t key = op_key(lvl, p, q);
  {
    std::scoped_lock lock(impl_->mu);
    auto it = impl_->cache.find(key);
    if (it != impl_->cache.end()) return it->second;
  }
  GridOp op = impl_->build(lvl, p, q);
  std::scoped_lock lock(impl_->mu);
  return impl_->cache.emplace(key, std::move(op)).first->second;
}

GridOp3 Driver::level3(int lvl, std::size_t p, std::size_t q) const {
  if (impl_->flavor != DriverFlavor::product3)
    throw ConfigError("level3 requested from a scalar driver");
  std::uint64_t key = op_key(lvl, p, q);
  {
    std::scoped_lock lock(impl_->mu);
    auto it = impl_->cache3.find(key);
    if (it != impl_->cache3.end()) return it->second;
  }
  GridOp3 op = impl_->build3(lvl, p, q);
  std::scoped_lock lock(impl_->mu);
  return impl_->cache3.emplace(key, std::move(op)).first->second;
}

double Driver::transport_sup(std::size_t p, std::size_t q) const {
  return impl_->transport_sup ? impl_->transport_sup(p, q) : 0.0;
}

Driver Driver::reflect() const {
  auto impl = std::make_shared<Impl>();
  Driver base = *this;
  std::size_t last = impl_->part.size() - 1;
  impl->flavor = impl_->flavor == DriverFlavor::backward ? DriverFlavor::affine
                                                         : DriverFlavor::backward;
  impl->alpha = impl_->alpha;
  impl->part = impl_->part;
  impl->grid = impl_->grid;
  impl->build = [base, last](int lvl, std::size_t p, std::size_t q) {
    return base.level(lvl, last - q, last - p).negated();
  };
  impl->transport_sup = [base, last](std::size_t p, std::size_t q) {
    return base.transport_sup(last - q, last - p);
  };
  return Driver(impl);
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace {

std::function<double(std::size_t, std::size_t)> triad_transport_sup(const EnhancementTriad& t) {
  return [t](std::size_t p, std::size_t q) {
    double m = 0.0;
    for (int i = 1; i <= t.dim(); ++i)
      if (!t.first_is_zero(i)) m = std::max(m, linf_norm(t.first_increment(i, p, q)));
    return m;
  };
}

void add_second_order_transport(GridOp& op, const EnhancementTriad& t, std::size_t p,
                                std::size_t q, double half) {
  int d = t.dim();
  std::vector<Field> incr;
  for (int i = 1; i <= d; ++i) incr.push_back(t.first_increment(i, p, q));
  op.add_pre(2, 0, cwise_mul(incr[0], incr[0]) * half);
  if (d == 2) {
    op.add_pre(0, 2, cwise_mul(incr[1], incr[1]) * half);
    // d_12 and d_21 coincide; their coefficients merge
    op.add_pre(1, 1, cwise_mul(incr[0], incr[1]) * (2.0 * half));
  }
}

}  // namespace

Driver build_B(const EnhancementTriad& sheet, bool halved) {
  if (!sheet.first_is_zero(0) || !sheet.first_is_zero(-1))
    throw ConfigError("build_B: triad has zero-order/source slots, use build_Q");
  auto impl = std::make_shared<Driver::Impl>();
  impl->flavor = DriverFlavor::plain;
  impl->alpha = sheet.alpha();
  impl->part = sheet.partition();
  impl->grid = sheet.grid();
  impl->provenance = sheet;
  EnhancementTriad t = sheet;
  double half = halved ? 0.5 : 1.0;
  impl->build = [t, half](int lvl, std::size_t p, std::size_t q) {
    GridOp op(t.grid());
    if (lvl == 1) {
      for (int i = 1; i <= t.dim(); ++i)
        if (!t.first_is_zero(i))
          op.add_pre(i == 1 ? 1 : 0, i == 1 ? 0 : 1, t.first_increment(i, p, q));
      return op;
    }
    add_second_order_transport(op, t, p, q, half);
    for (int i = 1; i <= t.dim(); ++i)
      if (!t.bracket_is_zero(i))
        op.add_pre(i == 1 ? 1 : 0, i == 1 ? 0 : 1, t.bracket(i, p, q));
    return op;
  };
  impl->transport_sup = triad_transport_sup(sheet);
  return Driver(impl);
}

Driver build_Q(const EnhancementTriad& triad) {
  for (int comp = 0; comp <= triad.dim(); ++comp) {
    if (!triad.first_is_zero(comp) && triad.bracket_is_zero(comp) && comp >= 1) {
      // spatial components always need their bracket sheet
      throw ConfigError("build_Q: bracket entry for component " + std::to_string(comp) +
                        " is missing");
    }
  }
  auto impl = std::make_shared<Driver::Impl>();
  impl->flavor = DriverFlavor::affine;
  impl->alpha = triad.alpha();
  impl->part = triad.partition();
  impl->grid = triad.grid();
  impl->provenance = triad;
  EnhancementTriad t = triad;
  impl->build = [t](int lvl, std::size_t p, std::size_t q) {
    GridOp op(t.grid());
    int d = t.dim();
    if (lvl == 1) {
      for (int i = 1; i <= d; ++i)
        if (!t.first_is_zero(i))
          op.add_pre(i == 1 ? 1 : 0, i == 1 ? 0 : 1, t.first_increment(i, p, q));
      if (!t.first_is_zero(0)) op.add_pre(0, 0, t.first_increment(0, p, q));
      if (!t.first_is_zero(-1)) op.set_offset(t.first_increment(-1, p, q));
      return op;
    }
    add_second_order_transport(op, t, p, q, 0.5);
    bool has0 = !t.first_is_zero(0);
    Field y0 = has0 ? t.first_increment(0, p, q) : Field(t.grid());
    for (int j = 1; j <= d; ++j) {
      bool hasj = !t.first_is_zero(j);
      if (!hasj && t.bracket_is_zero(j)) continue;
      Field c = t.bracket(j, p, q);
      if (has0 && hasj) c += cwise_mul(y0, t.first_increment(j, p, q));
      op.add_pre(j == 1 ? 1 : 0, j == 1 ? 0 : 1, std::move(c));
    }
    if (has0 || !t.bracket_is_zero(0)) {
      Field c = t.bracket(0, p, q);
      if (has0) {
        for (std::size_t idx = 0; idx < c.size(); ++idx) c[idx] += 0.5 * y0[idx] * y0[idx];
      }
      op.add_pre(0, 0, std::move(c));
    }
    if (!t.affine_is_zero()) op.set_offset(t.affine(p, q));
    return op;
  };
  impl->transport_sup = triad_transport_sup(triad);
  return Driver(impl);
}

Driver build_P_backward(const Driver& b) {
  if (b.flavor() != DriverFlavor::plain)
    throw ConfigError("build_P_backward: adjoint of an affine driver is not defined");
  auto impl = std::make_shared<Driver::Impl>();
  impl->flavor = DriverFlavor::backward;
  impl->alpha = b.alpha();
  impl->part = b.partition();
  impl->grid = b.grid();
  impl->provenance = b.provenance();
  Driver base = b;
  impl->build = [base](int lvl, std::size_t p, std::size_t q) {
    return base.level(lvl, p, q).adjoint().negated();
  };
  impl->transport_sup = [base](std::size_t p, std::size_t q) {
    return base.transport_sup(p, q);
  };
  return Driver(impl);
}

// ---------------------------------------------------------------------------
// Product driver
// ---------------------------------------------------------------------------

namespace {

/// Linear part of the Euler-Taylor second level for transport X plus zero
/// order component `comp0` of a triad (the "odot square" of X-hat + Y^0).
GridOp odot_square(const EnhancementTriad& t, std::size_t p, std::size_t q,
                   const Field& zero_incr, bool has_zero, const Field& zero_bracket,
                   bool has_zero_bracket) {
  GridOp op(t.grid());
  add_second_order_transport(op, t, p, q, 0.5);
  for (int j = 1; j <= t.dim(); ++j) {
    bool hasj = !t.first_is_zero(j);
    if (!hasj && t.bracket_is_zero(j)) continue;
    Field c = t.bracket(j, p, q);
    if (has_zero && hasj) c += cwise_mul(zero_incr, t.first_increment(j, p, q));
    op.add_pre(j == 1 ? 1 : 0, j == 1 ? 0 : 1, std::move(c));
  }
  if (has_zero || has_zero_bracket) {
    Field c = zero_bracket;
    if (has_zero)
      for (std::size_t idx = 0; idx < c.size(); ++idx)
        c[idx] += 0.5 * zero_incr[idx] * zero_incr[idx];
    op.add_pre(0, 0, std::move(c));
  }
  return op;
}

}  // namespace

Driver build_product_driver(const EnhancementTriad& yt, const EnhancementTriad& zt) {
  if (yt.grid() != zt.grid() || !(yt.partition() == zt.partition()) || yt.dim() != zt.dim())
    throw ConfigError("product driver: triads must share grid and partition");
  // shared transport part
  for (int i = 1; i <= yt.dim(); ++i) {
    if (yt.first_is_zero(i) != zt.first_is_zero(i))
      throw PreconditionError("product driver: transport parts differ (no joint lift)");
    if (yt.first_is_zero(i)) continue;
    double scale = std::max(1.0, linf_norm(yt.first_at(i, yt.partition().size() - 1)));
    for (std::size_t k = 0; k < yt.partition().size(); ++k)
      if (linf_norm(yt.first_at(i, k) - zt.first_at(i, k)) > 1e-10 * scale)
        throw PreconditionError("product driver: transport parts differ (no joint lift)");
  }

  auto impl = std::make_shared<Driver::Impl>();
  impl->flavor = DriverFlavor::product3;
  impl->alpha = std::min(yt.alpha(), zt.alpha());
  impl->part = yt.partition();
  impl->grid = yt.grid();
  EnhancementTriad y = yt, z = zt;

  impl->build3 = [y, z](int lvl, std::size_t p, std::size_t q) {
    const PeriodicGrid& g = y.grid();
    int d = y.dim();
    GridOp3 out;
    for (int k = 0; k < 9; ++k) out.block[k] = GridOp(g);

    auto transport_level1 = [&](GridOp& op) {
      for (int i = 1; i <= d; ++i)
        if (!y.first_is_zero(i))
          op.add_pre(i == 1 ? 1 : 0, i == 1 ? 0 : 1, y.first_increment(i, p, q));
    };

    bool hy0 = !y.first_is_zero(0), hz0 = !z.first_is_zero(0);
    bool hym = !y.first_is_zero(-1), hzm = !z.first_is_zero(-1);
    Field y0 = hy0 ? y.first_increment(0, p, q) : Field(g);
    Field z0 = hz0 ? z.first_increment(0, p, q) : Field(g);
    Field ym = hym ? y.first_increment(-1, p, q) : Field(g);
    Field zm = hzm ? z.first_increment(-1, p, q) : Field(g);

    if (lvl == 1) {
      transport_level1(out.block[0]);
      if (hy0) out.block[0].add_pre(0, 0, y0);
      transport_level1(out.block[4]);
      if (hz0) out.block[4].add_pre(0, 0, z0);
      transport_level1(out.block[8]);
      if (hy0 || hz0) out.block[8].add_pre(0, 0, y0 + z0);
      if (hzm) out.block[6].add_pre(0, 0, zm);
      if (hym) out.block[7].add_pre(0, 0, ym);
      if (hym) out.offset[0] = ym;
      if (hzm) out.offset[1] = zm;
      return out;
    }

    Field zero(g);
    out.block[0] = odot_square(y, p, q, y0, hy0, hy0 || !y.bracket_is_zero(0) ? y.bracket(0, p, q) : zero,
                               !y.bracket_is_zero(0));
    out.block[4] = odot_square(z, p, q, z0, hz0, hz0 || !z.bracket_is_zero(0) ? z.bracket(0, p, q) : zero,
                               !z.bracket_is_zero(0));
    {
      Field w0 = y0 + z0;
      Field wb = y.bracket(0, p, q) + z.bracket(0, p, q);
      out.block[8] = odot_square(y, p, q, w0, hy0 || hz0, wb,
                                 !y.bracket_is_zero(0) || !z.bracket_is_zero(0));
    }
    // row 3, columns 1 and 2: affine brackets of the partner plus the
    // first-order and zero-order couplings of (concl:prod)
    if (hzm || !z.affine_is_zero()) {
      GridOp& op = out.block[6];
      if (!z.affine_is_zero()) op.add_pre(0, 0, z.affine(p, q));
      if (hzm) {
        for (int i = 1; i <= d; ++i)
          if (!y.first_is_zero(i))
            op.add_pre(i == 1 ? 1 : 0, i == 1 ? 0 : 1,
                       cwise_mul(zm, y.first_increment(i, p, q)));
        if (hy0) op.add_pre(0, 0, cwise_mul(zm, y0));
      }
    }
    if (hym || !y.affine_is_zero()) {
      GridOp& op = out.block[7];
      if (!y.affine_is_zero()) op.add_pre(0, 0, y.affine(p, q));
      if (hym) {
        for (int i = 1; i <= d; ++i)
          if (!z.first_is_zero(i))
            op.add_pre(i == 1 ? 1 : 0, i == 1 ? 0 : 1,
                       cwise_mul(ym, z.first_increment(i, p, q)));
        if (hz0) op.add_pre(0, 0, cwise_mul(ym, z0));
      }
    }
    if (!y.affine_is_zero()) out.offset[0] = y.affine(p, q);
    if (!z.affine_is_zero()) out.offset[1] = z.affine(p, q);
    if (hym && hzm) out.offset[2] = cwise_mul(ym, zm);
    return out;
  };
  impl->transport_sup = triad_transport_sup(yt);
  return Driver(impl);
}

// ---------------------------------------------------------------------------
// Bracket
// ---------------------------------------------------------------------------

std::vector<Field> BracketOperator::coeff(std::size_t p, std::size_t q) const {
  std::vector<Field> out;
  for (int i = 1; i <= sheet.dim(); ++i) {
    Field c = sheet.bracket(i, p, q);
    for (int mu = 1; mu <= sheet.dim(); ++mu) {
      if (sheet.first_is_zero(mu)) continue;
      Field xmu = sheet.first_increment(mu, p, q);
      Field dxi = sheet.first_deriv(i, q, mu - 1) - sheet.first_deriv(i, p, mu - 1);
      for (std::size_t idx = 0; idx < c.size(); ++idx) c[idx] -= 0.5 * xmu[idx] * dxi[idx];
    }
    out.push_back(std::move(c));
  }
  return out;
}

Field BracketOperator::apply(std::size_t p, std::size_t q, const Field& f) const {
  auto c = coeff(p, q);
  Field out(f.grid());
  for (int i = 0; i < sheet.dim(); ++i) out += cwise_mul(c[i], dx(f, i));
  return out;
}

Field BracketOperator::divergence_field(std::size_t p, std::size_t q) const {
  auto c = coeff(p, q);
  return divergence(c);
}

BracketOperator bracket(const Driver& b) {
  if (b.flavor() != DriverFlavor::plain || !b.provenance())
    throw ConfigError("bracket: plain driver with triad provenance required");
  return BracketOperator{*b.provenance()};
}

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

std::vector<Field> default_probes(const PeriodicGrid& g) {
  std::vector<Field> probes;
  probes.push_back(Field(g, 1.0));
  if (g.d == 1) {
    for (int j = 1; j <= 2; ++j) {
      probes.push_back(Field::from_fn(g, [j](double x) { return std::sin(j * x); }));
      probes.push_back(Field::from_fn(g, [j](double x) { return std::cos(j * x); }));
    }
  } else {
    for (int j = 1; j <= 2; ++j) {
      probes.push_back(
          Field::from_fn(g, [j](double x, double y) { return std::sin(j * x) * std::cos(y); }));
      probes.push_back(
          Field::from_fn(g, [j](double x, double y) { return std::cos(j * y) * std::sin(x); }));
    }
  }
  return probes;
}

DriverChenReport chen_residual_driver(const Driver& d, const std::vector<Field>& probes,
                                      std::size_t max_triples) {
  std::size_t n = d.partition().size();
  DriverChenReport rep;
  std::size_t total = n * (n + 1) * (n + 2) / 6;
  std::size_t stride = total > max_triples ? (total / max_triples + 1) : 1;
  std::size_t counter = 0;
  bool product = d.flavor() == DriverFlavor::product3;
  bool backward = d.flavor() == DriverFlavor::backward;

  if (!product && n <= 600) {
    // cache the applied levels per (pair, probe); the composition is the only
    // per-triple operator application left
    std::size_t np = probes.size();
    auto key = [n](std::size_t p, std::size_t q) { return p * n + q; };
    std::vector<std::vector<Field>> l1(n * n), l2(n * n);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        GridOp op1 = d.level(1, p, q), op2 = d.level(2, p, q);
        auto& c1 = l1[key(p, q)];
        auto& c2 = l2[key(p, q)];
        c1.reserve(np);
        c2.reserve(np);
        for (const Field& phi : probes) {
          c1.push_back(op1.apply(phi));
          c2.push_back(op2.apply(phi));
        }
      }
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t th = s + 1; th < n; ++th)
        for (std::size_t t = th + 1; t < n; ++t) {
          if (stride > 1 && (counter++ % stride) != 0) continue;
          ++rep.triples;
          GridOp q1b = backward ? d.level(1, s, th) : d.level(1, th, t);
          for (std::size_t i = 0; i < np; ++i) {
            Field delta2 = l2[key(s, t)][i] - l2[key(s, th)][i] - l2[key(th, t)][i];
            // forward: delta Q^2 = (Q^1-Q^1(0))_{th,t} o Q^1_{s,th}
            // backward: delta P^2 = -(P^1-P^1(0))_{s,th} o P^1_{th,t}
            const Field& inner = backward ? l1[key(th, t)][i] : l1[key(s, th)][i];
            Field composed = q1b.apply_linear(inner);
            Field resid = backward ? delta2 + composed : delta2 - composed;
            rep.max_residual = std::max(rep.max_residual, neg_sobolev_norm(resid, 2));
          }
        }
    return rep;
  }

  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t th = s + 1; th < n; ++th)
      for (std::size_t t = th + 1; t < n; ++t) {
        if (stride > 1 && (counter++ % stride) != 0) continue;
        ++rep.triples;
        if (product) {
          GridOp3 q2st = d.level3(2, s, t), q2sth = d.level3(2, s, th),
                  q2tht = d.level3(2, th, t);
          GridOp3 q1sth = d.level3(1, s, th), q1tht = d.level3(1, th, t);
          for (const Field& phi : probes) {
            std::array<Field, 3> u{phi, phi * 0.5, cwise_mul(phi, phi * 0.5)};
            auto delta2 = q2st.apply(u);
            auto b = q2sth.apply(u);
            auto c = q2tht.apply(u);
            auto inner = q1sth.apply(u);
            auto composed = q1tht.apply_linear(inner);
            for (int r = 0; r < 3; ++r) {
              Field resid = delta2[r] - b[r] - c[r] - composed[r];
              rep.max_residual = std::max(rep.max_residual, neg_sobolev_norm(resid, 2));
            }
          }
        } else {
          GridOp q2st = d.level(2, s, t), q2sth = d.level(2, s, th), q2tht = d.level(2, th, t);
          GridOp q1a = backward ? d.level(1, th, t) : d.level(1, s, th);
          GridOp q1b = backward ? d.level(1, s, th) : d.level(1, th, t);
          for (const Field& phi : probes) {
            Field delta2 = q2st.apply(phi) - q2sth.apply(phi) - q2tht.apply(phi);
            Field composed = q1b.apply_linear(q1a.apply(phi));
            Field resid = backward ? delta2 + composed : delta2 - composed;
            rep.max_residual = std::max(rep.max_residual, neg_sobolev_norm(resid, 2));
          }
        }
      }
  return rep;
}

double holder_constant_audit(const Driver& d, const std::vector<Field>& probes,
                             std::size_t max_pairs) {
  std::size_t n = d.partition().size();
  std::size_t total = n * (n - 1) / 2;
  std::size_t stride = total > max_pairs ? (total / max_pairs + 1) : 1;
  std::size_t counter = 0;
  double best = 0.0;
  for (std::size_t p = 0; p + 1 < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) {
      if (stride > 1 && (counter++ % stride) != 0) continue;
      double gap = d.partition().t(q) - d.partition().t(p);
      for (int lvl = 1; lvl <= 2; ++lvl) {
        GridOp op = d.level(lvl, p, q);
        for (const Field& phi : probes) {
          double num = neg_sobolev_norm(op.apply_linear(phi), lvl);
          double den = std::pow(gap, lvl * d.alpha()) * lp_norm(phi, 2.0);
          if (den > 0.0) best = std::max(best, num / den);
        }
      }
    }
  return best;
}

}  // namespace rpde
