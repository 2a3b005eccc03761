#include "roughpde/sheet.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace rpde {

namespace {
// first-level slot layout: 0 <-> comp -1, 1 <-> comp 0, 2+i <-> spatial comp i+1
inline int slot_of(int comp) { return comp + 1; }
inline std::uint64_t pair_key(int comp, std::size_t p, std::size_t q) {
  return (std::uint64_t(comp + 2) << 52) | (std::uint64_t(p) << 26) | std::uint64_t(q);
}
}  // namespace

struct EnhancementTriad::Impl {
  PeriodicGrid grid;
  TimePartition part;
  int d = 1;
  double alpha = 1.0;

  std::vector<std::vector<Field>> first;  // slot -> per-point fields; empty -> 0
  std::function<Field(const Impl&, int, std::size_t, std::size_t)> bracket_fn;
  std::vector<char> bracket_zero;  // indexed by comp 0..d
  std::function<Field(const Impl&, std::size_t, std::size_t)> affine_fn;
  bool affine_zero = true;

  Field zero;

  mutable std::mutex mu;
  mutable std::unordered_map<std::uint64_t, Field> bracket_cache;
  mutable std::unordered_map<std::uint64_t, Field> deriv_cache;

  bool first_zero(int comp) const { return first[slot_of(comp)].empty(); }

  const Field& first_at(int comp, std::size_t k) const {
    const auto& series = first[slot_of(comp)];
    if (series.empty()) return zero;
    return series[k];
  }

  const Field& deriv(int comp, std::size_t k, int axis) const {
    if (first_zero(comp)) return zero;
    std::uint64_t key = (std::uint64_t(slot_of(comp) * 4 + axis) << 40) | k;
    std::scoped_lock lock(mu);
    auto it = deriv_cache.find(key);
    if (it != deriv_cache.end()) return it->second;
    Field dfield = dx4(first[slot_of(comp)][k], axis);
    return deriv_cache.emplace(key, std::move(dfield)).first->second;
  }

  // Exact per-segment Stieltjes sums for the time-piecewise-linear
  // interpolation of the tabulated first levels.  These satisfy the Chen
  // relations identically (up to roundoff) by telescoping.
  Field canonical_bracket(int comp, std::size_t p, std::size_t q) const {
    Field out(grid);
    for (int j = 1; j <= d; ++j) {
      if (first_zero(j)) continue;
      const auto& a = first[slot_of(j)];
      for (std::size_t k = p; k < q; ++k) {
        const Field& d0 = deriv(comp, k, j - 1);
        const Field& d1 = deriv(comp, k + 1, j - 1);
        const Field& db = deriv(comp, p, j - 1);
        for (std::size_t idx = 0; idx < out.size(); ++idx)
          out[idx] += (a[k + 1][idx] - a[k][idx]) * (0.5 * (d0[idx] + d1[idx]) - db[idx]);
      }
    }
    return out;
  }

  Field canonical_affine(std::size_t p, std::size_t q) const {
    Field out = canonical_bracket(-1, p, q);
    if (!first_zero(0) && !first_zero(-1)) {
      const auto& a = first[slot_of(0)];
      const auto& b = first[slot_of(-1)];
      for (std::size_t k = p; k < q; ++k)
        for (std::size_t idx = 0; idx < out.size(); ++idx)
          out[idx] += (a[k + 1][idx] - a[k][idx]) *
                      (0.5 * (b[k][idx] + b[k + 1][idx]) - b[p][idx]);
    }
    return out;
  }

  Field bracket(int comp, std::size_t p, std::size_t q) const {
    if (bracket_zero[comp] || p == q) return zero;
    std::uint64_t key = pair_key(comp, p, q);
    {
      std::scoped_lock lock(mu);
      auto it = bracket_cache.find(key);
      if (it != bracket_cache.end()) return it->second;
    }
    Field value = bracket_fn(*this, comp, p, q);
    std::scoped_lock lock(mu);
    return bracket_cache.emplace(key, std::move(value)).first->second;
  }

  Field affine(std::size_t p, std::size_t q) const {
    if (affine_zero || p == q) return zero;
    std::uint64_t key = pair_key(-2, p, q);
    {
      std::scoped_lock lock(mu);
      auto it = bracket_cache.find(key);
      if (it != bracket_cache.end()) return it->second;
    }
    Field value = affine_fn(*this, p, q);
    std::scoped_lock lock(mu);
    return bracket_cache.emplace(key, std::move(value)).first->second;
  }
};

int EnhancementTriad::dim() const { return impl_->d; }
double EnhancementTriad::alpha() const { return impl_->alpha; }
const PeriodicGrid& EnhancementTriad::grid() const { return impl_->grid; }
const TimePartition& EnhancementTriad::partition() const { return impl_->part; }

bool EnhancementTriad::first_is_zero(int comp) const { return impl_->first_zero(comp); }

const Field& EnhancementTriad::first_at(int comp, std::size_t k) const {
  return impl_->first_at(comp, k);
}

Field EnhancementTriad::first_increment(int comp, std::size_t i, std::size_t j) const {
  if (impl_->first_zero(comp)) return impl_->zero;
  return impl_->first_at(comp, j) - impl_->first_at(comp, i);
}

const Field& EnhancementTriad::first_deriv(int comp, std::size_t k, int axis) const {
  return impl_->deriv(comp, k, axis);
}

bool EnhancementTriad::bracket_is_zero(int comp) const {
  return impl_->bracket_zero[comp] != 0;
}

Field EnhancementTriad::bracket(int comp, std::size_t i, std::size_t j) const {
  return impl_->bracket(comp, i, j);
}

bool EnhancementTriad::affine_is_zero() const { return impl_->affine_zero; }

Field EnhancementTriad::affine(std::size_t i, std::size_t j) const {
  return impl_->affine(i, j);
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace {

std::shared_ptr<EnhancementTriad::Impl> make_impl(PeriodicGrid grid, TimePartition part, int d,
                                                  double alpha) {
  auto impl = std::make_shared<EnhancementTriad::Impl>();
  impl->grid = grid;
  impl->part = std::move(part);
  impl->d = d;
  impl->alpha = alpha;
  impl->first.assign(std::size_t(d) + 2, {});
  impl->bracket_zero.assign(std::size_t(d) + 1, 1);
  impl->zero = Field(grid);
  return impl;
}

bool transports_all_zero(const EnhancementTriad::Impl& impl) {
  for (int i = 1; i <= impl.d; ++i)
    if (!impl.first_zero(i)) return false;
  return true;
}

/// Marks zero flags and installs the canonical segment-sum providers.
void finish_canonical(EnhancementTriad::Impl& impl) {
  bool no_transport = transports_all_zero(impl);
  for (int comp = 0; comp <= impl.d; ++comp)
    impl.bracket_zero[comp] = (no_transport || impl.first_zero(comp)) ? 1 : 0;
  impl.affine_zero =
      impl.first_zero(-1) || (no_transport && impl.first_zero(0));
  impl.bracket_fn = [](const EnhancementTriad::Impl& self, int comp, std::size_t p,
                       std::size_t q) { return self.canonical_bracket(comp, p, q); };
  impl.affine_fn = [](const EnhancementTriad::Impl& self, std::size_t p, std::size_t q) {
    return self.canonical_affine(p, q);
  };
}

std::vector<Field> derived_series(const EnhancementTriad& in, int comp,
                                  const std::function<Field(const Field&)>& op) {
  if (in.first_is_zero(comp)) return {};
  std::vector<Field> out;
  out.reserve(in.partition().size());
  for (std::size_t k = 0; k < in.partition().size(); ++k) out.push_back(op(in.first_at(comp, k)));
  return out;
}

std::vector<Field> scaled_series(const EnhancementTriad& in, int comp, double s) {
  return derived_series(in, comp, [s](const Field& f) { return f * s; });
}

void require_plain_sheet(const EnhancementTriad& in, const char* who) {
  if (!in.first_is_zero(0) || !in.first_is_zero(-1))
    throw ConfigError(std::string(who) + ": input must be a plain sheet (no Y^0/Y^{-1} slots)");
}

}  // namespace

EnhancementTriad canonical_lift(const CoefficientSheet& sheet) {
  int d = static_cast<int>(sheet.transport.size());
  if (d != sheet.grid.d) throw ConfigError("canonical_lift: one transport component per axis");
  auto impl = make_impl(sheet.grid, sheet.part, d, sheet.alpha);
  std::size_t npts = sheet.part.size();

  auto validate = [&](const std::vector<Field>& series, const char* name) {
    if (!series.empty() && series.size() != npts)
      throw ConfigError(std::string("canonical_lift: ") + name +
                        " series must have one field per partition point");
    for (const Field& f : series)
      if (f.grid() != sheet.grid) throw ConfigError("canonical_lift: field grid mismatch");
  };
  for (int i = 0; i < d; ++i) {
    validate(sheet.transport[i], "transport");
    impl->first[slot_of(i + 1)] = sheet.transport[i];
  }
  validate(sheet.zero_order, "zero-order");
  validate(sheet.source, "source");
  impl->first[slot_of(0)] = sheet.zero_order;
  impl->first[slot_of(-1)] = sheet.source;

  finish_canonical(*impl);
  return EnhancementTriad(impl);
}

EnhancementTriad sheet_from_sigma(const SigmaField& sigma, const FiniteRoughPath& rp) {
  int d = static_cast<int>(sigma.comps.size());
  if (d != sigma.grid.d) throw ConfigError("sheet_from_sigma: one sigma row per axis");
  std::size_t m = rp.dim();
  for (const auto& row : sigma.comps)
    if (row.size() != m)
      throw ConfigError("sheet_from_sigma: sigma columns must match the rough path dimension");

  auto impl = make_impl(sigma.grid, rp.partition(), d, rp.alpha());
  std::size_t npts = rp.partition().size();

  for (int i = 0; i < d; ++i) {
    std::vector<Field> series(npts, Field(sigma.grid));
    for (std::size_t k = 0; k < npts; ++k)
      for (std::size_t mu = 0; mu < m; ++mu)
        series[k] += sigma.comps[i][mu] * rp.value(k, mu);
    impl->first[slot_of(i + 1)] = std::move(series);
  }

  // C^i_{mu nu} = sum_j d_j sigma^i_mu * sigma^j_nu, so the bracket sheet is
  // <X^j, d_j X^i>_{st} = I^{mu nu}_{st} C^i_{mu nu}.
  auto coeff = std::make_shared<std::vector<Field>>(std::size_t(d) * m * m, Field(sigma.grid));
  for (int i = 0; i < d; ++i)
    for (std::size_t mu = 0; mu < m; ++mu) {
      std::vector<Field> dsig;
      for (int j = 0; j < d; ++j) dsig.push_back(dx4(sigma.comps[i][mu], j));
      for (std::size_t nu = 0; nu < m; ++nu) {
        Field c(sigma.grid);
        for (int j = 0; j < d; ++j) c += cwise_mul(dsig[j], sigma.comps[j][nu]);
        (*coeff)[(std::size_t(i) * m + mu) * m + nu] = std::move(c);
      }
    }

  auto rp_copy = std::make_shared<FiniteRoughPath>(rp);
  for (int comp = 1; comp <= d; ++comp) impl->bracket_zero[comp] = 0;

  impl->bracket_fn = [rp_copy, coeff, m](const EnhancementTriad::Impl& self, int comp,
                                         std::size_t p, std::size_t q) {
    if (comp == 0) return Field(self.grid);
    auto lvl = rp_copy->second_level(p, q);
    Field out(self.grid);
    for (std::size_t mu = 0; mu < m; ++mu)
      for (std::size_t nu = 0; nu < m; ++nu) {
        double w = lvl[mu * m + nu];
        if (w == 0.0) continue;
        const Field& c = (*coeff)[(std::size_t(comp - 1) * m + mu) * m + nu];
        for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += w * c[idx];
      }
    return out;
  };
  impl->affine_fn = [](const EnhancementTriad::Impl& self, std::size_t, std::size_t) {
    return Field(self.grid);
  };

  return EnhancementTriad(impl);
}

EnhancementTriad derivative_triad(const EnhancementTriad& input, DerivativeMode mode) {
  if (input.dim() != 1) throw ConfigError("derivative_triad: supported for d=1 only");
  auto impl = make_impl(input.grid(), input.partition(), 1, input.alpha());
  EnhancementTriad in = input;

  if (mode == DerivativeMode::transport_source) {
    if (!input.first_is_zero(0))
      throw ConfigError("derivative_triad: transport_source input must have no zero-order slot");
    impl->first[slot_of(-1)] = derived_series(in, -1, [](const Field& f) { return dx4(f); });
    impl->first[slot_of(0)] = derived_series(in, 1, [](const Field& f) { return dx4(f); });
    impl->first[slot_of(1)] = derived_series(in, 1, [](const Field& f) { return f; });
  } else {
    require_plain_sheet(input, "derivative_triad(dual_multiplicative)");
    impl->first[slot_of(0)] = derived_series(in, 1, [](const Field& f) { return dx4(f) * -1.0; });
    impl->first[slot_of(1)] = scaled_series(in, 1, -1.0);
  }
  finish_canonical(*impl);
  return EnhancementTriad(impl);
}

EnhancementTriad pure_transport_triad(const EnhancementTriad& sheet, double sign) {
  require_plain_sheet(sheet, "pure_transport_triad");
  auto impl = make_impl(sheet.grid(), sheet.partition(), sheet.dim(), sheet.alpha());
  EnhancementTriad in = sheet;
  double s2 = sign * sign;
  for (int i = 1; i <= sheet.dim(); ++i) {
    impl->first[slot_of(i)] = scaled_series(in, i, sign);
    impl->bracket_zero[i] = in.bracket_is_zero(i) ? 1 : 0;
  }
  impl->bracket_fn = [in, s2](const EnhancementTriad::Impl& self, int comp, std::size_t p,
                              std::size_t q) {
    if (comp == 0) return Field(self.grid);
    return in.bracket(comp, p, q) * s2;
  };
  impl->affine_fn = [](const EnhancementTriad::Impl& self, std::size_t, std::size_t) {
    return Field(self.grid);
  };
  return EnhancementTriad(impl);
}

EnhancementTriad transport_triad(const EnhancementTriad& sheet, double sign) {
  require_plain_sheet(sheet, "transport_triad");
  if (sheet.dim() != 1) throw ConfigError("transport_triad: d=1 only");
  auto impl = make_impl(sheet.grid(), sheet.partition(), 1, sheet.alpha());
  EnhancementTriad in = sheet;
  impl->first[slot_of(-1)] =
      derived_series(in, 1, [sign](const Field& f) { return dx4(f) * sign; });
  impl->first[slot_of(1)] = scaled_series(in, 1, sign);
  finish_canonical(*impl);
  return EnhancementTriad(impl);
}

EnhancementTriad exp_transform_triad(const EnhancementTriad& transport) {
  if (!transport.first_is_zero(0))
    throw ConfigError("exp_transform_triad: input must be transport-with-source (Z^0 = 0)");
  auto impl =
      make_impl(transport.grid(), transport.partition(), transport.dim(), transport.alpha());
  EnhancementTriad in = transport;
  impl->first[slot_of(0)] = scaled_series(in, -1, -1.0);
  for (int i = 1; i <= transport.dim(); ++i)
    impl->first[slot_of(i)] = scaled_series(in, i, 1.0);
  finish_canonical(*impl);
  return EnhancementTriad(impl);
}

EnhancementTriad reverse_triad(const EnhancementTriad& input) {
  auto impl = make_impl(input.grid(), input.partition(), input.dim(), input.alpha());
  EnhancementTriad in = input;
  std::size_t last = input.partition().size() - 1;

  for (int comp = -1; comp <= input.dim(); ++comp) {
    if (in.first_is_zero(comp)) continue;
    std::vector<Field> series;
    series.reserve(last + 1);
    for (std::size_t k = 0; k <= last; ++k) series.push_back(in.first_at(comp, last - k));
    impl->first[slot_of(comp)] = std::move(series);
  }

  bool no_transport = true;
  for (int i = 1; i <= input.dim(); ++i) no_transport = no_transport && in.first_is_zero(i);
  for (int comp = 0; comp <= input.dim(); ++comp)
    impl->bracket_zero[comp] =
        (in.bracket_is_zero(comp) && (no_transport || in.first_is_zero(comp))) ? 1 : 0;
  impl->affine_zero = in.affine_is_zero();

  // Brackets of the reversed path: <A~,B~>_{st} = (A B)|_{uv} - <A,B>_{uv}
  // with (u,v) = (last-q, last-p); carries prescribed level-2 data through.
  impl->bracket_fn = [in, last](const EnhancementTriad::Impl&, int comp, std::size_t p,
                                std::size_t q) {
    std::size_t u = last - q, v = last - p;
    Field out = in.bracket(comp, u, v) * -1.0;
    for (int j = 1; j <= in.dim(); ++j) {
      if (in.first_is_zero(j)) continue;
      Field yj = in.first_increment(j, u, v);
      Field dyi = in.first_deriv(comp, v, j - 1) - in.first_deriv(comp, u, j - 1);
      for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += yj[idx] * dyi[idx];
    }
    return out;
  };
  impl->affine_fn = [in, last](const EnhancementTriad::Impl&, std::size_t p, std::size_t q) {
    std::size_t u = last - q, v = last - p;
    Field out = in.affine(u, v) * -1.0;
    for (int j = 1; j <= in.dim(); ++j) {
      if (in.first_is_zero(j)) continue;
      Field yj = in.first_increment(j, u, v);
      Field dsrc = in.first_deriv(-1, v, j - 1) - in.first_deriv(-1, u, j - 1);
      for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += yj[idx] * dsrc[idx];
    }
    if (!in.first_is_zero(0) && !in.first_is_zero(-1)) {
      Field y0 = in.first_increment(0, u, v);
      Field ym = in.first_increment(-1, u, v);
      for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += y0[idx] * ym[idx];
    }
    return out;
  };
  return EnhancementTriad(impl);
}

EnhancementTriad negate_triad(const EnhancementTriad& input) {
  auto impl = make_impl(input.grid(), input.partition(), input.dim(), input.alpha());
  EnhancementTriad in = input;
  for (int comp = -1; comp <= input.dim(); ++comp)
    impl->first[slot_of(comp)] = scaled_series(in, comp, -1.0);
  for (int comp = 0; comp <= input.dim(); ++comp)
    impl->bracket_zero[comp] = in.bracket_is_zero(comp) ? 1 : 0;
  impl->affine_zero = in.affine_is_zero();
  impl->bracket_fn = [in](const EnhancementTriad::Impl&, int comp, std::size_t p, std::size_t q) {
    return in.bracket(comp, p, q);
  };
  impl->affine_fn = [in](const EnhancementTriad::Impl&, std::size_t p, std::size_t q) {
    return in.affine(p, q);
  };
  return EnhancementTriad(impl);
}

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

double TriadChenReport::max() const {
  double m = std::max(first_levels, affine);
  for (double b : brackets) m = std::max(m, b);
  return m;
}

TriadChenReport gene_chen_residual(const EnhancementTriad& triad, std::size_t max_triples) {
  std::size_t n = triad.partition().size();
  TriadChenReport rep;
  rep.brackets.assign(std::size_t(triad.dim()) + 1, 0.0);

  std::size_t total = n * (n + 1) * (n + 2) / 6;
  std::size_t stride = total > max_triples ? (total / max_triples + 1) : 1;
  std::size_t counter = 0;

  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t th = s; th < n; ++th)
      for (std::size_t t = th; t < n; ++t) {
        if (stride > 1 && (counter++ % stride) != 0) continue;
        ++rep.triples;

        for (int comp = -1; comp <= triad.dim(); ++comp) {
          if (triad.first_is_zero(comp)) continue;
          Field di = triad.first_increment(comp, s, t) - triad.first_increment(comp, s, th) -
                     triad.first_increment(comp, th, t);
          rep.first_levels = std::max(rep.first_levels, linf_norm(di));
        }

        for (int comp = 0; comp <= triad.dim(); ++comp) {
          if (triad.bracket_is_zero(comp) && triad.first_is_zero(comp)) continue;
          Field lhs = triad.bracket(comp, s, t) - triad.bracket(comp, s, th) -
                      triad.bracket(comp, th, t);
          for (int j = 1; j <= triad.dim(); ++j) {
            if (triad.first_is_zero(j)) continue;
            Field yj = triad.first_increment(j, th, t);
            Field dyi = triad.first_deriv(comp, th, j - 1) - triad.first_deriv(comp, s, j - 1);
            for (std::size_t idx = 0; idx < lhs.size(); ++idx) lhs[idx] -= yj[idx] * dyi[idx];
          }
          rep.brackets[comp] = std::max(rep.brackets[comp], linf_norm(lhs));
        }

        if (!triad.affine_is_zero() || !triad.first_is_zero(-1)) {
          Field lhs = triad.affine(s, t) - triad.affine(s, th) - triad.affine(th, t);
          for (int j = 1; j <= triad.dim(); ++j) {
            if (triad.first_is_zero(j)) continue;
            Field yj = triad.first_increment(j, th, t);
            Field dsrc = triad.first_deriv(-1, th, j - 1) - triad.first_deriv(-1, s, j - 1);
            for (std::size_t idx = 0; idx < lhs.size(); ++idx) lhs[idx] -= yj[idx] * dsrc[idx];
          }
          if (!triad.first_is_zero(0) && !triad.first_is_zero(-1)) {
            Field y0 = triad.first_increment(0, th, t);
            Field ym = triad.first_increment(-1, s, th);
            for (std::size_t idx = 0; idx < lhs.size(); ++idx) lhs[idx] -= y0[idx] * ym[idx];
          }
          rep.affine = std::max(rep.affine, linf_norm(lhs));
        }
      }
  return rep;
}

double rho_alpha_metric(const EnhancementTriad& a, const EnhancementTriad& b,
                        std::size_t max_pairs) {
  if (a.grid() != b.grid() || !(a.partition() == b.partition()) || a.dim() != b.dim())
    throw ConfigError("rho_alpha_metric: triads must share grid and partition");
  std::size_t n = a.partition().size();
  double alpha = a.alpha();

  std::size_t total = n * (n - 1) / 2;
  std::size_t stride = total > max_pairs ? (total / max_pairs + 1) : 1;

  double first_part = 0.0, bracket_part = 0.0, affine_part = 0.0;
  std::size_t counter = 0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (stride > 1 && (counter++ % stride) != 0) continue;
      double gap = a.partition().t(j) - a.partition().t(i);
      double ga = std::pow(gap, alpha), g2a = std::pow(gap, 2.0 * alpha);
      for (int comp = -1; comp <= a.dim(); ++comp) {
        if (a.first_is_zero(comp) && b.first_is_zero(comp)) continue;
        Field diff = a.first_increment(comp, i, j) - b.first_increment(comp, i, j);
        first_part = std::max(first_part, sobolev_norm(diff, 3, INFINITY, true) / ga);
      }
      for (int comp = 0; comp <= a.dim(); ++comp) {
        if (a.bracket_is_zero(comp) && b.bracket_is_zero(comp)) continue;
        Field diff = a.bracket(comp, i, j) - b.bracket(comp, i, j);
        bracket_part = std::max(bracket_part, sobolev_norm(diff, 2, INFINITY, true) / g2a);
      }
      if (!a.affine_is_zero() || !b.affine_is_zero()) {
        Field diff = a.affine(i, j) - b.affine(i, j);
        affine_part = std::max(affine_part, sobolev_norm(diff, 1, INFINITY, true) / g2a);
      }
    }
  return first_part + bracket_part + affine_part;
}

}  // namespace rpde
