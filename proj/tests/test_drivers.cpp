#include <doctest.h>

#include <cmath>
#include <random>

#include "roughpde/drivers.hpp"

using namespace rpde;

namespace {

EnhancementTriad linear_sheet(PeriodicGrid g, const TimePartition& part,
                              const std::function<double(double)>& shape, double amp = 1.0) {
  CoefficientSheet sheet;
  sheet.grid = g;
  sheet.part = part;
  sheet.alpha = 1.0;
  std::vector<Field> series;
  Field profile = Field::from_fn(g, shape);
  for (std::size_t k = 0; k < part.size(); ++k) series.push_back(profile * (amp * part.t(k)));
  sheet.transport.push_back(std::move(series));
  return canonical_lift(sheet);
}

EnhancementTriad full_triad(PeriodicGrid g, const TimePartition& part) {
  CoefficientSheet sheet;
  sheet.grid = g;
  sheet.part = part;
  sheet.alpha = 1.0;
  std::vector<Field> transport, zero, source;
  for (std::size_t k = 0; k < part.size(); ++k) {
    double t = part.t(k);
    transport.push_back(Field::from_fn(g, [t](double x) { return 0.6 * t * std::sin(x); }));
    zero.push_back(Field::from_fn(g, [t](double x) { return 0.4 * t * std::cos(x); }));
    source.push_back(Field::from_fn(g, [t](double x) { return 0.3 * t * std::sin(2 * x); }));
  }
  sheet.transport.push_back(std::move(transport));
  sheet.zero_order = std::move(zero);
  sheet.source = std::move(source);
  return canonical_lift(sheet);
}

Field random_field(PeriodicGrid g, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(eng);
  return f;
}

}  // namespace

TEST_CASE("build_B basics") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 8);

  SUBCASE("kills constants") {
    EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });
    Driver b = build_B(sheet);
    Field one(g, 1.0);
    CHECK(linf_norm(b.level(1, 0, 8).apply(one)) < 1e-13);
    CHECK(linf_norm(b.level(2, 0, 8).apply(one)) < 1e-13);
  }
  SUBCASE("x-constant path: exact transport coefficients") {
    EnhancementTriad sheet = linear_sheet(g, part, [](double) { return 0.7; });
    Driver b = build_B(sheet);
    Field probe = Field::from_fn(g, [](double x) { return std::sin(x); });
    double gap = part.t(5) - part.t(2);
    double c = 0.7 * gap;
    Field expect1 = dx(probe) * c;
    Field expect2 = dxx(probe, 0, 0) * (0.5 * c * c);
    CHECK(linf_norm(b.level(1, 2, 5).apply(probe) - expect1) < 1e-13);
    CHECK(linf_norm(b.level(2, 2, 5).apply(probe) - expect2) < 1e-13);
  }
  SUBCASE("wrong constructor raises") {
    EnhancementTriad triad = full_triad(g, part);
    CHECK_THROWS_AS((void)build_B(triad), ConfigError);
  }
  SUBCASE("forward chen residual machine zero") {
    EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });
    DriverChenReport rep = chen_residual_driver(build_B(sheet), default_probes(g));
    CHECK(rep.max_residual < 1e-12);
  }
  SUBCASE("the un-halved convention violates chen") {
    EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });
    DriverChenReport rep = chen_residual_driver(build_B(sheet, false), default_probes(g));
    CHECK(rep.max_residual > 1e-4);
  }
  SUBCASE("zeroed second level has residual equal to the chen right side") {
    EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });
    Driver b = build_B(sheet);
    Field probe = Field::from_fn(g, [](double x) { return std::cos(x); });
    // residual of (Q1, 0): |Q1_{tht} Q1_{sth} probe| in the surrogate norm
    Field composed = b.level(1, 4, 8).apply_linear(b.level(1, 0, 4).apply(probe));
    CHECK(neg_sobolev_norm(composed, 2) > 1e-6);
  }
}

TEST_CASE("build_Q") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 8);
  EnhancementTriad triad = full_triad(g, part);

  SUBCASE("specializes to build_B on plain sheets") {
    EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });
    Driver b = build_B(sheet);
    Driver q = build_Q(sheet);
    for (int trial = 0; trial < 50; ++trial) {
      Field f = random_field(g, 100 + trial);
      CHECK(linf_norm(b.level(1, 1, 7).apply(f) - q.level(1, 1, 7).apply(f)) < 1e-12);
      CHECK(linf_norm(b.level(2, 1, 7).apply(f) - q.level(2, 1, 7).apply(f)) < 1e-12);
    }
  }
  SUBCASE("offset at the zero field is the source increment") {
    Driver q = build_Q(triad);
    Field zero(g);
    Field q1_at_zero = q.level(1, 2, 6).apply(zero);
    CHECK(linf_norm(q1_at_zero - triad.first_increment(-1, 2, 6)) < 1e-14);
  }
  SUBCASE("scalar-only zero-order component") {
    CoefficientSheet cs;
    cs.grid = g;
    cs.part = part;
    cs.alpha = 1.0;
    std::vector<Field> zero;
    for (std::size_t k = 0; k < part.size(); ++k) zero.push_back(Field(g, 0.3 * part.t(k)));
    cs.zero_order = std::move(zero);
    EnhancementTriad t = canonical_lift(cs);
    Driver q = build_Q(t);
    Field probe = random_field(g, 3);
    double gst = 0.3 * (part.t(6) - part.t(1));
    CHECK(linf_norm(q.level(1, 1, 6).apply(probe) - probe * gst) < 1e-13);
    CHECK(linf_norm(q.level(2, 1, 6).apply(probe) - probe * (0.5 * gst * gst)) < 1e-13);
  }
  SUBCASE("affine chen residual machine zero") {
    DriverChenReport rep = chen_residual_driver(build_Q(triad), default_probes(g));
    CHECK(rep.max_residual < 1e-12);
  }
  SUBCASE("holder audit finite") {
    CHECK(holder_constant_audit(build_Q(triad), default_probes(g)) > 0.0);
  }
}

TEST_CASE("backward driver") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 8);
  EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return 1.0 + 0.5 * std::sin(x); });
  Driver b = build_B(sheet);
  Driver p = build_P_backward(b);

  SUBCASE("adjoint identity to machine precision") {
    for (int trial = 0; trial < 10; ++trial) {
      Field f = random_field(g, trial), h = random_field(g, 50 + trial);
      for (int lvl = 1; lvl <= 2; ++lvl) {
        double lhs = l2_inner(b.level(lvl, 0, 8).apply(f), h);
        double rhs = -l2_inner(f, p.level(lvl, 0, 8).apply(h));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
    }
  }
  SUBCASE("div-free transport is skew-adjoint") {
    EnhancementTriad flat = linear_sheet(g, part, [](double) { return 1.0; });
    Driver bf = build_B(flat);
    Driver pf = build_P_backward(bf);
    Field f = random_field(g, 9);
    CHECK(linf_norm(pf.level(1, 0, 8).apply(f) - bf.level(1, 0, 8).apply(f)) < 1e-13);
  }
  SUBCASE("P1 applied to constants is minus the divergence") {
    Field one(g, 1.0);
    Field expect = dx(sheet.first_increment(1, 0, 8)) * -1.0;
    CHECK(linf_norm(p.level(1, 0, 8).apply(one) - expect) < 1e-13);
  }
  SUBCASE("backward chen holds") {
    DriverChenReport rep = chen_residual_driver(p, default_probes(g));
    CHECK(rep.max_residual < 1e-12);
  }
  SUBCASE("adjoint of affine drivers is rejected") {
    EnhancementTriad triad = full_triad(g, part);
    CHECK_THROWS_AS((void)build_P_backward(build_Q(triad)), ConfigError);
  }
  SUBCASE("reflection is an involution and flips flavors") {
    CHECK(p.reflect().flavor() == DriverFlavor::affine);
    Driver twice = p.reflect().reflect();
    Field f = random_field(g, 77);
    CHECK(linf_norm(twice.level(2, 1, 5).apply(f) - p.level(2, 1, 5).apply(f)) < 1e-13);
  }
}

TEST_CASE("bracket operator") {
  PeriodicGrid g(1, 128);
  SUBCASE("derivation: kills constants exactly") {
    TimePartition part = TimePartition::uniform(1.0, 8);
    EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });
    BracketOperator br = bracket(build_B(sheet));
    CHECK(linf_norm(br.apply(0, 8, Field(g, 2.0))) < 1e-13);
  }
  SUBCASE("locality of driver stencils") {
    TimePartition part = TimePartition::uniform(1.0, 4);
    EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });
    Driver b = build_B(sheet);
    Field spike(g);
    spike[40] = 1.0;
    Field out = b.level(2, 0, 4).apply(spike);
    for (int i = 0; i < g.n; ++i) {
      if (std::abs(i - 40) > 2) CHECK(out[i] == 0.0);
    }
  }
}

TEST_CASE("product driver") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 6);
  EnhancementTriad yt = full_triad(g, part);
  EnhancementTriad zt = [&] {
    CoefficientSheet sheet;
    sheet.grid = g;
    sheet.part = part;
    sheet.alpha = 1.0;
    std::vector<Field> transport, zero, source;
    for (std::size_t k = 0; k < part.size(); ++k) {
      double t = part.t(k);
      transport.push_back(Field::from_fn(g, [t](double x) { return 0.6 * t * std::sin(x); }));
      zero.push_back(Field::from_fn(g, [t](double x) { return 0.2 * t * std::sin(2 * x); }));
      source.push_back(Field::from_fn(g, [t](double x) { return 0.5 * t * std::cos(x); }));
    }
    sheet.transport.push_back(std::move(transport));
    sheet.zero_order = std::move(zero);
    sheet.source = std::move(source);
    return canonical_lift(sheet);
  }();

  SUBCASE("mismatched transport is rejected") {
    EnhancementTriad other = linear_sheet(g, part, [](double x) { return std::cos(x); });
    CHECK_THROWS_AS((void)build_product_driver(other, zt), PreconditionError);
  }
  SUBCASE("affine chen relations for the 3x3 driver") {
    Driver pd = build_product_driver(yt, zt);
    DriverChenReport rep = chen_residual_driver(pd, default_probes(g), 5000);
    CHECK(rep.max_residual < 1e-12);
  }
  SUBCASE("triangularity: upper blocks vanish") {
    Driver pd = build_product_driver(yt, zt);
    GridOp3 l2 = pd.level3(2, 1, 5);
    Field probe = random_field(g, 5);
    CHECK(l2.block[1].trivial());
    CHECK(l2.block[2].trivial());
    CHECK(l2.block[3].trivial());
    CHECK(l2.block[5].trivial());
    (void)probe;
  }
  SUBCASE("pure transport: row three matches build_B on the product") {
    EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });
    Driver pd = build_product_driver(sheet, sheet);
    Driver b = build_B(sheet);
    Field u = random_field(g, 21), v = random_field(g, 22);
    Field uv = cwise_mul(u, v);
    std::array<Field, 3> state{u, v, uv};
    for (int lvl = 1; lvl <= 2; ++lvl) {
      auto out = pd.level3(lvl, 0, 6).apply(state);
      CHECK(linf_norm(out[2] - b.level(lvl, 0, 6).apply(uv)) < 1e-12);
    }
  }
  SUBCASE("zero state reads off the affine offsets") {
    Driver pd = build_product_driver(yt, zt);
    Field zero(g);
    std::array<Field, 3> state{zero, zero, zero};
    auto l1 = pd.level3(1, 0, 6).apply(state);
    CHECK(linf_norm(l1[0] - yt.first_increment(-1, 0, 6)) < 1e-14);
    CHECK(linf_norm(l1[1] - zt.first_increment(-1, 0, 6)) < 1e-14);
    CHECK(linf_norm(l1[2]) < 1e-14);
    auto l2 = pd.level3(2, 0, 6).apply(state);
    Field ymzm = cwise_mul(yt.first_increment(-1, 0, 6), zt.first_increment(-1, 0, 6));
    CHECK(linf_norm(l2[2] - ymzm) < 1e-14);
  }
}
