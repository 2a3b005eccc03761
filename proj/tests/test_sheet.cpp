#include <doctest.h>

#include <cmath>

#include "roughpde/sheet.hpp"

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
    transport.push_back(Field::from_fn(g, [t](double x) { return t * std::sin(x); }));
    zero.push_back(Field::from_fn(g, [t](double x) { return 0.5 * t * std::cos(x); }));
    source.push_back(Field::from_fn(g, [t](double x) { return 0.4 * t * std::sin(2 * x); }));
  }
  sheet.transport.push_back(std::move(transport));
  sheet.zero_order = std::move(zero);
  sheet.source = std::move(source);
  return canonical_lift(sheet);
}

}  // namespace

TEST_CASE("canonical lift brackets") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 8);

  SUBCASE("linear-in-time path: L = (t-s)^2/2 V dV") {
    EnhancementTriad triad = linear_sheet(g, part, [](double x) { return std::sin(x); });
    Field expected = Field::from_fn(g, [](double x) { return std::sin(x) * std::cos(x); });
    for (std::size_t i = 0; i < part.size(); ++i)
      for (std::size_t j = i + 1; j < part.size(); ++j) {
        double gap = part.t(j) - part.t(i);
        Field lvl = triad.bracket(1, i, j);
        CHECK(linf_norm(lvl - expected * (0.5 * gap * gap)) < 1e-6);
      }
  }
  SUBCASE("time-constant sheet has zero bracket") {
    CoefficientSheet sheet;
    sheet.grid = g;
    sheet.part = part;
    sheet.transport.push_back(
        std::vector<Field>(part.size(), Field::from_fn(g, [](double x) { return std::sin(x); })));
    EnhancementTriad triad = canonical_lift(sheet);
    CHECK(linf_norm(triad.bracket(1, 0, part.steps())) < 1e-14);
  }
  SUBCASE("x-constant sheet has zero bracket") {
    EnhancementTriad triad = linear_sheet(g, part, [](double) { return 1.0; });
    CHECK(linf_norm(triad.bracket(1, 0, part.steps())) < 1e-14);
  }
  SUBCASE("chen residual machine zero, full triad included") {
    EnhancementTriad triad = full_triad(g, part);
    TriadChenReport rep = gene_chen_residual(triad);
    CHECK(rep.max() < 1e-12);
  }
}

TEST_CASE("sigma sheets") {
  PeriodicGrid g(1, 128);
  SUBCASE("x-constant sigma kills the bracket") {
    TimePartition part = TimePartition::uniform(1.0, 8);
    std::vector<std::vector<double>> vals;
    for (std::size_t k = 0; k < part.size(); ++k)
      vals.push_back({std::sin(5.0 * part.t(k)), std::cos(3.0 * part.t(k))});
    FiniteRoughPath rp = pl_lift(part, vals, 0.5);
    SigmaField sigma;
    sigma.grid = g;
    sigma.comps = {{Field(g, 0.7), Field(g, -0.3)}};
    EnhancementTriad triad = sheet_from_sigma(sigma, rp);
    CHECK(linf_norm(triad.bracket(1, 0, part.steps())) < 1e-14);
  }
  SUBCASE("scalar sine sigma against the closed form") {
    TimePartition part = TimePartition::uniform(1.0, 8);
    std::vector<std::vector<double>> vals;
    for (std::size_t k = 0; k < part.size(); ++k) vals.push_back({part.t(k)});
    FiniteRoughPath rp = pl_lift(part, vals, 1.0);
    SigmaField sigma;
    sigma.grid = g;
    sigma.comps = {{Field::from_fn(g, [](double x) { return std::sin(x); })}};
    EnhancementTriad triad = sheet_from_sigma(sigma, rp);
    // L_{st} = (1/2) Z_{st}^2 sin cos for the geometric scalar lift
    Field expected = Field::from_fn(g, [](double x) { return std::sin(x) * std::cos(x); });
    Field lvl = triad.bracket(1, 2, 6);
    double z = part.t(6) - part.t(2);
    CHECK(linf_norm(lvl - expected * (0.5 * z * z)) < 1e-6);
    CHECK(gene_chen_residual(triad).max() < 1e-10);
  }
  SUBCASE("perturbed area is caught by the residual") {
    TimePartition part = TimePartition::uniform(1.0, 6);
    std::vector<std::vector<double>> vals;
    for (std::size_t k = 0; k < part.size(); ++k)
      vals.push_back({part.t(k), part.t(k) * part.t(k)});
    FiniteRoughPath rp = pl_lift(part, vals, 0.5);
    rp.perturb_levy(1, 4, 0, 1, 0.1);
    SigmaField sigma;
    sigma.grid = g;
    sigma.comps = {{Field::from_fn(g, [](double x) { return std::sin(x); }),
                    Field::from_fn(g, [](double x) { return std::cos(x); })}};
    EnhancementTriad triad = sheet_from_sigma(sigma, rp);
    CHECK(gene_chen_residual(triad).max() > 1e-3);
  }
}

TEST_CASE("derived triads") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 8);
  EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); });

  SUBCASE("dual triad second entry for X = t sin x") {
    EnhancementTriad dual = derivative_triad(sheet, DerivativeMode::dual_multiplicative);
    CHECK(gene_chen_residual(dual).max() < 1e-9);
    Field expected =
        Field::from_fn(g, [](double x) { return std::cos(2.0 * x) - std::cos(x) * std::cos(x); });
    for (std::size_t j : {std::size_t(3), std::size_t(8)}) {
      double gap = part.t(j);
      Field entry = dual.bracket(0, 0, j);
      CHECK(linf_norm(entry - expected * (0.5 * gap * gap)) < 1e-5);
    }
    CHECK(dual.first_is_zero(-1));
  }
  SUBCASE("x-constant sheet: dual reduces to sign-flipped pure transport") {
    EnhancementTriad flat = linear_sheet(g, part, [](double) { return 1.0; });
    EnhancementTriad dual = derivative_triad(flat, DerivativeMode::dual_multiplicative);
    CHECK(linf_norm(dual.first_at(0, part.steps())) < 1e-13);
    CHECK(linf_norm(dual.first_at(1, part.steps()) + flat.first_at(1, part.steps())) < 1e-13);
  }
  SUBCASE("transport_source derivative of an x-constant input has no affine entry") {
    EnhancementTriad flat = linear_sheet(g, part, [](double) { return 1.0; });
    EnhancementTriad z = transport_triad(flat, -1.0);
    EnhancementTriad psi_triad = derivative_triad(z, DerivativeMode::transport_source);
    CHECK(linf_norm(psi_triad.affine(0, part.steps())) < 1e-12);
    CHECK(gene_chen_residual(psi_triad).max() < 1e-9);
  }
  SUBCASE("derivative triads need d = 1") {
    PeriodicGrid g2(2, 16);
    CoefficientSheet cs;
    cs.grid = g2;
    cs.part = part;
    for (int i = 0; i < 2; ++i)
      cs.transport.push_back(std::vector<Field>(part.size(), Field(g2, 0.0)));
    EnhancementTriad t2 = canonical_lift(cs);
    CHECK_THROWS_AS(derivative_triad(t2, DerivativeMode::dual_multiplicative), ConfigError);
  }
  SUBCASE("translation equivariance") {
    EnhancementTriad dual = derivative_triad(sheet, DerivativeMode::dual_multiplicative);
    // translated input sheet
    CoefficientSheet shifted;
    shifted.grid = g;
    shifted.part = part;
    shifted.alpha = 1.0;
    std::vector<Field> series;
    double h = g.h();
    for (std::size_t k = 0; k < part.size(); ++k)
      series.push_back(
          Field::from_fn(g, [&](double x) { return part.t(k) * std::sin(x - h); }));
    shifted.transport.push_back(std::move(series));
    EnhancementTriad dual_shift =
        derivative_triad(canonical_lift(shifted), DerivativeMode::dual_multiplicative);
    Field a = dual.bracket(0, 0, part.steps());
    Field b = dual_shift.bracket(0, 0, part.steps());
    double worst = 0.0;
    int n = g.n;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(b[(i + 1) % n] - a[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("reversal and negation") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 8);
  EnhancementTriad triad = full_triad(g, part);

  SUBCASE("reversal preserves the chen relations") {
    EnhancementTriad rev = reverse_triad(triad);
    CHECK(gene_chen_residual(rev).max() < 1e-12);
  }
  SUBCASE("double reversal restores the brackets") {
    EnhancementTriad twice = reverse_triad(reverse_triad(triad));
    CHECK(linf_norm(twice.bracket(1, 1, 6) - triad.bracket(1, 1, 6)) < 1e-13);
    CHECK(linf_norm(twice.affine(0, 5) - triad.affine(0, 5)) < 1e-13);
  }
  SUBCASE("negation keeps brackets, flips first levels") {
    EnhancementTriad neg = negate_triad(triad);
    CHECK(linf_norm(neg.first_at(1, 4) + triad.first_at(1, 4)) == 0.0);
    CHECK(linf_norm(neg.bracket(1, 0, 6) - triad.bracket(1, 0, 6)) == 0.0);
    CHECK(gene_chen_residual(neg).max() < 1e-12);
  }
  SUBCASE("exp transform triad satisfies chen") {
    EnhancementTriad z = transport_triad(
        linear_sheet(g, part, [](double x) { return 1.0 + 0.5 * std::sin(x); }), -1.0);
    EnhancementTriad e = exp_transform_triad(z);
    CHECK(gene_chen_residual(e).max() < 1e-12);
    CHECK(e.first_is_zero(-1));
  }
}

TEST_CASE("rho alpha metric") {
  PeriodicGrid g(1, 32);
  TimePartition part = TimePartition::uniform(1.0, 16);
  EnhancementTriad a = linear_sheet(g, part, [](double x) { return std::sin(x); });

  SUBCASE("identical arguments give zero") { CHECK(rho_alpha_metric(a, a) == 0.0); }
  SUBCASE("constant shift of the first level is invisible") {
    CoefficientSheet sheet;
    sheet.grid = g;
    sheet.part = part;
    sheet.alpha = 1.0;
    std::vector<Field> series;
    for (std::size_t k = 0; k < part.size(); ++k) {
      Field f = Field::from_fn(g, [&](double x) { return part.t(k) * std::sin(x); });
      for (std::size_t i = 0; i < f.size(); ++i) f[i] += 2.5;  // constant in t and x
      series.push_back(f);
    }
    sheet.transport.push_back(std::move(series));
    EnhancementTriad b = canonical_lift(sheet);
    CHECK(rho_alpha_metric(a, b) < 1e-12);
  }
  SUBCASE("pseudometric properties on random-ish triads") {
    EnhancementTriad b = linear_sheet(g, part, [](double x) { return std::cos(x); });
    EnhancementTriad c = linear_sheet(g, part, [](double x) { return std::sin(2.0 * x); }, 0.5);
    double ab = rho_alpha_metric(a, b), ba = rho_alpha_metric(b, a);
    CHECK(ab == doctest::Approx(ba));
    CHECK(rho_alpha_metric(a, c) <= ab + rho_alpha_metric(b, c) + 1e-12);
  }
  SUBCASE("grid mismatch rejected") {
    PeriodicGrid g2(1, 64);
    EnhancementTriad b = linear_sheet(g2, part, [](double x) { return std::sin(x); });
    CHECK_THROWS_AS((void)rho_alpha_metric(a, b), ConfigError);
  }
}
