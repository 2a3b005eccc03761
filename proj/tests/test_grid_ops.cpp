#include <doctest.h>

#include <cmath>
#include <random>

#include "roughpde/grid.hpp"

using namespace rpde;

namespace {
Field random_field(PeriodicGrid g, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(eng);
  return f;
}
}  // namespace

TEST_CASE("finite differences") {
  PeriodicGrid g(1, 64);
  SUBCASE("constants differentiate to zero exactly") {
    Field c(g, 3.7);
    CHECK(linf_norm(dx(c)) == 0.0);
    CHECK(linf_norm(dxx(c, 0, 0)) == 0.0);
  }
  SUBCASE("second-order accuracy bound on sin") {
    Field f = Field::from_fn(g, [](double x) { return std::sin(x); });
    Field exact = Field::from_fn(g, [](double x) { return std::cos(x); });
    double h = g.h();
    double err = linf_norm(dx(f) - exact);
    CHECK(err <= h * h / 6.0 * 1.0 + 1e-12);
    CHECK(err == doctest::Approx(1.61e-3).epsilon(0.05));
  }
  SUBCASE("fourth order stencil is much tighter") {
    Field f = Field::from_fn(g, [](double x) { return std::sin(x); });
    Field exact = Field::from_fn(g, [](double x) { return std::cos(x); });
    CHECK(linf_norm(dx4(f) - exact) < 1e-6);
  }
  SUBCASE("summation by parts is exact") {
    Field f = random_field(g, 1), h = random_field(g, 2);
    CHECK(std::abs(l2_inner(dx(f), h) + l2_inner(f, dx(h))) < 1e-13);
  }
  SUBCASE("shape mismatch raises") {
    PeriodicGrid g2(2, 16);
    Field f(g);
    CHECK_THROWS_AS(dx(f, 1), ConfigError);
    CHECK_THROWS_AS((void)cwise_mul(f, Field(g2)), ConfigError);
  }
}

TEST_CASE("norms") {
  PeriodicGrid g(1, 64);
  SUBCASE("constant field") {
    Field one(g, 1.0);
    CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(2.0 * M_PI)));
    for (int k = 1; k <= 3; ++k)
      CHECK(neg_sobolev_norm(one, k) == doctest::Approx(std::sqrt(2.0 * M_PI)));
  }
  SUBCASE("single mode") {
    Field s = Field::from_fn(g, [](double x) { return std::sin(x); });
    CHECK(lp_norm(s, 2.0) == doctest::Approx(std::sqrt(M_PI)));
    CHECK(neg_sobolev_norm(s, 1) == doctest::Approx(std::sqrt(M_PI / 2.0)));
    CHECK(lp_norm(s, INFINITY) == doctest::Approx(1.0));
  }
  SUBCASE("negative norm monotonicity") {
    Field f = random_field(g, 3);
    double l2 = lp_norm(f, 2.0);
    double w1 = neg_sobolev_norm(f, 1);
    double w2 = neg_sobolev_norm(f, 2);
    double w3 = neg_sobolev_norm(f, 3);
    CHECK(w3 <= w2);
    CHECK(w2 <= w1);
    CHECK(w1 <= l2);
  }
  SUBCASE("log convexity spot check") {
    Field f = random_field(g, 4);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::abs(f[i]) + 0.1;
    double l1 = lp_norm(f, 1.0), l2 = lp_norm(f, 2.0), li = lp_norm(f, INFINITY);
    CHECK(l2 * l2 <= l1 * li * (1.0 + 1e-12));
  }
  SUBCASE("dictionary surrogate is flagged") {
    Field s = Field::from_fn(g, [](double x) { return std::sin(x); });
    NormValue nv = norm(s, {NormSpec::NegSobolev, 1, 4.0});
    CHECK(nv.surrogate);
    CHECK(nv.value > 0.0);
    NormValue fft = norm(s, {NormSpec::NegSobolev, 1, 2.0});
    CHECK(!fft.surrogate);
  }
  SUBCASE("unsupported orders raise instead of falling back") {
    Field f(g, 1.0);
    CHECK_THROWS_AS((void)norm(f, {NormSpec::Wkp, 5, 2.0}), ConfigError);
    CHECK_THROWS_AS((void)norm(f, {NormSpec::NegSobolev, 4, 2.0}), ConfigError);
  }
  SUBCASE("two dimensional norms") {
    PeriodicGrid g2(2, 16);
    Field one(g2, 1.0);
    CHECK(lp_norm(one, 2.0) == doctest::Approx(2.0 * M_PI));
    CHECK(neg_sobolev_norm(one, 2) == doctest::Approx(2.0 * M_PI));
  }
}

TEST_CASE("interpolation inequality gate and ratio") {
  PeriodicGrid g(1, 64);
  SUBCASE("exponent gate") {
    CHECK(interp_exponents_admissible(4.0, INFINITY, 1));
    CHECK(!interp_exponents_admissible(2.0, INFINITY, 1));
    CHECK_THROWS_AS(interp_exponents_admissible(2.0, INFINITY, 1, true), PreconditionError);
  }
  SUBCASE("closed-form ratio for a static sine in time") {
    std::vector<Field> trace;
    std::vector<double> times;
    for (int k = 0; k <= 16; ++k) {
      trace.push_back(Field::from_fn(g, [](double x) { return std::sin(x); }));
      times.push_back(k / 16.0);
    }
    double ratio = interp_check(trace, times, 4.0, INFINITY);
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-6));
  }
  SUBCASE("zero trace gives zero") {
    std::vector<Field> trace(3, Field(g));
    std::vector<double> times{0.0, 0.5, 1.0};
    CHECK(interp_check(trace, times, 4.0, 2.0) == 0.0);
  }
}

TEST_CASE("gagliardo-nirenberg diagnostic") {
  PeriodicGrid g(1, 128);
  SUBCASE("constant") {
    CHECK(gn_check(Field(g, 1.0)) == doctest::Approx(1.0 / (2.0 * M_PI)));
  }
  SUBCASE("sine") {
    Field s = Field::from_fn(g, [](double x) { return std::sin(x); });
    double expected = (3.0 * M_PI / 4.0) /
                      (std::pow(std::sqrt(M_PI), 3.0) * std::sqrt(M_PI) + M_PI * M_PI);
    CHECK(gn_check(s) == doctest::Approx(expected).epsilon(1e-6));
  }
  SUBCASE("bounded over random trigonometric polynomials") {
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> a, b;
      for (int j = 0; j <= 8; ++j) {
        a.push_back(u(eng));
        b.push_back(u(eng));
      }
      Field f = Field::from_fn(g, [&](double x) {
        double v = 0.0;
        for (int j = 0; j <= 8; ++j) v += a[j] * std::cos(j * x) + b[j] * std::sin(j * x);
        return v;
      });
      worst = std::max(worst, gn_check(f));
    }
    CHECK(worst < 2.0);  // regression baseline
  }
  SUBCASE("zero field") { CHECK(gn_check(Field(g)) == 0.0); }
}

TEST_CASE("ellipticity sampling") {
  NonlinearDiffusion nl;
  nl.a = [](double, double, double z) { return 1.0 + 0.25 * std::tanh(z); };
  nl.lambda = 0.75;
  CHECK(ellipticity_check(nl, 1.0, 10000, 7) == 0);
  nl.a = [](double, double, double z) { return 0.5 + z * 0.0; };
  CHECK(ellipticity_check(nl, 1.0, 100, 7) == 100);
}
