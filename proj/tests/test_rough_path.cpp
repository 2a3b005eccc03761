#include <doctest.h>

#include <cmath>

#include "roughpde/rough_path.hpp"

using namespace rpde;

TEST_CASE("piecewise-linear lift basics") {
  SUBCASE("scalar paths have no area") {
    TimePartition p = TimePartition::uniform(1.0, 8);
    std::vector<std::vector<double>> vals;
    for (std::size_t k = 0; k < p.size(); ++k) vals.push_back({std::sin(p.t(k))});
    FiniteRoughPath rp = pl_lift(p, vals, 1.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i; j < p.size(); ++j) CHECK(rp.levy_area(i, j)[0] == 0.0);
  }

  SUBCASE("straight segments have zero area") {
    TimePartition p = TimePartition::uniform(1.0, 4);
    std::vector<std::vector<double>> vals;
    for (std::size_t k = 0; k < p.size(); ++k) vals.push_back({p.t(k), p.t(k)});
    FiniteRoughPath rp = pl_lift(p, vals, 1.0);
    auto a = rp.levy_area(0, 4);
    CHECK(std::abs(a[1]) < 1e-15);
  }

  SUBCASE("the L path carries area one half") {
    TimePartition p({0.0, 1.0, 2.0});
    FiniteRoughPath rp = pl_lift(p, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}, 1.0);
    CHECK(rp.levy_area(0, 2)[1] == doctest::Approx(0.5));
    CHECK(rp.levy_area(0, 2)[2] == doctest::Approx(-0.5));
  }

  SUBCASE("reparametrized straight segment keeps zero area") {
    TimePartition p = TimePartition::uniform(1.0, 8);
    std::vector<std::vector<double>> vals;
    for (std::size_t k = 0; k < p.size(); ++k) {
      double s = p.t(k) * p.t(k);  // nonlinear clock, same line
      vals.push_back({2.0 * s, -s});
    }
    FiniteRoughPath rp = pl_lift(p, vals, 1.0);
    CHECK(std::abs(rp.levy_area(0, 8)[1]) < 1e-14);
  }

  SUBCASE("chen residual is machine zero and perturbations break it") {
    TimePartition p = TimePartition::uniform(1.0, 6);
    std::vector<std::vector<double>> vals;
    for (std::size_t k = 0; k < p.size(); ++k)
      vals.push_back({std::sin(3.0 * p.t(k)), std::cos(2.0 * p.t(k))});
    FiniteRoughPath rp = pl_lift(p, vals, 0.5);
    CHECK(rp.chen_residual() < 1e-12);
    rp.perturb_levy(1, 4, 0, 1, 0.1);
    CHECK(rp.chen_residual() > 1e-3);
  }
}

TEST_CASE("fbm covariance and sampling") {
  SUBCASE("covariance formula") {
    std::vector<double> times{1.0, 2.0};
    auto cov = fbm_covariance(0.4, times);
    CHECK(cov[1] == doctest::Approx(0.5 * std::pow(2.0, 0.8)));
    CHECK(cov[1] == doctest::Approx(0.87055).epsilon(1e-4));
  }

  SUBCASE("determinism per seed") {
    auto a = fbm_sample(0.45, 64, 1.0, 42);
    auto b = fbm_sample(0.45, 64, 1.0, 42);
    auto c = fbm_sample(0.45, 64, 1.0, 43);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a[0] == 0.0);
  }

  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(fbm_sample(1.5, 16, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(fbm_sample(0.45, 0, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(fbm_sample(0.45, 5000, 1.0, 1), ConfigError);
  }

  SUBCASE("dilation consistency of the covariance") {
    std::vector<double> t1, t2;
    for (int k = 1; k <= 8; ++k) {
      t1.push_back(k / 8.0);
      t2.push_back(3.0 * k / 8.0);
    }
    auto c1 = fbm_covariance(0.45, t1);
    auto c2 = fbm_covariance(0.45, t2);
    double scale = std::pow(3.0, 2.0 * 0.45);
    for (std::size_t i = 0; i < c1.size(); ++i)
      CHECK(c2[i] == doctest::Approx(scale * c1[i]).epsilon(1e-12));
  }

  SUBCASE("H = 1/2 increments behave like Brownian motion") {
    // pooled over many seeds: disjoint increments uncorrelated, variance = gap
    const int kSeeds = 10000;
    const std::size_t n = 8;
    double sum_v = 0.0, sum_cross = 0.0;
    for (int s = 0; s < kSeeds; ++s) {
      auto w = fbm_sample(0.5, n, 1.0, 1000 + s);
      double d1 = w[2] - w[0], d2 = w[6] - w[4];
      sum_v += d1 * d1;
      sum_cross += d1 * d2;
    }
    double gap = 2.0 / n;
    double mean_v = sum_v / kSeeds;
    double mean_cross = sum_cross / kSeeds;
    // 3 standard errors of the variance estimate (chi^2: se ~ sqrt(2/N) var)
    CHECK(std::abs(mean_v - gap) < 3.0 * std::sqrt(2.0 / kSeeds) * gap);
    CHECK(std::abs(mean_cross) < 3.0 * gap / std::sqrt(double(kSeeds)));
  }
}
