#include <doctest.h>

#include <cmath>

#include "roughpde/solver.hpp"

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

}  // namespace

TEST_CASE("heat stepping matches the discrete closed form") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(0.5, 32);
  ParabolicProblem pb;
  pb.grid = g;
  pb.part = part;
  pb.diffusion = DiffusionSpec::constant(g, 1.0);
  pb.datum = Field::from_fn(g, [](double x) { return std::sin(x); });
  Trajectory traj = solve(pb);

  double hx = g.h();
  double factor = 1.0 / (1.0 + part.dt(0) * (2.0 / (hx * hx)) * (1.0 - std::cos(hx)));
  double amp = 1.0;
  for (std::size_t k = 1; k <= part.steps(); ++k) {
    amp *= factor;
    CHECK(linf_norm(traj.fields[k] - pb.datum * amp) < 1e-13);
  }
}

TEST_CASE("zero data gives the zero trajectory") {
  PeriodicGrid g(1, 32);
  ParabolicProblem pb;
  pb.grid = g;
  pb.part = TimePartition::uniform(1.0, 16);
  pb.diffusion = DiffusionSpec::constant(g, 1.0);
  pb.datum = Field(g);
  Trajectory traj = solve(pb);
  for (const Field& f : traj.fields) CHECK(linf_norm(f) == 0.0);
}

TEST_CASE("pure transport against characteristics") {
  PeriodicGrid g(1, 256);
  TimePartition part = TimePartition::uniform(1.0, 256);
  EnhancementTriad sheet = linear_sheet(g, part, [](double) { return 1.0; }, 0.2);
  ParabolicProblem pb;
  pb.grid = g;
  pb.part = part;
  pb.diffusion = DiffusionSpec::none();
  pb.driver = build_B(sheet);
  pb.datum = Field::from_fn(g, [](double x) { return std::sin(x); });
  Trajectory traj = solve(pb);
  // u(t,x) = u0(x + X_t), X_t = 0.2 t
  double worst = 0.0;
  for (std::size_t k = 0; k <= part.steps(); ++k) {
    double shift = 0.2 * part.t(k);
    Field exact = Field::from_fn(g, [&](double x) { return std::sin(x + shift); });
    worst = std::max(worst, lp_norm(traj.fields[k] - exact, 2.0));
  }
  CHECK(worst < 5e-4);
}

TEST_CASE("mass conservation for div-free pure transport") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 64);
  EnhancementTriad sheet = linear_sheet(g, part, [](double) { return 1.0; }, 0.3);
  ParabolicProblem pb;
  pb.grid = g;
  pb.part = part;
  pb.diffusion = DiffusionSpec::none();
  pb.driver = build_B(sheet);
  pb.datum = Field::from_fn(g, [](double x) { return std::sin(x) + 0.2 * std::cos(3 * x); });
  Trajectory traj = solve(pb);
  double mass0 = l2_inner(traj.fields[0], Field(g, 1.0));
  for (const Field& f : traj.fields)
    CHECK(std::abs(l2_inner(f, Field(g, 1.0)) - mass0) < 1e-12);
}

TEST_CASE("linearity of the linear solver") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(0.5, 32);
  EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); }, 0.4);
  auto run = [&](const Field& datum) {
    ParabolicProblem pb;
    pb.grid = g;
    pb.part = part;
    pb.diffusion = DiffusionSpec::constant(g, 0.7);
    pb.driver = build_B(sheet);
    pb.datum = datum;
    return solve(pb);
  };
  Field u0 = Field::from_fn(g, [](double x) { return std::sin(x); });
  Field v0 = Field::from_fn(g, [](double x) { return std::cos(2 * x); });
  Field combo = u0 * 2.0 + v0 * -0.5;
  Trajectory a = run(u0), b = run(v0), c = run(combo);
  for (std::size_t k = 0; k <= part.steps(); ++k)
    CHECK(linf_norm(c.fields[k] - (a.fields[k] * 2.0 + b.fields[k] * -0.5)) < 1e-10);
}

TEST_CASE("backward solve is the exact reversal of the forward solve") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 32);
  EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return 1.0 + 0.4 * std::sin(x); });
  Driver b = build_B(sheet);

  // forward problem for v, then the backward problem whose reversal is that
  // forward problem; the trajectories must agree field by field
  ParabolicProblem fwd;
  fwd.grid = g;
  fwd.part = part;
  fwd.diffusion = DiffusionSpec::constant(g, 0.5);
  fwd.driver = b.reflect().reflect();  // same driver through the reflection pair
  fwd.datum = Field::from_fn(g, [](double x) { return 1.0 + 0.3 * std::cos(x); });
  Trajectory vf = solve(fwd);

  ParabolicProblem bwd = fwd;
  bwd.driver = b.reflect();
  bwd.backward = true;
  Trajectory vb = solve(bwd);
  for (std::size_t k = 0; k <= part.steps(); ++k)
    CHECK(linf_norm(vb.fields[k] - vf.fields[part.steps() - k]) < 1e-12);
}

TEST_CASE("CFL substepping and stability errors") {
  PeriodicGrid g(1, 64);
  TimePartition coarse = TimePartition::uniform(1.0, 4);
  TimePartition fine = coarse.refine(4);  // driver resolution 64 steps
  CoefficientSheet cs;
  cs.grid = g;
  cs.part = fine;
  cs.alpha = 1.0;
  std::vector<Field> series;
  for (std::size_t k = 0; k < fine.size(); ++k) series.push_back(Field(g, 2.0 * fine.t(k)));
  cs.transport.push_back(std::move(series));
  EnhancementTriad sheet = canonical_lift(cs);

  ParabolicProblem pb;
  pb.grid = g;
  pb.part = coarse;  // steps violate the CFL bound; substeps re-query the sheet
  pb.diffusion = DiffusionSpec::none();
  pb.driver = build_B(sheet);
  pb.datum = Field::from_fn(g, [](double x) { return std::sin(x); });
  Trajectory traj = solve(pb);
  CHECK(traj.diag[0].substeps > 1);
  double shift = 2.0;  // X_T = 2 T = 2
  Field exact = Field::from_fn(g, [&](double x) { return std::sin(x + shift); });
  CHECK(lp_norm(traj.fields.back() - exact, 2.0) < 0.05);

  // stepping on the driver partition itself with a hard violation errors out
  ParabolicProblem bad = pb;
  bad.part = fine;
  bad.driver = build_B(linear_sheet(g, fine, [](double) { return 1.0; }, 40.0));
  CHECK_THROWS_AS((void)solve(bad), NumericError);
}

TEST_CASE("remainder ledger on a smooth pure-transport run") {
  PeriodicGrid g(1, 64);
  TimePartition part = TimePartition::uniform(1.0, 256);
  EnhancementTriad sheet = linear_sheet(g, part, [](double x) { return std::sin(x); }, 0.4);
  ParabolicProblem pb;
  pb.grid = g;
  pb.part = part;
  pb.diffusion = DiffusionSpec::none();
  pb.driver = build_B(sheet);
  pb.datum = Field::from_fn(g, [](double x) { return std::sin(x); });
  Trajectory traj = solve(pb);
  RemainderLedger ledger = remainder_ledger(traj, pb, 3);
  CHECK(ledger.nat_fit.exponent > 2.7);
  CHECK(ledger.ru_fit.exponent > 1.8);
  CHECK(ledger.nat_fit.exponent > 1.0);  // superlinearity invariant

  SUBCASE("pure increments with no driver have zero remainder") {
    ParabolicProblem free;
    free.grid = g;
    free.part = part;
    free.diffusion = DiffusionSpec::none();
    free.datum = pb.datum;
    Trajectory constant = solve(free);
    RemainderLedger zero = remainder_ledger(constant, free, 3);
    for (const auto& s : zero.samples) CHECK(s.nat_w32 < 1e-14);
  }
}

TEST_CASE("rough gronwall certification") {
  TimePartition part = TimePartition::uniform(1.0, 32);
  SUBCASE("exponential path under the mean value hypothesis") {
    std::vector<double> e;
    for (std::size_t k = 0; k < part.size(); ++k) e.push_back(std::exp(part.t(k)));
    GronwallReport rep =
        rough_gronwall_certify(e, Control::power(part, 1.0), 1.0, 1.0, nullptr, 0.5);
    CHECK(rep.hypothesis_holds);
    CHECK(rep.bound_satisfied);
  }
  SUBCASE("constant path works for any constant") {
    std::vector<double> e(part.size(), 2.5);
    GronwallReport rep =
        rough_gronwall_certify(e, Control::power(part, 1.0), 1.0, 0.5, nullptr, 10.0);
    CHECK(rep.hypothesis_holds);
    CHECK(rep.bound_satisfied);
  }
  SUBCASE("violations are reported, not thrown") {
    std::vector<double> e(part.size(), 0.0);
    e.back() = 10.0;  // jump violating the increment bound
    GronwallReport rep =
        rough_gronwall_certify(e, Control::power(part, 1.0), 1.0, 2.0, nullptr, 1.0);
    CHECK(!rep.hypothesis_holds);
    CHECK(!rep.violations.empty());
  }
}

TEST_CASE("lps gate") {
  CHECK(lps_check(INFINITY, 2.0, 1, true));
  CHECK(!lps_check(2.0, 1.0, 1, true));
  CHECK(lps_check(2.0, 1.0, 1, false));
  CHECK(!lps_check(1.0, 100.0, 1, true));
  CHECK_THROWS_AS(lps_check(0.5, 2.0, 1, true), ConfigError);
}

TEST_CASE("moser recursion arithmetic") {
  CHECK(moser_recursion_bound(2.0, 2.0, 2.0, 1.0, 3) == 2048.0);
  // exact unroll meets the bound with equality
  double u1 = 2.0, u2 = 2.0 * 2.0 * u1 * u1, u3 = 2.0 * 4.0 * u2 * u2;
  CHECK(u1 == 2.0);
  CHECK(u2 == 16.0);
  CHECK(u3 == 2048.0);
  // tau = C = 1 collapses to pure exponentiation
  CHECK(moser_recursion_bound(1.0, 1.0, 2.0, 3.0, 4) == doctest::Approx(std::pow(3.0, 16.0)));
}

TEST_CASE("bihari envelope") {
  SUBCASE("closed form blow-up time") {
    BihariEnvelope env = bihari_envelope(0.0, 1.0, 10.0);
    CHECK(env.y0 == 1.0);
    CHECK(env.t_blowup == doctest::Approx(0.5));
    CHECK(env.t_star == doctest::Approx(0.45));
    CHECK(env(0.0) == doctest::Approx(1.0));
  }
  SUBCASE("vanishing constant keeps the whole horizon") {
    BihariEnvelope env = bihari_envelope(1.0, 1e-9, 2.0);
    CHECK(env.t_star == doctest::Approx(2.0));
    CHECK(env(2.0) == doctest::Approx(env.y0).epsilon(1e-6));
  }
}
