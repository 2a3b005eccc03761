// Acceptance suite: one pass/fail line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "roughpde/drivers.hpp"
#include "roughpde/experiments.hpp"

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name,
               const std::function<bool(std::string&)>& body) {
  auto start = std::chrono::steady_clock::now();
  std::string notes;
  bool ok = false;
  try {
    ok = body(notes);
  } catch (const std::exception& e) {
    notes = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %2d: %-28s (%s; %.1fs)\n", ok ? "PASS" : "FAIL", number,
              name.c_str(), notes.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.3g", key, v);
  return buf;
}

}  // namespace

int main() {
  using namespace rpde;

  criterion(1, "chen audits", [](std::string& notes) {
    PeriodicGrid g(1, 128);
    TimePartition part = TimePartition::uniform(1.0, 64);
    CoefficientSheet cs;
    cs.grid = g;
    cs.part = part;
    cs.alpha = 1.0;
    std::vector<Field> transport, zero, source;
    for (std::size_t k = 0; k < part.size(); ++k) {
      double t = part.t(k);
      transport.push_back(Field::from_fn(g, [t](double x) { return 0.5 * t * std::sin(x); }));
      zero.push_back(Field::from_fn(g, [t](double x) { return 0.25 * t * std::cos(x); }));
      source.push_back(Field::from_fn(g, [t](double x) { return 0.25 * t * std::sin(2 * x); }));
    }
    CoefficientSheet plain = cs;
    plain.transport = {transport};
    cs.transport = {transport};
    cs.zero_order = zero;
    cs.source = source;
    EnhancementTriad sheet = canonical_lift(plain);
    EnhancementTriad full = canonical_lift(cs);

    double gene = gene_chen_residual(full).max();
    auto probes = default_probes(g);
    double fwd = chen_residual_driver(build_B(sheet), probes).max_residual;
    double aff = chen_residual_driver(build_Q(full), probes).max_residual;
    double bwd = chen_residual_driver(build_P_backward(build_B(sheet)), probes).max_residual;
    double worst = std::max({gene, fwd, aff, bwd});
    notes = fmt("max_residual", worst);
    return worst <= 1e-10;
  });

  criterion(2, "levy-area bracket identity", [](std::string& notes) {
    PeriodicGrid g(1, 128);
    TimePartition lpart({0.0, 1.0, 2.0});
    FiniteRoughPath rp = pl_lift(lpart, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}, 0.45);
    SigmaField sigma;
    sigma.grid = g;
    sigma.comps = {{Field(g, 1.0), Field::from_fn(g, [](double x) { return std::sin(x); })}};
    BracketOperator br = bracket(build_B(sheet_from_sigma(sigma, rp)));
    Field expected = Field::from_fn(g, [](double x) { return -0.5 * std::cos(x); });
    double identity_err = linf_norm(br.coeff(0, 2)[0] - expected);

    TimePartition spart = TimePartition::uniform(1.0, 8);
    std::vector<std::vector<double>> vals;
    for (std::size_t k = 0; k < spart.size(); ++k) vals.push_back({std::sin(3.0 * spart.t(k))});
    SigmaField s1;
    s1.grid = g;
    s1.comps = {{Field::from_fn(g, [](double x) { return std::sin(x); })}};
    BracketOperator br1 = bracket(build_B(sheet_from_sigma(s1, pl_lift(spart, vals, 0.5))));
    double m1 = 0.0;
    for (std::size_t k = 1; k < spart.size(); ++k)
      m1 = std::max(m1, linf_norm(br1.coeff(0, k)[0]));
    notes = fmt("identity_err", identity_err) + " " + fmt("m1_sup", m1);
    return identity_err <= 1e-6 && m1 <= 1e-10;
  });

  criterion(3, "heat oracle", [](std::string& notes) {
    ExperimentReport rep = heat_experiment({});
    notes = fmt("match", rep.head_value("discrete_match")) + " " +
            fmt("t_order", rep.head_value("time_order")) + " " +
            fmt("x_order", rep.head_value("space_order"));
    return rep.pass;
  });

  criterion(4, "transport oracle", [](std::string& notes) {
    ExperimentReport rep = transport_experiment({});
    notes = fmt("t_order", rep.head_value("time_order"));
    return rep.pass && rep.head_value("time_order") >= 1.5;
  });

  criterion(5, "remainder scaling", [](std::string& notes) {
    ExperimentReport rep = remainder_experiment({});
    notes = fmt("nat", rep.head_value("nat_exponent")) + " " +
            fmt("ru", rep.head_value("ru_exponent"));
    return rep.pass;
  });

  criterion(6, "renormalization", [](std::string& notes) {
    RenormConfig id;
    id.beta = "identity";
    id.levels = 2;
    ExperimentReport rid = renorm_experiment(id);
    ExperimentReport rsq = renorm_experiment({});
    notes = fmt("identity", rid.head_value("max_discrepancy")) + " " +
            fmt("order", rsq.head_value("order")) + " " +
            fmt("agree", rsq.head_value("product_agreement"));
    return rid.pass && rsq.pass && rid.head_value("max_discrepancy") <= 1e-12 &&
           rsq.head_value("order") >= 0.8 && rsq.head_value("product_agreement") <= 1e-10;
  });

  criterion(7, "duality conservation", [](std::string& notes) {
    ExperimentReport rep = duality_experiment({});
    notes = fmt("drift", rep.head_value("relative_drift")) + " " +
            fmt("ratio", rep.head_value("halving_ratio"));
    return rep.pass && rep.head_value("relative_drift") <= 1e-8 &&
           rep.head_value("halving_ratio") >= 1.5;
  });

  criterion(8, "divergence-free uniqueness", [](std::string& notes) {
    ExperimentReport rep = divfree_experiment({});
    bool an_ok = beta_breakpoint(1) == std::exp(-1.0) && beta_breakpoint(2) == std::exp(-3.0) &&
                 beta_breakpoint(3) == std::exp(-6.0);
    notes = fmt("ratio", rep.head_value("ratio_0"));
    return rep.pass && an_ok;
  });

  criterion(9, "moser recursion", [](std::string& notes) {
    ExperimentReport rep = moser_experiment({});
    notes = fmt("example", rep.head_value("recursion_bound_example")) + " " +
            fmt("sup_z", rep.head_value("sup_z")) + " " +
            fmt("bound", rep.head_value("limit_bound"));
    return rep.pass && rep.head_value("recursion_bound_example") == 2048.0 &&
           rep.head_value("sup_z") <= rep.head_value("limit_bound");
  });

  criterion(10, "dual-weight positivity", [](std::string& notes) {
    DualWeightConfig trivial;
    trivial.trivial_case = true;
    trivial.steps = {128};
    ExperimentReport rt = dual_weight_experiment(trivial);
    ExperimentReport rep = dual_weight_experiment({});
    notes = fmt("inf_m", rep.head_value("inf_m")) + " " +
            fmt("ratio", rep.head_value("consistency_ratio_0")) + " " +
            fmt("t_plus", rep.head_value("t_plus"));
    return rt.pass && rep.pass && rep.head_value("inf_m") > 0.0;
  });

  criterion(11, "gradient envelope", [](std::string& notes) {
    ExperimentReport rep = gradient_experiment({});
    notes = fmt("t_star", rep.head_value("t_star")) + " " +
            fmt("mismatch", rep.head_value("scaling_mismatch"));
    return rep.pass && rep.head_value("scaling_mismatch") <= 0.2;
  });

  criterion(12, "wong-zakai stability", [](std::string& notes) {
    ExperimentReport rep = wong_zakai_experiment({});
    notes = fmt("ratio", rep.head_value("cauchy_ratio")) + " " +
            fmt("spread", rep.head_value("energy_spread"));
    return rep.pass && rep.head_value("cauchy_ratio") >= 1.2 &&
           rep.head_value("energy_spread") <= 0.10;
  });

  if (g_failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
