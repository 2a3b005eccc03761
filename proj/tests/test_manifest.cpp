#include <doctest.h>

#include <random>

#include "roughpde/manifest.hpp"
#include "roughpde/runner.hpp"

using namespace rpde;

TEST_CASE("manifest parsing") {
  const char* text = R"(
# a comment
command = "run"
scenario = "duality"
output_dir = "artifacts"

[grid]
d = 1
n = 256

[partition]
horizon = 1.0
steps = 4096

[sheet]
kind = "linear"
amplitude = 0.15
seed = 9

[problem]
diffusion = 0.0002

[tolerances]
drift = 1e-8
)";
  RunManifest m = RunManifest::parse_string(text);
  CHECK(m.scenario == "duality");
  CHECK(m.grid_n == 256);
  CHECK(m.steps == 4096);
  CHECK(m.amplitude == doctest::Approx(0.15));
  CHECK(m.seed == 9);
  CHECK(m.diffusion == doctest::Approx(0.0002));
  CHECK(m.tolerance("drift", 1.0) == doctest::Approx(1e-8));
  CHECK(m.tolerance("absent", 0.5) == 0.5);
}

TEST_CASE("unknown keys are rejected with the offending path") {
  CHECK_THROWS_WITH_AS(RunManifest::parse_string("scenario = \"heat\"\n[grid]\nnn = 3\n"),
                       doctest::Contains("grid.nn"), ConfigError);
  CHECK_THROWS_AS(RunManifest::parse_string("command = \"fly\"\nscenario = \"heat\"\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunManifest::parse_string("scenario = heat\n"), ConfigError);
  CHECK_THROWS_AS(RunManifest::parse_string("[grid\nn = 4\n"), ConfigError);
  CHECK_THROWS_AS(RunManifest::parse_string("scenario = \"x\"\nscenario = \"y\"\n"), ConfigError);
}

TEST_CASE("round trip is lossless") {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    RunManifest m;
    m.command = "run";
    m.scenario = trial % 2 ? "gradient" : "wong-zakai";
    m.grid_n = 64 + 2 * (trial % 7);
    m.steps = 100 + trial;
    m.horizon = u(eng);
    m.amplitude = u(eng);
    m.hurst = 0.35 + 0.01 * trial;
    m.seed = 1000 + trial;
    m.trivial_case = trial % 3 == 0;
    m.tolerances["chen"] = u(eng);
    RunManifest back = RunManifest::parse_string(m.to_toml());
    CHECK(back.to_toml() == m.to_toml());
    CHECK(back.digest() == m.digest());
    CHECK(back.horizon == m.horizon);
    CHECK(back.tolerances == m.tolerances);
  }
}

TEST_CASE("digest is stable and content sensitive") {
  RunManifest a, b;
  CHECK(a.digest() == b.digest());
  b.seed = 8;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("sweep axis setter") {
  RunManifest m;
  set_manifest_key(m, "partition.steps", "512");
  CHECK(m.steps == 512);
  set_manifest_key(m, "sheet.seed", "17");
  CHECK(m.seed == 17);
  CHECK_THROWS_AS(set_manifest_key(m, "no.such.key", "1"), ConfigError);
}
