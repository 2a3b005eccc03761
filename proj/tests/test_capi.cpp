#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "roughpde/roughpde.h"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("c api end to end") {
  std::string outdir = std::filesystem::temp_directory_path() / "rpde_capi_test";
  std::filesystem::remove_all(outdir);

  std::string toml =
      "command = \"run\"\n"
      "scenario = \"heat\"\n"
      "output_dir = \"" + outdir + "\"\n";

  rpde_manifest* m = nullptr;
  REQUIRE(rpde_manifest_parse_string(toml.c_str(), &m) == RPDE_OK);
  CHECK(std::string(rpde_manifest_digest(m)).size() == 16);
  CHECK(std::string(rpde_manifest_toml(m)).find("scenario = \"heat\"") != std::string::npos);

  rpde_report* r = nullptr;
  REQUIRE(rpde_run(m, &r) == RPDE_OK);
  CHECK(rpde_report_status(r) == 0);
  CHECK(std::string(rpde_report_summary(r)).find("status=pass") != std::string::npos);
  CHECK(rpde_report_headline_count(r) >= 3);
  bool found = false;
  for (int i = 0; i < rpde_report_headline_count(r); ++i)
    if (std::string(rpde_report_headline_name(r, i)) == "discrete_match") {
      found = true;
      CHECK(rpde_report_headline_value(r, i) < 1e-12);
    }
  CHECK(found);
  rpde_report_free(r);
  rpde_manifest_free(m);

  // artifacts landed, with the digest in the csv header
  std::string report = read_file(outdir + "/report.csv");
  CHECK(report.rfind("# manifest_digest=", 0) == 0);
  CHECK(std::filesystem::exists(outdir + "/summary.txt"));
  CHECK(std::filesystem::exists(outdir + "/trajectory.csv"));
  CHECK(std::filesystem::exists(outdir + "/heatmap.pgm"));
  CHECK(std::filesystem::exists(outdir + "/ledger.csv"));
  std::filesystem::remove_all(outdir);
}

TEST_CASE("c api error paths") {
  rpde_manifest* m = nullptr;
  CHECK(rpde_manifest_parse_string("scenario = \"heat\"\n[grid]\nbogus = 1\n", &m) ==
        RPDE_ERR_CONFIG);
  CHECK(m == nullptr);
  CHECK(std::string(rpde_last_error()).find("bogus") != std::string::npos);

  CHECK(rpde_manifest_parse_string("", &m) == RPDE_ERR_CONFIG);  // missing scenario? empty text
  CHECK(std::string(rpde_last_error()).size() > 0);

  CHECK(rpde_manifest_parse_file("/no/such/file.toml", &m) == RPDE_ERR_CONFIG);
}

TEST_CASE("c api determinism: identical manifests produce identical artifacts") {
  std::string out = std::filesystem::temp_directory_path() / "rpde_det";
  std::filesystem::remove_all(out);
  auto run_once = [&] {
    std::string toml =
        "command = \"run\"\nscenario = \"moser\"\noutput_dir = \"" + out + "\"\n" +
        "[partition]\nsteps = 64\n[grid]\nn = 64\n";
    rpde_manifest* m = nullptr;
    REQUIRE(rpde_manifest_parse_string(toml.c_str(), &m) == RPDE_OK);
    rpde_report* r = nullptr;
    REQUIRE(rpde_run(m, &r) == RPDE_OK);
    rpde_report_free(r);
    rpde_manifest_free(m);
  };
  run_once();
  std::string report = read_file(out + "/report.csv");
  std::string headline = read_file(out + "/headline.csv");
  run_once();
  CHECK(read_file(out + "/report.csv") == report);
  CHECK(read_file(out + "/headline.csv") == headline);
  std::filesystem::remove_all(out);
}
