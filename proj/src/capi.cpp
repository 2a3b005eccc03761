#include "roughpde/roughpde.h"

#include <sstream>
#include <string>

#include "roughpde/runner.hpp"

namespace {

thread_local std::string g_last_error;

void clear_error() { g_last_error.clear(); }

int trap(const std::exception& e, int code) {
  g_last_error = e.what();
  return code;
}

}  // namespace

struct rpde_manifest {
  rpde::RunManifest m;
  std::string toml_cache;
  std::string digest_cache;
};

struct rpde_report {
  rpde::RunOutcome outcome;
};

extern "C" {

const char* rpde_version(void) { return "roughpde 1.0.0"; }

const char* rpde_last_error(void) { return g_last_error.c_str(); }

int rpde_manifest_parse_file(const char* path, rpde_manifest** out) {
  clear_error();
  *out = nullptr;
  if (!path) {
    g_last_error = "null path";
    return RPDE_ERR_CONFIG;
  }
  try {
    auto* h = new rpde_manifest;
    h->m = rpde::RunManifest::parse_file(path);
    h->toml_cache = h->m.to_toml();
    h->digest_cache = h->m.digest();
    *out = h;
    return RPDE_OK;
  } catch (const std::exception& e) {
    return trap(e, RPDE_ERR_CONFIG);
  }
}

int rpde_manifest_parse_string(const char* toml_text, rpde_manifest** out) {
  clear_error();
  *out = nullptr;
  if (!toml_text) {
    g_last_error = "null manifest text";
    return RPDE_ERR_CONFIG;
  }
  try {
    auto* h = new rpde_manifest;
    h->m = rpde::RunManifest::parse_string(toml_text);
    h->toml_cache = h->m.to_toml();
    h->digest_cache = h->m.digest();
    *out = h;
    return RPDE_OK;
  } catch (const std::exception& e) {
    return trap(e, RPDE_ERR_CONFIG);
  }
}

void rpde_manifest_free(rpde_manifest* m) { delete m; }

const char* rpde_manifest_toml(const rpde_manifest* m) { return m->toml_cache.c_str(); }

const char* rpde_manifest_digest(const rpde_manifest* m) { return m->digest_cache.c_str(); }

int rpde_run(const rpde_manifest* m, rpde_report** out) {
  clear_error();
  *out = nullptr;
  try {
    auto* r = new rpde_report;
    r->outcome = rpde::run_manifest(m->m);
    *out = r;
    return r->outcome.status == 0 ? RPDE_OK : RPDE_FAIL_EXPERIMENT;
  } catch (const std::exception& e) {
    return trap(e, RPDE_ERR_CONFIG);
  }
}

int rpde_sweep(const rpde_manifest* m, const char* axis, const char* comma_values,
               rpde_report** out) {
  clear_error();
  *out = nullptr;
  if (!axis || !comma_values) {
    g_last_error = "null sweep axis or values";
    return RPDE_ERR_CONFIG;
  }
  try {
    std::vector<std::string> values;
    std::istringstream in(comma_values);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) values.push_back(item);
    }
    auto* r = new rpde_report;
    r->outcome = rpde::sweep_manifest(m->m, axis, values);
    *out = r;
    return r->outcome.status == 0 ? RPDE_OK : RPDE_FAIL_EXPERIMENT;
  } catch (const std::exception& e) {
    return trap(e, RPDE_ERR_CONFIG);
  }
}

int rpde_report_status(const rpde_report* r) { return r->outcome.status; }

const char* rpde_report_summary(const rpde_report* r) { return r->outcome.summary.c_str(); }

int rpde_report_headline_count(const rpde_report* r) {
  return static_cast<int>(r->outcome.report.headline.size());
}

const char* rpde_report_headline_name(const rpde_report* r, int index) {
  const auto& hl = r->outcome.report.headline;
  if (index < 0 || index >= static_cast<int>(hl.size())) return "";
  return hl[static_cast<std::size_t>(index)].first.c_str();
}

double rpde_report_headline_value(const rpde_report* r, int index) {
  const auto& hl = r->outcome.report.headline;
  if (index < 0 || index >= static_cast<int>(hl.size())) return 0.0;
  return hl[static_cast<std::size_t>(index)].second;
}

void rpde_report_free(rpde_report* r) { delete r; }

}  // extern "C"
