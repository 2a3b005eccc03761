/* C API for the roughpde shared library.
 *
 * Opaque handles plus integer status codes; every entry point traps C++
 * exceptions and converts them to a status, with the message retrievable
 * via rpde_last_error() (thread-local).  Status values match the CLI exit
 * codes: 0 success, 1 configuration error, 2 experiment failure.
 */
#ifndef ROUGHPDE_H
#define ROUGHPDE_H

#ifdef __cplusplus
extern "C" {
#endif

#define RPDE_OK 0
#define RPDE_ERR_CONFIG 1
#define RPDE_FAIL_EXPERIMENT 2

typedef struct rpde_manifest rpde_manifest;
typedef struct rpde_report rpde_report;

const char* rpde_version(void);

/* Last error message for the calling thread; empty string when none. */
const char* rpde_last_error(void);

/* Manifest lifecycle.  Parsers return RPDE_OK or RPDE_ERR_CONFIG. */
int rpde_manifest_parse_file(const char* path, rpde_manifest** out);
int rpde_manifest_parse_string(const char* toml_text, rpde_manifest** out);
void rpde_manifest_free(rpde_manifest* m);

/* Canonical TOML serialization and digest of a manifest (owned by the
 * manifest handle; valid until it is freed). */
const char* rpde_manifest_toml(const rpde_manifest* m);
const char* rpde_manifest_digest(const rpde_manifest* m);

/* Executes the manifest (run or audit), writing artifacts under its output
 * directory.  On RPDE_OK / RPDE_FAIL_EXPERIMENT a report handle is returned;
 * on RPDE_ERR_CONFIG *out is NULL. */
int rpde_run(const rpde_manifest* m, rpde_report** out);

/* Sweep over one manifest key; comma-separated values. */
int rpde_sweep(const rpde_manifest* m, const char* axis, const char* comma_values,
               rpde_report** out);

/* Report access. */
int rpde_report_status(const rpde_report* r);
const char* rpde_report_summary(const rpde_report* r);
int rpde_report_headline_count(const rpde_report* r);
const char* rpde_report_headline_name(const rpde_report* r, int index);
double rpde_report_headline_value(const rpde_report* r, int index);
void rpde_report_free(rpde_report* r);

#ifdef __cplusplus
}
#endif

#endif /* ROUGHPDE_H */
