#ifndef RDFSTAR2PG_H
#define RDFSTAR2PG_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Rdfstar2pgStatus {
  RDFSTAR2PG_STATUS_OK = 0,
  RDFSTAR2PG_STATUS_NULL_POINTER = 1,
  RDFSTAR2PG_STATUS_INVALID_UTF8 = 2,
  RDFSTAR2PG_STATUS_PARSE_ERROR = 3,
  RDFSTAR2PG_STATUS_INVALID_ARGUMENT = 4,
  RDFSTAR2PG_STATUS_EXPORT_ERROR = 5,
  RDFSTAR2PG_STATUS_PANIC = 6,
} Rdfstar2pgStatus;

/**
 * Transformation settings.
 */
typedef struct Rdfstar2pgConfig Rdfstar2pgConfig;

/**
 * Parsed RDF-star dataset.
 */
typedef struct Rdfstar2pgDataset Rdfstar2pgDataset;

/**
 * Property graph produced by a transformation.
 */
typedef struct Rdfstar2pgGraph Rdfstar2pgGraph;

/**
 * Statement-level outcome of a transformation.
 */
typedef struct Rdfstar2pgReport Rdfstar2pgReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or NULL. The
 * pointer stays valid until the next call into this library on the same
 * thread.
 */
const char *rdfstar2pg_last_error(void);

/**
 * Parses a NUL-terminated Turtle-star / TriG-star document.
 *
 * # Safety
 * `input` must be a valid C string and `out` a valid pointer.
 */
enum Rdfstar2pgStatus rdfstar2pg_parse(const char *input, struct Rdfstar2pgDataset **out);

/**
 * Number of source statements, counting nested quoted RDF-star statements
 * and not counting collection cells. Returns 0 for NULL.
 *
 * # Safety
 * `dataset` must be NULL or a live dataset handle.
 */
size_t rdfstar2pg_dataset_statement_count(const struct Rdfstar2pgDataset *dataset);

/**
 * # Safety
 * `dataset` must be NULL or a handle from [`rdfstar2pg_parse`] not yet freed.
 */
void rdfstar2pg_dataset_free(struct Rdfstar2pgDataset *dataset);

/**
 * Creates a configuration for `approach` ("rpt", "pgt" or "hybrid") with
 * default policies.
 *
 * # Safety
 * `approach` must be a valid C string and `out` a valid pointer.
 */
enum Rdfstar2pgStatus rdfstar2pg_config_new(const char *approach, struct Rdfstar2pgConfig **out);

/**
 * Sets one policy. Keys and values match the command-line flags:
 * "datatype-policy", "rdf-type-policy", "named-graph-policy",
 * "list-policy", "multi-value-policy" and "kind-labels" ("true"/"false").
 *
 * # Safety
 * `config` must be a live config handle; `key` and `value` valid C strings.
 */
enum Rdfstar2pgStatus rdfstar2pg_config_set(struct Rdfstar2pgConfig *config,
                                            const char *key,
                                            const char *value);

/**
 * # Safety
 * `config` must be NULL or a handle from [`rdfstar2pg_config_new`] not yet freed.
 */
void rdfstar2pg_config_free(struct Rdfstar2pgConfig *config);

/**
 * Transforms `dataset` into a property graph. `out_report` may be NULL when
 * the report is not needed.
 *
 * # Safety
 * `dataset` and `config` must be live handles; `out_graph` a valid pointer;
 * `out_report` NULL or a valid pointer.
 */
enum Rdfstar2pgStatus rdfstar2pg_transform(const struct Rdfstar2pgDataset *dataset,
                                           const struct Rdfstar2pgConfig *config,
                                           struct Rdfstar2pgGraph **out_graph,
                                           struct Rdfstar2pgReport **out_report);

/**
 * # Safety
 * `graph` must be NULL or a live graph handle.
 */
size_t rdfstar2pg_graph_node_count(const struct Rdfstar2pgGraph *graph);

/**
 * # Safety
 * `graph` must be NULL or a live graph handle.
 */
size_t rdfstar2pg_graph_edge_count(const struct Rdfstar2pgGraph *graph);

/**
 * Serializes `graph` as "json", "graphml" or "cypher".
 *
 * # Safety
 * `graph` must be a live graph handle, `format` a valid C string and `out`
 * a valid pointer.
 */
enum Rdfstar2pgStatus rdfstar2pg_graph_export(const struct Rdfstar2pgGraph *graph,
                                              const char *format,
                                              char **out);

/**
 * # Safety
 * `graph` must be NULL or a handle from [`rdfstar2pg_transform`] not yet freed.
 */
void rdfstar2pg_graph_free(struct Rdfstar2pgGraph *graph);

/**
 * # Safety
 * `report` must be NULL or a live report handle.
 */
size_t rdfstar2pg_report_total(const struct Rdfstar2pgReport *report);

/**
 * # Safety
 * `report` must be NULL or a live report handle.
 */
size_t rdfstar2pg_report_converted(const struct Rdfstar2pgReport *report);

/**
 * 1 when nothing was reported partial, ignored or in error; 0 otherwise
 * (including NULL).
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
int32_t rdfstar2pg_report_is_lossless(const struct Rdfstar2pgReport *report);

/**
 * # Safety
 * `report` must be a live report handle and `out` a valid pointer.
 */
enum Rdfstar2pgStatus rdfstar2pg_report_to_json(const struct Rdfstar2pgReport *report, char **out);

/**
 * # Safety
 * `report` must be NULL or a handle from [`rdfstar2pg_transform`] not yet freed.
 */
void rdfstar2pg_report_free(struct Rdfstar2pgReport *report);

/**
 * Runs the built-in corpus for a comma-separated list of approaches and
 * returns the report as JSON. `all_passed` may be NULL.
 *
 * # Safety
 * `approaches` must be a valid C string, `out` a valid pointer and
 * `all_passed` NULL or a valid pointer.
 */
enum Rdfstar2pgStatus rdfstar2pg_conformance_json(const char *approaches,
                                                  char **out,
                                                  int32_t *all_passed);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void rdfstar2pg_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDFSTAR2PG_H */
