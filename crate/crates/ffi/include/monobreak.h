#ifndef MONOBREAK_H
#define MONOBREAK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum MbStatus {
  MB_STATUS_OK = 0,
  MB_STATUS_NULL_POINTER = 1,
  MB_STATUS_INVALID_UTF8 = 2,
  // Project directory or input file missing or unreadable.
  MB_STATUS_IO = 3,
  // Malformed ops data or other invalid input.
  MB_STATUS_INVALID_INPUT = 4,
  // Invalid scanner configuration file.
  MB_STATUS_CONFIG = 5,
  // Inconsistent options, such as static-only together with ops data.
  MB_STATUS_USAGE = 6,
  // Internal panic caught at the boundary.
  MB_STATUS_PANIC = 7,
} MbStatus;

typedef enum MbFormat {
  MB_FORMAT_TEXT = 0,
  MB_FORMAT_JSON = 1,
  MB_FORMAT_DOT = 2,
} MbFormat;

// A finished analysis.
typedef struct MbAnalysis MbAnalysis;

// Analysis settings.
typedef struct MbOptions MbOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into this library on the same thread.
const char *mb_last_error_message(void);

// Library version as a static string.
const char *mb_version(void);

// New options with defaults: static analysis, weighted betweenness,
// best-modularity service count.
struct MbOptions *mb_options_new(void);

// # Safety
// `opts` must be null or a pointer from [`mb_options_new`] not yet freed.
void mb_options_free(struct MbOptions *opts);

// Sets the ops-JSON file to read. Null clears it.
//
// # Safety
// `opts` must be a live options handle; `path` null or a NUL-terminated string.
enum MbStatus mb_options_set_ops_path(struct MbOptions *opts, const char *path);

// # Safety
// `opts` must be a live options handle.
enum MbStatus mb_options_set_static_only(struct MbOptions *opts, bool static_only);

// Requested number of services; 0 selects the best-modularity cut.
//
// # Safety
// `opts` must be a live options handle.
enum MbStatus mb_options_set_services(struct MbOptions *opts, size_t services);

// # Safety
// `opts` must be a live options handle.
enum MbStatus mb_options_set_unweighted_betweenness(struct MbOptions *opts, bool unweighted);

// Loads scanner settings (base-class names, ignored directories) from a
// TOML file.
//
// # Safety
// `opts` must be a live options handle; `path` a NUL-terminated string.
enum MbStatus mb_options_load_config(struct MbOptions *opts, const char *path);

// Analyzes the project at `project_dir`. `opts` may be null for defaults.
// On success stores a new handle in `*out`; on failure `*out` is null.
//
// # Safety
// `project_dir` must be a NUL-terminated string, `opts` null or a live
// options handle, and `out` a valid pointer to writable storage.
enum MbStatus mb_analyze(const char *project_dir,
                         const struct MbOptions *opts,
                         struct MbAnalysis **out);

// Renders the report (text or JSON) or the dependency graph (DOT). The
// string stored in `*out` must be released with [`mb_string_free`].
//
// # Safety
// `analysis` must be a live analysis handle and `out` a valid pointer.
enum MbStatus mb_analysis_render(const struct MbAnalysis *analysis,
                                 enum MbFormat format,
                                 char **out);

// Number of proposed services, or 0 for a null handle.
//
// # Safety
// `analysis` must be null or a live analysis handle.
size_t mb_analysis_service_count(const struct MbAnalysis *analysis);

// Number of warnings collected during the analysis, or 0 for a null handle.
//
// # Safety
// `analysis` must be null or a live analysis handle.
size_t mb_analysis_warning_count(const struct MbAnalysis *analysis);

// # Safety
// `analysis` must be null or a handle from [`mb_analyze`] not yet freed.
void mb_analysis_free(struct MbAnalysis *analysis);

// # Safety
// `s` must be null or a string from [`mb_analysis_render`] not yet freed.
void mb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MONOBREAK_H */
