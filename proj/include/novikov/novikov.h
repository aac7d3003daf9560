/* Public C interface of the novikov library. All handles are opaque; every
 * call reports a status code and stores a message on the context. Strings
 * returned through char** must be released with nv_string_free. */
#ifndef NOVIKOV_NOVIKOV_H
#define NOVIKOV_NOVIKOV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NV_API __declspec(dllexport)
#elif defined(NOVIKOV_BUILDING_LIBRARY)
#define NV_API __attribute__((visibility("default")))
#else
#define NV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nv_status {
  NV_OK = 0,
  NV_NOT_FOUND = 1,      /* search exhausted its bounds */
  NV_BUDGET = 2,         /* budget cap hit or retry cap reached */
  NV_INCONSISTENT = 3,   /* campaign found a fatal inconsistency */
  NV_REJECTED = 4,       /* certificate rejected */
  NV_USAGE = 64,
  NV_INVALID_INPUT = 65,
  NV_INTERNAL = 70
} nv_status;

typedef struct nv_context nv_context;
typedef struct nv_complex nv_complex;
typedef struct nv_certificate nv_certificate;

NV_API const char *nv_version(void);
NV_API const char *nv_status_name(int status);

NV_API nv_context *nv_context_new(void);
NV_API void nv_context_free(nv_context *ctx);
/* Message of the last failing call on this context ("" if none). */
NV_API const char *nv_last_error(const nv_context *ctx);
/* Error kind of the last failing call, e.g. "wrong-complex" ("" if none). */
NV_API const char *nv_last_error_kind(const nv_context *ctx);
NV_API void nv_string_free(char *s);
/* Lowercase hex SHA-256 of a byte buffer. */
NV_API int nv_sha256(nv_context *ctx, const void *data, size_t len, char **hex_out);

NV_API int nv_fixture_names(nv_context *ctx, char **json_out);
NV_API int nv_complex_from_fixture(nv_context *ctx, const char *name, nv_complex **out);
NV_API int nv_complex_from_json(nv_context *ctx, const char *json, nv_complex **out);
NV_API void nv_complex_free(nv_complex *c);
NV_API int nv_complex_to_json(nv_context *ctx, const nv_complex *c, char **json_out);
NV_API int nv_complex_hash(nv_context *ctx, const nv_complex *c, char **hash_out);
NV_API int nv_complex_euler(nv_context *ctx, const nv_complex *c, int64_t *out);

/* Searches for a certificate. params_json holds {"character": [...],
 * "degree": k, "word_length": L, "window": W?, "retries": n?}. On NV_OK *out
 * receives the certificate; on NV_NOT_FOUND it is set to NULL. The search
 * report is written to report_out when that is non-NULL. */
NV_API int nv_search_contraction(nv_context *ctx, const nv_complex *c, const char *params_json,
                                 nv_certificate **out, char **report_out);
NV_API int nv_certificate_from_json(nv_context *ctx, const char *json, nv_certificate **out);
NV_API int nv_certificate_to_json(nv_context *ctx, const nv_certificate *cert, char **json_out);
NV_API void nv_certificate_free(nv_certificate *cert);
/* NV_OK if accepted, NV_REJECTED otherwise; verdict JSON is optional. */
NV_API int nv_verify_certificate(nv_context *ctx, const nv_certificate *cert, const nv_complex *c,
                                 char **verdict_out);

/* JSON request/response entry point used by the command line tool.
 * Commands: search, verify, rebuild, witness, campaign, transfer,
 * ore-approx, common-multiple, l2-quotients, euler, fixtures. The returned
 * status is NV_OK or the command-specific outcome code. */
NV_API int nv_run(nv_context *ctx, const char *command, const char *request_json,
                  char **response_out);

#ifdef __cplusplus
}
#endif

#endif
