#ifndef GCE_H
#define GCE_H

#include <stddef.h>

#if defined(__GNUC__)
#define GCE_API __attribute__((visibility("default")))
#else
#define GCE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gce_status {
    GCE_OK = 0,
    GCE_INVALID_ARGUMENT = 1,
    GCE_VALIDATION = 2,
    GCE_MISMATCH = 3,
    GCE_CAP_EXCEEDED = 4,
    GCE_INCOMPLETE = 5,
    GCE_BUDGET_EXHAUSTED = 6,
    GCE_NOT_FOUND = 7,
    GCE_ILLEGAL_MOVE = 8,
    GCE_OUT_OF_TURN = 9,
    GCE_UNSUPPORTED = 10,
    GCE_INTERNAL = 11
} gce_status;

typedef struct gce_system gce_system;
typedef struct gce_service gce_service;

GCE_API const char* gce_version(void);
GCE_API const char* gce_status_name(gce_status status);
/* Message of the last failure on the calling thread; empty after a success. */
GCE_API const char* gce_last_error(void);
/* Releases strings returned through out-parameters. */
GCE_API void gce_free(char* text);

/* System documents are JSON text in the file format. */
GCE_API gce_status gce_system_load(const char* document, gce_system** out);
GCE_API void gce_system_free(gce_system* system);
GCE_API gce_status gce_system_print(const gce_system* system, char** out);

/* Requests and results are JSON text:
   {"semantics": "...", "rounds": 3 | "inf", "claim": "x2 <= x1", "options": {...}}. */
GCE_API gce_status gce_solve(const gce_system* system, const char* request, char** result);
GCE_API gce_status gce_value(const gce_system* system, const char* request, char** result);
GCE_API gce_status gce_check(const gce_system* system, const char* request, char** result);
/* {"goal": "{x <= y} |-1 a(x) <= a(y)", "budget": 1000, "labels": ["a"]} */
GCE_API gce_status gce_prove(const char* request, char** result);
/* {file name: system document} */
GCE_API gce_status gce_examples(char** result);

GCE_API gce_status gce_service_new(gce_service** out);
GCE_API void gce_service_free(gce_service* service);
/* Dispatches one HTTP-style request; the response body is JSON text. */
GCE_API gce_status gce_service_handle(gce_service* service, const char* method, const char* path, const char* body,
                              int* http_status, char** response);

#ifdef __cplusplus
}
#endif

#endif
