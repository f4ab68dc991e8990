#ifndef PNTLAB_H
#define PNTLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PNTLAB_API __declspec(dllexport)
#else
#define PNTLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes match the CLI exit codes. */
typedef enum pntlab_status {
  PNTLAB_OK = 0,
  PNTLAB_ERR_INTERNAL = 1,
  PNTLAB_ERR_INVALID_ARGUMENT = 2,
  PNTLAB_ERR_RESOURCE = 3,
  PNTLAB_ERR_NOT_FOUND = 4,
  PNTLAB_ERR_CHAIN_VIOLATION = 5
} pntlab_status;

typedef struct pntlab_table pntlab_table;

PNTLAB_API const char* pntlab_version(void);
/* Message for the last failing call on this thread; "" if none. */
PNTLAB_API const char* pntlab_last_error(void);

/* kind: "mobius", "mangoldt", "log" or "lambda2". */
PNTLAB_API pntlab_status pntlab_table_build(const char* kind, uint64_t limit,
                                            pntlab_table** out);
PNTLAB_API pntlab_status pntlab_table_load(const char* path, pntlab_table** out);
PNTLAB_API pntlab_status pntlab_table_save(const pntlab_table* table,
                                           const char* path);
PNTLAB_API void pntlab_table_free(pntlab_table* table);

PNTLAB_API pntlab_status pntlab_table_limit(const pntlab_table* table,
                                            uint64_t* out);
/* Writes the kind name (NUL-terminated) into buf of size len. */
PNTLAB_API pntlab_status pntlab_table_kind(const pntlab_table* table, char* buf,
                                           size_t len);
PNTLAB_API pntlab_status pntlab_table_value(const pntlab_table* table, uint64_t n,
                                            double* out);
PNTLAB_API pntlab_status pntlab_table_checksum(const pntlab_table* table,
                                               uint64_t* out);
/* Dirichlet convolution; both tables must share a limit. */
PNTLAB_API pntlab_status pntlab_table_convolve(const pntlab_table* f,
                                               const pntlab_table* g,
                                               pntlab_table** out);

PNTLAB_API pntlab_status pntlab_mertens(const pntlab_table* mu, uint64_t x,
                                        int64_t* out);
PNTLAB_API pntlab_status pntlab_selberg_ratio(const pntlab_table* lambda2,
                                              uint64_t n, double* out);
PNTLAB_API pntlab_status pntlab_badness(const pntlab_table* mu, uint64_t p,
                                        uint64_t n, double epsilon,
                                        double* badness, int* is_good);
PNTLAB_API pntlab_status pntlab_log_avg_discrepancy(const pntlab_table* mu,
                                                    uint64_t n, double* out);

/* Runs the command line tool in-process. *output and *diagnostics are
   allocated and must be released with pntlab_string_free. */
PNTLAB_API pntlab_status pntlab_run(int argc, const char* const* argv,
                                    int* exit_code, char** output,
                                    char** diagnostics);
PNTLAB_API void pntlab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
