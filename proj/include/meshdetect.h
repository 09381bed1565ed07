#ifndef MESHDETECT_H
#define MESHDETECT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MD_API __declspec(dllexport)
#elif defined(__GNUC__) || defined(__clang__)
#define MD_API __attribute__((visibility("default")))
#else
#define MD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible function. They double as process
 * exit codes in the bundled CLI. */
#define MD_OK 0
#define MD_ERR_CONFIG 2
#define MD_ERR_RUNTIME 3

typedef struct md_config md_config;
typedef struct md_result md_result;

MD_API const char* md_version(void);

/* Message describing the calling thread's most recent failure; empty string
 * when the last call succeeded. The buffer is reused by later calls. */
MD_API const char* md_last_error(void);

/* Scenario configuration handle, created with every field at its default. */
MD_API md_config* md_config_create(void);
MD_API void md_config_free(md_config* cfg);

/* Loads "key = value" lines ('#' comments) over the current values. */
MD_API int md_config_load_file(md_config* cfg, const char* path);

/* Sets one field from its text form. Unknown keys and bad values fail with
 * MD_ERR_CONFIG. */
MD_API int md_config_set(md_config* cfg, const char* key, const char* value);

/* Current value of one field as text, or NULL for unknown keys. The string
 * stays valid until the next md_config_get or md_config_free on this
 * handle. */
MD_API const char* md_config_get(md_config* cfg, const char* key);

/* Runs one simulation. trace_path (optional, may be NULL) streams a JSONL
 * event log. On MD_OK, *out owns the run's metrics document. */
MD_API int md_run(const md_config* cfg, const char* trace_path, md_result** out);

/* Re-feeds a trace through monitoring and detection, yielding the same
 * metrics document as the run that wrote it. */
MD_API int md_replay(const char* trace_path, md_result** out);

/* Sweeps drop_prob over `probs` (NULL/0 selects 1.0, 0.9, ..., 0.1), with
 * `runs` independent simulations per probability spread over `jobs`
 * threads. */
MD_API int md_sweep(const md_config* cfg, const double* probs, size_t prob_count, uint32_t runs,
             uint32_t jobs, md_result** out);

/* JSON metrics for run/replay results; NULL for sweep results. */
MD_API const char* md_result_metrics(const md_result* res);

/* CSV table for sweep results; NULL for run/replay results. */
MD_API const char* md_result_csv(const md_result* res);

MD_API void md_result_free(md_result* res);

#ifdef __cplusplus
}
#endif

#endif /* MESHDETECT_H */
