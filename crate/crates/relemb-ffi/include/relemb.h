/* C interface to the relemb embedding pipeline. */

#ifndef RELEMB_H
#define RELEMB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; non-zero values signal failure.
 */
typedef enum relemb_status {
  relemb_status_Ok = 0,
  /**
   * Invalid arguments or configuration.
   */
  relemb_status_UsageError = 1,
  /**
   * Missing or malformed data.
   */
  relemb_status_DataError = 2,
  /**
   * Numerical divergence.
   */
  relemb_status_NumericError = 3,
  relemb_status_NullPointer = 4,
  relemb_status_InvalidUtf8 = 5,
  relemb_status_BufferTooSmall = 6,
  relemb_status_InternalError = 7,
} relemb_status;

/**
 * Analogy scoring functions.
 */
typedef enum relemb_measure {
  relemb_measure_CosAdd = 0,
  relemb_measure_CosMult = 1,
  relemb_measure_PairDiff = 2,
} relemb_measure;

/**
 * Benchmark file formats.
 */
typedef enum relemb_dataset_format {
  relemb_dataset_format_Google = 0,
  relemb_dataset_format_ChoiceTsv = 1,
} relemb_dataset_format;

/**
 * Opaque embedding-matrix handle.
 */
typedef struct RelembEmbeddings RelembEmbeddings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *relemb_version(void);

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *relemb_last_error_message(void);

/**
 * Loads an embedding file (binary or `word v1 ... vd` text, sniffed) and
 * stores the new handle in `out`. The handle must be released with
 * [`relemb_embeddings_free`].
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum relemb_status relemb_embeddings_open(const char *path, struct RelembEmbeddings **out);

/**
 * Releases a handle returned by [`relemb_embeddings_open`]. Null is a no-op.
 *
 * # Safety
 * `handle` must be null or a pointer returned by `relemb_embeddings_open`
 * that has not been freed yet.
 */
void relemb_embeddings_free(struct RelembEmbeddings *handle);

/**
 * Number of words in the vocabulary; 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
uintptr_t relemb_embeddings_word_count(const struct RelembEmbeddings *handle);

/**
 * Vector dimensionality; 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or a live handle.
 */
uintptr_t relemb_embeddings_dim(const struct RelembEmbeddings *handle);

/**
 * Whether `word` is in the vocabulary.
 *
 * # Safety
 * `handle` must be null or a live handle; `word` null or NUL-terminated.
 */
bool relemb_embeddings_contains(const struct RelembEmbeddings *handle, const char *word);

/**
 * Scores the candidate pair (c, d) against the stem pair (a, b) under one
 * measure and writes the value to `out_score`.
 *
 * # Safety
 * `handle` must be a live handle, the word arguments NUL-terminated
 * strings, and `out_score` a valid pointer.
 */
enum relemb_status relemb_analogy_score(const struct RelembEmbeddings *handle,
                                        enum relemb_measure measure,
                                        const char *a,
                                        const char *b,
                                        const char *c,
                                        const char *d,
                                        double epsilon,
                                        double *out_score);

/**
 * Answers a : b :: c : ? over the whole vocabulary and writes the top-ranked
 * word into `out_word` (NUL-terminated, at most `capacity` bytes).
 *
 * # Safety
 * `handle` must be a live handle, the word arguments NUL-terminated
 * strings, and `out_word` writable for `capacity` bytes.
 */
enum relemb_status relemb_analogy_top(const struct RelembEmbeddings *handle,
                                      enum relemb_measure measure,
                                      const char *a,
                                      const char *b,
                                      const char *c,
                                      double epsilon,
                                      char *out_word,
                                      uintptr_t capacity);

/**
 * Evaluates the embeddings on a benchmark file and writes the overall
 * accuracy in [0, 1] to `out_accuracy`.
 *
 * # Safety
 * `handle` must be a live handle, `dataset_path` a NUL-terminated string,
 * and `out_accuracy` a valid pointer.
 */
enum relemb_status relemb_evaluate_file(const struct RelembEmbeddings *handle,
                                        const char *dataset_path,
                                        enum relemb_dataset_format format,
                                        enum relemb_measure measure,
                                        double epsilon,
                                        double *out_accuracy);

/**
 * Runs one pipeline stage (`extract`, `ppmi`, `mine-pairs`, `init`,
 * `train`, `eval`) or `all` against a configuration file.
 *
 * # Safety
 * Both arguments must be valid NUL-terminated strings.
 */
enum relemb_status relemb_run_stage(const char *config_path, const char *stage);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELEMB_H */
