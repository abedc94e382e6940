#ifndef ISPA_H
#define ISPA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum IspaStatus {
  ISPA_STATUS_OK = 0,
  ISPA_STATUS_NULL_POINTER = 1,
  ISPA_STATUS_INVALID_ARGUMENT = 2,
  ISPA_STATUS_IO = 3,
  ISPA_STATUS_FORMAT = 4,
  ISPA_STATUS_PARSE = 5,
  ISPA_STATUS_DIM_MISMATCH = 6,
  ISPA_STATUS_PANIC = 7,
} IspaStatus;

typedef enum IspaVariant {
  ISPA_VARIANT_RAW = 0,
  ISPA_VARIANT_SEG = 1,
  ISPA_VARIANT_PHN = 2,
} IspaVariant;

/**
 * Trained codebook, optionally with phone labels.
 */
typedef struct IspaCodebook IspaCodebook;

/**
 * Mono audio buffer.
 */
typedef struct IspaWaveform IspaWaveform;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ispa_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ispa_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void ispa_string_free(char *s);

/**
 * Copies `n` samples into a new waveform.
 *
 * # Safety
 * `samples` must point to `n` readable doubles; `out` must be writable.
 */
enum IspaStatus ispa_waveform_new(const double *samples,
                                  size_t n,
                                  uint32_t sample_rate,
                                  struct IspaWaveform **out);

/**
 * Reads a WAV file (channels are averaged).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum IspaStatus ispa_waveform_load(const char *path, struct IspaWaveform **out);

/**
 * Writes a 16-bit WAV file.
 *
 * # Safety
 * `w` must be a live waveform handle; `path` a NUL-terminated string.
 */
enum IspaStatus ispa_waveform_save(const struct IspaWaveform *w, const char *path);

/**
 * # Safety
 * `w` must be a live waveform handle.
 */
size_t ispa_waveform_len(const struct IspaWaveform *w);

/**
 * # Safety
 * `w` must be a live waveform handle.
 */
uint32_t ispa_waveform_sample_rate(const struct IspaWaveform *w);

/**
 * Borrowed view of the samples, valid while the handle lives.
 *
 * # Safety
 * `w` must be a live waveform handle.
 */
const double *ispa_waveform_samples(const struct IspaWaveform *w);

/**
 * # Safety
 * `w` must be NULL or a handle from this library that has not been freed.
 */
void ispa_waveform_free(struct IspaWaveform *w);

/**
 * Loads a codebook JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum IspaStatus ispa_codebook_load(const char *path, struct IspaCodebook **out);

/**
 * Parses a codebook from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum IspaStatus ispa_codebook_from_json(const char *json, struct IspaCodebook **out);

/**
 * # Safety
 * `cb` must be a live codebook handle.
 */
size_t ispa_codebook_k(const struct IspaCodebook *cb);

/**
 * # Safety
 * `cb` must be a live codebook handle.
 */
size_t ispa_codebook_dim(const struct IspaCodebook *cb);

/**
 * # Safety
 * `cb` must be NULL or a handle from this library that has not been freed.
 */
void ispa_codebook_free(struct IspaCodebook *cb);

/**
 * Acoustic transcription with default settings; `lambda <= 0` keeps the
 * default penalty. Writes space-separated tokens to `*out_text`.
 *
 * # Safety
 * `w` must be a live waveform handle; `out_text` must be writable.
 */
enum IspaStatus ispa_transcribe_a(const struct IspaWaveform *w, double lambda, char **out_text);

/**
 * Feature transcription of audio through the built-in MFCC front end.
 * `lambda <= 0` keeps the default penalty.
 *
 * # Safety
 * `w` and `cb` must be live handles; `out_text` must be writable.
 */
enum IspaStatus ispa_transcribe_f(const struct IspaWaveform *w,
                                  const struct IspaCodebook *cb,
                                  enum IspaVariant variant,
                                  double lambda,
                                  char **out_text);

/**
 * Feature transcription of precomputed row-major features
 * (`n_frames * dim` doubles).
 *
 * # Safety
 * `data` must point to `n_frames * dim` readable doubles; `cb` must be a
 * live handle; `out_text` must be writable.
 */
enum IspaStatus ispa_transcribe_features_f(const double *data,
                                           size_t n_frames,
                                           size_t dim,
                                           double hop_seconds,
                                           const struct IspaCodebook *cb,
                                           enum IspaVariant variant,
                                           double lambda,
                                           char **out_text);

/**
 * Renders acoustic token text as pure tones.
 *
 * # Safety
 * `tokens` must be a NUL-terminated string; `out` must be writable.
 */
enum IspaStatus ispa_synthesize(const char *tokens,
                                uint32_t sample_rate,
                                struct IspaWaveform **out);

/**
 * Minimum-cost one-to-one matching on a row-major `rows x cols` matrix.
 * `row_to_col` receives `rows` entries: the matched column or -1.
 *
 * # Safety
 * `cost` must point to `rows * cols` readable doubles, `row_to_col` to
 * `rows` writable entries; `total` may be NULL.
 */
enum IspaStatus ispa_solve_assignment(const double *cost,
                                      size_t rows,
                                      size_t cols,
                                      ptrdiff_t *row_to_col,
                                      double *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISPA_H */
