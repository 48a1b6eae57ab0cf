/* C interface for the sumeval BLEU evaluation toolkit.
 *
 * Conventions:
 *  - Opaque handles are created and freed by this library.
 *  - Fallible functions return a status code (SUMEVAL_OK == 0) and write
 *    results through out-pointers.
 *  - Strings are NUL-terminated UTF-8. Strings returned through
 *    out-pointers are owned by the caller and must be released with
 *    sumeval_string_free(); strings returned directly are borrowed and
 *    must not be freed.
 *  - sumeval_last_error() returns the most recent error message on the
 *    calling thread.
 *
 * This header is maintained by hand; a test in the Rust crate checks that
 * it declares every exported symbol.
 */

#ifndef SUMEVAL_H
#define SUMEVAL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. */
#define SUMEVAL_OK 0
/* A required pointer was NULL. */
#define SUMEVAL_ERR_NULL 1
/* A string argument was not valid UTF-8. */
#define SUMEVAL_ERR_UTF8 2
/* An argument was malformed (unknown preset, bad combo string, ...). */
#define SUMEVAL_ERR_INVALID 3
/* The computation was undefined for this input (empty set, domain error). */
#define SUMEVAL_ERR_DOMAIN 4
/* An internal error was caught at the boundary. */
#define SUMEVAL_ERR_INTERNAL 5

/* Levels for sumeval_eval_set_score_custom(). */
#define SUMEVAL_LEVEL_SENTENCE 0
#define SUMEVAL_LEVEL_CORPUS 1

/* An accumulating set of candidate/reference pairs. Opaque. */
typedef struct SumevalEvalSet SumevalEvalSet;

/* Library version as a static string. */
const char *sumeval_version(void);

/* Message of the most recent error on this thread. Borrowed; valid until
 * the next failing call on the same thread. */
const char *sumeval_last_error(void);

/* Creates an empty evaluation set. Free with sumeval_eval_set_free(). */
SumevalEvalSet *sumeval_eval_set_new(void);

/* Frees a set. NULL is a no-op. */
void sumeval_eval_set_free(SumevalEvalSet *set);

/* Number of pairs added so far; 0 for NULL. */
size_t sumeval_eval_set_len(const SumevalEvalSet *set);

/* Adds one pair. candidate and each reference are whitespace-tokenized
 * sentences; references is an array of n_references strings. */
int sumeval_eval_set_add(SumevalEvalSet *set,
                         const char *candidate,
                         const char *const *references,
                         size_t n_references);

/* Scores the set under a named preset, e.g. "BLEU-CN" (case-insensitive,
 * the "BLEU-" prefix is optional). */
int sumeval_eval_set_score(const SumevalEvalSet *set,
                           const char *preset,
                           double *out_score);

/* Scores the set under an explicit (level, smoothing, max_n) triple.
 * level is SUMEVAL_LEVEL_SENTENCE or SUMEVAL_LEVEL_CORPUS; smoothing is a
 * mode tag such as "m0", "m2", "m4", "m4-legacy", "m4-inflated",
 * "m0-nonzero-only", "laplace-all", "laplace-from2", or "epsilon". */
int sumeval_eval_set_score_custom(const SumevalEvalSet *set,
                                  int level,
                                  const char *smoothing,
                                  size_t max_n,
                                  double *out_score);

/* Lexes source code, applies a 4-bit RSFL pre-processing combination
 * (e.g. "1101" = replace literals, split identifiers, lowercase), and
 * returns the space-joined token string through out_tokens. The caller
 * owns the result and must free it with sumeval_string_free(). */
int sumeval_preprocess_code(const char *code,
                            const char *combo,
                            char **out_tokens);

/* Frees a string returned through an out-pointer. NULL is a no-op. */
void sumeval_string_free(char *s);

/* Static interpretation band for a score, or NULL if the score is not
 * finite. Scores above 100 map to the out-of-range band. */
const char *sumeval_interpret(double score);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SUMEVAL_H */
