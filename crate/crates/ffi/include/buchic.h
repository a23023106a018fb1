#ifndef BUCHIC_H
#define BUCHIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BuchicStatus {
  BUCHIC_STATUS_OK = 0,
  BUCHIC_STATUS_NULL_ARGUMENT = 1,
  BUCHIC_STATUS_INVALID_UTF8 = 2,
  BUCHIC_STATUS_PARSE_ERROR = 3,
  BUCHIC_STATUS_KIND_MISMATCH = 4,
  BUCHIC_STATUS_TIMEOUT = 5,
  BUCHIC_STATUS_BUDGET_EXCEEDED = 6,
  BUCHIC_STATUS_BAD_PIPELINE = 7,
  BUCHIC_STATUS_CHECK_ERROR = 8,
} BuchicStatus;

/**
 * Opaque automaton handle.
 */
typedef struct BuchicAutomaton BuchicAutomaton;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *buchic_last_error(void);

/**
 * Parses an automaton from OAF text into a fresh handle.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum BuchicStatus buchic_automaton_parse(const char *text, struct BuchicAutomaton **out);

/**
 * Releases a handle; null is a no-op.
 *
 * # Safety
 * `a` must come from this library and not be freed twice.
 */
void buchic_automaton_free(struct BuchicAutomaton *a);

/**
 * Serializes a handle to canonical OAF text.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum BuchicStatus buchic_automaton_emit(const struct BuchicAutomaton *a, char **out);

/**
 * Releases a string returned by this library; null is a no-op.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void buchic_string_free(char *s);

/**
 * Number of states of the automaton behind a handle.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum BuchicStatus buchic_automaton_num_states(const struct BuchicAutomaton *a, uintptr_t *out);

/**
 * Complements the automaton with the pipeline named by `pipeline` (e.g.
 * "slice+ADRM", "parity+SE"). `timeout_millis` 0 means no deadline.
 *
 * # Safety
 * `a` must be a live handle, `pipeline` a valid C string, `out` a valid
 * pointer.
 */
enum BuchicStatus buchic_complement(const struct BuchicAutomaton *a,
                                    const char *pipeline,
                                    uintptr_t state_budget,
                                    uint64_t timeout_millis,
                                    struct BuchicAutomaton **out);

/**
 * Checks `b` against `a` on every lasso word within the bounds:
 * `equivalent` 0 compares as complement (disjoint and complete), nonzero
 * as equal languages. On a failed check `*out_pass` is 0 and
 * `*out_witness` (if non-null) receives the witness word.
 *
 * # Safety
 * `a` and `b` must be live handles; `out_pass` must be valid;
 * `out_witness` may be null.
 */
enum BuchicStatus buchic_check(const struct BuchicAutomaton *a,
                               const struct BuchicAutomaton *b,
                               int32_t equivalent,
                               uintptr_t max_u,
                               uintptr_t max_v,
                               int32_t *out_pass,
                               char **out_witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BUCHIC_H */
