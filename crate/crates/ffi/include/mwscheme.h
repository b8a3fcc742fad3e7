#ifndef MWSCHEME_H
#define MWSCHEME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

/**
 * Result codes. The numeric values of `PARSE`, `VALIDATION` and `BUDGET`
 * match the command-line exit codes.
 */
typedef enum MwsStatus {
  MWS_STATUS_OK = 0,
  MWS_STATUS_INTERNAL = 1,
  MWS_STATUS_PARSE = 2,
  MWS_STATUS_VALIDATION = 3,
  MWS_STATUS_BUDGET = 4,
  MWS_STATUS_NULL_POINTER = 5,
  MWS_STATUS_INVALID_ARGUMENT = 6,
  MWS_STATUS_PANIC = 7,
} MwsStatus;

/**
 * Opaque normal-form game handle.
 */
typedef struct MwsGame MwsGame;

/**
 * Opaque scheme handle.
 */
typedef struct MwsScheme MwsScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mws_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mws_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void mws_string_free(char *s);

/**
 * Parses a canonical scheme document. The scheme is not validated; see
 * [`mws_scheme_validate`].
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MwsStatus mws_scheme_from_json(const char *json, struct MwsScheme **out);

/**
 * Loads a built-in scheme such as `pd3` or `centipede6-quantum`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum MwsStatus mws_scheme_from_builtin(const char *name, struct MwsScheme **out);

/**
 * # Safety
 * `scheme` must be NULL or a handle from this library, freed at most once.
 */
void mws_scheme_free(struct MwsScheme *scheme);

/**
 * Writes the number of invariant violations to `count`. When there are
 * any, the status is `MWS_STATUS_VALIDATION` and the last error message
 * lists them one per line.
 *
 * # Safety
 * `scheme` must be a live handle; `count` must be writable.
 */
enum MwsStatus mws_scheme_validate(const struct MwsScheme *scheme, size_t *count);

/**
 * # Safety
 * `scheme` must be a live handle; `out` must be writable.
 */
enum MwsStatus mws_scheme_to_json(const struct MwsScheme *scheme, char **out);

/**
 * # Safety
 * `scheme` must be a live handle; `players` must be writable.
 */
enum MwsStatus mws_scheme_players(const struct MwsScheme *scheme, size_t *players);

/**
 * Evaluates a pure profile written as `<control digits>;<operators>`
 * (for example `111;I,I,X`) and writes one payoff per player into
 * `payoffs`, which must hold at least `len` doubles with `len` at least
 * the number of players.
 *
 * # Safety
 * `scheme` must be a live handle, `profile` a NUL-terminated string and
 * `payoffs` valid for `len` writes.
 */
enum MwsStatus mws_scheme_payoff_pure(const struct MwsScheme *scheme,
                                      const char *profile,
                                      double *payoffs,
                                      size_t len);

/**
 * Enumerates every pure profile (at most `budget` of them) into a game.
 *
 * # Safety
 * `scheme` must be a live handle; `out` must be writable.
 */
enum MwsStatus mws_scheme_induced_game(const struct MwsScheme *scheme,
                                       uint64_t budget,
                                       struct MwsGame **out);

/**
 * # Safety
 * `game` must be NULL or a handle from this library, freed at most once.
 */
void mws_game_free(struct MwsGame *game);

/**
 * # Safety
 * `game` must be a live handle; `players` must be writable.
 */
enum MwsStatus mws_game_players(const struct MwsGame *game, size_t *players);

/**
 * Number of pure strategies of `player` (1-based).
 *
 * # Safety
 * `game` must be a live handle; `count` must be writable.
 */
enum MwsStatus mws_game_strategy_count(const struct MwsGame *game, size_t player, size_t *count);

/**
 * Payoff of `player` (1-based) at the profile given by `len` strategy
 * indices.
 *
 * # Safety
 * `game` must be a live handle, `profile` valid for `len` reads and
 * `payoff` writable.
 */
enum MwsStatus mws_game_payoff(const struct MwsGame *game,
                               const size_t *profile,
                               size_t len,
                               size_t player,
                               double *payoff);

/**
 * Number of pure Nash equilibria at tolerance `epsilon`.
 *
 * # Safety
 * `game` must be a live handle; `count` must be writable.
 */
enum MwsStatus mws_game_pure_nash_count(const struct MwsGame *game, double epsilon, size_t *count);

/**
 * # Safety
 * `game` must be a live handle; `out` must be writable.
 */
enum MwsStatus mws_game_to_json(const struct MwsGame *game, char **out);

/**
 * Certifies the designated profile of the `n`-stage quantum centipede.
 * Writes both players' payoffs into `payoffs` (two doubles) and 1 or 0 to
 * `valid`.
 *
 * # Safety
 * `payoffs` must be valid for two writes and `valid` writable.
 */
enum MwsStatus mws_centipede_verify(size_t n, double epsilon, double *payoffs, int32_t *valid);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MWSCHEME_H */
