//! C interface to the mwscheme engine.
//!
//! Schemes and games are opaque handles created by `mws_*_from_*` or
//! `mws_scheme_induced_game` and released with the matching `*_free`.
//! Every fallible call returns an [`MwsStatus`]; on failure the message is
//! available from [`mws_last_error_message`] on the same thread. Strings
//! returned through out-parameters are owned by the caller and released
//! with [`mws_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mwscheme::builtins::builtin;
use mwscheme::equilibrium::pure_nash;
use mwscheme::extensive::verify_centipede_equilibrium;
use mwscheme::io::{describe_parse_error, scheme_from_json, scheme_to_json, Source};
use mwscheme::profile::parse_profile;
use mwscheme::{induced_game_with_budget, Error, Evaluator, NormalFormGame, SchemeSpec};

/// Result codes. The numeric values of `PARSE`, `VALIDATION` and `BUDGET`
/// match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwsStatus {
    Ok = 0,
    Internal = 1,
    Parse = 2,
    Validation = 3,
    Budget = 4,
    NullPointer = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Opaque scheme handle.
pub struct MwsScheme {
    spec: SchemeSpec,
}

/// Opaque normal-form game handle.
pub struct MwsGame {
    game: NormalFormGame,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MwsStatus {
    match err {
        e if e.is_parse() => MwsStatus::Parse,
        Error::BudgetExceeded { .. } => MwsStatus::Budget,
        Error::DimensionTooLarge { .. } => MwsStatus::Internal,
        _ => MwsStatus::Validation,
    }
}

struct Failure(MwsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), describe_parse_error(&e))
    }
}

fn null_pointer(name: &str) -> Failure {
    Failure(MwsStatus::NullPointer, format!("{name} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(MwsStatus::InvalidArgument, message.into())
}

/// Runs `f`, records any failure and converts panics into `MWS_STATUS_PANIC`.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MwsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MwsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MwsStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null_pointer(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MwsStatus::Parse, format!("{name} is not valid UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null_pointer(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| invalid("string contains a NUL byte"))?;
    if out.is_null() {
        return Err(null_pointer("out"));
    }
    out.write(c.into_raw());
    Ok(())
}

unsafe fn scheme_ref<'a>(s: *const MwsScheme) -> Result<&'a SchemeSpec, Failure> {
    s.as_ref().map(|s| &s.spec).ok_or_else(|| null_pointer("scheme"))
}

unsafe fn game_ref<'a>(g: *const MwsGame) -> Result<&'a NormalFormGame, Failure> {
    g.as_ref().map(|g| &g.game).ok_or_else(|| null_pointer("game"))
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mws_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mws_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mws_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a canonical scheme document. The scheme is not validated; see
/// [`mws_scheme_validate`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_scheme_from_json(json: *const c_char, out: *mut *mut MwsScheme) -> MwsStatus {
    guard(|| {
        let spec = scheme_from_json(read_str(json, "json")?)?;
        write(out, Box::into_raw(Box::new(MwsScheme { spec })), "out")
    })
}

/// Loads a built-in scheme such as `pd3` or `centipede6-quantum`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_scheme_from_builtin(name: *const c_char, out: *mut *mut MwsScheme) -> MwsStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        match builtin(name)? {
            Source::Scheme(spec) => write(out, Box::into_raw(Box::new(MwsScheme { spec })), "out"),
            other => Err(invalid(format!("builtin {name} is a {}, not a scheme", other.kind()))),
        }
    })
}

/// # Safety
/// `scheme` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn mws_scheme_free(scheme: *mut MwsScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Writes the number of invariant violations to `count`. When there are
/// any, the status is `MWS_STATUS_VALIDATION` and the last error message
/// lists them one per line.
///
/// # Safety
/// `scheme` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_scheme_validate(scheme: *const MwsScheme, count: *mut usize) -> MwsStatus {
    guard(|| {
        let violations = scheme_ref(scheme)?.validate();
        write(count, violations.len(), "count")?;
        if violations.is_empty() {
            Ok(())
        } else {
            let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            Err(Failure(MwsStatus::Validation, lines.join("\n")))
        }
    })
}

/// # Safety
/// `scheme` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_scheme_to_json(scheme: *const MwsScheme, out: *mut *mut c_char) -> MwsStatus {
    guard(|| write_string(out, scheme_to_json(scheme_ref(scheme)?)))
}

/// # Safety
/// `scheme` must be a live handle; `players` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_scheme_players(scheme: *const MwsScheme, players: *mut usize) -> MwsStatus {
    guard(|| write(players, scheme_ref(scheme)?.players, "players"))
}

/// Evaluates a pure profile written as `<control digits>;<operators>`
/// (for example `111;I,I,X`) and writes one payoff per player into
/// `payoffs`, which must hold at least `len` doubles with `len` at least
/// the number of players.
///
/// # Safety
/// `scheme` must be a live handle, `profile` a NUL-terminated string and
/// `payoffs` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mws_scheme_payoff_pure(
    scheme: *const MwsScheme,
    profile: *const c_char,
    payoffs: *mut f64,
    len: usize,
) -> MwsStatus {
    guard(|| {
        let spec = scheme_ref(scheme)?;
        spec.ensure_valid()?;
        let profile = parse_profile(spec, read_str(profile, "profile")?)?;
        let values = Evaluator::new(spec).payoff(&profile)?;
        if payoffs.is_null() {
            return Err(null_pointer("payoffs"));
        }
        if len < values.len() {
            return Err(invalid(format!("payoff buffer holds {len}, need {}", values.len())));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), payoffs, values.len());
        Ok(())
    })
}

/// Enumerates every pure profile (at most `budget` of them) into a game.
///
/// # Safety
/// `scheme` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_scheme_induced_game(
    scheme: *const MwsScheme,
    budget: u64,
    out: *mut *mut MwsGame,
) -> MwsStatus {
    guard(|| {
        let spec = scheme_ref(scheme)?;
        spec.ensure_valid()?;
        let game = induced_game_with_budget(spec, u128::from(budget))?;
        write(out, Box::into_raw(Box::new(MwsGame { game })), "out")
    })
}

/// # Safety
/// `game` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn mws_game_free(game: *mut MwsGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// # Safety
/// `game` must be a live handle; `players` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_game_players(game: *const MwsGame, players: *mut usize) -> MwsStatus {
    guard(|| write(players, game_ref(game)?.players, "players"))
}

/// Number of pure strategies of `player` (1-based).
///
/// # Safety
/// `game` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_game_strategy_count(game: *const MwsGame, player: usize, count: *mut usize) -> MwsStatus {
    guard(|| {
        let g = game_ref(game)?;
        let c = player
            .checked_sub(1)
            .and_then(|p| g.strategy_counts.get(p))
            .ok_or_else(|| invalid(format!("no player {player}")))?;
        write(count, *c, "count")
    })
}

/// Payoff of `player` (1-based) at the profile given by `len` strategy
/// indices.
///
/// # Safety
/// `game` must be a live handle, `profile` valid for `len` reads and
/// `payoff` writable.
#[no_mangle]
pub unsafe extern "C" fn mws_game_payoff(
    game: *const MwsGame,
    profile: *const usize,
    len: usize,
    player: usize,
    payoff: *mut f64,
) -> MwsStatus {
    guard(|| {
        let g = game_ref(game)?;
        if profile.is_null() {
            return Err(null_pointer("profile"));
        }
        let profile = std::slice::from_raw_parts(profile, len);
        if len != g.players || profile.iter().zip(&g.strategy_counts).any(|(&s, &c)| s >= c) {
            return Err(invalid("profile does not fit the game"));
        }
        if player == 0 || player > g.players {
            return Err(invalid(format!("no player {player}")));
        }
        write(payoff, g.payoff(player, profile), "payoff")
    })
}

/// Number of pure Nash equilibria at tolerance `epsilon`.
///
/// # Safety
/// `game` must be a live handle; `count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_game_pure_nash_count(game: *const MwsGame, epsilon: f64, count: *mut usize) -> MwsStatus {
    guard(|| {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(invalid("epsilon must be finite and non-negative"));
        }
        write(count, pure_nash(game_ref(game)?, epsilon).len(), "count")
    })
}

/// # Safety
/// `game` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mws_game_to_json(game: *const MwsGame, out: *mut *mut c_char) -> MwsStatus {
    guard(|| write_string(out, game_ref(game)?.to_json()?))
}

/// Certifies the designated profile of the `n`-stage quantum centipede.
/// Writes both players' payoffs into `payoffs` (two doubles) and 1 or 0 to
/// `valid`.
///
/// # Safety
/// `payoffs` must be valid for two writes and `valid` writable.
#[no_mangle]
pub unsafe extern "C" fn mws_centipede_verify(n: usize, epsilon: f64, payoffs: *mut f64, valid: *mut i32) -> MwsStatus {
    guard(|| {
        if payoffs.is_null() {
            return Err(null_pointer("payoffs"));
        }
        let v = verify_centipede_equilibrium(n, epsilon)?;
        ptr::copy_nonoverlapping(v.certificate.payoffs.as_ptr(), payoffs, 2);
        write(valid, i32::from(v.certificate.is_valid()), "valid")
    })
}
