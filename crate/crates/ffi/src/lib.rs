//! C ABI for the sumeval toolkit.
//!
//! Conventions:
//! - Opaque handles (`SumevalEvalSet`) are created and freed by this library;
//!   the caller must not inspect or copy them.
//! - Every fallible function returns a `c_int` status code (`SUMEVAL_OK` = 0);
//!   results travel through out-pointers.
//! - Strings are NUL-terminated UTF-8. Strings returned through out-pointers
//!   are owned by the caller and must be released with `sumeval_string_free`;
//!   strings returned directly (interpretation bands, error messages,
//!   version) are borrowed and must not be freed.
//! - The last error message is stored per thread and readable via
//!   `sumeval_last_error`.
//!
//! The mirror declarations live in `include/sumeval.h`, which is maintained
//! by hand and checked by a test for coverage of every exported symbol.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;

use sumeval::bleu::{
    interpret_score, score_corpus, BleuSpec, EvalPair, Level, SmoothingMode, VariantPreset,
};
use sumeval::lex::lex_code;
use sumeval::preprocess::{apply_combo, PreprocessCombo};
use sumeval::token::TokenSeq;

pub const SUMEVAL_OK: c_int = 0;
/// A required pointer was NULL.
pub const SUMEVAL_ERR_NULL: c_int = 1;
/// A string argument was not valid UTF-8.
pub const SUMEVAL_ERR_UTF8: c_int = 2;
/// An argument was malformed (unknown preset, bad combo string, ...).
pub const SUMEVAL_ERR_INVALID: c_int = 3;
/// The computation was undefined for this input (empty set, domain error).
pub const SUMEVAL_ERR_DOMAIN: c_int = 4;
/// An internal panic was caught at the boundary.
pub const SUMEVAL_ERR_INTERNAL: c_int = 5;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).expect("NUL stripped above");
    });
}

fn fail(code: c_int, message: impl Into<String>) -> c_int {
    set_error(message);
    code
}

/// Returns the message of the most recent error on this thread. Borrowed;
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sumeval_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sumeval_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, c_int> {
    if ptr.is_null() {
        set_error("NULL string argument");
        return Err(SUMEVAL_ERR_NULL);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        SUMEVAL_ERR_UTF8
    })
}

fn guarded(f: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => fail(SUMEVAL_ERR_INTERNAL, "internal panic"),
    }
}

/// An accumulating set of candidate/reference pairs.
pub struct SumevalEvalSet {
    pairs: Vec<EvalPair>,
}

/// Creates an empty evaluation set. Free with `sumeval_eval_set_free`.
#[no_mangle]
pub extern "C" fn sumeval_eval_set_new() -> *mut SumevalEvalSet {
    Box::into_raw(Box::new(SumevalEvalSet { pairs: Vec::new() }))
}

/// Frees a set created by `sumeval_eval_set_new`. NULL is a no-op.
///
/// # Safety
/// `set` must be NULL or a pointer returned by `sumeval_eval_set_new` that
/// has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn sumeval_eval_set_free(set: *mut SumevalEvalSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of pairs added so far; 0 for NULL.
///
/// # Safety
/// `set` must be NULL or a live pointer from `sumeval_eval_set_new`.
#[no_mangle]
pub unsafe extern "C" fn sumeval_eval_set_len(set: *const SumevalEvalSet) -> usize {
    if set.is_null() {
        return 0;
    }
    (*set).pairs.len()
}

/// Adds one pair. `candidate` and each reference are whitespace-tokenized
/// sentences; `references` is an array of `n_references` strings.
///
/// # Safety
/// `set` must be a live pointer from `sumeval_eval_set_new`; `candidate`
/// and the first `n_references` entries of `references` must be valid
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn sumeval_eval_set_add(
    set: *mut SumevalEvalSet,
    candidate: *const c_char,
    references: *const *const c_char,
    n_references: usize,
) -> c_int {
    guarded(|| {
        if set.is_null() {
            return fail(SUMEVAL_ERR_NULL, "NULL set");
        }
        let candidate = match str_arg(candidate) {
            Ok(s) => s,
            Err(code) => return code,
        };
        if references.is_null() || n_references == 0 {
            return fail(SUMEVAL_ERR_INVALID, "need at least one reference");
        }
        let mut refs = Vec::with_capacity(n_references);
        for i in 0..n_references {
            let reference = match str_arg(*references.add(i)) {
                Ok(s) => s,
                Err(code) => return code,
            };
            refs.push(TokenSeq::from_words(
                reference.split_whitespace().map(str::to_string),
            ));
        }
        let candidate = TokenSeq::from_words(candidate.split_whitespace().map(str::to_string));
        (*set).pairs.push(EvalPair::new(candidate, refs));
        SUMEVAL_OK
    })
}

fn score_set(set: *const SumevalEvalSet, spec: &BleuSpec, out_score: *mut f64) -> c_int {
    if set.is_null() || out_score.is_null() {
        return fail(SUMEVAL_ERR_NULL, "NULL set or out pointer");
    }
    let pairs = &unsafe { &*set }.pairs;
    match score_corpus(pairs, spec) {
        Ok(score) => {
            unsafe { *out_score = score };
            SUMEVAL_OK
        }
        Err(e) => fail(SUMEVAL_ERR_DOMAIN, e.to_string()),
    }
}

/// Scores the set under a named preset (e.g. "BLEU-CN", case-insensitive).
///
/// # Safety
/// `set` must be NULL or a live pointer from `sumeval_eval_set_new`;
/// `preset` must be a valid NUL-terminated string; `out_score` must be
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sumeval_eval_set_score(
    set: *const SumevalEvalSet,
    preset: *const c_char,
    out_score: *mut f64,
) -> c_int {
    guarded(|| {
        let name = match str_arg(preset) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let preset = match VariantPreset::by_name(name) {
            Ok(p) => p,
            Err(e) => return fail(SUMEVAL_ERR_INVALID, e.to_string()),
        };
        score_set(set, &preset.spec, out_score)
    })
}

/// Scores the set under an explicit (level, smoothing, max_n) triple.
/// `level` is 0 for sentence, 1 for corpus; `smoothing` is a mode tag such
/// as "m0", "m4-legacy", or "laplace-from2".
///
/// # Safety
/// Same pointer requirements as `sumeval_eval_set_score`.
#[no_mangle]
pub unsafe extern "C" fn sumeval_eval_set_score_custom(
    set: *const SumevalEvalSet,
    level: c_int,
    smoothing: *const c_char,
    max_n: usize,
    out_score: *mut f64,
) -> c_int {
    guarded(|| {
        let level = match level {
            0 => Level::Sentence,
            1 => Level::Corpus,
            other => return fail(SUMEVAL_ERR_INVALID, format!("bad level {other}")),
        };
        let smoothing = match str_arg(smoothing) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let smoothing = match SmoothingMode::from_str(smoothing) {
            Ok(m) => m,
            Err(e) => return fail(SUMEVAL_ERR_INVALID, e.to_string()),
        };
        let spec = BleuSpec::new(max_n, level, smoothing);
        if let Err(e) = spec.validate() {
            return fail(SUMEVAL_ERR_INVALID, e.to_string());
        }
        score_set(set, &spec, out_score)
    })
}

/// Lexes source code, applies a 4-bit RSFL combination (e.g. "1101"), and
/// returns the space-joined token string through `out_tokens`. The caller
/// owns the result and must free it with `sumeval_string_free`.
///
/// # Safety
/// `code` and `combo` must be valid NUL-terminated strings; `out_tokens`
/// must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sumeval_preprocess_code(
    code: *const c_char,
    combo: *const c_char,
    out_tokens: *mut *mut c_char,
) -> c_int {
    guarded(|| {
        if out_tokens.is_null() {
            return fail(SUMEVAL_ERR_NULL, "NULL out pointer");
        }
        let code = match str_arg(code) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let combo = match str_arg(combo) {
            Ok(s) => s,
            Err(code) => return code,
        };
        let combo = match PreprocessCombo::from_str(combo) {
            Ok(c) => c,
            Err(e) => return fail(SUMEVAL_ERR_INVALID, e.to_string()),
        };
        let tokens = match lex_code(code).and_then(|seq| apply_combo(combo, &seq)) {
            Ok(seq) => seq.render(),
            Err(e) => return fail(SUMEVAL_ERR_DOMAIN, e.to_string()),
        };
        match CString::new(tokens) {
            Ok(c) => {
                *out_tokens = c.into_raw();
                SUMEVAL_OK
            }
            Err(_) => fail(SUMEVAL_ERR_INTERNAL, "token string contained NUL"),
        }
    })
}

/// Frees a string returned through an out-pointer. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string returned by this library through an
/// out-pointer, not already freed.
#[no_mangle]
pub unsafe extern "C" fn sumeval_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static interpretation band for a 0-100 score (NULL if the score is not
/// finite). Scores above 100 map to the out-of-range band.
#[no_mangle]
pub extern "C" fn sumeval_interpret(score: f64) -> *const c_char {
    match interpret_score(score) {
        Ok(band) => {
            // interpret_score returns one of a fixed set of static bands;
            // mirror them as NUL-terminated statics.
            macro_rules! bands {
                ($($text:literal),+ $(,)?) => {
                    match band {
                        $($text => concat!($text, "\0").as_ptr() as *const c_char,)+
                        _ => std::ptr::null(),
                    }
                };
            }
            bands!(
                "Almost useless",
                "Hard to get the gist",
                "The gist is clear, but has significant grammatical errors",
                "Understandable to good translations",
                "High quality translations",
                "Very high quality, adequate, and fluent translations",
                "Quality often better than human",
                "Out of range (buggy metric?)",
            )
        }
        Err(_) => std::ptr::null(),
    }
}
