//! C ABI for the complementation toolkit: opaque automaton handles, status
//! codes, and a thread-local last-error message. All strings are UTF-8 C
//! strings; every `char*` returned here must be released with
//! `buchic_string_free` and every handle with `buchic_automaton_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::time::{Duration, Instant};

use buchic::automaton::Automaton;
use buchic::bench::{self, Pipeline, PipelineRunError};
use buchic::complement::{ComplementError, Limits};
use buchic::oaf;
use buchic::oracle::{self, Verdict};

/// Opaque automaton handle.
pub struct BuchicAutomaton(Automaton);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuchicStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    KindMismatch = 4,
    Timeout = 5,
    BudgetExceeded = 6,
    BadPipeline = 7,
    CheckError = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: BuchicStatus, message: impl std::fmt::Display) -> BuchicStatus {
    let message = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).unwrap());
    status
}

/// Message of the most recent failure on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn buchic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, BuchicStatus> {
    if ptr.is_null() {
        return Err(fail(BuchicStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| fail(BuchicStatus::InvalidUtf8, e))
}

/// Parses an automaton from OAF text into a fresh handle.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buchic_automaton_parse(
    text: *const c_char,
    out: *mut *mut BuchicAutomaton,
) -> BuchicStatus {
    if out.is_null() {
        return fail(BuchicStatus::NullArgument, "null out pointer");
    }
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match oaf::parse_oaf(text) {
        Ok(a) => {
            *out = Box::into_raw(Box::new(BuchicAutomaton(a)));
            BuchicStatus::Ok
        }
        Err(e) => fail(BuchicStatus::ParseError, e),
    }
}

/// Releases a handle; null is a no-op.
///
/// # Safety
/// `a` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn buchic_automaton_free(a: *mut BuchicAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Serializes a handle to canonical OAF text.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buchic_automaton_emit(
    a: *const BuchicAutomaton,
    out: *mut *mut c_char,
) -> BuchicStatus {
    if a.is_null() || out.is_null() {
        return fail(BuchicStatus::NullArgument, "null argument");
    }
    let text = oaf::emit_oaf(&(*a).0);
    *out = CString::new(text).unwrap().into_raw();
    BuchicStatus::Ok
}

/// Releases a string returned by this library; null is a no-op.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn buchic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of states of the automaton behind a handle.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn buchic_automaton_num_states(
    a: *const BuchicAutomaton,
    out: *mut usize,
) -> BuchicStatus {
    if a.is_null() || out.is_null() {
        return fail(BuchicStatus::NullArgument, "null argument");
    }
    *out = (*a).0.num_states();
    BuchicStatus::Ok
}

/// Complements the automaton with the pipeline named by `pipeline` (e.g.
/// "slice+ADRM", "parity+SE"). `timeout_millis` 0 means no deadline.
///
/// # Safety
/// `a` must be a live handle, `pipeline` a valid C string, `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn buchic_complement(
    a: *const BuchicAutomaton,
    pipeline: *const c_char,
    state_budget: usize,
    timeout_millis: u64,
    out: *mut *mut BuchicAutomaton,
) -> BuchicStatus {
    if a.is_null() || out.is_null() {
        return fail(BuchicStatus::NullArgument, "null argument");
    }
    let descriptor = match read_str(pipeline) {
        Ok(d) => d,
        Err(s) => return s,
    };
    let pipeline: Pipeline = match descriptor.parse() {
        Ok(p) => p,
        Err(e) => return fail(BuchicStatus::BadPipeline, e),
    };
    let limits = Limits {
        max_states: state_budget,
        deadline: (timeout_millis > 0)
            .then(|| Instant::now().checked_add(Duration::from_millis(timeout_millis)))
            .flatten(),
    };
    match bench::complement_with(&(*a).0, &pipeline, &limits) {
        Ok(c) => {
            *out = Box::into_raw(Box::new(BuchicAutomaton(c)));
            BuchicStatus::Ok
        }
        Err(PipelineRunError::Complement(ComplementError::TimedOut)) => {
            fail(BuchicStatus::Timeout, ComplementError::TimedOut)
        }
        Err(PipelineRunError::Complement(e @ ComplementError::BudgetExceeded(_))) => {
            fail(BuchicStatus::BudgetExceeded, e)
        }
        Err(e) => fail(BuchicStatus::KindMismatch, e),
    }
}

/// Checks `b` against `a` on every lasso word within the bounds:
/// `equivalent` 0 compares as complement (disjoint and complete), nonzero
/// as equal languages. On a failed check `*out_pass` is 0 and
/// `*out_witness` (if non-null) receives the witness word.
///
/// # Safety
/// `a` and `b` must be live handles; `out_pass` must be valid;
/// `out_witness` may be null.
#[no_mangle]
pub unsafe extern "C" fn buchic_check(
    a: *const BuchicAutomaton,
    b: *const BuchicAutomaton,
    equivalent: i32,
    max_u: usize,
    max_v: usize,
    out_pass: *mut i32,
    out_witness: *mut *mut c_char,
) -> BuchicStatus {
    if a.is_null() || b.is_null() || out_pass.is_null() {
        return fail(BuchicStatus::NullArgument, "null argument");
    }
    let verdict = if equivalent != 0 {
        oracle::check_equivalent(&(*a).0, &(*b).0, max_u, max_v)
    } else {
        oracle::check_complement(&(*a).0, &(*b).0, max_u, max_v)
    };
    match verdict {
        Ok(Verdict::Pass) => {
            *out_pass = 1;
            if !out_witness.is_null() {
                *out_witness = std::ptr::null_mut();
            }
            BuchicStatus::Ok
        }
        Ok(Verdict::Fail { witness, .. }) => {
            *out_pass = 0;
            if !out_witness.is_null() {
                *out_witness = CString::new(witness.to_string()).unwrap().into_raw();
            }
            BuchicStatus::Ok
        }
        Err(e) => fail(BuchicStatus::CheckError, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "alphabet: p !p\nstates: 2\ninit: 0\nacc: buchi 1\ntrans:\n\
        0 p 0\n0 p 1\n0 !p 0\n0 !p 1\n1 p 1\n";

    unsafe fn parse(text: &str) -> *mut BuchicAutomaton {
        let c = CString::new(text).unwrap();
        let mut out = std::ptr::null_mut();
        assert_eq!(buchic_automaton_parse(c.as_ptr(), &mut out), BuchicStatus::Ok);
        out
    }

    #[test]
    fn parse_emit_round_trip() {
        unsafe {
            let a = parse(FIG1);
            let mut text = std::ptr::null_mut();
            assert_eq!(buchic_automaton_emit(a, &mut text), BuchicStatus::Ok);
            assert_eq!(CStr::from_ptr(text).to_str().unwrap(), FIG1);
            buchic_string_free(text);
            let mut n = 0;
            assert_eq!(buchic_automaton_num_states(a, &mut n), BuchicStatus::Ok);
            assert_eq!(n, 2);
            buchic_automaton_free(a);
        }
    }

    #[test]
    fn complement_and_check() {
        unsafe {
            let a = parse(FIG1);
            let pipeline = CString::new("slice+ADRM").unwrap();
            let mut c = std::ptr::null_mut();
            assert_eq!(
                buchic_complement(a, pipeline.as_ptr(), 100_000, 0, &mut c),
                BuchicStatus::Ok
            );
            let mut pass = -1;
            let mut witness = std::ptr::null_mut();
            assert_eq!(
                buchic_check(a, c, 0, 3, 4, &mut pass, &mut witness),
                BuchicStatus::Ok
            );
            assert_eq!(pass, 1);
            assert!(witness.is_null());
            // the complement of the complement is not the complement
            let mut pass2 = -1;
            assert_eq!(
                buchic_check(c, c, 1, 2, 3, &mut pass2, std::ptr::null_mut()),
                BuchicStatus::Ok
            );
            assert_eq!(pass2, 1);
            buchic_automaton_free(c);
            buchic_automaton_free(a);
        }
    }

    #[test]
    fn failure_paths_set_last_error() {
        unsafe {
            let bad = CString::new("states: 1\n").unwrap();
            let mut out = std::ptr::null_mut();
            assert_eq!(
                buchic_automaton_parse(bad.as_ptr(), &mut out),
                BuchicStatus::ParseError
            );
            let msg = CStr::from_ptr(buchic_last_error()).to_str().unwrap();
            assert!(msg.contains("alphabet"));

            let a = parse(FIG1);
            let pipeline = CString::new("rank").unwrap();
            let mut c = std::ptr::null_mut();
            assert_eq!(
                buchic_complement(a, pipeline.as_ptr(), 100, 0, &mut c),
                BuchicStatus::BadPipeline
            );
            let pipeline = CString::new("slice").unwrap();
            assert_eq!(
                buchic_complement(a, pipeline.as_ptr(), 1, 0, &mut c),
                BuchicStatus::BudgetExceeded
            );
            assert_eq!(
                buchic_complement(a, pipeline.as_ptr(), 100, u64::MAX, &mut c),
                BuchicStatus::Ok
            );
            buchic_automaton_free(c);
            buchic_automaton_free(a);
        }
    }
}
