//! C ABI over `mwgap-core`.
//!
//! Objects are opaque heap handles released with their `_free` function.
//! Every fallible call returns a `MwgapStatus`; on failure the message is
//! available from `mwgap_last_error_message` on the same thread. Strings
//! returned through out-parameters are owned by the caller and released with
//! `mwgap_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mwgap_core::dual::{certify, CertFamily, Certificate};
use mwgap_core::io::{certificate_to_json, cut_from_json, cut_to_json, instance_from_json, instance_to_json};
use mwgap_core::rational::{format_q, parse_q};
use mwgap_core::simplex::{Cut, WeightFunction};
use mwgap_core::weights::WeightKind;
use mwgap_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MwgapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Mismatch = 4,
    TooLarge = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MwgapFamily {
    NonOpposite = 0,
    ThreeWay = 1,
}

pub struct MwgapWeights {
    inner: WeightFunction,
}

pub struct MwgapCut {
    inner: Cut,
}

pub struct MwgapCertificate {
    inner: Certificate,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MwgapStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => MwgapStatus::Parse,
        Error::Mismatch(..) => MwgapStatus::Mismatch,
        Error::TooLarge(_) => MwgapStatus::TooLarge,
        Error::Structural(_) | Error::Degenerate(_) | Error::Lp(_) | Error::Io(_) => MwgapStatus::Internal,
        _ => MwgapStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MwgapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MwgapStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            MwgapStatus::NullPointer
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            MwgapStatus::Internal
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Fail::Core(Error::Parse(format!("{what} is not UTF-8"))))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    let c = CString::new(s).map_err(|_| Fail::Core(Error::InvalidArgument("string holds a nul byte".into())))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn mwgap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mwgap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Builds a named construction: "w3", "fk", "what", "wprime" or "wtilde".
///
/// # Safety
/// `kind` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_weights_build(
    kind: *const c_char,
    k: usize,
    n: u32,
    out: *mut *mut MwgapWeights,
) -> MwgapStatus {
    guard(|| {
        let kind: WeightKind = unsafe { read_str(kind, "kind") }?.parse()?;
        let w = kind.build(k, n)?;
        unsafe { write_out(out, MwgapWeights { inner: w }) }
    })
}

/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_weights_from_json(json: *const c_char, out: *mut *mut MwgapWeights) -> MwgapStatus {
    guard(|| {
        let w = instance_from_json(unsafe { read_str(json, "json") }?)?;
        unsafe { write_out(out, MwgapWeights { inner: w }) }
    })
}

/// # Safety
/// `w` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_weights_to_json(w: *const MwgapWeights, out: *mut *mut c_char) -> MwgapStatus {
    guard(|| {
        let w = unsafe { borrow(w, "weights") }?;
        unsafe { write_string(out, instance_to_json(&w.inner)) }
    })
}

/// Canonical LP value as a "p/q" string.
///
/// # Safety
/// `w` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_weights_lpc(w: *const MwgapWeights, out: *mut *mut c_char) -> MwgapStatus {
    guard(|| {
        let w = unsafe { borrow(w, "weights") }?;
        unsafe { write_string(out, format_q(&w.inner.lpc())) }
    })
}

/// # Safety
/// `w` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mwgap_weights_free(w: *mut MwgapWeights) {
    if !w.is_null() {
        drop(unsafe { Box::from_raw(w) });
    }
}

/// # Safety
/// `json` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_cut_from_json(json: *const c_char, out: *mut *mut MwgapCut) -> MwgapStatus {
    guard(|| {
        let p = cut_from_json(unsafe { read_str(json, "json") }?)?;
        unsafe { write_out(out, MwgapCut { inner: p }) }
    })
}

/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_cut_to_json(p: *const MwgapCut, out: *mut *mut c_char) -> MwgapStatus {
    guard(|| {
        let p = unsafe { borrow(p, "cut") }?;
        unsafe { write_string(out, cut_to_json(&p.inner)) }
    })
}

/// Total weight of the edges the cut separates, as a "p/q" string.
///
/// # Safety
/// `p` and `w` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_cut_cost(
    p: *const MwgapCut,
    w: *const MwgapWeights,
    out: *mut *mut c_char,
) -> MwgapStatus {
    guard(|| {
        let p = unsafe { borrow(p, "cut") }?;
        let w = unsafe { borrow(w, "weights") }?;
        let cost = p.inner.cost(&w.inner)?;
        unsafe { write_string(out, format_q(&cost)) }
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mwgap_cut_free(p: *mut MwgapCut) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Dual-graph certificate for a k = 3 instance against a "p/q" target.
///
/// # Safety
/// `w` must be a live handle, `target` a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_certify(
    w: *const MwgapWeights,
    family: MwgapFamily,
    target: *const c_char,
    out: *mut *mut MwgapCertificate,
) -> MwgapStatus {
    guard(|| {
        let w = unsafe { borrow(w, "weights") }?;
        let target = parse_q(unsafe { read_str(target, "target") }?)?;
        let family = match family {
            MwgapFamily::NonOpposite => CertFamily::NonOpposite,
            MwgapFamily::ThreeWay => CertFamily::ThreeWay,
        };
        let cert = certify(w.inner.n(), &w.inner, family, &target)?;
        unsafe { write_out(out, MwgapCertificate { inner: cert }) }
    })
}

/// Whether the certified bound reaches the target; false for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mwgap_certificate_passed(c: *const MwgapCertificate) -> bool {
    unsafe { c.as_ref() }.is_some_and(|c| c.inner.pass)
}

/// Certified lower bound as a "p/q" string.
///
/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_certificate_bound(c: *const MwgapCertificate, out: *mut *mut c_char) -> MwgapStatus {
    guard(|| {
        let c = unsafe { borrow(c, "certificate") }?;
        unsafe { write_string(out, format_q(&c.inner.overall)) }
    })
}

/// # Safety
/// `c` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mwgap_certificate_to_json(c: *const MwgapCertificate, out: *mut *mut c_char) -> MwgapStatus {
    guard(|| {
        let c = unsafe { borrow(c, "certificate") }?;
        unsafe { write_string(out, certificate_to_json(&c.inner)) }
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mwgap_certificate_free(c: *mut MwgapCertificate) {
    if !c.is_null() {
        drop(unsafe { Box::from_raw(c) });
    }
}
