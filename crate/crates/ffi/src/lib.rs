//! C ABI for srg-core.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json` or
//! `srg_sample_*` and released with the matching `*_free`. Every fallible call
//! returns an [`SrgStatus`]; on failure `srg_last_error` describes the cause
//! for the calling thread. Strings returned through `char **` are owned by the
//! caller and must be released with `srg_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use srg_core::certifier::{
    certify_hard, certify_passivity_corollary, AssumptionChecklist, Certificate, CertifyOptions, Evidence,
    PassivityEvidence, PassivityOptions, Verdict,
};
use srg_core::regions::{region_distance, Region, DEFAULT_REFINEMENT};
use srg_core::sampler::{sample_hard_srg, sample_soft_srg, ExcitationConfig};
use srg_core::{Error, OperatorSpec};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Numeric = 4,
    EmptyCloud = 5,
    KindMismatch = 6,
    Indeterminate = 7,
    WellPosedness = 8,
    Divergence = 9,
    Io = 10,
    OutOfRange = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrgVerdict {
    Certified = 0,
    NotCertified = 1,
    Indeterminate = 2,
}

/// Operator specification.
pub struct SrgOperator(OperatorSpec);
/// Sampled soft or hard SRG cloud.
pub struct SrgCloud(srg_core::sampler::SrgCloud);
/// Region of the complex plane.
pub struct SrgRegion(Region);
/// Separation certificate.
pub struct SrgCertificate(Certificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SrgStatus {
    match e {
        Error::DimensionMismatch(_) => SrgStatus::DimensionMismatch,
        Error::Domain(_) | Error::Config(_) | Error::Parse(_) | Error::Json(_) | Error::Csv(_) => {
            SrgStatus::InvalidArgument
        }
        Error::Numeric(_) | Error::NonFinite { .. } => SrgStatus::Numeric,
        Error::EmptyCloud(_) => SrgStatus::EmptyCloud,
        Error::KindMismatch(_) => SrgStatus::KindMismatch,
        Error::Indeterminate(_) => SrgStatus::Indeterminate,
        Error::WellPosedness { .. } => SrgStatus::WellPosedness,
        Error::Divergence { .. } => SrgStatus::Divergence,
        Error::Io(_) => SrgStatus::Io,
    }
}

enum Fail {
    Null(&'static str),
    Range(String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, translating errors and panics into a status and last-error text.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SrgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SrgStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SrgStatus::NullPointer
        }
        Ok(Err(Fail::Range(msg))) => {
            set_error(msg);
            SrgStatus::OutOfRange
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            SrgStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Core(Error::Parse(format!("{what} is not valid UTF-8"))))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &'static str) -> Result<Option<&'a str>, Fail> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

fn into_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail::Core(Error::Numeric("string contains an interior NUL".into())))
}

fn parse_checklist(json: Option<&str>) -> Result<AssumptionChecklist, Fail> {
    Ok(match json {
        Some(t) => serde_json::from_str(t).map_err(Error::from)?,
        None => AssumptionChecklist::new(),
    })
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn srg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn srg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn srg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates an operator specification.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn srg_operator_from_json(json: *const c_char, out: *mut *mut SrgOperator) -> SrgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let spec = OperatorSpec::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(SrgOperator(spec)));
        Ok(())
    })
}

/// Input/output dimension of an operator.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn srg_operator_dimension(op: *const SrgOperator, out: *mut usize) -> SrgStatus {
    guard(|| {
        let op = handle(op, "op")?;
        *out_arg(out, "out")? = op.0.io_dimension()?;
        Ok(())
    })
}

/// # Safety
/// `op` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn srg_operator_free(op: *mut SrgOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

unsafe fn sample(
    op: *const SrgOperator,
    config_json: *const c_char,
    out: *mut *mut SrgCloud,
    hard: bool,
) -> SrgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let op = handle(op, "op")?;
        let cfg: ExcitationConfig = match opt_str_arg(config_json, "config_json")? {
            Some(t) => serde_json::from_str(t).map_err(Error::from)?,
            None => ExcitationConfig::default(),
        };
        let cloud = if hard {
            sample_hard_srg(&op.0, &cfg)?
        } else {
            sample_soft_srg(&op.0, &cfg)?
        };
        *out = Box::into_raw(Box::new(SrgCloud(cloud)));
        Ok(())
    })
}

/// Samples the soft SRG. `config_json` may be NULL for the default ensemble.
///
/// # Safety
/// `op` must be a live handle; `config_json` NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_sample_soft(
    op: *const SrgOperator,
    config_json: *const c_char,
    out: *mut *mut SrgCloud,
) -> SrgStatus {
    sample(op, config_json, out, false)
}

/// Samples the hard SRG. `config_json` may be NULL for the default ensemble.
///
/// # Safety
/// As [`srg_sample_soft`].
#[no_mangle]
pub unsafe extern "C" fn srg_sample_hard(
    op: *const SrgOperator,
    config_json: *const c_char,
    out: *mut *mut SrgCloud,
) -> SrgStatus {
    sample(op, config_json, out, true)
}

/// # Safety
/// `cloud` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_cloud_len(cloud: *const SrgCloud, out: *mut usize) -> SrgStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(cloud, "cloud")?.0.len();
        Ok(())
    })
}

/// Upper-half-plane representative of point `index`.
///
/// # Safety
/// `cloud` must be a live handle; `re`, `im` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_cloud_point(
    cloud: *const SrgCloud,
    index: usize,
    re: *mut f64,
    im: *mut f64,
) -> SrgStatus {
    guard(|| {
        let c = handle(cloud, "cloud")?;
        let re = out_arg(re, "re")?;
        let im = out_arg(im, "im")?;
        let p = c
            .0
            .points
            .get(index)
            .ok_or_else(|| Fail::Range(format!("point {index} out of range for {} points", c.0.len())))?;
        let z = p.z();
        *re = z.re;
        *im = z.im;
        Ok(())
    })
}

/// # Safety
/// `cloud` must be a live handle; `out` writable. Free the result with `srg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn srg_cloud_to_json(cloud: *const SrgCloud, out: *mut *mut c_char) -> SrgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(handle(cloud, "cloud")?.0.to_json()?)?;
        Ok(())
    })
}

/// # Safety
/// `cloud` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn srg_cloud_free(cloud: *mut SrgCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// # Safety
/// `json` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_region_from_json(json: *const c_char, out: *mut *mut SrgRegion) -> SrgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let r: Region = serde_json::from_str(str_arg(json, "json")?).map_err(Error::from)?;
        r.validate()?;
        *out = Box::into_raw(Box::new(SrgRegion(r)));
        Ok(())
    })
}

/// # Safety
/// `region` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn srg_region_contains(
    region: *const SrgRegion,
    re: f64,
    im: f64,
    out: *mut bool,
) -> SrgStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(region, "region")?.0.contains(Complex64::new(re, im));
        Ok(())
    })
}

/// Distance between two regions.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_region_distance(a: *const SrgRegion, b: *const SrgRegion, out: *mut f64) -> SrgStatus {
    guard(|| {
        let a = handle(a, "a")?;
        let b = handle(b, "b")?;
        *out_arg(out, "out")? = region_distance(&a.0, &b.0, DEFAULT_REFINEMENT)?.value;
        Ok(())
    })
}

/// # Safety
/// `region` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn srg_region_free(region: *mut SrgRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// Hard separation certificate from region evidence. `checklist_json` may be
/// NULL (all premises unchecked); a negative `margin_floor` selects the default.
///
/// # Safety
/// Handles must be live; strings NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_certify_hard_regions(
    srg_p: *const SrgRegion,
    inv_srg_c: *const SrgRegion,
    checklist_json: *const c_char,
    margin_floor: f64,
    out: *mut *mut SrgCertificate,
) -> SrgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = handle(srg_p, "srg_p")?;
        let c = handle(inv_srg_c, "inv_srg_c")?;
        let list = parse_checklist(opt_str_arg(checklist_json, "checklist_json")?)?;
        let mut opts = CertifyOptions::default();
        if margin_floor >= 0.0 {
            opts.margin_floor = margin_floor;
        }
        let cert = certify_hard(
            &Evidence::Region(p.0.clone()),
            &Evidence::Region(c.0.clone()),
            &list,
            &opts,
        )?;
        *out = Box::into_raw(Box::new(SrgCertificate(cert)));
        Ok(())
    })
}

/// Passivity corollary certificate. Cloud handles may be NULL; non-NULL
/// clouds are checked against the passivity premises.
///
/// # Safety
/// Handles must be live or NULL where allowed; strings NULL or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_certify_passivity(
    p: *const SrgOperator,
    c: *const SrgOperator,
    delta: f64,
    epsilon: f64,
    p_hard: *const SrgCloud,
    neg_c_hard: *const SrgCloud,
    checklist_json: *const c_char,
    out: *mut *mut SrgCertificate,
) -> SrgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let p = handle(p, "p")?;
        let c = handle(c, "c")?;
        let evidence = PassivityEvidence {
            p_hard: p_hard.as_ref().map(|x| x.0.clone()),
            neg_c_hard: neg_c_hard.as_ref().map(|x| x.0.clone()),
        };
        let list = parse_checklist(opt_str_arg(checklist_json, "checklist_json")?)?;
        let cert = certify_passivity_corollary(
            &p.0,
            &c.0,
            delta,
            epsilon,
            &evidence,
            &list,
            &PassivityOptions::default(),
        )?;
        *out = Box::into_raw(Box::new(SrgCertificate(cert)));
        Ok(())
    })
}

/// # Safety
/// `cert` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_certificate_verdict(cert: *const SrgCertificate, out: *mut SrgVerdict) -> SrgStatus {
    guard(|| {
        *out_arg(out, "out")? = match handle(cert, "cert")?.0.verdict {
            Verdict::Certified => SrgVerdict::Certified,
            Verdict::NotCertified => SrgVerdict::NotCertified,
            Verdict::Indeterminate => SrgVerdict::Indeterminate,
        };
        Ok(())
    })
}

/// # Safety
/// `cert` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn srg_certificate_margin(cert: *const SrgCertificate, out: *mut f64) -> SrgStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(cert, "cert")?.0.margin;
        Ok(())
    })
}

/// # Safety
/// `cert` must be a live handle; `out` writable. Free the result with `srg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn srg_certificate_to_json(cert: *const SrgCertificate, out: *mut *mut c_char) -> SrgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(handle(cert, "cert")?.0.to_json()?)?;
        Ok(())
    })
}

/// # Safety
/// `cert` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn srg_certificate_free(cert: *mut SrgCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}
