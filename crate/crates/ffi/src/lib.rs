//! C interface to `nu_metric`.
//!
//! Plants and factorizations are opaque heap handles released with the
//! matching `*_free` call. Every fallible function returns an [`NmStatus`];
//! on failure a description is available from [`nm_last_error_message`] on
//! the same thread. Outputs are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use nu_metric::cli::{parse_plant, PlantSpec};
use nu_metric::index::circle_winding;
use nu_metric::stability::{closed_loop, margin};
use nu_metric::{normalize, nu_classical, nu_infinity, AnnulusScan, CoprimeFactors, Domain, NuError, Poly, TransferFunction};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    PoleHit = 5,
    Domain = 6,
    UnsupportedDelay = 7,
    DelayNotAllowed = 8,
    AxisRoot = 9,
    NotCoprime = 10,
    CurveThroughZero = 11,
    NeedsRefinement = 12,
    LengthNotPowerOfTwo = 13,
    DegeneratePair = 14,
    ShapeMismatch = 15,
    Panic = 99,
}

impl From<&NuError> for NmStatus {
    fn from(e: &NuError) -> Self {
        match e {
            NuError::PoleHit { .. } => NmStatus::PoleHit,
            NuError::DomainError => NmStatus::Domain,
            NuError::UnsupportedDelay => NmStatus::UnsupportedDelay,
            NuError::DelayNotAllowed => NmStatus::DelayNotAllowed,
            NuError::AxisRoot { .. } => NmStatus::AxisRoot,
            NuError::NotCoprime { .. } => NmStatus::NotCoprime,
            NuError::CurveThroughZero { .. } => NmStatus::CurveThroughZero,
            NuError::NeedsRefinement { .. } => NmStatus::NeedsRefinement,
            NuError::LengthNotPowerOfTwo { .. } => NmStatus::LengthNotPowerOfTwo,
            NuError::DegeneratePair => NmStatus::DegeneratePair,
            NuError::ShapeMismatch(_) => NmStatus::ShapeMismatch,
            NuError::Validation(_) => NmStatus::Validation,
            NuError::Parse(_) => NmStatus::Parse,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NmDomain {
    HalfPlane = 0,
    Disk = 1,
}

/// Opaque plant handle.
pub struct NmPlant(TransferFunction);

/// Opaque handle to normalized coprime factors.
pub struct NmFactors(CoprimeFactors);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmComplex {
    pub re: f64,
    pub im: f64,
}

/// Radii `1 - 2^-k` for `k = k_min..=k_max`, `samples0` points per circle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmScanConfig {
    pub k_min: u32,
    pub k_max: u32,
    pub samples0: usize,
    pub eps_inv: f64,
    pub tail: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmDistance {
    pub value: f64,
    pub sup_norm: f64,
    pub converged: bool,
    pub condition_holds: bool,
    pub marginal: bool,
    /// NaN when no scanned radius starts a passing run.
    pub rho_star: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmMargin {
    pub mu: f64,
    /// NaN when the loop is not stabilized.
    pub h_norm: f64,
    pub stabilized: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmWinding {
    pub winding: i64,
    pub min_modulus: f64,
    pub refinement_depth: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("nul bytes removed")
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

struct Failure(NmStatus, String);

impl From<NuError> for Failure {
    fn from(e: NuError) -> Self {
        Failure(NmStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(NmStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> NmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            NmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NmStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn plant<'a>(p: *const NmPlant) -> Result<&'a TransferFunction, Failure> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| null("plant"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn scan(cfg: *const NmScanConfig) -> Result<AnnulusScan, Failure> {
    match cfg.as_ref() {
        None => Ok(AnnulusScan::default()),
        Some(c) => Ok(AnnulusScan::dyadic(c.k_min, c.k_max, c.samples0, c.eps_inv, c.tail)?),
    }
}

/// Message for the last failed call on this thread (empty after a success).
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn nm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds `num(x) / den(x) * exp(-s delay)` from ascending coefficients,
/// cancelling common roots.
///
/// # Safety
/// `num` and `den` must point to `num_len` and `den_len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nm_plant_new(
    num: *const f64,
    num_len: usize,
    den: *const f64,
    den_len: usize,
    delay: f64,
    domain: NmDomain,
    out: *mut *mut NmPlant,
) -> NmStatus {
    guard(|| {
        let num = slice(num, num_len, "num")?;
        let den = slice(den, den_len, "den")?;
        if num.is_empty() || den.is_empty() {
            return Err(Failure(NmStatus::Validation, "empty coefficient array".into()));
        }
        let domain = match domain {
            NmDomain::HalfPlane => Domain::HalfPlane,
            NmDomain::Disk => Domain::Disk,
        };
        let (tf, _) = TransferFunction::reduced(Poly::new(num.to_vec()), Poly::new(den.to_vec()), delay, domain)?;
        write(out, Box::into_raw(Box::new(NmPlant(tf))))
    })
}

/// Parses the JSON plant format used by the command-line tool.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nm_plant_from_json(json: *const c_char, out: *mut *mut NmPlant) -> NmStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(NmStatus::InvalidUtf8, e.to_string()))?;
        if !text.trim_start().starts_with('{') {
            return Err(Failure(NmStatus::Parse, "expected a JSON object".into()));
        }
        let parsed = parse_plant(text)?;
        write(out, Box::into_raw(Box::new(NmPlant(parsed.value))))
    })
}

/// # Safety
/// `plant` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nm_plant_free(plant: *mut NmPlant) {
    if !plant.is_null() {
        drop(Box::from_raw(plant));
    }
}

/// Value at a point of the closed unit disk.
///
/// # Safety
/// `plant` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nm_plant_eval(plant: *const NmPlant, z: NmComplex, out: *mut NmComplex) -> NmStatus {
    guard(|| {
        let v = self::plant(plant)?.evaluate(Complex64::new(z.re, z.im))?;
        write(out, NmComplex { re: v.re, im: v.im })
    })
}

/// Normalized coprime factorization.
///
/// # Safety
/// `plant` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nm_factorize(plant: *const NmPlant, out: *mut *mut NmFactors) -> NmStatus {
    guard(|| {
        let f = normalize(self::plant(plant)?)?;
        write(out, Box::into_raw(Box::new(NmFactors(f))))
    })
}

/// `max | |N|^2 + |D|^2 - 1 |` on the boundary; NaN for a null handle.
///
/// # Safety
/// `factors` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn nm_factors_residual(factors: *const NmFactors) -> f64 {
    factors.as_ref().map_or(f64::NAN, |f| f.0.normalization_residual)
}

/// Lower bound of `|N| + |D|` over the closed disk; NaN for a null handle.
///
/// # Safety
/// `factors` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn nm_factors_corona_gap(factors: *const NmFactors) -> f64 {
    factors.as_ref().map_or(f64::NAN, |f| f.0.corona_gap)
}

/// JSON `{"N": {...}, "D": {...}}`; release with [`nm_string_free`].
///
/// # Safety
/// `factors` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nm_factors_to_json(factors: *const NmFactors, out: *mut *mut c_char) -> NmStatus {
    guard(|| {
        let f = &factors.as_ref().ok_or_else(|| null("factors"))?.0;
        let text = serde_json::json!({ "N": PlantSpec::from(&f.n), "D": PlantSpec::from(&f.d) }).to_string();
        let c = CString::new(text).expect("JSON has no interior NUL");
        write(out, c.into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `factors` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nm_factors_free(factors: *mut NmFactors) {
    if !factors.is_null() {
        drop(Box::from_raw(factors));
    }
}

/// The default scan: `k = 3..=14`, 1024 samples, floor 1e-9, tail 3.
#[no_mangle]
pub extern "C" fn nm_scan_default() -> NmScanConfig {
    NmScanConfig {
        k_min: 3,
        k_max: 14,
        samples0: 1024,
        eps_inv: 1e-9,
        tail: 3,
    }
}

/// Extended nu-metric. A null `cfg` selects [`nm_scan_default`].
///
/// # Safety
/// Plant handles must be live, `cfg` valid or null, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nm_distance(
    p1: *const NmPlant,
    p2: *const NmPlant,
    cfg: *const NmScanConfig,
    out: *mut NmDistance,
) -> NmStatus {
    guard(|| {
        let r = nu_infinity(plant(p1)?, plant(p2)?, &scan(cfg)?)?;
        write(
            out,
            NmDistance {
                value: r.value,
                sup_norm: r.sup_norm.unwrap_or(f64::NAN),
                converged: r.converged,
                condition_holds: r.condition.holds,
                marginal: r.condition.marginal,
                rho_star: r.condition.rho_star.unwrap_or(f64::NAN),
            },
        )
    })
}

/// Classical unit-circle nu-metric; delay plants give `DelayNotAllowed`.
///
/// # Safety
/// Plant handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nm_distance_classical(
    p1: *const NmPlant,
    p2: *const NmPlant,
    samples: usize,
    out: *mut f64,
) -> NmStatus {
    guard(|| {
        let r = nu_classical(plant(p1)?, plant(p2)?, samples)?;
        write(out, r.value)
    })
}

/// Stability margin of the positive-feedback loop of `plant` and `controller`.
///
/// # Safety
/// Handles must be live, `cfg` valid or null, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nm_margin(
    plant: *const NmPlant,
    controller: *const NmPlant,
    cfg: *const NmScanConfig,
    out: *mut NmMargin,
) -> NmStatus {
    guard(|| {
        let cl = closed_loop(self::plant(plant)?, self::plant(controller)?)?;
        let m = margin(&cl, &scan(cfg)?)?;
        write(
            out,
            NmMargin {
                mu: m.mu,
                h_norm: m.h_norm.unwrap_or(f64::NAN),
                stabilized: m.stability.stabilized,
            },
        )
    })
}

/// Winding number of the plant around the circle `|z| = radius`.
///
/// # Safety
/// `plant` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nm_winding(
    plant: *const NmPlant,
    radius: f64,
    samples: usize,
    eps_inv: f64,
    out: *mut NmWinding,
) -> NmStatus {
    guard(|| {
        let f = self::plant(plant)?;
        let eval = |z: Complex64| f.evaluate(z);
        let w = circle_winding(&eval, radius, samples, eps_inv)?;
        write(
            out,
            NmWinding {
                winding: w.winding,
                min_modulus: w.min_modulus,
                refinement_depth: w.refinement_depth,
            },
        )
    })
}
