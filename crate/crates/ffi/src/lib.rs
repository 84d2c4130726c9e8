//! C ABI for `morrey-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new` /
//! `*_build` functions and released by the matching `*_free`. Every fallible
//! call returns a [`MorreyStatus`]; on failure a message is available from
//! [`morrey_last_error_message`] on the same thread. Panics are caught and
//! reported as [`MorreyStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use morrey_core::constants::nj_ratio;
use morrey_core::domain::{Annulus, Segment};
use morrey_core::{cli::parse_profile, closedform, numeric, MorreyError, NormReport, SearchConfig};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorreyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Panic = 4,
}

/// Exponents `p < q` and dimension `d`.
pub struct MorreyParams(morrey_core::MorreyParams);

/// Piecewise radial power profile.
pub struct MorreyProfile(morrey_core::PiecewiseRadialPower);

/// Normalized witness family.
pub struct MorreyWitness(morrey_core::WitnessFamily);

/// Search resolution for numeric norms. See [`morrey_search_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MorreySearchConfig {
    pub center_grid: usize,
    pub radius_grid: usize,
    pub quad_points: usize,
    pub mc_samples: usize,
    pub rng_seed: u64,
}

impl From<SearchConfig> for MorreySearchConfig {
    fn from(c: SearchConfig) -> Self {
        Self {
            center_grid: c.center_grid,
            radius_grid: c.radius_grid,
            quad_points: c.quad_points,
            mc_samples: c.mc_samples,
            rng_seed: c.rng_seed,
        }
    }
}

impl From<MorreySearchConfig> for SearchConfig {
    fn from(c: MorreySearchConfig) -> Self {
        Self {
            center_grid: c.center_grid,
            radius_grid: c.radius_grid,
            quad_points: c.quad_points,
            mc_samples: c.mc_samples,
            rng_seed: c.rng_seed,
        }
    }
}

/// A norm value with the ball where it was attained.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MorreyNormResult {
    pub value: f64,
    pub center_dist: f64,
    pub radius: f64,
    pub abs_uncertainty: f64,
}

impl From<NormReport> for MorreyNormResult {
    fn from(r: NormReport) -> Self {
        Self {
            value: r.value,
            center_dist: r.argmax_ball.center_dist(),
            radius: r.argmax_ball.radius(),
            abs_uncertainty: r.abs_uncertainty,
        }
    }
}

/// Outcome of checking every signed combination of a witness family.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MorreyWitnessResult {
    pub min_signed_norm: f64,
    pub threshold: f64,
    pub theoretical_lower_bound: f64,
    pub nj_ratio: f64,
    pub sandwich_holds: bool,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure {
    status: MorreyStatus,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            status: MorreyStatus::InvalidArgument,
            message: message.into(),
        }
    }

    fn null(name: &str) -> Self {
        Self {
            status: MorreyStatus::NullPointer,
            message: format!("`{name}` is null"),
        }
    }
}

impl From<MorreyError> for Failure {
    fn from(e: MorreyError) -> Self {
        let status = match e {
            MorreyError::Numerical(_) | MorreyError::Divergent(_) | MorreyError::Underflow(_) => {
                MorreyStatus::Numerical
            }
            _ => MorreyStatus::InvalidArgument,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> MorreyStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MorreyStatus::Ok,
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            MorreyStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a valid pointer.
    unsafe { p.as_ref() }.ok_or_else(|| Failure::null(name))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(name));
    }
    // SAFETY: non-null and, per the caller contract, writable.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn search_config(cfg: *const MorreySearchConfig) -> SearchConfig {
    // SAFETY: null or valid, per the caller contract.
    unsafe { cfg.as_ref() }.map_or_else(SearchConfig::default, |c| (*c).into())
}

unsafe fn free_handle<T>(p: *mut T) {
    if !p.is_null() {
        // SAFETY: `p` came from `Box::into_raw` and is freed once.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Message of the most recent failed call on this thread, or null.
/// The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn morrey_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn morrey_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default search resolution.
#[no_mangle]
pub extern "C" fn morrey_search_config_default() -> MorreySearchConfig {
    SearchConfig::default().into()
}

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn morrey_params_new(p: f64, q: f64, d: usize, out: *mut *mut MorreyParams) -> MorreyStatus {
    guard(|| {
        let params = morrey_core::MorreyParams::new(p, q, d)?;
        unsafe { write(out, Box::into_raw(Box::new(MorreyParams(params))), "out") }
    })
}

/// # Safety
/// `params` must be null or a handle from [`morrey_params_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn morrey_params_free(params: *mut MorreyParams) {
    unsafe { free_handle(params) }
}

/// `|| |x|^(-d/q) ||` in the Morrey norm.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_power_norm_exact(params: *const MorreyParams, out: *mut f64) -> MorreyStatus {
    guard(|| {
        let params = unsafe { as_ref(params, "params") }?;
        unsafe { write(out, closedform::power_norm_exact(&params.0), "out") }
    })
}

/// Largest admissible chunk ratio for `delta`.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_epsilon_upper_bound(
    params: *const MorreyParams,
    delta: f64,
    out: *mut f64,
) -> MorreyStatus {
    guard(|| {
        let params = unsafe { as_ref(params, "params") }?;
        let v = closedform::epsilon_upper_bound(&params.0, delta)?;
        unsafe { write(out, v, "out") }
    })
}

/// `(1 - epsilon^alpha)^(1/p)` times the power norm.
///
/// # Safety
/// `params` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_chunk_lower_bound(
    params: *const MorreyParams,
    epsilon: f64,
    out: *mut f64,
) -> MorreyStatus {
    guard(|| {
        let params = unsafe { as_ref(params, "params") }?;
        let v = closedform::chunk_lower_bound(&params.0, epsilon)?;
        unsafe { write(out, v, "out") }
    })
}

/// Fills `out` row-major with the `n x 2^(n-1)` sign matrix.
/// `required` (optional) receives the entry count even when `len` is too small.
///
/// # Safety
/// `out` must point to `len` writable `int8_t`; `required` may be null.
#[no_mangle]
pub unsafe extern "C" fn morrey_sign_matrix(
    n: usize,
    out: *mut i8,
    len: usize,
    required: *mut usize,
) -> MorreyStatus {
    guard(|| {
        let m = morrey_core::sign_matrix(n)?;
        let need = m.n() * m.columns();
        if !required.is_null() {
            unsafe { write(required, need, "required") }?;
        }
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        if len < need {
            return Err(Failure::invalid(format!("buffer holds {len} entries, {need} needed")));
        }
        // SAFETY: `out` holds at least `need` entries.
        let buf = unsafe { std::slice::from_raw_parts_mut(out, need) };
        for i in 0..m.n() {
            buf[i * m.columns()..(i + 1) * m.columns()].copy_from_slice(m.row(i));
        }
        Ok(())
    })
}

/// Builds a profile from `count` segments listed innermost first.
/// `r_hi` may be `INFINITY` for the last segment.
///
/// # Safety
/// `params` must be a live handle, the three arrays must hold `count`
/// values each, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_profile_new(
    params: *const MorreyParams,
    r_lo: *const f64,
    r_hi: *const f64,
    coeff: *const f64,
    count: usize,
    out: *mut *mut MorreyProfile,
) -> MorreyStatus {
    guard(|| {
        let params = unsafe { as_ref(params, "params") }?;
        if count == 0 {
            return Err(Failure::invalid("a profile needs at least one segment"));
        }
        for (p, name) in [(r_lo, "r_lo"), (r_hi, "r_hi"), (coeff, "coeff")] {
            if p.is_null() {
                return Err(Failure::null(name));
            }
        }
        // SAFETY: non-null and holding `count` values each.
        let (lo, hi, c) = unsafe {
            (
                std::slice::from_raw_parts(r_lo, count),
                std::slice::from_raw_parts(r_hi, count),
                std::slice::from_raw_parts(coeff, count),
            )
        };
        let segments = (0..count)
            .map(|i| Annulus::new(lo[i], hi[i]).map(|a| Segment::new(a, c[i])))
            .collect::<Result<Vec<_>, _>>()?;
        let profile = morrey_core::PiecewiseRadialPower::new(params.0, segments)?;
        unsafe { write(out, Box::into_raw(Box::new(MorreyProfile(profile))), "out") }
    })
}

/// Parses a TOML profile document.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_profile_from_toml(text: *const c_char, out: *mut *mut MorreyProfile) -> MorreyStatus {
    guard(|| {
        if text.is_null() {
            return Err(Failure::null("text"));
        }
        // SAFETY: non-null and NUL-terminated per the contract.
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|e| Failure::invalid(format!("profile text is not UTF-8: {e}")))?;
        let profile = parse_profile(text).map_err(|e| Failure::invalid(e.to_string()))?;
        unsafe { write(out, Box::into_raw(Box::new(MorreyProfile(profile))), "out") }
    })
}

/// # Safety
/// `profile` must be null or a live handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn morrey_profile_free(profile: *mut MorreyProfile) {
    unsafe { free_handle(profile) }
}

/// Supremum over origin-centered balls.
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_profile_centered_norm(
    profile: *const MorreyProfile,
    out: *mut MorreyNormResult,
) -> MorreyStatus {
    guard(|| {
        let profile = unsafe { as_ref(profile, "profile") }?;
        let rep = closedform::centered_norm(&profile.0)?;
        unsafe { write(out, rep.into(), "out") }
    })
}

/// Numeric supremum over all balls. `cfg` may be null for the defaults.
///
/// # Safety
/// `profile` must be a live handle, `cfg` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_profile_numeric_norm(
    profile: *const MorreyProfile,
    cfg: *const MorreySearchConfig,
    out: *mut MorreyNormResult,
) -> MorreyStatus {
    guard(|| {
        let profile = unsafe { as_ref(profile, "profile") }?;
        let cfg = unsafe { search_config(cfg) };
        let rep = numeric::morrey_norm_numeric(&profile.0, &cfg)?;
        unsafe { write(out, rep.into(), "out") }
    })
}

/// Builds the witness family for `(n, delta)`. Pass `epsilon = 0` for the
/// default chunk ratio. `cfg` may be null.
///
/// # Safety
/// `params` must be a live handle, `cfg` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_witness_build(
    params: *const MorreyParams,
    n: usize,
    delta: f64,
    epsilon: f64,
    cfg: *const MorreySearchConfig,
    out: *mut *mut MorreyWitness,
) -> MorreyStatus {
    guard(|| {
        let params = unsafe { as_ref(params, "params") }?;
        let cfg = unsafe { search_config(cfg) };
        let eps = (epsilon != 0.0).then_some(epsilon);
        let family = morrey_core::build_witnesses(params.0, n, delta, eps, &cfg)?;
        unsafe { write(out, Box::into_raw(Box::new(MorreyWitness(family))), "out") }
    })
}

/// Chunk ratio used by the family.
///
/// # Safety
/// `witness` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_witness_epsilon(witness: *const MorreyWitness, out: *mut f64) -> MorreyStatus {
    guard(|| {
        let w = unsafe { as_ref(witness, "witness") }?;
        unsafe { write(out, w.0.epsilon(), "out") }
    })
}

/// Morrey norm shared by the unnormalized witnesses.
///
/// # Safety
/// `witness` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_witness_shared_norm(witness: *const MorreyWitness, out: *mut f64) -> MorreyStatus {
    guard(|| {
        let w = unsafe { as_ref(witness, "witness") }?;
        unsafe { write(out, w.0.shared_norm(), "out") }
    })
}

/// Copies witness `index` (0-based) into a new profile handle.
///
/// # Safety
/// `witness` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_witness_function(
    witness: *const MorreyWitness,
    index: usize,
    out: *mut *mut MorreyProfile,
) -> MorreyStatus {
    guard(|| {
        let w = unsafe { as_ref(witness, "witness") }?;
        let f = w
            .0
            .functions()
            .get(index)
            .ok_or_else(|| Failure::invalid(format!("witness index {index} out of range")))?;
        unsafe { write(out, Box::into_raw(Box::new(MorreyProfile(f.clone()))), "out") }
    })
}

/// Evaluates every signed combination. `cfg` may be null.
///
/// # Safety
/// `witness` must be a live handle, `cfg` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn morrey_witness_verify(
    witness: *const MorreyWitness,
    cfg: *const MorreySearchConfig,
    out: *mut MorreyWitnessResult,
) -> MorreyStatus {
    guard(|| {
        let w = unsafe { as_ref(witness, "witness") }?;
        let cfg = unsafe { search_config(cfg) };
        let v = morrey_core::verify_family(w.0.clone(), &cfg)?;
        let result = MorreyWitnessResult {
            min_signed_norm: v.combinations.min_over_patterns,
            threshold: v.threshold,
            theoretical_lower_bound: v.theoretical_lower_bound,
            nj_ratio: nj_ratio(&v.combinations)?,
            sandwich_holds: v.sandwich_holds,
            passed: v.passed,
        };
        unsafe { write(out, result, "out") }
    })
}

/// # Safety
/// `witness` must be null or a live handle, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn morrey_witness_free(witness: *mut MorreyWitness) {
    unsafe { free_handle(witness) }
}
