//! C interface to `ringsfwm`.
//!
//! Every function returns a [`RingsfwmStatus`]; on failure the message is
//! available from [`ringsfwm_last_error`] on the same thread. Objects are
//! opaque handles created by `*_new`/`*_run_*` and released by `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ringsfwm::scenario::{self, Scenario, ScenarioOutcome};
use ringsfwm::{singles_ratio_closed_form, Complex64, Error, ModeParams, RingSystem};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingsfwmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Coverage = 4,
    Accuracy = 5,
    Divergence = 6,
    Undefined = 7,
    NonFinite = 8,
    Io = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingsfwmMode {
    Pump = 0,
    Signal = 1,
    Idler = 2,
}

/// One ring resonance, SI units; rates are angular (s⁻¹).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RingsfwmModeRates {
    pub omega_rad_per_s: f64,
    pub v_m_per_s: f64,
    /// Phantom-channel speed; 0 means equal to `v_m_per_s`.
    pub u_m_per_s: f64,
    pub channel_rate_per_s: f64,
    pub loss_rate_per_s: f64,
}

/// Scalar observables; NaN marks a quantity that is undefined or was not
/// computed.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RingsfwmObservables {
    pub p_coincidences: f64,
    pub p_singles: f64,
    pub r: f64,
    pub r_formula: f64,
    pub r_rel_dev: f64,
    pub schmidt_k: f64,
    pub purity: f64,
    pub all_checks_passed: bool,
}

/// Opaque ring system.
pub struct RingsfwmSystem(RingSystem);

/// Opaque result of a scenario run.
pub struct RingsfwmOutcome(ScenarioOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RingsfwmStatus {
    match e {
        Error::InvalidParameter { .. } | Error::Shape(_) => RingsfwmStatus::InvalidArgument,
        Error::Coverage { .. } => RingsfwmStatus::Coverage,
        Error::Accuracy { .. } => RingsfwmStatus::Accuracy,
        Error::Divergence { .. } => RingsfwmStatus::Divergence,
        Error::Undefined(_) => RingsfwmStatus::Undefined,
        Error::NonFinite(_) => RingsfwmStatus::NonFinite,
        Error::Config { .. } | Error::Json(_) => RingsfwmStatus::Config,
        Error::Io(_) => RingsfwmStatus::Io,
    }
}

struct Failure(RingsfwmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), format!("[{}] {e}", e.provenance()))
    }
}

fn null(what: &str) -> Failure {
    Failure(RingsfwmStatus::NullPointer, format!("null pointer: {what}"))
}

/// Runs `f`, records any failure or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RingsfwmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RingsfwmStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RingsfwmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes either null or a valid pointer.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the caller's contract, valid for writes.
    unsafe { p.write(value) };
    Ok(())
}

fn mode_params(m: &RingsfwmModeRates) -> Result<ModeParams, Failure> {
    let u = if m.u_m_per_s == 0.0 { m.v_m_per_s } else { m.u_m_per_s };
    Ok(ModeParams::from_rates(m.omega_rad_per_s, m.v_m_per_s, u, m.channel_rate_per_s, m.loss_rate_per_s)?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ringsfwm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ringsfwm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a system with real positive couplings.
///
/// # Safety
/// `pump`, `signal` and `idler` must point to valid structs; `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_system_new(
    pump: *const RingsfwmModeRates,
    signal: *const RingsfwmModeRates,
    idler: *const RingsfwmModeRates,
    lambda_re: f64,
    lambda_im: f64,
    eta: f64,
    zeta: f64,
    out: *mut *mut RingsfwmSystem,
) -> RingsfwmStatus {
    guard(|| {
        let p = mode_params(unsafe { deref(pump, "pump") }?)?;
        let s = mode_params(unsafe { deref(signal, "signal") }?)?;
        let i = mode_params(unsafe { deref(idler, "idler") }?)?;
        let sys = RingSystem::new(p, s, i, Complex64::new(lambda_re, lambda_im), eta, zeta)?;
        unsafe { write(out, Box::into_raw(Box::new(RingsfwmSystem(sys))), "out") }
    })
}

/// # Safety
/// `sys` must be NULL or a handle from [`ringsfwm_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_system_free(sys: *mut RingsfwmSystem) {
    if !sys.is_null() {
        // SAFETY: created by Box::into_raw in ringsfwm_system_new.
        drop(unsafe { Box::from_raw(sys) });
    }
}

/// Total damping rate Γ̄ = Γ + M of one mode, s⁻¹.
///
/// # Safety
/// `sys` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_system_total_rate(sys: *const RingsfwmSystem, mode: RingsfwmMode, out: *mut f64) -> RingsfwmStatus {
    guard(|| {
        let sys = &unsafe { deref(sys, "sys") }?.0;
        let m = match mode {
            RingsfwmMode::Pump => sys.pump(),
            RingsfwmMode::Signal => sys.signal(),
            RingsfwmMode::Idler => sys.idler(),
        };
        unsafe { write(out, m.total_rate(), "out") }
    })
}

/// Weak-pump singles-to-coincidences ratio (Γ_S M_I + Γ_I M_S)/(Γ_S Γ_I).
///
/// # Safety
/// `sys` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_system_singles_ratio(sys: *const RingsfwmSystem, out: *mut f64) -> RingsfwmStatus {
    guard(|| {
        let sys = &unsafe { deref(sys, "sys") }?.0;
        let r = singles_ratio_closed_form(&sys.derive_rates())
            .ok_or_else(|| Failure(RingsfwmStatus::Undefined, "singles ratio undefined: a channel rate is zero".into()))?;
        unsafe { write(out, r, "out") }
    })
}

/// Runs a scenario given as JSON text. No files are written.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_scenario_run_json(json: *const c_char, out: *mut *mut RingsfwmOutcome) -> RingsfwmStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        // SAFETY: non-null and NUL-terminated per the contract.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|_| Failure(RingsfwmStatus::Config, "scenario JSON is not UTF-8".into()))?;
        let outcome = scenario::evaluate(&Scenario::from_json(text)?)?;
        unsafe { write(out, Box::into_raw(Box::new(RingsfwmOutcome(outcome))), "out") }
    })
}

/// # Safety
/// `outcome` must be NULL or a handle from [`ringsfwm_scenario_run_json`]
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_outcome_free(outcome: *mut RingsfwmOutcome) {
    if !outcome.is_null() {
        // SAFETY: created by Box::into_raw in ringsfwm_scenario_run_json.
        drop(unsafe { Box::from_raw(outcome) });
    }
}

/// Scalar observables of the perturbative pipeline, or of the time-domain
/// pipeline when only that ran (singles and r are then NaN).
///
/// # Safety
/// `outcome` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_outcome_observables(outcome: *const RingsfwmOutcome, out: *mut RingsfwmObservables) -> RingsfwmStatus {
    guard(|| {
        let o = &unsafe { deref(outcome, "outcome") }?.0;
        let nan = f64::NAN;
        let r_formula = singles_ratio_closed_form(&o.rates).unwrap_or(nan);
        let obs = match (&o.perturbative, &o.propagator) {
            (Some(p), _) => {
                let x = &p.observables;
                RingsfwmObservables {
                    p_coincidences: x.p_coincidences,
                    p_singles: x.p_singles,
                    r: x.r.unwrap_or(nan),
                    r_formula,
                    r_rel_dev: x.r_rel_dev.unwrap_or(nan),
                    schmidt_k: x.schmidt_k.unwrap_or(nan),
                    purity: x.purity.unwrap_or(nan),
                    all_checks_passed: o.all_passed(),
                }
            }
            (None, Some(t)) => RingsfwmObservables {
                p_coincidences: t.summary.p_coincidences,
                p_singles: nan,
                r: nan,
                r_formula,
                r_rel_dev: nan,
                schmidt_k: t.summary.schmidt_k.unwrap_or(nan),
                purity: t.summary.purity.unwrap_or(nan),
                all_checks_passed: o.all_passed(),
            },
            (None, None) => return Err(Failure(RingsfwmStatus::Undefined, "no pipeline was run".into())),
        };
        unsafe { write(out, obs, "out") }
    })
}

/// Signal and idler axis lengths of the outcome's grids.
///
/// # Safety
/// `outcome` must be a live handle; `n_signal` and `n_idler` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_outcome_grid_shape(outcome: *const RingsfwmOutcome, n_signal: *mut usize, n_idler: *mut usize) -> RingsfwmStatus {
    guard(|| {
        let o = &unsafe { deref(outcome, "outcome") }?.0;
        unsafe { write(n_signal, o.prepared.axis_s.len(), "n_signal") }?;
        unsafe { write(n_idler, o.prepared.axis_i.len(), "n_idler") }
    })
}

/// Copies the peak-normalised JSI row-major (signal index slowest) into
/// `buf`, which must hold `n_signal * n_idler` doubles.
///
/// # Safety
/// `outcome` must be a live handle; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_outcome_jsi(outcome: *const RingsfwmOutcome, buf: *mut f64, len: usize) -> RingsfwmStatus {
    guard(|| {
        let o = &unsafe { deref(outcome, "outcome") }?.0;
        let jsi = match (&o.perturbative, &o.propagator) {
            (Some(p), _) => p.jsi.clone(),
            (None, Some(t)) => t.amplitude.norm_sqr().normalized(),
            (None, None) => return Err(Failure(RingsfwmStatus::Undefined, "no pipeline was run".into())),
        };
        let values = jsi.values();
        if len < values.len() {
            return Err(Failure(RingsfwmStatus::BufferTooSmall, format!("need {} doubles, got {len}", values.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        // SAFETY: buf holds at least `len` ≥ values.len() doubles.
        unsafe { ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len()) };
        Ok(())
    })
}

/// The observables.json document for the outcome. Release with
/// [`ringsfwm_string_free`].
///
/// # Safety
/// `outcome` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_outcome_observables_json(outcome: *const RingsfwmOutcome, out: *mut *mut c_char) -> RingsfwmStatus {
    guard(|| {
        let o = &unsafe { deref(outcome, "outcome") }?.0;
        let text = scenario::observables_json(o)?;
        let c = CString::new(text).map_err(|_| Failure(RingsfwmStatus::NonFinite, "interior NUL in JSON".into()))?;
        unsafe { write(out, c.into_raw(), "out") }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ringsfwm_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: created by CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}
