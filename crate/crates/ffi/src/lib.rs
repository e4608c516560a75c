//! C ABI for the interferometer simulator.
//!
//! Scenarios are opaque handles created by [`pev_scenario_preset`] or
//! [`pev_scenario_from_config`] and released with [`pev_scenario_free`].
//! Every function returns a [`PevStatus`]; on failure the message is kept
//! per thread and can be fetched with [`pev_last_error_message`]. Panics
//! never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pev_mzi::closed_form::{ClosedForm, DetectorWindow, SpatialSpan};
use pev_mzi::engine;
use pev_mzi::{Detector, Error, Scenario};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PevStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Configuration, preset or scenario-invariant error.
    Config = 3,
    /// Truncation, domain overflow or annihilation.
    Physics = 4,
    Io = 5,
    /// The output buffer is too small; the required size was reported.
    BufferTooSmall = 6,
    Panic = 7,
}

/// Opaque scenario handle.
pub struct PevScenario {
    scenario: Scenario,
    closed: ClosedForm,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> PevStatus {
    set_error(err.to_string());
    match err {
        Error::Truncation { .. } | Error::DomainOverflow { .. } | Error::Annihilation { .. } => {
            PevStatus::Physics
        }
        Error::Io { .. } => PevStatus::Io,
        Error::OutOfGrid { .. } | Error::WindowOutsideGrid(_) => PevStatus::InvalidArgument,
        _ => PevStatus::Config,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), PevStatus>) -> PevStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PevStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            PevStatus::Panic
        }
    }
}

fn check<T>(r: pev_mzi::Result<T>) -> Result<T, PevStatus> {
    r.map_err(|e| status_of(&e))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, PevStatus> {
    if p.is_null() {
        set_error("null string");
        return Err(PevStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        PevStatus::InvalidArgument
    })
}

unsafe fn handle<'a>(p: *const PevScenario) -> Result<&'a PevScenario, PevStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null scenario handle");
        PevStatus::NullPointer
    })
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, PevStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer");
        PevStatus::NullPointer
    })
}

fn detector(d: i32) -> Result<Detector, PevStatus> {
    match d {
        1 => Ok(Detector::D1),
        2 => Ok(Detector::D2),
        _ => {
            set_error(format!("detector must be 1 or 2, got {d}"));
            Err(PevStatus::InvalidArgument)
        }
    }
}

fn build(scenario: Scenario) -> Result<*mut PevScenario, PevStatus> {
    let closed = check(ClosedForm::new(&scenario))?;
    Ok(Box::into_raw(Box::new(PevScenario { scenario, closed })))
}

/// Creates a handle for a named preset.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pev_scenario_preset(name: *const c_char, out: *mut *mut PevScenario) -> PevStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        *out = build(check(Scenario::preset(text(name)?))?)?;
        Ok(())
    })
}

/// Creates a handle from config text. `spectrum:` paths resolve against the
/// working directory.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pev_scenario_from_config(
    config: *const c_char,
    out: *mut *mut PevScenario,
) -> PevStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        *out = build(check(Scenario::parse_config(text(config)?))?)?;
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `scenario` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pev_scenario_free(scenario: *mut PevScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Copies `src` plus a NUL into `buf`; `needed` receives the full size.
/// Leaves the last error alone so the message itself can be fetched.
unsafe fn copy_out(src: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), PevStatus> {
    let size = src.len() + 1;
    if let Some(n) = needed.as_mut() {
        *n = size;
    }
    if buf.is_null() || cap < size {
        return Err(PevStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf.cast::<u8>(), src.len());
    *buf.add(src.len()) = 0;
    Ok(())
}

/// Canonical config text of the scenario.
///
/// # Safety
/// `buf` must hold `cap` bytes (or be null to query the size via `needed`).
#[no_mangle]
pub unsafe extern "C" fn pev_scenario_render(
    scenario: *const PevScenario,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> PevStatus {
    guard(|| {
        let text = handle(scenario)?.scenario.render();
        copy_out(&text, buf, cap, needed).inspect_err(|_| {
            set_error(format!("buffer of {cap} bytes, {} needed", text.len() + 1));
        })
    })
}

/// Whole-grid detection probabilities of D1 and D2.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pev_total_probabilities(
    scenario: *const PevScenario,
    p_d1: *mut f64,
    p_d2: *mut f64,
) -> PevStatus {
    guard(|| {
        let (a, b) = handle(scenario)?.closed.total_probabilities();
        *out_ref(p_d1)? = a;
        *out_ref(p_d2)? = b;
        Ok(())
    })
}

/// Probability that detector `detector` (1 or 2) fires in the window of
/// width `eps_t` around `t_bar`, and width `eps_x` around the detector
/// position (`eps_x <= 0` means the whole spatial axis).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pev_detection_probability(
    scenario: *const PevScenario,
    detector: i32,
    t_bar: f64,
    eps_t: f64,
    eps_x: f64,
    out: *mut f64,
) -> PevStatus {
    guard(|| {
        let h = handle(scenario)?;
        let window = DetectorWindow {
            t_bar,
            x_bar: h.scenario.detector_x(),
            eps_t,
            eps_x: if eps_x > 0.0 { SpatialSpan::Width(eps_x) } else { SpatialSpan::Full },
        };
        *out_ref(out)? = check(h.closed.detection_probability(self::detector(detector)?, &window))?;
        Ok(())
    })
}

/// Detector density at a detection-frame point.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pev_final_density(
    scenario: *const PevScenario,
    detector: i32,
    t: f64,
    x: f64,
    out: *mut f64,
) -> PevStatus {
    guard(|| {
        let h = handle(scenario)?;
        *out_ref(out)? = check(h.closed.final_density(self::detector(detector)?, t, x))?;
        Ok(())
    })
}

/// Detection curve over the scenario's `t̄` range. Writes up to `cap`
/// points into `t_bar` and `prob`; `len` receives the curve length.
///
/// # Safety
/// `t_bar` and `prob` must each hold `cap` doubles (or be null when querying).
#[no_mangle]
pub unsafe extern "C" fn pev_detection_curve(
    scenario: *const PevScenario,
    detector: i32,
    t_bar: *mut f64,
    prob: *mut f64,
    cap: usize,
    len: *mut usize,
) -> PevStatus {
    guard(|| {
        let h = handle(scenario)?;
        let s = &h.scenario;
        let curve = check(h.closed.detection_curve(
            self::detector(detector)?,
            s.tbar_range(),
            s.detector.eps_t,
            SpatialSpan::from_option(s.detector.eps_x),
        ))?;
        *out_ref(len)? = curve.points.len();
        if t_bar.is_null() || prob.is_null() || cap < curve.points.len() {
            set_error(format!("room for {cap} points, {} needed", curve.points.len()));
            return Err(PevStatus::BufferTooSmall);
        }
        for (k, &(t, p)) in curve.points.iter().enumerate() {
            *t_bar.add(k) = t;
            *prob.add(k) = p;
        }
        Ok(())
    })
}

/// Runs the grid pipeline and reports its largest pointwise density
/// difference from the closed form.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pev_engine_discrepancy(scenario: *const PevScenario, out: *mut f64) -> PevStatus {
    guard(|| {
        let h = handle(scenario)?;
        let (state, _) = check(engine::run_pipeline(&h.scenario))?;
        *out_ref(out)? = check(engine::max_discrepancy(&state, &h.closed))?;
        Ok(())
    })
}

/// Copies the calling thread's last error message.
///
/// # Safety
/// `buf` must hold `cap` bytes (or be null to query the size via `needed`).
#[no_mangle]
pub unsafe extern "C" fn pev_last_error_message(buf: *mut c_char, cap: usize, needed: *mut usize) -> PevStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_out(&msg, buf, cap, needed) {
        Ok(()) => PevStatus::Ok,
        Err(s) => s,
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pev_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
