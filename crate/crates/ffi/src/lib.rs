//! C ABI for the `fvmp` solver.
//!
//! Simulations are opaque handles created by [`fvmp_simulation_new`] and
//! released with [`fvmp_simulation_free`]. Every fallible function returns
//! an [`FvmpStatus`]; the message of the last failure on the calling thread
//! is available from [`fvmp_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fvmp::limiters::{bj_factor, Bounds};
use fvmp::{ExperimentSpec, InitMode, InitialCondition, LimiterKind, Scheme, Simulation, SspScheme, StreamCase};

pub const FVMP_SCHEME_FV2: u32 = 0;
pub const FVMP_SCHEME_FV4: u32 = 1;

pub const FVMP_LIMITER_UNLIMITED: u32 = 0;
pub const FVMP_LIMITER_BJ: u32 = 1;
pub const FVMP_LIMITER_KUZMIN: u32 = 2;
pub const FVMP_LIMITER_NK: u32 = 3;
pub const FVMP_LIMITER_N2N: u32 = 4;
pub const FVMP_LIMITER_GLOBAL: u32 = 5;

pub const FVMP_CASE_DIAG: u32 = 0;
pub const FVMP_CASE_QUAD: u32 = 1;
pub const FVMP_CASE_SIN: u32 = 2;
pub const FVMP_CASE_SBR: u32 = 3;

pub const FVMP_IC_COS: u32 = 0;
pub const FVMP_IC_COS2: u32 = 1;
pub const FVMP_IC_LEVEQUE: u32 = 2;

/// Use the default that goes with the scheme or initial condition.
pub const FVMP_DEFAULT: u32 = 0;
pub const FVMP_INIT_POINT: u32 = 1;
pub const FVMP_INIT_GAUSS: u32 = 2;
pub const FVMP_TIME_FE: u32 = 1;
pub const FVMP_TIME_SSP22: u32 = 2;
pub const FVMP_TIME_SSP33: u32 = 3;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FvmpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    SolverError = 4,
    Panic = 5,
}

/// Run description. Obtain defaults from [`fvmp_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvmpConfig {
    pub scheme: u32,
    pub limiter: u32,
    pub flow_case: u32,
    pub initial_condition: u32,
    /// `FVMP_DEFAULT`, `FVMP_INIT_POINT` or `FVMP_INIT_GAUSS`.
    pub init_mode: u32,
    /// `FVMP_DEFAULT` or one of the `FVMP_TIME_*` codes.
    pub time_scheme: u32,
    pub nx: u32,
    pub ny: u32,
    pub courant: f64,
    pub end_time: f64,
    /// Forced step count; 0 derives it from `courant`.
    pub steps: u64,
}

/// Relative errors and extrema of the current state.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvmpReport {
    pub rel_l1: f64,
    pub rel_l2: f64,
    pub rel_linf: f64,
    pub min: f64,
    pub max: f64,
    /// NaN when the limiter has no maximum principle.
    pub max_mp_violation: f64,
    pub max_courant: f64,
}

/// Opaque simulation handle.
pub struct FvmpSimulation {
    inner: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

type Failure = (FvmpStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FvmpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FvmpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FvmpStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    (FvmpStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: String) -> Failure {
    (FvmpStatus::InvalidArgument, msg)
}

fn solver(e: fvmp::Error) -> Failure {
    match e {
        fvmp::Error::Config(_)
        | fvmp::Error::GridTooSmall { .. }
        | fvmp::Error::UnsupportedLimiter { .. }
        | fvmp::Error::CourantExceeded { .. } => (FvmpStatus::InvalidArgument, e.to_string()),
        _ => (FvmpStatus::SolverError, e.to_string()),
    }
}

unsafe fn sim_ref<'a>(sim: *const FvmpSimulation) -> Result<&'a FvmpSimulation, Failure> {
    sim.as_ref().ok_or_else(|| null("simulation"))
}

unsafe fn sim_mut<'a>(sim: *mut FvmpSimulation) -> Result<&'a mut FvmpSimulation, Failure> {
    sim.as_mut().ok_or_else(|| null("simulation"))
}

fn decode(cfg: &FvmpConfig) -> Result<ExperimentSpec, Failure> {
    let code = |what: &str, v: u32| invalid(format!("unknown {what} code {v}"));
    let scheme = match cfg.scheme {
        FVMP_SCHEME_FV2 => Scheme::Fv2,
        FVMP_SCHEME_FV4 => Scheme::Fv4,
        v => return Err(code("scheme", v)),
    };
    let limiter = match cfg.limiter {
        FVMP_LIMITER_UNLIMITED => LimiterKind::Unlimited,
        FVMP_LIMITER_BJ => LimiterKind::Bj,
        FVMP_LIMITER_KUZMIN => LimiterKind::Kuzmin,
        FVMP_LIMITER_NK => LimiterKind::Nk,
        FVMP_LIMITER_N2N => LimiterKind::N2n,
        FVMP_LIMITER_GLOBAL => LimiterKind::Global,
        v => return Err(code("limiter", v)),
    };
    let stream = match cfg.flow_case {
        FVMP_CASE_DIAG => StreamCase::diag(),
        FVMP_CASE_QUAD => StreamCase::quad(),
        FVMP_CASE_SIN => StreamCase::sin(),
        FVMP_CASE_SBR => StreamCase::sbr(),
        v => return Err(code("flow case", v)),
    };
    let ic = match cfg.initial_condition {
        FVMP_IC_COS => InitialCondition::CosBump,
        FVMP_IC_COS2 => InitialCondition::CosSqBump,
        FVMP_IC_LEVEQUE => InitialCondition::LeVeque,
        v => return Err(code("initial condition", v)),
    };
    let mut spec = ExperimentSpec::new(scheme, limiter, stream, ic, cfg.nx as usize);
    spec.ny = cfg.ny as usize;
    spec.init_mode = match cfg.init_mode {
        FVMP_DEFAULT => spec.init_mode,
        FVMP_INIT_POINT => InitMode::PointSample,
        FVMP_INIT_GAUSS => InitMode::Gauss3x3,
        v => return Err(code("init mode", v)),
    };
    spec.time_scheme = match cfg.time_scheme {
        FVMP_DEFAULT => spec.time_scheme,
        FVMP_TIME_FE => SspScheme::Fe,
        FVMP_TIME_SSP22 => SspScheme::Ssp22,
        FVMP_TIME_SSP33 => SspScheme::Ssp33,
        v => return Err(code("time scheme", v)),
    };
    spec.courant_target = cfg.courant;
    spec.end_time = cfg.end_time;
    spec.steps = (cfg.steps > 0).then_some(cfg.steps as usize);
    Ok(spec)
}

/// Fill `out` with an FV2, unlimited, diagonal-flow run of the C¹ bump on
/// 64×64 cells, Courant target 0.5, end time 1.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fvmp_config_default(out: *mut FvmpConfig) -> FvmpStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = FvmpConfig {
            scheme: FVMP_SCHEME_FV2,
            limiter: FVMP_LIMITER_UNLIMITED,
            flow_case: FVMP_CASE_DIAG,
            initial_condition: FVMP_IC_COS,
            init_mode: FVMP_DEFAULT,
            time_scheme: FVMP_DEFAULT,
            nx: 64,
            ny: 64,
            courant: 0.5,
            end_time: 1.0,
            steps: 0,
        };
        Ok(())
    })
}

/// Create a simulation at its initial state. On success `*out` owns a
/// handle that must be passed to [`fvmp_simulation_free`].
///
/// # Safety
/// `config` must be null or point to a valid config; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fvmp_simulation_new(config: *const FvmpConfig, out: *mut *mut FvmpSimulation) -> FvmpStatus {
    guard(|| {
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = std::ptr::null_mut();
        let inner = Simulation::new(decode(cfg)?).map_err(solver)?;
        *out = Box::into_raw(Box::new(FvmpSimulation { inner }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from [`fvmp_simulation_new`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn fvmp_simulation_free(sim: *mut FvmpSimulation) {
    if !sim.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(sim))));
    }
}

/// Advance one step. Fails with `InvalidArgument` once the run is finished.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fvmp_simulation_step(sim: *mut FvmpSimulation) -> FvmpStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        if s.inner.finished() {
            return Err(invalid("run already finished".into()));
        }
        s.inner.step().map_err(solver)
    })
}

/// Advance to the end time.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fvmp_simulation_run(sim: *mut FvmpSimulation) -> FvmpStatus {
    guard(|| sim_mut(sim)?.inner.run().map_err(solver))
}

/// Current simulation time.
///
/// # Safety
/// `sim` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fvmp_simulation_time(sim: *const FvmpSimulation, out: *mut f64) -> FvmpStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        *out.as_mut().ok_or_else(|| null("out"))? = s.inner.time();
        Ok(())
    })
}

/// Steps taken so far and planned in total.
///
/// # Safety
/// `sim` must be null or a live handle; `taken` and `total` null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn fvmp_simulation_steps(
    sim: *const FvmpSimulation,
    taken: *mut u64,
    total: *mut u64,
) -> FvmpStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let taken = taken.as_mut().ok_or_else(|| null("taken"))?;
        let total = total.as_mut().ok_or_else(|| null("total"))?;
        *taken = s.inner.steps_taken() as u64;
        *total = s.inner.plan().n_steps as u64;
        Ok(())
    })
}

/// Copy the cell means, row-major with `k = j·nx + i`, into `buf`.
/// `nx`/`ny` are written whenever they are non-null, including when the
/// buffer is too small.
///
/// # Safety
/// `sim` must be null or a live handle; `buf` null or valid for `len`
/// writes; `nx`, `ny` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fvmp_simulation_field(
    sim: *const FvmpSimulation,
    buf: *mut f64,
    len: usize,
    nx: *mut u32,
    ny: *mut u32,
) -> FvmpStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let state = s.inner.state();
        if let Some(nx) = nx.as_mut() {
            *nx = state.nx() as u32;
        }
        if let Some(ny) = ny.as_mut() {
            *ny = state.ny() as u32;
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let data = state.as_slice();
        if len < data.len() {
            return Err((
                FvmpStatus::BufferTooSmall,
                format!("buffer holds {len} values, field has {}", data.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, data.len()).copy_from_slice(data);
        Ok(())
    })
}

/// Errors against the exact solution at the current time. Reversing flows
/// have one only at whole periods.
///
/// # Safety
/// `sim` must be null or a live handle; `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn fvmp_simulation_report(sim: *const FvmpSimulation, out: *mut FvmpReport) -> FvmpStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = s.inner.report().map_err(solver)?;
        *out = FvmpReport {
            rel_l1: r.rel_l1,
            rel_l2: r.rel_l2,
            rel_linf: r.rel_linf,
            min: r.min,
            max: r.max,
            max_mp_violation: r.max_mp_violation.unwrap_or(f64::NAN),
            max_courant: r.max_courant,
        };
        Ok(())
    })
}

/// Copy the last error message of this thread into `buf` as a
/// NUL-terminated string, truncating to fit. Returns the buffer size needed
/// for the whole message, including the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn fvmp_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            let dst = std::slice::from_raw_parts_mut(buf as *mut u8, n + 1);
            dst[..n].copy_from_slice(&bytes[..n]);
            dst[n] = 0;
        }
        bytes.len() + 1
    })
}

/// Upwind flux `max(vn, 0)·a + min(vn, 0)·b`.
#[no_mangle]
pub extern "C" fn fvmp_upwind_flux(a: f64, b: f64, vn: f64) -> f64 {
    fvmp::flux::upwind_flux(a, b, vn)
}

/// Largest `α ∈ [0, 1]` keeping `mean + α(p − mean)` inside `[lo, hi]`.
/// NaN if `lo > hi` or any argument is NaN.
#[no_mangle]
pub extern "C" fn fvmp_bj_factor(p: f64, mean: f64, lo: f64, hi: f64) -> f64 {
    if [p, mean, lo, hi].iter().any(|v| v.is_nan()) || lo > hi {
        return f64::NAN;
    }
    bj_factor(p, mean, Bounds { lo, hi })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fvmp_version() -> *const c_char {
    const VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}
