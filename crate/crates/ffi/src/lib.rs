//! C ABI over the powerlawst toolkit.
//!
//! Objects are handed out as opaque pointers and released with the matching
//! `*_free`. Every fallible call returns a [`PlsStatus`]; on failure the
//! message is available from [`pls_last_error`] until the next failing call
//! on the same thread. Results are written through out-pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use powerlawst::crosstalk::{colors_required, pulse_count, total_crosstalk, Convention};
use powerlawst::eldredge::{run_schedule, EldredgeFit, ScheduleResult};
use powerlawst::hybrid::{optimize, HybridPlan};
use powerlawst::{CouplingModel, Error, Lattice};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Regime = 4,
    SizeCap = 5,
    Panic = 6,
}

/// Crosstalk summation convention.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlsConvention {
    Published = 0,
    Draft = 1,
}

impl From<PlsConvention> for Convention {
    fn from(c: PlsConvention) -> Self {
        match c {
            PlsConvention::Published => Convention::Published,
            PlsConvention::Draft => Convention::Draft,
        }
    }
}

/// A hypercubic lattice together with its power-law coupling.
pub struct PlsLattice {
    lattice: Lattice,
    model: CouplingModel,
}

/// A completed cascaded-CNOT schedule.
pub struct PlsSchedule(ScheduleResult);

/// Exact cascaded times with an affine tail.
pub struct PlsFit(EldredgeFit);

/// Optimal hybrid plan for `r = 2..=r_max`.
pub struct PlsPlan(HybridPlan);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PlsStatus {
    match e {
        Error::InvalidSite { .. } => PlsStatus::OutOfRange,
        Error::Regime { .. } => PlsStatus::Regime,
        Error::SizeCap { .. } => PlsStatus::SizeCap,
        _ => PlsStatus::InvalidArgument,
    }
}

fn fail(status: PlsStatus, msg: impl Into<String>) -> PlsStatus {
    set_error(msg.into());
    status
}

/// Run `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (PlsStatus, String)>) -> PlsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PlsStatus::Ok,
        Ok(Err((s, m))) => fail(s, m),
        Err(_) => fail(PlsStatus::Panic, "internal panic"),
    }
}

fn core_err(e: Error) -> (PlsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (PlsStatus, String) {
    (PlsStatus::NullPointer, format!("{name} is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (PlsStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write<T>(p: *mut T, v: T, name: &str) -> Result<(), (PlsStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn pls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn pls_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a lattice with `dims` extents and couplings `prefactor / dist^alpha`.
///
/// # Safety
/// `extents` must point to `dims` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pls_lattice_new(
    extents: *const usize,
    dims: usize,
    alpha: f64,
    prefactor: f64,
    out: *mut *mut PlsLattice,
) -> PlsStatus {
    guard(|| {
        if extents.is_null() {
            return Err(null("extents"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let ext = std::slice::from_raw_parts(extents, dims);
        let lattice = Lattice::new(ext).map_err(core_err)?;
        let model = CouplingModel::with_prefactor(alpha, prefactor).map_err(core_err)?;
        write(out, Box::into_raw(Box::new(PlsLattice { lattice, model })), "out")
    })
}

/// # Safety
/// `lattice` must come from [`pls_lattice_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pls_lattice_free(lattice: *mut PlsLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// # Safety
/// `lattice` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn pls_lattice_num_sites(lattice: *const PlsLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.lattice.num_sites())
}

/// Greedy cascaded-CNOT schedule from `source`.
///
/// # Safety
/// `lattice` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pls_schedule_run(
    lattice: *const PlsLattice,
    source: usize,
    out: *mut *mut PlsSchedule,
) -> PlsStatus {
    guard(|| {
        let l = deref(lattice, "lattice")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = run_schedule(&l.lattice, &l.model, source).map_err(core_err)?;
        write(out, Box::into_raw(Box::new(PlsSchedule(s))), "out")
    })
}

/// # Safety
/// `schedule` must come from [`pls_schedule_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pls_schedule_free(schedule: *mut PlsSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// # Safety
/// `schedule` must be a live handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn pls_schedule_total_time(schedule: *const PlsSchedule) -> f64 {
    schedule.as_ref().map_or(f64::NAN, |s| s.0.total_time)
}

/// # Safety
/// `schedule` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn pls_schedule_num_events(schedule: *const PlsSchedule) -> usize {
    schedule.as_ref().map_or(0, |s| s.0.events.len())
}

/// Completion time and site of event `k`, in completion order.
///
/// # Safety
/// `schedule` must be a live handle; `time` and `site` writable.
#[no_mangle]
pub unsafe extern "C" fn pls_schedule_event(
    schedule: *const PlsSchedule,
    k: usize,
    time: *mut f64,
    site: *mut usize,
) -> PlsStatus {
    guard(|| {
        let s = deref(schedule, "schedule")?;
        let ev = s.0.events.get(k).ok_or_else(|| {
            (PlsStatus::OutOfRange, format!("event {k} out of range for {} events", s.0.events.len()))
        })?;
        if time.is_null() || site.is_null() {
            return Err(null("time/site"));
        }
        write(time, ev.time, "time")?;
        write(site, ev.site, "site")
    })
}

/// Run the exact benchmark for `r = 2..=window_hi` and fit `[window_lo, window_hi]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pls_fit_compute(
    alpha: f64,
    d: usize,
    window_lo: usize,
    window_hi: usize,
    out: *mut *mut PlsFit,
) -> PlsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let fit = EldredgeFit::compute(alpha, d, (window_lo, window_hi)).map_err(core_err)?;
        write(out, Box::into_raw(Box::new(PlsFit(fit))), "out")
    })
}

/// Fit precomputed exact times; `times[i]` is the time at `r = i + 2`.
///
/// # Safety
/// `times` must point to `len` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pls_fit_from_times(
    alpha: f64,
    d: usize,
    times: *const f64,
    len: usize,
    window_lo: usize,
    window_hi: usize,
    out: *mut *mut PlsFit,
) -> PlsStatus {
    guard(|| {
        if times.is_null() {
            return Err(null("times"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if window_hi > len + 1 {
            return Err((PlsStatus::InvalidArgument, format!("window ends at {window_hi} but times stop at {}", len + 1)));
        }
        let exact = std::slice::from_raw_parts(times, len).iter().enumerate().map(|(i, &t)| (i + 2, t)).collect();
        let fit = EldredgeFit::from_exact(alpha, d, exact, (window_lo, window_hi)).map_err(core_err)?;
        write(out, Box::into_raw(Box::new(PlsFit(fit))), "out")
    })
}

/// # Safety
/// `fit` must come from a `pls_fit_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pls_fit_free(fit: *mut PlsFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Cascaded time at `r`: exact inside the computed range, extrapolated beyond.
///
/// # Safety
/// `fit` must be a live handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn pls_fit_time(fit: *const PlsFit, r: usize) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.time(r))
}

/// # Safety
/// `fit` must be a live handle; `slope` and `intercept` writable.
#[no_mangle]
pub unsafe extern "C" fn pls_fit_line(fit: *const PlsFit, slope: *mut f64, intercept: *mut f64) -> PlsStatus {
    guard(|| {
        let f = deref(fit, "fit")?;
        if slope.is_null() || intercept.is_null() {
            return Err(null("slope/intercept"));
        }
        write(slope, f.0.fit_slope, "slope")?;
        write(intercept, f.0.fit_intercept, "intercept")
    })
}

/// Hybrid dynamic program on top of `fit` up to `r_max`.
///
/// # Safety
/// `fit` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pls_plan_optimize(fit: *const PlsFit, r_max: usize, out: *mut *mut PlsPlan) -> PlsStatus {
    guard(|| {
        let f = deref(fit, "fit")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let plan = optimize(&f.0, r_max, f.0.alpha, f.0.d).map_err(core_err)?;
        write(out, Box::into_raw(Box::new(PlsPlan(plan))), "out")
    })
}

/// # Safety
/// `plan` must come from [`pls_plan_optimize`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pls_plan_free(plan: *mut PlsPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

unsafe fn plan_entry<'a>(plan: *const PlsPlan, r: usize) -> Result<&'a HybridPlan, (PlsStatus, String)> {
    let p = &deref(plan, "plan")?.0;
    if !(2..=p.r_max).contains(&r) {
        return Err((PlsStatus::OutOfRange, format!("r={r} outside 2..={}", p.r_max)));
    }
    Ok(p)
}

/// Optimal time, split (`0` for no split) and recursion depth at `r`.
///
/// # Safety
/// `plan` must be a live handle; out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn pls_plan_entry(
    plan: *const PlsPlan,
    r: usize,
    best_time: *mut f64,
    best_split: *mut usize,
    depth: *mut u32,
) -> PlsStatus {
    guard(|| {
        let p = plan_entry(plan, r)?;
        if best_time.is_null() || best_split.is_null() || depth.is_null() {
            return Err(null("best_time/best_split/depth"));
        }
        write(best_time, p.best_time(r), "best_time")?;
        write(best_split, p.best_split(r).unwrap_or(0), "best_split")?;
        write(depth, p.depth(r), "depth")
    })
}

/// Smallest `r` whose optimum merges, or 0 if none up to `r_max`.
///
/// # Safety
/// `plan` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn pls_plan_crossover(plan: *const PlsPlan) -> usize {
    plan.as_ref().and_then(|p| p.0.crossover()).unwrap_or(0)
}

/// Total crosstalk error over all recursion levels with `n` colors.
///
/// # Safety
/// `total` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pls_total_crosstalk(
    r: f64,
    r0: f64,
    n: u64,
    alpha: f64,
    d: usize,
    convention: PlsConvention,
    total: *mut f64,
) -> PlsStatus {
    guard(|| {
        let b = total_crosstalk(r, r0, u128::from(n), alpha, d, convention.into()).map_err(core_err)?;
        write(total, b.total, "total")
    })
}

/// Smallest color count meeting `eps`, as the high and low 64-bit halves.
///
/// # Safety
/// `n_hi` and `n_lo` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pls_colors_required(
    r: f64,
    r0: f64,
    eps: f64,
    alpha: f64,
    d: usize,
    convention: PlsConvention,
    n_hi: *mut u64,
    n_lo: *mut u64,
) -> PlsStatus {
    guard(|| {
        if n_hi.is_null() || n_lo.is_null() {
            return Err(null("n_hi/n_lo"));
        }
        let req = colors_required(r, r0, eps, alpha, d, convention.into()).map_err(core_err)?;
        write(n_hi, (req.n >> 64) as u64, "n_hi")?;
        write(n_lo, req.n as u64, "n_lo")
    })
}

/// Distinct echo pulse times for `n` colors.
///
/// # Safety
/// `total` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pls_pulse_count(n: u32, total: *mut u64) -> PlsStatus {
    guard(|| {
        let pc = pulse_count(n).map_err(core_err)?;
        write(total, pc.total, "total")
    })
}
