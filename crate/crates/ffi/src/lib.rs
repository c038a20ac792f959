//! C interface to the viscomem solver.
//!
//! Objects are opaque handles created by `vm_*_new`/`vm_*_build` functions and
//! released with the matching `vm_*_free`. Every fallible call returns a
//! [`VmStatus`]; on failure the message is available from
//! [`vm_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use viscomem::config::RunConfig;
use viscomem::flow::{FlowSolver, FlowState};
use viscomem::kernel::{build_age_grid, AgeGrid, MemoryKernel};
use viscomem::strain::{MeasureVariant, StrainMeasure};
use viscomem::tensor::Tensor2;
use viscomem::Error;

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    NotConverged = 5,
    Aborted = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Strain measures selectable from C.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VmMeasureKind {
    Ucm = 0,
    Lcm = 1,
    PsmNorm = 2,
    /// Uses `alpha` and `beta`.
    Psm = 3,
    /// Uses `alpha` and `beta`.
    Wagner = 4,
    Currie = 5,
}

pub struct VmKernel(MemoryKernel);

pub struct VmAgeGrid(Arc<AgeGrid>);

pub struct VmMeasure(StrainMeasure);

pub struct VmSimulation {
    solver: FlowSolver,
    state: Option<FlowState>,
    dt: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> VmStatus {
    match e {
        Error::Config(_) | Error::SchemaMismatch(_) | Error::Inadmissible(_) => VmStatus::Config,
        Error::InvalidKernel(_)
        | Error::InvalidMeasure(_)
        | Error::InvalidParams(_)
        | Error::InvalidFlow(_)
        | Error::GeometryUnsupported(_)
        | Error::GridMismatch { .. } => VmStatus::InvalidArgument,
        Error::NotConverged { .. } => VmStatus::NotConverged,
        Error::Aborted { .. } => VmStatus::Aborted,
        Error::Io(_) | Error::Checkpoint(_) => VmStatus::Io,
        _ => VmStatus::Numerical,
    }
}

fn fail(status: VmStatus, msg: impl Into<String>) -> VmStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), VmStatus>) -> VmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => VmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(VmStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: viscomem::Result<T>) -> Result<T, VmStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), VmStatus> {
    if p.is_null() {
        Err(fail(VmStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), VmStatus> {
    non_null(out, "output handle")?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Copies the last error message of this thread into `buf` (nul-terminated).
/// Returns the message length without the terminator, or -1 if there is none.
/// The message is truncated when `len` is too small.
///
/// # Safety
/// `buf` must point to `len` writable bytes or be null.
#[no_mangle]
pub unsafe extern "C" fn vm_last_error_message(buf: *mut c_char, len: usize) -> isize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => -1,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len() as isize
        }
    })
}

/// Single-mode exponential memory `m(s) = e^{-s}`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vm_kernel_single_exponential(out: *mut *mut VmKernel) -> VmStatus {
    guard(|| emit(out, VmKernel(MemoryKernel::single_exponential())))
}

/// Multi-mode Maxwell memory with `n` moduli `eta` and relaxation rates `lambda`.
///
/// # Safety
/// `eta` and `lambda` must point to `n` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vm_kernel_multi_mode(
    eta: *const f64,
    lambda: *const f64,
    n: usize,
    out: *mut *mut VmKernel,
) -> VmStatus {
    guard(|| {
        non_null(eta, "eta")?;
        non_null(lambda, "lambda")?;
        let eta = std::slice::from_raw_parts(eta, n).to_vec();
        let lambda = std::slice::from_raw_parts(lambda, n).to_vec();
        emit(out, VmKernel(lift(MemoryKernel::multi_mode(eta, lambda))?))
    })
}

/// Doi-Edwards memory truncated to `terms` modes.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vm_kernel_doi_edwards(lambda: f64, terms: usize, out: *mut *mut VmKernel) -> VmStatus {
    guard(|| emit(out, VmKernel(lift(MemoryKernel::doi_edwards(lambda, terms))?)))
}

/// Normalized `m(s)`.
///
/// # Safety
/// `kernel` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn vm_kernel_evaluate(kernel: *const VmKernel, s: f64, out: *mut f64) -> VmStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(out, "out")?;
        *out = lift((*kernel).0.evaluate(s))?;
        Ok(())
    })
}

/// Kernel mass beyond age `s`.
///
/// # Safety
/// `kernel` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn vm_kernel_tail_mass(kernel: *const VmKernel, s: f64, out: *mut f64) -> VmStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        non_null(out, "out")?;
        *out = (*kernel).0.tail_mass(s);
        Ok(())
    })
}

/// # Safety
/// `kernel` must come from a `vm_kernel_*` constructor or be null.
#[no_mangle]
pub unsafe extern "C" fn vm_kernel_free(kernel: *mut VmKernel) {
    release(kernel)
}

/// Age grid truncated where the tail mass drops below `tail_tol`.
///
/// # Safety
/// `kernel` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn vm_age_grid_build(
    kernel: *const VmKernel,
    tail_tol: f64,
    quad_tol: f64,
    out: *mut *mut VmAgeGrid,
) -> VmStatus {
    guard(|| {
        non_null(kernel, "kernel")?;
        let grid = lift(build_age_grid(&(*kernel).0, tail_tol, quad_tol))?;
        emit(out, VmAgeGrid(Arc::new(grid)))
    })
}

/// Number of age nodes, or 0 for a null grid.
///
/// # Safety
/// `grid` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn vm_age_grid_len(grid: *const VmAgeGrid) -> usize {
    if grid.is_null() {
        0
    } else {
        (*grid).0.len()
    }
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), VmStatus> {
    non_null(buf, "buffer")?;
    if len < src.len() {
        return Err(fail(
            VmStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Copies the age nodes into `buf`.
///
/// # Safety
/// `grid` must be valid and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn vm_age_grid_nodes(grid: *const VmAgeGrid, buf: *mut f64, len: usize) -> VmStatus {
    guard(|| {
        non_null(grid, "grid")?;
        copy_out((*grid).0.nodes(), buf, len)
    })
}

/// Copies the quadrature weights into `buf`.
///
/// # Safety
/// `grid` must be valid and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn vm_age_grid_weights(grid: *const VmAgeGrid, buf: *mut f64, len: usize) -> VmStatus {
    guard(|| {
        non_null(grid, "grid")?;
        copy_out((*grid).0.weights(), buf, len)
    })
}

/// # Safety
/// `grid` must come from `vm_age_grid_build` or be null.
#[no_mangle]
pub unsafe extern "C" fn vm_age_grid_free(grid: *mut VmAgeGrid) {
    release(grid)
}

/// Strain measure of the given kind; `alpha` and `beta` are ignored by kinds
/// without parameters.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vm_measure_new(
    kind: VmMeasureKind,
    alpha: f64,
    beta: f64,
    out: *mut *mut VmMeasure,
) -> VmStatus {
    guard(|| {
        let variant = match kind {
            VmMeasureKind::Ucm => MeasureVariant::Ucm,
            VmMeasureKind::Lcm => MeasureVariant::Lcm,
            VmMeasureKind::PsmNorm => MeasureVariant::PsmNorm,
            VmMeasureKind::Psm => MeasureVariant::Psm { alpha, beta },
            VmMeasureKind::Wagner => MeasureVariant::Wagner { alpha, beta },
            VmMeasureKind::Currie => MeasureVariant::Currie,
        };
        emit(out, VmMeasure(lift(StrainMeasure::new(variant))?))
    })
}

/// `S(G)` for a row-major `d×d` tensor `g` (`d` = 2 or 3), written row-major to `out`.
///
/// # Safety
/// `measure` must be valid; `g` and `out` must hold `d*d` values.
#[no_mangle]
pub unsafe extern "C" fn vm_measure_evaluate(
    measure: *const VmMeasure,
    d: usize,
    g: *const f64,
    out: *mut f64,
) -> VmStatus {
    guard(|| {
        non_null(measure, "measure")?;
        non_null(g, "g")?;
        if !(d == 2 || d == 3) {
            return Err(fail(VmStatus::InvalidArgument, format!("dimension must be 2 or 3, got {d}")));
        }
        let g = Tensor2::from_row_major(d, std::slice::from_raw_parts(g, d * d));
        let s = lift((*measure).0.evaluate(&g))?;
        copy_out(&s.to_row_major(), out, d * d)
    })
}

/// # Safety
/// `measure` must come from `vm_measure_new` or be null.
#[no_mangle]
pub unsafe extern "C" fn vm_measure_free(measure: *mut VmMeasure) {
    release(measure)
}

/// Transient simulation built from a TOML run configuration, at rest at `t = 0`.
///
/// # Safety
/// `config` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vm_simulation_from_toml(config: *const c_char, out: *mut *mut VmSimulation) -> VmStatus {
    guard(|| {
        non_null(config, "config")?;
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|_| fail(VmStatus::Config, "configuration is not UTF-8"))?;
        let cfg = lift(RunConfig::from_toml(text))?;
        let time = cfg
            .time
            .ok_or_else(|| fail(VmStatus::Config, "time: a transient configuration is required"))?;
        let scenario = lift(cfg.scenario())?;
        let grid = Arc::new(lift(cfg.age_grid())?);
        let state = lift(FlowState::at_rest(&scenario, grid))?;
        let solver = lift(FlowSolver::new(scenario, cfg.solver_options()))?;
        emit(
            out,
            VmSimulation {
                solver,
                state: Some(state),
                dt: time.dt,
            },
        )
    })
}

/// Advances the simulation by `steps` steps of the configured `dt`.
///
/// # Safety
/// `sim` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vm_simulation_step(sim: *mut VmSimulation, steps: usize) -> VmStatus {
    guard(|| {
        non_null(sim, "simulation")?;
        let sim = &mut *sim;
        for _ in 0..steps {
            let state = sim
                .state
                .take()
                .ok_or_else(|| fail(VmStatus::Aborted, "simulation stopped after an earlier failure"))?;
            let t_end = state.t + sim.dt;
            let outcome = lift(sim.solver.time_advance(state, t_end, sim.dt, &mut |_| Ok(())))?;
            if let Some(e) = outcome.aborted {
                return Err(fail(status_of(&e), e.to_string()));
            }
            sim.state = Some(outcome.state);
        }
        Ok(())
    })
}

/// Current simulation time, or NaN for a null or failed simulation.
///
/// # Safety
/// `sim` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn vm_simulation_time(sim: *const VmSimulation) -> f64 {
    match sim.as_ref().and_then(|s| s.state.as_ref()) {
        Some(state) => state.t,
        None => f64::NAN,
    }
}

/// Spatial dimension of the simulation, or 0 for a null simulation.
///
/// # Safety
/// `sim` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn vm_simulation_dim(sim: *const VmSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.solver.scenario.geometry.dim())
}

/// Cell-averaged polymer stress, row-major `d×d` into `out`.
///
/// # Safety
/// `sim` must be valid and `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn vm_simulation_mean_stress(sim: *const VmSimulation, out: *mut f64, len: usize) -> VmStatus {
    guard(|| {
        non_null(sim, "simulation")?;
        let state = (*sim)
            .state
            .as_ref()
            .ok_or_else(|| fail(VmStatus::Aborted, "simulation stopped after an earlier failure"))?;
        copy_out(&state.mean_stress().to_row_major(), out, len)
    })
}

/// # Safety
/// `sim` must come from `vm_simulation_from_toml` or be null.
#[no_mangle]
pub unsafe extern "C" fn vm_simulation_free(sim: *mut VmSimulation) {
    release(sim)
}
