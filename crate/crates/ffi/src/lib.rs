//! C interface to the oscillator-network simulator.
//!
//! A [`QcSimulation`] is an opaque handle owning the ring coupling, the
//! mean-field state and, optionally, a fluctuation covariance that is
//! co-propagated whenever the mean field is advanced. Every fallible call
//! returns a [`QcStatus`]; the message of the most recent failure on the
//! calling thread is available through [`qc_last_error_message`].
//!
//! Array arguments are caller-owned buffers with an explicit length. Node
//! indices are 0-based, covariances are row-major in the quadrature ordering
//! `(q_0, p_0, ..., q_{N-1}, p_{N-1})`, and complex amplitudes are
//! interleaved `(re_0, im_0, re_1, im_1, ...)`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use qchimera::gaussian::{propagate_covariance, weighted_correlation, CovarianceState};
use qchimera::info::{mutual_information, renyi2_entropy, Bipartition};
use qchimera::ring::{
    advance_mean_field, initial_conditions, integrate_mean_field, local_order_parameter,
    InitialConditionSpec, MeanFieldState, RingCoupling,
};
use qchimera::{Error, NetworkParams};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    /// Divergence, loss of positivity or an ill-conditioned matrix.
    Numerical = 4,
    /// The call needs a covariance but none is attached.
    NoCovariance = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

impl From<&Error> for QcStatus {
    fn from(e: &Error) -> Self {
        match e.root() {
            Error::InvalidParameter { .. }
            | Error::OutOfRange { .. }
            | Error::TooFewNodes(_)
            | Error::Config(_)
            | Error::Capacity { .. } => QcStatus::InvalidArgument,
            Error::Shape { .. } => QcStatus::ShapeMismatch,
            _ => QcStatus::Numerical,
        }
    }
}

/// Opaque simulation handle.
pub struct QcSimulation {
    params: NetworkParams,
    coupling: RingCoupling,
    state: MeanFieldState,
    covariance: Option<CovarianceState>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: QcStatus, msg: impl Into<String>) -> QcStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> QcStatus {
    fail(QcStatus::from(&e), e.to_string())
}

/// Runs `f` behind a panic guard and records failures.
fn guard(f: impl FnOnce() -> Result<(), QcStatus>) -> QcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(QcStatus::Internal, "panic caught at the C boundary"),
    }
}

fn lift<T>(r: qchimera::Result<T>) -> Result<T, QcStatus> {
    r.map_err(from_error)
}

unsafe fn sim_ref<'a>(sim: *const QcSimulation) -> Result<&'a QcSimulation, QcStatus> {
    sim.as_ref()
        .ok_or_else(|| fail(QcStatus::NullPointer, "simulation handle is null"))
}

unsafe fn sim_mut<'a>(sim: *mut QcSimulation) -> Result<&'a mut QcSimulation, QcStatus> {
    sim.as_mut()
        .ok_or_else(|| fail(QcStatus::NullPointer, "simulation handle is null"))
}

unsafe fn input<'a>(data: *const f64, len: usize, expected: usize) -> Result<&'a [f64], QcStatus> {
    if data.is_null() {
        return Err(fail(QcStatus::NullPointer, "input buffer is null"));
    }
    if len != expected {
        return Err(fail(
            QcStatus::ShapeMismatch,
            format!("input buffer holds {len} values, expected {expected}"),
        ));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

unsafe fn output<'a>(data: *mut f64, len: usize, needed: usize) -> Result<&'a mut [f64], QcStatus> {
    if data.is_null() {
        return Err(fail(QcStatus::NullPointer, "output buffer is null"));
    }
    if len < needed {
        return Err(fail(
            QcStatus::ShapeMismatch,
            format!("output buffer holds {len} values, needs {needed}"),
        ));
    }
    Ok(std::slice::from_raw_parts_mut(data, needed))
}

unsafe fn write_scalar(out: *mut f64, value: f64) -> Result<(), QcStatus> {
    if out.is_null() {
        return Err(fail(QcStatus::NullPointer, "output pointer is null"));
    }
    *out = value;
    Ok(())
}

fn covariance_of(sim: &QcSimulation) -> Result<&CovarianceState, QcStatus> {
    sim.covariance.as_ref().ok_or_else(|| {
        fail(
            QcStatus::NoCovariance,
            "no covariance attached; call qc_sim_reset_covariance first",
        )
    })
}

/// Creates a network of `n_nodes` oscillators coupled to every node within
/// ring distance `range` with total strength `strength`. All nodes start at
/// the origin. Returns null on invalid parameters.
#[no_mangle]
pub extern "C" fn qc_sim_new(
    n_nodes: usize,
    range: usize,
    strength: f64,
    kappa1: f64,
    kappa2: f64,
    hbar: f64,
) -> *mut QcSimulation {
    let mut handle = ptr::null_mut();
    let status = guard(|| {
        let params = lift(NetworkParams::new(kappa1, kappa2, hbar, n_nodes))?;
        let coupling = lift(RingCoupling::new(n_nodes, range, strength))?;
        let state = MeanFieldState::new(0.0, vec![Complex64::new(0.0, 0.0); n_nodes]);
        handle = Box::into_raw(Box::new(QcSimulation {
            params,
            coupling,
            state,
            covariance: None,
        }));
        Ok(())
    });
    if status != QcStatus::Ok {
        return ptr::null_mut();
    }
    handle
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must come from [`qc_sim_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_free(sim: *mut QcSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_n_nodes(sim: *const QcSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.params.n_nodes)
}

/// Current simulation time, or NaN for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_time(sim: *const QcSimulation) -> f64 {
    sim.as_ref().map_or(f64::NAN, |s| s.state.t)
}

/// Resets to `t = 0` on the limit cycle with the seeded random phase profile
/// (Gaussian envelope of width `sigma` centred on `mu`, with `mu` a 1-based
/// node position). Drops any attached covariance.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_set_initial_conditions(
    sim: *mut QcSimulation,
    seed: u64,
    sigma: f64,
    mu: f64,
) -> QcStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        let mut spec = InitialConditionSpec::standard(&sim.params, seed);
        spec.sigma = sigma;
        spec.mu = mu;
        sim.state = lift(initial_conditions(&spec, &sim.params))?;
        sim.covariance = None;
        Ok(())
    })
}

/// Replaces the mean-field state with `2 N` interleaved values at time `t`.
/// Drops any attached covariance.
///
/// # Safety
/// `sim` must be a live handle and `alpha` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_set_state(
    sim: *mut QcSimulation,
    alpha: *const f64,
    len: usize,
    t: f64,
) -> QcStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        let values = input(alpha, len, 2 * sim.params.n_nodes)?;
        if !t.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(fail(QcStatus::InvalidArgument, "state and time must be finite"));
        }
        let alpha = values
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        sim.state = MeanFieldState::new(t, alpha);
        sim.covariance = None;
        Ok(())
    })
}

/// Writes the mean-field state as `2 N` interleaved values.
///
/// # Safety
/// `sim` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_get_state(
    sim: *const QcSimulation,
    out: *mut f64,
    len: usize,
) -> QcStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let out = output(out, len, 2 * sim.params.n_nodes)?;
        for (dst, a) in out.chunks_exact_mut(2).zip(&sim.state.alpha) {
            dst[0] = a.re;
            dst[1] = a.im;
        }
        Ok(())
    })
}

/// Advances by `span` with RK4 steps of `dt`. When a covariance is attached
/// it is propagated along the same trajectory, and `span` must then be a
/// whole number of steps.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_advance(sim: *mut QcSimulation, span: f64, dt: f64) -> QcStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        if !(span > 0.0 && span.is_finite() && dt > 0.0 && dt.is_finite()) {
            return Err(fail(QcStatus::InvalidArgument, "span and dt must be positive"));
        }
        let t_end = sim.state.t + span;
        match &sim.covariance {
            None => {
                sim.state = lift(advance_mean_field(
                    &sim.state,
                    &sim.coupling,
                    &sim.params,
                    t_end,
                    dt,
                ))?;
            }
            Some(c0) => {
                let traj = lift(integrate_mean_field(
                    &sim.state,
                    &sim.coupling,
                    &sim.params,
                    t_end,
                    0.5 * dt,
                    1,
                ))?;
                let steps = ((t_end - c0.t) / dt).round().max(1.0) as usize;
                let covs = lift(propagate_covariance(
                    c0,
                    &traj,
                    &sim.coupling,
                    &sim.params,
                    dt,
                    steps,
                ))?;
                sim.state = traj.last().clone();
                sim.covariance = covs.into_iter().last();
            }
        }
        Ok(())
    })
}

/// Attaches a coherent-state covariance `(hbar/2) I` at the current time.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_reset_covariance(sim: *mut QcSimulation) -> QcStatus {
    guard(|| {
        let sim = sim_mut(sim)?;
        sim.covariance = Some(CovarianceState::coherent(
            sim.params.n_nodes,
            sim.params.hbar,
            sim.state.t,
        ));
        Ok(())
    })
}

/// Detaches the covariance so later advances evolve the mean field only.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_clear_covariance(sim: *mut QcSimulation) -> QcStatus {
    guard(|| {
        sim_mut(sim)?.covariance = None;
        Ok(())
    })
}

/// Writes the `2N x 2N` covariance row-major.
///
/// # Safety
/// `sim` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_get_covariance(
    sim: *const QcSimulation,
    out: *mut f64,
    len: usize,
) -> QcStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let c = covariance_of(sim)?;
        let dim = c.matrix.nrows();
        let out = output(out, len, dim * dim)?;
        for i in 0..dim {
            for j in 0..dim {
                out[i * dim + j] = c.matrix[(i, j)];
            }
        }
        Ok(())
    })
}

/// Writes the windowed local order parameter `R_l` of every node.
///
/// # Safety
/// `sim` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_local_order(
    sim: *const QcSimulation,
    window: usize,
    out: *mut f64,
    len: usize,
) -> QcStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let out = output(out, len, sim.params.n_nodes)?;
        let r = lift(local_order_parameter(&sim.state, window))?;
        out.copy_from_slice(&r);
        Ok(())
    })
}

/// Writes the coupling-weighted momentum correlation of every node.
///
/// # Safety
/// `sim` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_weighted_correlation(
    sim: *const QcSimulation,
    out: *mut f64,
    len: usize,
) -> QcStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let c = covariance_of(sim)?;
        let out = output(out, len, sim.params.n_nodes)?;
        let psi = lift(weighted_correlation(c, &sim.coupling))?;
        out.copy_from_slice(&psi);
        Ok(())
    })
}

/// Rényi-2 mutual information between the first `l` nodes and the rest,
/// computed from the attached covariance.
///
/// # Safety
/// `sim` must be a live handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn qc_sim_mutual_information(
    sim: *const QcSimulation,
    l: usize,
    out: *mut f64,
) -> QcStatus {
    guard(|| {
        let sim = sim_ref(sim)?;
        let c = covariance_of(sim)?;
        let part = lift(Bipartition::leading(l, sim.params.n_nodes))?;
        let mi = lift(mutual_information(c, &part, sim.params.hbar))?;
        write_scalar(out, mi.i2)
    })
}

unsafe fn read_matrix(c: *const f64, dim: usize) -> Result<DMatrix<f64>, QcStatus> {
    let values = input(c, dim * dim, dim * dim)?;
    Ok(DMatrix::from_row_slice(dim, dim, values))
}

/// Rényi-2 entropy of a Gaussian state from its `dim x dim` row-major
/// covariance, `dim` even.
///
/// # Safety
/// `c` must point to `dim * dim` doubles and `out` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qc_renyi2(c: *const f64, dim: usize, hbar: f64, out: *mut f64) -> QcStatus {
    guard(|| {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(fail(
                QcStatus::ShapeMismatch,
                format!("dimension must be even and positive, got {dim}"),
            ));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(fail(QcStatus::InvalidArgument, "hbar must be positive"));
        }
        let m = read_matrix(c, dim)?;
        write_scalar(out, lift(renyi2_entropy(&m, hbar))?)
    })
}

/// Rényi-2 mutual information between the first `l` of `n_nodes` modes and
/// the rest, from a `2N x 2N` row-major covariance.
///
/// # Safety
/// `c` must point to `4 n_nodes^2` doubles and `out` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn qc_mutual_information(
    c: *const f64,
    n_nodes: usize,
    l: usize,
    hbar: f64,
    out: *mut f64,
) -> QcStatus {
    guard(|| {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(fail(QcStatus::InvalidArgument, "hbar must be positive"));
        }
        let part = lift(Bipartition::leading(l, n_nodes))?;
        let m = read_matrix(c, 2 * n_nodes)?;
        let state = lift(CovarianceState::new(0.0, m))?;
        let mi = lift(mutual_information(&state, &part, hbar))?;
        write_scalar(out, mi.i2)
    })
}

/// Copies the last error message on this thread into `buf` (NUL-terminated,
/// truncated to fit) and returns the full message length in bytes excluding
/// the terminator. Passing a null `buf` only queries the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qc_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(
        concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes(),
    ) {
        Ok(v) => v,
        Err(_) => panic!("version string contains a NUL byte"),
    };
    VERSION.as_ptr()
}
