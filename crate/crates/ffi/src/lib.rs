//! C ABI for the qmetro toolkit.
//!
//! # Conventions
//!
//! Every function returns a status code: `QM_OK` (0) on success and a
//! negative `QmStatus` on failure. Results are written through out-pointers,
//! which are left untouched on failure. After a failure,
//! [`qm_last_error_message`] returns a description of the error on the
//! calling thread.
//!
//! Strategies and experiment results are opaque handles created by
//! `qm_*_new`/`qm_experiment_run` and released with the matching `*_free`
//! function. Handles are immutable once created and may be shared between
//! threads; the last-error slot is per thread.
//!
//! # Safety
//!
//! Pointer arguments are checked for null. Non-null pointers must be properly
//! aligned and valid for the documented number of elements; handles must come
//! from this library and must not be used after they are freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmetro::estimation::{
    ancilla_qfi_closed, cfi, crossover_noise, qcrb_variance, qfi_numeric, single_probe_qfi_closed,
    FisherValue,
};
use qmetro::montecarlo::{run_experiment, Estimator, ExperimentConfig, ExperimentResult};
use qmetro::strategies::{
    circuit_distribution, closed_form_distribution, make_family, measurement_povm,
    OutcomeDistribution, StrategyConfig, StrategyKind,
};

pub const QM_KIND_SINGLE_PROBE: u32 = 0;
pub const QM_KIND_ANCILLA: u32 = 1;

pub const QM_SOURCE_CLOSED_FORM: u32 = 0;
pub const QM_SOURCE_CIRCUIT: u32 = 1;

pub const QM_ESTIMATOR_INVERSION: u32 = 0;
pub const QM_ESTIMATOR_MLE: u32 = 1;

/// Status codes returned by every function.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmStatus {
    QmOk = 0,
    QmErrNullPointer = -1,
    QmErrInvalidArgument = -2,
    QmErrComputation = -3,
    QmErrBufferTooSmall = -4,
    QmErrPanic = -5,
}

/// A configured estimation strategy.
pub struct QmStrategy(StrategyConfig);

/// The outcome of a repeated-acquisition experiment.
pub struct QmExperiment(ExperimentResult);

/// Summary statistics of a [`QmExperiment`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QmExperimentSummary {
    pub repetitions: usize,
    pub mean_estimate: f64,
    pub sample_variance: f64,
    pub sd: f64,
    pub mean_events: f64,
    pub normalized_variance: f64,
    pub qcrb_reference: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

struct Failure(QmStatus, String);

impl From<qmetro::Error> for Failure {
    fn from(e: qmetro::Error) -> Self {
        let status = match e {
            qmetro::Error::OutOfRange { .. } | qmetro::Error::Invalid { .. } => {
                QmStatus::QmErrInvalidArgument
            }
            _ => QmStatus::QmErrComputation,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QmStatus::QmErrNullPointer, format!("`{what}` is null"))
}

fn invalid(msg: String) -> Failure {
    Failure(QmStatus::QmErrInvalidArgument, msg)
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> QmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmStatus::QmOk,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            QmStatus::QmErrPanic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    unsafe { out.write(value) };
    Ok(())
}

fn kind_from(kind: u32) -> Result<StrategyKind, Failure> {
    match kind {
        QM_KIND_SINGLE_PROBE => Ok(StrategyKind::SingleProbe),
        QM_KIND_ANCILLA => Ok(StrategyKind::AncillaAssisted),
        other => Err(invalid(format!("unknown strategy kind {other}"))),
    }
}

fn estimator_from(estimator: u32) -> Result<Estimator, Failure> {
    match estimator {
        QM_ESTIMATOR_INVERSION => Ok(Estimator::Inversion),
        QM_ESTIMATOR_MLE => Ok(Estimator::Mle),
        other => Err(invalid(format!("unknown estimator {other}"))),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len - 1` bytes) and returns the full message length in bytes.
/// Pass a null `buf` to query the length.
///
/// # Safety
///
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qm_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Creates a strategy handle. `kind` is `QM_KIND_SINGLE_PROBE` or
/// `QM_KIND_ANCILLA`; `v` is ignored for the single probe.
///
/// # Safety
///
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_strategy_new(
    kind: u32,
    eta: f64,
    v: f64,
    phi: f64,
    out: *mut *mut QmStrategy,
) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = StrategyConfig::new(kind_from(kind)?, eta, v, phi)?;
        unsafe { write_out(out, Box::into_raw(Box::new(QmStrategy(cfg))), "out") }
    })
}

/// Releases a strategy handle. Null is a no-op.
///
/// # Safety
///
/// `strategy` must be null or a live handle from [`qm_strategy_new`].
#[no_mangle]
pub unsafe extern "C" fn qm_strategy_free(strategy: *mut QmStrategy) {
    if !strategy.is_null() {
        drop(unsafe { Box::from_raw(strategy) });
    }
}

/// Number of measurement outcomes: 2 for the single probe, 4 with the ancilla.
///
/// # Safety
///
/// `strategy` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_strategy_num_outcomes(
    strategy: *const QmStrategy,
    out: *mut usize,
) -> QmStatus {
    guard(|| {
        let s = unsafe { handle(strategy, "strategy") }?;
        unsafe { write_out(out, s.0.kind.labels().len(), "out") }
    })
}

/// Copies the NUL-terminated label of outcome `index` into `buf`.
///
/// # Safety
///
/// `strategy` must be a live handle; `buf` must be valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qm_strategy_outcome_label(
    strategy: *const QmStrategy,
    index: usize,
    buf: *mut c_char,
    len: usize,
) -> QmStatus {
    guard(|| {
        let s = unsafe { handle(strategy, "strategy") }?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let label =
            s.0.kind
                .labels()
                .get(index)
                .ok_or_else(|| invalid(format!("outcome index {index} out of range")))?;
        if len < label.len() + 1 {
            return Err(Failure(
                QmStatus::QmErrBufferTooSmall,
                format!("label needs {} bytes", label.len() + 1),
            ));
        }
        unsafe {
            ptr::copy_nonoverlapping(label.as_ptr().cast::<c_char>(), buf, label.len());
            *buf.add(label.len()) = 0;
        }
        Ok(())
    })
}

/// Writes the outcome probabilities (in label order) into `out`, which must
/// hold at least [`qm_strategy_num_outcomes`] values. `source` selects
/// `QM_SOURCE_CLOSED_FORM` or `QM_SOURCE_CIRCUIT`.
///
/// # Safety
///
/// `strategy` must be a live handle; `out` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qm_strategy_probabilities(
    strategy: *const QmStrategy,
    source: u32,
    out: *mut f64,
    len: usize,
) -> QmStatus {
    guard(|| {
        let s = unsafe { handle(strategy, "strategy") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let dist: OutcomeDistribution = match source {
            QM_SOURCE_CLOSED_FORM => closed_form_distribution(&s.0)?,
            QM_SOURCE_CIRCUIT => circuit_distribution(&s.0)?,
            other => return Err(invalid(format!("unknown probability source {other}"))),
        };
        if len < dist.len() {
            return Err(Failure(
                QmStatus::QmErrBufferTooSmall,
                format!("{} outcomes need a buffer of that length", dist.len()),
            ));
        }
        let dst = unsafe { std::slice::from_raw_parts_mut(out, dist.len()) };
        dst.copy_from_slice(dist.probs());
        Ok(())
    })
}

/// Closed-form QFI of the strategy.
///
/// # Safety
///
/// `strategy` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_strategy_qfi_closed(
    strategy: *const QmStrategy,
    out: *mut f64,
) -> QmStatus {
    guard(|| {
        let s = unsafe { handle(strategy, "strategy") }?;
        let f = s.0.qfi()?.value();
        unsafe { write_out(out, f, "out") }
    })
}

/// Numerical QFI of the strategy's output state at its phase, using a central
/// difference with `step` radians.
///
/// # Safety
///
/// `strategy` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_strategy_qfi_numeric(
    strategy: *const QmStrategy,
    step: f64,
    out: *mut f64,
) -> QmStatus {
    guard(|| {
        let s = unsafe { handle(strategy, "strategy") }?;
        let family = make_family(s.0.kind, s.0.eta, s.0.v)?;
        let f = qfi_numeric(&family, s.0.phi, step)?.value();
        unsafe { write_out(out, f, "out") }
    })
}

/// Classical Fisher information of the strategy's measurement at its phase.
///
/// # Safety
///
/// `strategy` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_strategy_cfi(
    strategy: *const QmStrategy,
    step: f64,
    out: *mut f64,
) -> QmStatus {
    guard(|| {
        let s = unsafe { handle(strategy, "strategy") }?;
        let family = make_family(s.0.kind, s.0.eta, s.0.v)?;
        let f = cfi(&measurement_povm(s.0.kind), &family, s.0.phi, step)?.value();
        unsafe { write_out(out, f, "out") }
    })
}

/// `1 - eta`
///
/// # Safety
///
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_single_probe_qfi(eta: f64, out: *mut f64) -> QmStatus {
    guard(|| {
        let f = single_probe_qfi_closed(eta)?.value();
        unsafe { write_out(out, f, "out") }
    })
}

/// `2 v² (1 - eta) / (2 - eta)`
///
/// # Safety
///
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_ancilla_qfi(eta: f64, v: f64, out: *mut f64) -> QmStatus {
    guard(|| {
        let f = ancilla_qfi_closed(eta, v)?.value();
        unsafe { write_out(out, f, "out") }
    })
}

/// Damping rate above which the ancilla strategy has the larger QFI.
///
/// # Safety
///
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_crossover_noise(v: f64, out: *mut f64) -> QmStatus {
    guard(|| {
        let eta = crossover_noise(v)?;
        unsafe { write_out(out, eta, "out") }
    })
}

/// `1/(n F)`; fails with `QM_ERR_COMPUTATION` when `fisher` is zero.
///
/// # Safety
///
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_qcrb_variance(fisher: f64, events: u64, out: *mut f64) -> QmStatus {
    guard(|| {
        let var = qcrb_variance(FisherValue::new(fisher)?, events)?;
        unsafe { write_out(out, var, "out") }
    })
}

/// Runs `repetitions` acquisitions of `events` events each at the strategy's
/// phase and returns a result handle.
///
/// # Safety
///
/// `strategy` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_experiment_run(
    strategy: *const QmStrategy,
    events: u64,
    repetitions: usize,
    seed: u64,
    estimator: u32,
    out: *mut *mut QmExperiment,
) -> QmStatus {
    guard(|| {
        let s = unsafe { handle(strategy, "strategy") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = ExperimentConfig::new(s.0)
            .with_events(events)
            .with_repetitions(repetitions)
            .with_seed(seed)
            .with_estimator(estimator_from(estimator)?);
        let result = run_experiment(&cfg)?;
        unsafe { write_out(out, Box::into_raw(Box::new(QmExperiment(result))), "out") }
    })
}

/// Releases an experiment handle. Null is a no-op.
///
/// # Safety
///
/// `experiment` must be null or a live handle from [`qm_experiment_run`].
#[no_mangle]
pub unsafe extern "C" fn qm_experiment_free(experiment: *mut QmExperiment) {
    if !experiment.is_null() {
        drop(unsafe { Box::from_raw(experiment) });
    }
}

/// # Safety
///
/// `experiment` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn qm_experiment_summary(
    experiment: *const QmExperiment,
    out: *mut QmExperimentSummary,
) -> QmStatus {
    guard(|| {
        let r = &unsafe { handle(experiment, "experiment") }?.0;
        let summary = QmExperimentSummary {
            repetitions: r.estimates.len(),
            mean_estimate: r.mean_estimate(),
            sample_variance: r.sample_variance,
            sd: r.sd,
            mean_events: r.mean_events,
            normalized_variance: r.normalized_variance,
            qcrb_reference: r.qcrb_reference,
        };
        unsafe { write_out(out, summary, "out") }
    })
}

/// Copies up to `len` per-repetition estimates into `out` and stores the
/// number copied in `written`. Fails with `QM_ERR_BUFFER_TOO_SMALL` (after
/// copying `len` values) when the buffer is shorter than the repetition count.
///
/// # Safety
///
/// `experiment` must be a live handle; `out` must be valid for `len` writes
/// and `written` for one.
#[no_mangle]
pub unsafe extern "C" fn qm_experiment_estimates(
    experiment: *const QmExperiment,
    out: *mut f64,
    len: usize,
    written: *mut usize,
) -> QmStatus {
    guard(|| {
        let r = &unsafe { handle(experiment, "experiment") }?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        if written.is_null() {
            return Err(null("written"));
        }
        let n = r.estimates.len().min(len);
        unsafe {
            std::slice::from_raw_parts_mut(out, n).copy_from_slice(&r.estimates[..n]);
            written.write(n);
        }
        if n < r.estimates.len() {
            return Err(Failure(
                QmStatus::QmErrBufferTooSmall,
                format!("{} estimates do not fit in {len}", r.estimates.len()),
            ));
        }
        Ok(())
    })
}

/// Human-readable name of a status code, as a static string.
#[no_mangle]
pub extern "C" fn qm_status_name(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        0 => c"QM_OK",
        -1 => c"QM_ERR_NULL_POINTER",
        -2 => c"QM_ERR_INVALID_ARGUMENT",
        -3 => c"QM_ERR_COMPUTATION",
        -4 => c"QM_ERR_BUFFER_TOO_SMALL",
        -5 => c"QM_ERR_PANIC",
        _ => c"QM_UNKNOWN_STATUS",
    };
    s.as_ptr()
}
