//! C ABI over `qmetro`.
//!
//! Every entry point returns a [`QmStatus`]. On failure a message is kept in
//! thread-local storage and can be read with [`qm_last_error_message`].
//! Reports are opaque handles owned by the caller and released with
//! [`qm_report_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use qmetro::analysis::{scan_t, ProbeChoice, ScanConfig};
use qmetro::encoding::{ModelKind, ModelPoint};
use qmetro::metrology::IncompatReport;
use qmetro::models::{ai_threeparam_probe, generator_pair, make_probe, ProbeSpec};
use qmetro::spin::SpinRep;
use qmetro::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The QFIM is singular; bounds are undefined.
    Singular = 3,
    /// A numerical routine failed or a consistency check was violated.
    Numeric = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Selects the parameter family.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmModel {
    /// `(B, θ)`.
    TwoParam = 2,
    /// `(B, θ, φ)`.
    ThreeParam = 3,
}

/// Models cross the boundary as plain integers so that out-of-range values are
/// rejected instead of being undefined behaviour.
fn model_kind(model: i32) -> Result<ModelKind, (QmStatus, String)> {
    match model {
        m if m == QmModel::TwoParam as i32 => Ok(ModelKind::TwoParam),
        m if m == QmModel::ThreeParam as i32 => Ok(ModelKind::ThreeParam),
        m => Err((
            QmStatus::InvalidArgument,
            format!("unknown model {m}; use 2 or 3"),
        )),
    }
}

/// Scalar figures of a report. Bound fields are NaN when `singular` is nonzero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmScalars {
    pub det_q: f64,
    pub c_sld: f64,
    pub c_h: f64,
    pub delta: f64,
    pub r_ai: f64,
    pub singular: i32,
}

/// Opaque report handle.
pub struct QmReport {
    inner: IncompatReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QmStatus {
    match e {
        Error::Singular { .. } => QmStatus::Singular,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => QmStatus::Io,
        Error::InvalidDimension(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidPoint(_)
        | Error::InvalidConfig(_)
        | Error::NotNormalized(_)
        | Error::UnsupportedClosedForm(_) => QmStatus::InvalidArgument,
        _ => QmStatus::Numeric,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard<F: FnOnce() -> Result<(), (QmStatus, String)>>(f: F) -> QmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            QmStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (QmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (QmStatus, String) {
    (QmStatus::NullPointer, format!("{name} is null"))
}

/// Message of the last failure on this thread, or null. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn qm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a report for the superposition probe `cos α|J⟩ + e^{iφ} sin α|−J⟩`.
///
/// `model` takes a [`QmModel`] value; anything else gives `QM_STATUS_INVALID_ARGUMENT`.
/// `azimuth` is ignored for the two-parameter model. A singular QFIM is not an
/// error here; it shows up in [`QmScalars::singular`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qm_report_new(
    model: i32,
    dim: usize,
    alpha: f64,
    phi: f64,
    b: f64,
    theta: f64,
    azimuth: f64,
    t: f64,
    rel_tol: f64,
    out: *mut *mut QmReport,
) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if rel_tol.is_nan() || rel_tol <= 0.0 {
            return Err((
                QmStatus::InvalidArgument,
                format!("tolerance must be > 0, got {rel_tol}"),
            ));
        }
        let point = ModelPoint::new(model_kind(model)?, b, theta, azimuth, t).map_err(lib_err)?;
        let rep = SpinRep::new(dim).map_err(lib_err)?;
        let probe = make_probe(&ProbeSpec::new(dim, alpha, phi)).map_err(lib_err)?;
        let (q, d) = generator_pair(&rep, &probe, &point).map_err(lib_err)?;
        let inner = IncompatReport::evaluate(q, d, None, rel_tol).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(QmReport { inner }));
        Ok(())
    })
}

/// Releases a report. Null is accepted.
///
/// # Safety
/// `report` must come from [`qm_report_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qm_report_free(report: *mut QmReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` and `out` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qm_report_num_params(
    report: *const QmReport,
    out: *mut usize,
) -> QmStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = r.inner.qfim.dim();
        Ok(())
    })
}

unsafe fn copy_matrix(
    report: *const QmReport,
    buf: *mut f64,
    len: usize,
    pick: fn(&IncompatReport) -> &qmetro::linalg::RMatrix,
) -> QmStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let m = pick(&r.inner);
        let n = m.nrows();
        if len < n * n {
            return Err((
                QmStatus::InvalidArgument,
                format!("buffer holds {len} values, need {}", n * n),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buf, n * n);
        for i in 0..n {
            for j in 0..n {
                dst[i * n + j] = m[(i, j)];
            }
        }
        Ok(())
    })
}

/// Copies the QFIM row-major into `buf`, which must hold at least `n²` values.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qm_report_qfim(
    report: *const QmReport,
    buf: *mut f64,
    len: usize,
) -> QmStatus {
    copy_matrix(report, buf, len, |r| r.qfim.matrix())
}

/// Copies the Uhlmann matrix row-major into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qm_report_uhlmann(
    report: *const QmReport,
    buf: *mut f64,
    len: usize,
) -> QmStatus {
    copy_matrix(report, buf, len, |r| r.uhlmann.matrix())
}

/// # Safety
/// `report` and `out` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qm_report_scalars(
    report: *const QmReport,
    out: *mut QmScalars,
) -> QmStatus {
    guard(|| {
        let r = &report.as_ref().ok_or_else(|| null("report"))?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let nan = |x: Option<f64>| x.unwrap_or(f64::NAN);
        *out = QmScalars {
            det_q: r.det_q,
            c_sld: nan(r.c_sld),
            c_h: nan(r.c_h),
            delta: nan(r.delta),
            r_ai: nan(r.r_ai),
            singular: i32::from(r.singular),
        };
        Ok(())
    })
}

/// `|cos 2α|`, the three-parameter AI measure for `N ≥ 4`.
///
/// # Safety
/// `out` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn qm_ai_threeparam_probe(dim: usize, alpha: f64, out: *mut f64) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ai_threeparam_probe(dim, alpha).map_err(lib_err)?;
        Ok(())
    })
}

/// Scans `T = ℛ − Δ` for a [`QmModel`] over `θ ∈ [0, 2π]`, `B ∈ [0, 2π/t]` and writes the CSV to `path`.
///
/// Returns [`QmStatus::Numeric`] if any regular cell breaks `0 ≤ Δ ≤ ℛ ≤ 1`
/// within `1e-9`; the file is written either way.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string or null.
#[no_mangle]
pub unsafe extern "C" fn qm_scan_write_csv(
    model: i32,
    dim: usize,
    alpha: f64,
    phi: f64,
    azimuth: f64,
    t: f64,
    theta_count: usize,
    b_count: usize,
    path: *const c_char,
) -> QmStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|e| (QmStatus::InvalidArgument, format!("path is not UTF-8: {e}")))?;
        let mut cfg = ScanConfig::new(
            model_kind(model)?,
            ProbeChoice::Family(ProbeSpec::new(dim, alpha, phi)),
            t,
        );
        cfg.theta_count = theta_count;
        cfg.b_count = b_count;
        cfg.phi_param = azimuth;
        let grid = scan_t(&cfg).map_err(lib_err)?;
        grid.write_csv_path(Path::new(path)).map_err(lib_err)?;
        grid.check_bounds(1e-9).map_err(lib_err)
    })
}
