//! C interface. Objects are opaque handles created by `*_new`/`*_build`/
//! `spiked_osc_solve` and released by the matching `*_free`. Every fallible
//! call returns a [`SpikedOscStatus`]; the message of the most recent
//! failure on the calling thread is available from
//! [`spiked_osc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use spiked_osc::basis::{BasisContext, ModelSpec};
use spiked_osc::matrix::{build_hamiltonian, HamiltonianMatrix};
use spiked_osc::oracle::shoot_auto;
use spiked_osc::solver::{solve_levels, solve_spectrum, SpectrumResult};
use spiked_osc::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpikedOscStatus {
    Ok = 0,
    NullPointer = 1,
    OutOfRange = 2,
    Domain = 3,
    Asymmetry = 4,
    Convergence = 5,
    Bracket = 6,
    Stiffness = 7,
    Divergence = 8,
    Panic = 9,
}

/// Model parameters.
pub struct SpikedOscModel(ModelSpec);

/// Eigenvalues and the `A` they were obtained at.
pub struct SpikedOscSpectrum(SpectrumResult);

/// Assembled Hamiltonian matrix.
pub struct SpikedOscMatrix(HamiltonianMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SpikedOscStatus {
    match err {
        Error::Domain(_) => SpikedOscStatus::Domain,
        Error::Asymmetry { .. } => SpikedOscStatus::Asymmetry,
        Error::Convergence(_) => SpikedOscStatus::Convergence,
        Error::Bracket(_) => SpikedOscStatus::Bracket,
        Error::Stiffness(_) => SpikedOscStatus::Stiffness,
        Error::Divergence(_) => SpikedOscStatus::Divergence,
    }
}

enum Fail {
    Null,
    Range(String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard<F>(f: F) -> SpikedOscStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpikedOscStatus::Ok,
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            SpikedOscStatus::NullPointer
        }
        Ok(Err(Fail::Range(msg))) => {
            set_error(msg);
            SpikedOscStatus::OutOfRange
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            SpikedOscStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(value);
    Ok(())
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len` bytes) and returns the full message length, or 0 when no error has
/// been recorded. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Creates a model `-d² + B x² + λ/x^α` in `dim` dimensions with angular
/// momentum `l`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_model_new(
    alpha: f64,
    lambda: f64,
    b: f64,
    dim: u32,
    l: u32,
    out: *mut *mut SpikedOscModel,
) -> SpikedOscStatus {
    guard(|| {
        let m = ModelSpec::new(alpha, lambda, b, dim, l)?;
        write(out, Box::into_raw(Box::new(SpikedOscModel(m))))
    })
}

/// # Safety
/// `model` must be null or a handle from [`spiked_osc_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_model_free(model: *mut SpikedOscModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Diagonalises the `d`×`d` matrix. With `optimize_a` nonzero the ground
/// state is minimised over `A` and `fixed_a` is ignored.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_solve(
    model: *const SpikedOscModel,
    d: usize,
    optimize_a: bool,
    fixed_a: f64,
    out: *mut *mut SpikedOscSpectrum,
) -> SpikedOscStatus {
    guard(|| {
        let m = deref(model)?;
        if d == 0 {
            return Err(Fail::Range("basis size must be >= 1".into()));
        }
        let r = solve_spectrum(&m.0, d, optimize_a, Some(fixed_a))?;
        write(out, Box::into_raw(Box::new(SpikedOscSpectrum(r))))
    })
}

/// Minimises each of the lowest `levels` eigenvalues over its own `A`.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_solve_levels(
    model: *const SpikedOscModel,
    d: usize,
    levels: usize,
    out: *mut *mut SpikedOscSpectrum,
) -> SpikedOscStatus {
    guard(|| {
        let m = deref(model)?;
        if d == 0 || levels == 0 || levels > d {
            return Err(Fail::Range(format!(
                "need 1 <= levels <= d, got levels = {levels}, d = {d}"
            )));
        }
        let r = solve_levels(&m.0, d, levels)?;
        write(out, Box::into_raw(Box::new(SpikedOscSpectrum(r))))
    })
}

/// Number of eigenvalues held by `spectrum`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_spectrum_len(
    spectrum: *const SpikedOscSpectrum,
    out: *mut usize,
) -> SpikedOscStatus {
    guard(|| write(out, deref(spectrum)?.0.eigenvalues.len()))
}

/// Eigenvalue `k` in ascending order.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_spectrum_eigenvalue(
    spectrum: *const SpikedOscSpectrum,
    k: usize,
    out: *mut f64,
) -> SpikedOscStatus {
    guard(|| {
        let s = deref(spectrum)?;
        let e =
            *s.0.eigenvalues
                .get(k)
                .ok_or_else(|| Fail::Range(format!("level {k} out of range")))?;
        write(out, e)
    })
}

/// `A` used for level `k`: the per-level minimiser when levels were
/// optimised separately, else the common minimiser. Fails with
/// `OUT_OF_RANGE` for spectra computed at a fixed `A`.
///
/// # Safety
/// `spectrum` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_spectrum_optimal_a(
    spectrum: *const SpikedOscSpectrum,
    k: usize,
    out: *mut f64,
) -> SpikedOscStatus {
    guard(|| {
        let s = &deref(spectrum)?.0;
        let a = s
            .level_a
            .get(k)
            .copied()
            .or(s.optimal_a)
            .ok_or_else(|| Fail::Range("spectrum was computed at a fixed A".into()))?;
        write(out, a)
    })
}

/// # Safety
/// `spectrum` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_spectrum_free(spectrum: *mut SpikedOscSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Assembles the `d`×`d` Hamiltonian at basis parameter `a`.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_matrix_build(
    model: *const SpikedOscModel,
    a: f64,
    d: usize,
    out: *mut *mut SpikedOscMatrix,
) -> SpikedOscStatus {
    guard(|| {
        let m = deref(model)?;
        if d == 0 {
            return Err(Fail::Range("basis size must be >= 1".into()));
        }
        let ctx = BasisContext::new(&m.0, a, d)?;
        let h = build_hamiltonian(&m.0, &ctx)?;
        write(out, Box::into_raw(Box::new(SpikedOscMatrix(h))))
    })
}

/// Order of the matrix.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_matrix_dim(
    matrix: *const SpikedOscMatrix,
    out: *mut usize,
) -> SpikedOscStatus {
    guard(|| write(out, deref(matrix)?.0.dim))
}

/// Entry `(row, col)`, zero-based.
///
/// # Safety
/// `matrix` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_matrix_get(
    matrix: *const SpikedOscMatrix,
    row: usize,
    col: usize,
    out: *mut f64,
) -> SpikedOscStatus {
    guard(|| {
        let h = &deref(matrix)?.0;
        if row >= h.dim || col >= h.dim {
            return Err(Fail::Range(format!(
                "({row}, {col}) outside {0}x{0}",
                h.dim
            )));
        }
        write(out, h.get(row, col))
    })
}

/// # Safety
/// `matrix` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_matrix_free(matrix: *mut SpikedOscMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Eigenvalue of level `level` by direct integration of the radial equation.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn spiked_osc_oracle(
    model: *const SpikedOscModel,
    level: usize,
    out: *mut f64,
) -> SpikedOscStatus {
    guard(|| {
        let m = deref(model)?;
        write(out, shoot_auto(&m.0, level)?.energy)
    })
}
