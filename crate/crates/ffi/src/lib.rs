//! C ABI for `nodal-lab`.
//!
//! Polynomials and nodal sets are opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns an
//! [`NlStatus`]; on failure [`nl_last_error`] gives a message for the calling
//! thread. Results are written through out-pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ndarray::Array2;
use nodal_lab::arith;
use nodal_lab::coeffs::sample_matrix;
use nodal_lab::kacrice;
use nodal_lab::nodal::{nodal_length, GridSpec, NodalSet, Rect};
use nodal_lab::{CoeffLaw, Coordinates, Error, TrigPoly};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Quadrature depth cap or another numerical failure.
    Numerical = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NlLaw {
    Gaussian = 0,
    Rademacher = 1,
    /// `Exp(1) - 1`.
    Exponential = 2,
    /// Uniform on `[-sqrt 3, sqrt 3]`.
    Uniform = 3,
}

/// Decode an `NlLaw` value received as a plain integer.
fn law_from(code: i32) -> Result<CoeffLaw, (NlStatus, String)> {
    match code {
        0 => Ok(CoeffLaw::Gaussian),
        1 => Ok(CoeffLaw::Rademacher),
        2 => Ok(CoeffLaw::ExponentialCentered),
        3 => Ok(CoeffLaw::UniformCentered),
        _ => Err((
            NlStatus::InvalidArgument,
            format!("unknown law code {code}"),
        )),
    }
}

/// Opaque bivariate cosine polynomial.
pub struct NlPoly(TrigPoly);

/// Opaque nodal set of `F_n` on `[0, n pi]^2`.
pub struct NlNodalSet(NodalSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NlStatus {
    match e {
        Error::QuadratureDepth { .. }
        | Error::ClosedFormSingular
        | Error::DegenerateMarginal
        | Error::IdentityViolated(_) => NlStatus::Numerical,
        _ => NlStatus::InvalidArgument,
    }
}

/// Run `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), (NlStatus, String)>) -> NlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            NlStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (NlStatus, String)>;
}

impl<T> IntoFfi<T> for nodal_lab::Result<T> {
    fn ffi(self) -> Result<T, (NlStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (NlStatus, String) {
    (NlStatus::NullPointer, format!("null pointer: {what}"))
}

fn check_out<T>(p: *mut T, what: &str) -> Result<(), (NlStatus, String)> {
    if p.is_null() {
        Err(null(what))
    } else {
        Ok(())
    }
}

/// Borrow a handle; fails on null.
///
/// # Safety
/// `p` must be null or a live handle from this library.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (NlStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copy the calling thread's last error message into `buf` as a
/// NUL-terminated string, truncating to `len - 1` bytes. Returns the full
/// message length without the terminator, or 0 if there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn nl_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let k = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, k);
                *buf.add(k) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Polynomial of degree `n` from `n * n` row-major coefficients; entry
/// `(k - 1) * n + (l - 1)` multiplies `cos(k x) cos(l y)`.
///
/// # Safety
/// `coeffs` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_poly_new(
    n: usize,
    coeffs: *const f64,
    out: *mut *mut NlPoly,
) -> NlStatus {
    guard(|| {
        check_out(out, "out")?;
        if coeffs.is_null() {
            return Err(null("coeffs"));
        }
        let len = n
            .checked_mul(n)
            .ok_or((NlStatus::InvalidArgument, "degree too large".to_string()))?;
        let data = std::slice::from_raw_parts(coeffs, len).to_vec();
        let a = Array2::from_shape_vec((n, n), data)
            .map_err(|e| (NlStatus::InvalidArgument, e.to_string()))?;
        let p = TrigPoly::new(a).ffi()?;
        *out = Box::into_raw(Box::new(NlPoly(p)));
        Ok(())
    })
}

/// Polynomial with i.i.d. coefficients drawn from `law` (an `NlLaw` value),
/// deterministic in `(law, n, seed)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_poly_sample(
    law: i32,
    n: usize,
    seed: u64,
    out: *mut *mut NlPoly,
) -> NlStatus {
    guard(|| {
        check_out(out, "out")?;
        let a = sample_matrix(law_from(law)?, n, seed).ffi()?;
        let p = TrigPoly::new(a).ffi()?;
        *out = Box::into_raw(Box::new(NlPoly(p)));
        Ok(())
    })
}

/// Release a polynomial. Null is a no-op.
///
/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nl_poly_free(p: *mut NlPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Degree of `p`, or 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nl_poly_degree(p: *const NlPoly) -> usize {
    p.as_ref().map_or(0, |p| p.0.degree())
}

/// `f_n(x, y)`, or `F_n(x, y)` when `rescaled` is nonzero.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_poly_eval(
    p: *const NlPoly,
    x: f64,
    y: f64,
    rescaled: i32,
    out: *mut f64,
) -> NlStatus {
    guard(|| {
        let p = handle(p, "poly")?;
        check_out(out, "out")?;
        *out = if rescaled != 0 {
            p.0.eval_rescaled(x, y)
        } else {
            p.0.eval(x, y)
        };
        Ok(())
    })
}

/// Nodal set of `F_n` on `[0, n pi]^2` at the default grid density.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_nodal_extract(p: *const NlPoly, out: *mut *mut NlNodalSet) -> NlStatus {
    guard(|| {
        let p = handle(p, "poly")?;
        check_out(out, "out")?;
        let ns = nodal_length(&p.0, &GridSpec::global(p.0.degree())).ffi()?;
        *out = Box::into_raw(Box::new(NlNodalSet(ns)));
        Ok(())
    })
}

/// Nodal set of `f_n` (when `rescaled` is 0) or `F_n` on a rectangle with
/// `samples_per_unit` grid points per unit length.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_nodal_extract_rect(
    p: *const NlPoly,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    samples_per_unit: f64,
    rescaled: i32,
    out: *mut *mut NlNodalSet,
) -> NlStatus {
    guard(|| {
        let p = handle(p, "poly")?;
        check_out(out, "out")?;
        let rect = Rect::new(x_min, x_max, y_min, y_max).ffi()?;
        let coords = if rescaled != 0 {
            Coordinates::Rescaled
        } else {
            Coordinates::Raw
        };
        let spec = GridSpec::new(rect, samples_per_unit, coords).ffi()?;
        let ns = nodal_length(&p.0, &spec).ffi()?;
        *out = Box::into_raw(Box::new(NlNodalSet(ns)));
        Ok(())
    })
}

/// Release a nodal set. Null is a no-op.
///
/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nl_nodal_free(s: *mut NlNodalSet) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Total nodal length.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_nodal_total_length(s: *const NlNodalSet, out: *mut f64) -> NlStatus {
    guard(|| {
        let s = handle(s, "nodal set")?;
        check_out(out, "out")?;
        *out = s.0.total_length();
        Ok(())
    })
}

/// Largest length attributed to one nodal cell.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_nodal_max_cell_length(s: *const NlNodalSet, out: *mut f64) -> NlStatus {
    guard(|| {
        let s = handle(s, "nodal set")?;
        check_out(out, "out")?;
        *out = s.0.max_cell_length();
        Ok(())
    })
}

/// Number of segments in the nodal set.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nl_nodal_segment_count(s: *const NlNodalSet) -> usize {
    s.as_ref().map_or(0, |s| s.0.segments.len())
}

/// Copy segment endpoints as `x0, y0, x1, y1` quadruples into `buf`, which
/// holds `cap` doubles. `written` receives the number of doubles needed;
/// fails with `InvalidArgument` if `cap` is smaller.
///
/// # Safety
/// `s` must be a live handle; `buf` must hold `cap` writable doubles;
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_nodal_segments(
    s: *const NlNodalSet,
    buf: *mut f64,
    cap: usize,
    written: *mut usize,
) -> NlStatus {
    guard(|| {
        let s = handle(s, "nodal set")?;
        check_out(written, "written")?;
        let need = 4 * s.0.segments.len();
        *written = need;
        if cap < need {
            return Err((
                NlStatus::InvalidArgument,
                format!("buffer holds {cap} doubles, need {need}"),
            ));
        }
        check_out(buf, "buf")?;
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (chunk, seg) in out.chunks_exact_mut(4).zip(&s.0.segments) {
            let [a, b] = s.0.segment_points(seg);
            chunk.copy_from_slice(&[a[0], a[1], b[0], b[1]]);
        }
        Ok(())
    })
}

/// Gaussian expected nodal length of `f_n` over a rectangle inside
/// `[0, pi]^2`. `achieved` (may be null) receives the estimated relative
/// error. On `Numerical` the depth cap was hit and nothing is written.
///
/// # Safety
/// `value` must be writable; `achieved` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nl_kacrice_expected_length(
    n: usize,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    rel_tol: f64,
    value: *mut f64,
    achieved: *mut f64,
) -> NlStatus {
    guard(|| {
        check_out(value, "value")?;
        let rect = Rect::new(x_min, x_max, y_min, y_max).ffi()?;
        let r = kacrice::expected_length(n, &rect, rel_tol).ffi()?;
        *value = r.value;
        if !achieved.is_null() {
            *achieved = r.achieved;
        }
        Ok(())
    })
}

/// Gaussian `P(|F_n(k pi, l pi)| <= eps)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_smallball_gaussian(
    n: u64,
    k: u64,
    l: u64,
    eps: f64,
    out: *mut f64,
) -> NlStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = arith::smallball_gaussian(n, k, l, eps).ffi()?;
        Ok(())
    })
}

/// Halasz-type bound on `P(|F_n(k pi, l pi)| <= eps)` for coefficients
/// drawn from `law` (an `NlLaw` value).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nl_halasz_integral(
    law: i32,
    n: u64,
    k: u64,
    l: u64,
    eps: f64,
    out: *mut f64,
) -> NlStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = arith::halasz_integral(law_from(law)?, n, k, l, eps).ffi()?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_mapping_covers_all() {
        let laws = [
            NlLaw::Gaussian,
            NlLaw::Rademacher,
            NlLaw::Exponential,
            NlLaw::Uniform,
        ];
        let mapped: Vec<CoeffLaw> = laws.iter().map(|&l| law_from(l as i32).unwrap()).collect();
        assert_eq!(mapped, CoeffLaw::ALL);
        assert!(law_from(4).is_err());
    }

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::ZeroDegree), NlStatus::InvalidArgument);
        assert_eq!(status_of(&Error::ClosedFormSingular), NlStatus::Numerical);
    }

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, NlStatus::Panic);
        let mut buf = [0 as c_char; 64];
        let n = unsafe { nl_last_error(buf.as_mut_ptr(), buf.len()) };
        assert_eq!(n, "panic: boom".len());
    }
}
