//! C ABI for `numshadow`.
//!
//! Every function returns an [`NsStatus`]; on failure a description is
//! available from [`ns_last_error_message`] on the same thread. Objects are
//! handed out as opaque pointers and must be released with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use numshadow::analytic::restricted_moments;
use numshadow::dynamics::{trajectory, DynamicsConfig};
use numshadow::range::numerical_range_boundary;
use numshadow::shadow::{estimate_moments, estimate_shadow};
use numshadow::{catalog, Complex64, ComplexMatrix, Error, GridSpec, Restriction, ShadowHistogram};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownMatrix = 3,
    Parse = 4,
    DimensionMismatch = 5,
    Numerical = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Square complex matrix.
pub struct NsMatrix(ComplexMatrix);

/// Shadow histogram on a rectangular grid.
pub struct NsHistogram(ShadowHistogram);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NsGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

/// Monte Carlo moments, with the closed-form values when `has_analytic`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NsMoments {
    pub mean_re: f64,
    pub mean_im: f64,
    pub second_abs: f64,
    pub variance: f64,
    pub std_error_mean: f64,
    pub std_error_second_abs: f64,
    pub std_error_variance: f64,
    pub n_samples: u64,
    pub has_analytic: bool,
    pub analytic_mean_re: f64,
    pub analytic_mean_im: f64,
    pub analytic_second_abs: f64,
    pub analytic_variance: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NsTrajectoryPoint {
    pub t: u64,
    pub re: f64,
    pub im: f64,
    pub separable: bool,
    pub purity: f64,
    pub min_pt_eigenvalue: f64,
}

enum FfiError {
    Null(&'static str),
    Utf8(&'static str),
    BufferTooSmall { needed: usize, capacity: usize },
    Core(Error),
}

impl From<Error> for FfiError {
    fn from(e: Error) -> Self {
        FfiError::Core(e)
    }
}

impl FfiError {
    fn status(&self) -> NsStatus {
        match self {
            FfiError::Null(_) => NsStatus::NullPointer,
            FfiError::Utf8(_) => NsStatus::Parse,
            FfiError::BufferTooSmall { .. } => NsStatus::BufferTooSmall,
            FfiError::Core(e) => match e {
                Error::DimensionMismatch { .. } | Error::NotFactorable { .. } => NsStatus::DimensionMismatch,
                Error::UnknownMatrix(_) => NsStatus::UnknownMatrix,
                Error::Parse { .. } | Error::Json(_) => NsStatus::Parse,
                Error::Io { .. } => NsStatus::Io,
                Error::Hypergeometric(_) | Error::Singular(_) => NsStatus::Numerical,
                _ => NsStatus::InvalidArgument,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            FfiError::Null(what) => format!("null pointer passed as {what}"),
            FfiError::Utf8(what) => format!("{what} is not valid UTF-8"),
            FfiError::BufferTooSmall { needed, capacity } => {
                format!("buffer holds {capacity} elements, {needed} needed")
            }
            FfiError::Core(e) => e.to_string(),
        }
    }
}

type FfiResult<T = ()> = Result<T, FfiError>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> FfiResult) -> NsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NsStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(e.message());
            e.status()
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            NsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(FfiError::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| FfiError::Utf8(what))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(FfiError::Null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or(FfiError::Null(what))
}

unsafe fn out_slice<'a, T>(p: *mut T, capacity: usize, needed: usize, what: &'static str) -> FfiResult<&'a mut [T]> {
    if capacity < needed {
        return Err(FfiError::BufferTooSmall { needed, capacity });
    }
    if p.is_null() {
        return Err(FfiError::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, needed))
}

fn into_handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ns_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ns_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Looks up a fixture matrix by key (e.g. `"A2"`, `"X1"`, `"U8"`).
///
/// # Safety
/// `key` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ns_matrix_from_catalog(key: *const c_char, out: *mut *mut NsMatrix) -> NsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let key = str_arg(key, "key")?;
        let entry = catalog::lookup(key).ok_or_else(|| Error::UnknownMatrix(key.to_owned()))?;
        *out = into_handle(NsMatrix(entry.matrix));
        Ok(())
    })
}

/// Builds a `dim x dim` matrix from row-major real and imaginary parts.
/// `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `dim * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn ns_matrix_from_data(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut NsMatrix,
) -> NsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        if re.is_null() {
            return Err(FfiError::Null("re"));
        }
        let len = dim
            .checked_mul(dim)
            .ok_or_else(|| Error::InvalidArgument(format!("dimension {dim} overflows")))?;
        let re = std::slice::from_raw_parts(re, len);
        let entries = if im.is_null() {
            re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
        };
        *out = into_handle(NsMatrix(ComplexMatrix::new(dim, entries)?));
        Ok(())
    })
}

/// Dimension of `m`, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_matrix_dim(m: *const NsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_matrix_free(m: *mut NsMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Monte Carlo shadow of `m` over the states described by `restriction`
/// (same syntax as the command line, e.g. `"product:2x2:complex"`). A null
/// `grid` selects a padded bounding box of the numerical range with
/// `bins x bins` cells; otherwise `bins` is ignored.
///
/// # Safety
/// Pointers must be valid; `grid` may be null.
#[no_mangle]
pub unsafe extern "C" fn ns_shadow_estimate(
    m: *const NsMatrix,
    restriction: *const c_char,
    n_samples: u64,
    grid: *const NsGrid,
    bins: usize,
    seed: u64,
    out: *mut *mut NsHistogram,
) -> NsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let a = &ref_arg(m, "m")?.0;
        let r: Restriction = str_arg(restriction, "restriction")?.parse()?;
        let grid = match grid.as_ref() {
            Some(g) => GridSpec::new(g.re_min, g.re_max, g.im_min, g.im_max, g.nx, g.ny)?,
            None => GridSpec::auto(a, bins, bins)?,
        };
        let n = usize::try_from(n_samples).map_err(|_| Error::InvalidArgument("sample count too large".into()))?;
        *out = into_handle(NsHistogram(estimate_shadow(a, &r, n, Some(grid), seed)?));
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ns_histogram_grid(h: *const NsHistogram, out: *mut NsGrid) -> NsStatus {
    guard(|| {
        let g = ref_arg(h, "h")?.0.grid;
        *out_arg(out, "out")? = NsGrid {
            re_min: g.re_min,
            re_max: g.re_max,
            im_min: g.im_min,
            im_max: g.im_max,
            nx: g.nx,
            ny: g.ny,
        };
        Ok(())
    })
}

/// Number of draws behind `h`, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ns_histogram_n_samples(h: *const NsHistogram) -> u64 {
    h.as_ref().map_or(0, |h| h.0.n_samples)
}

/// Copies the `nx * ny` cell counts, row `iy` (from `im_min`) major.
///
/// # Safety
/// `buf` must hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn ns_histogram_counts(h: *const NsHistogram, buf: *mut u64, capacity: usize) -> NsStatus {
    guard(|| {
        let counts = ref_arg(h, "h")?.0.counts();
        out_slice(buf, capacity, counts.len(), "buf")?.copy_from_slice(counts);
        Ok(())
    })
}

/// Writes the histogram in the command-line CSV layout.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ns_histogram_write_csv(h: *const NsHistogram, path: *const c_char) -> NsStatus {
    guard(|| {
        let h = &ref_arg(h, "h")?.0;
        let path = Path::new(str_arg(path, "path")?);
        numshadow::io::write_bytes(path, h.to_csv().as_bytes())?;
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ns_histogram_free(h: *mut NsHistogram) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Boundary polygon of the numerical range from an `n_angles` sweep. The
/// vertex count is written to `written`; when it exceeds `capacity` the call
/// fails with `BufferTooSmall` and `written` holds the required size.
///
/// # Safety
/// `re` and `im` must each hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ns_numerical_range(
    m: *const NsMatrix,
    n_angles: usize,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> NsStatus {
    guard(|| {
        let written = out_arg(written, "written")?;
        *written = 0;
        let poly = numerical_range_boundary(&ref_arg(m, "m")?.0, n_angles)?;
        let v = poly.vertices();
        *written = v.len();
        let re = out_slice(re, capacity, v.len(), "re")?;
        let im = out_slice(im, capacity, v.len(), "im")?;
        for (k, z) in v.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Monte Carlo moments of the restricted shadow alongside the analytic
/// values when a closed form is known for the restriction.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ns_moments(
    m: *const NsMatrix,
    restriction: *const c_char,
    n_samples: u64,
    seed: u64,
    out: *mut NsMoments,
) -> NsStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let a = &ref_arg(m, "m")?.0;
        let r: Restriction = str_arg(restriction, "restriction")?.parse()?;
        let n = usize::try_from(n_samples).map_err(|_| Error::InvalidArgument("sample count too large".into()))?;
        let analytic = restricted_moments(a, &r)?;
        let est = estimate_moments(a, &r, n, seed)?;
        let mut res = NsMoments {
            mean_re: est.mean.re,
            mean_im: est.mean.im,
            second_abs: est.second_abs,
            variance: est.variance,
            std_error_mean: est.std_error_mean,
            std_error_second_abs: est.std_error_second_abs,
            std_error_variance: est.std_error_var,
            n_samples: est.n_samples as u64,
            ..NsMoments::default()
        };
        if let Some(m) = analytic {
            res.has_analytic = true;
            res.analytic_mean_re = m.mean.re;
            res.analytic_mean_im = m.mean.im;
            res.analytic_second_abs = m.second_abs;
            res.analytic_variance = m.variance;
        }
        *out = res;
        Ok(())
    })
}

/// Two-qubit trajectory from the Bell state; writes `steps + 1` points.
///
/// # Safety
/// `buf` must hold `capacity` points; `observable` must be a 4x4 handle.
#[no_mangle]
pub unsafe extern "C" fn ns_dynamics_trajectory(
    alpha: f64,
    beta: f64,
    steps: usize,
    observable: *const NsMatrix,
    buf: *mut NsTrajectoryPoint,
    capacity: usize,
) -> NsStatus {
    guard(|| {
        let needed = steps
            .checked_add(1)
            .ok_or_else(|| Error::InvalidArgument("step count overflows".into()))?;
        let cfg = DynamicsConfig {
            alpha,
            beta,
            steps,
            observable: ref_arg(observable, "observable")?.0.clone(),
        };
        cfg.validate()?;
        let buf = out_slice(buf, capacity, needed, "buf")?;
        for (slot, p) in buf.iter_mut().zip(trajectory(&cfg)?) {
            *slot = NsTrajectoryPoint {
                t: p.t as u64,
                re: p.z.re,
                im: p.z.im,
                separable: p.separable,
                purity: p.purity,
                min_pt_eigenvalue: p.min_pt_eigenvalue,
            };
        }
        Ok(())
    })
}
