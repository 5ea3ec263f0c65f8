//! C interface to `homokernel`.
//!
//! Objects are opaque handles created by `hk_*_new`/`hk_*_from_*` and released
//! with the matching `hk_*_free`. Every fallible call returns an `HkStatus`;
//! outputs go through pointer arguments and are written only on `HK_OK`.
//! The message of the most recent failure on the calling thread is available
//! from `hk_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use homokernel::geometry::{DomainSpec, GroupElement, MeasureMethod, Point, Region};
use homokernel::gl2::{stabilizer_witness, Witness};
use homokernel::hardy_littlewood::{kappa_1d, kappa_2d, kernel_1d, kernel_2d};
use homokernel::kernels::{build_kernel, check_strong_homogeneity, preset, Kernel};
use homokernel::{expr, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad configuration, parse error or inadmissible parameters.
    InvalidArgument = 3,
    /// A point or parameter outside the domain's range.
    OutOfRange = 4,
    /// The kernel is singular or non-integrable at the requested input.
    Singular = 5,
    /// Quadrature or iteration did not converge, or a value was not finite.
    Numerical = 6,
    /// The output buffer is too small.
    BufferTooSmall = 7,
    /// A Rust panic was caught at the boundary.
    Internal = 8,
}

/// Opaque measure space with its dilation group.
pub struct HkDomain {
    spec: DomainSpec,
}

/// Opaque real-valued homogeneous kernel bound to its domain.
pub struct HkKernel {
    domain: DomainSpec,
    kernel: Kernel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HkStatus {
    match e {
        Error::Range { .. } | Error::InvalidPoint(_) | Error::ExcludedRay => HkStatus::OutOfRange,
        Error::SingularLocus(_) | Error::NonIntegrable(_) | Error::CaseB(_) => HkStatus::Singular,
        e if e.is_numerical() => HkStatus::Numerical,
        _ => HkStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), HkStatus>) -> HkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HkStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            HkStatus::Internal
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, HkStatus>;
}

impl<T> OrStatus<T> for homokernel::Result<T> {
    fn or_status(self) -> Result<T, HkStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, HkStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(HkStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        HkStatus::InvalidUtf8
    })
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, HkStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        HkStatus::NullPointer
    })
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), HkStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(HkStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated)
/// and returns its length without the terminator. Passing a null `buf` or a
/// short `len` only reports the length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn hk_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes_with_nul();
        if !buf.is_null() && len >= bytes.len() {
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, bytes.len());
        }
        bytes.len() - 1
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn hk_status_name(status: HkStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        HkStatus::Ok => b"ok\0",
        HkStatus::NullPointer => b"null pointer\0",
        HkStatus::InvalidUtf8 => b"invalid utf-8\0",
        HkStatus::InvalidArgument => b"invalid argument\0",
        HkStatus::OutOfRange => b"out of range\0",
        HkStatus::Singular => b"singular\0",
        HkStatus::Numerical => b"numerical failure\0",
        HkStatus::BufferTooSmall => b"buffer too small\0",
        HkStatus::Internal => b"internal error\0",
    };
    s.as_ptr() as *const c_char
}

/// Parses a domain from `{"tag": ..., "R": ..., "C": ..., "alpha": ...}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_from_json(json: *const c_char, out: *mut *mut HkDomain) -> HkStatus {
    guard(|| {
        let spec = DomainSpec::from_json(str_arg(json)?).or_status()?;
        write(out, Box::into_raw(Box::new(HkDomain { spec })))
    })
}

/// # Safety
/// `d` must be null or a handle from `hk_domain_from_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_free(d: *mut HkDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// `Γ_C(t)` for `t = r²` on a polar domain.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_gamma_c(d: *const HkDomain, t: f64, out: *mut f64) -> HkStatus {
    guard(|| {
        let v = ref_arg(d)?.spec.gamma_c(t).or_status()?;
        write(out, v)
    })
}

/// Acts by the dilation `(a, φ)` on the polar or cylinder point `(c0, c1)`.
///
/// # Safety
/// `d` must be a live handle; `out` must hold two doubles.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_act(d: *const HkDomain, a: f64, phi: f64, c0: f64, c1: f64, out: *mut f64) -> HkStatus {
    guard(|| {
        let p = ref_arg(d)?.spec.act(&GroupElement::cyl(a, phi), &Point::new(c0, c1)).or_status()?;
        if out.is_null() {
            set_error("null output pointer");
            return Err(HkStatus::NullPointer);
        }
        out.write(p.0[0]);
        out.add(1).write(p.0[1]);
        Ok(())
    })
}

/// Measures the annulus `r_inner < r < r_outer` and its image under `(a, φ)`
/// by quadrature; writes the ratio and the character `λ_g`.
///
/// # Safety
/// `d` must be a live handle; `ratio` and `expected` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hk_domain_verify_dilation(
    d: *const HkDomain,
    a: f64,
    phi: f64,
    r_inner: f64,
    r_outer: f64,
    ratio: *mut f64,
    expected: *mut f64,
) -> HkStatus {
    guard(|| {
        let rep = ref_arg(d)?
            .spec
            .verify_dilation(&GroupElement::cyl(a, phi), &Region::annulus(r_inner, r_outer), MeasureMethod::quadrature())
            .or_status()?;
        write(ratio, rep.ratio)?;
        write(expected, rep.expected)
    })
}

/// Builds a kernel from a generating-function preset (`one`,
/// `angular:a=cos`, `gl2:antisym`, ...).
///
/// # Safety
/// `d` must be a live handle, `name` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_kernel_from_preset(d: *const HkDomain, name: *const c_char, out: *mut *mut HkKernel) -> HkStatus {
    guard(|| {
        let domain = ref_arg(d)?.spec;
        let kernel = build_kernel(&domain, &preset(str_arg(name)?).or_status()?).or_status()?;
        write(out, Box::into_raw(Box::new(HkKernel { domain, kernel })))
    })
}

/// Builds a kernel from a generating-function expression in `eta` (or `u`)
/// and `psi`.
///
/// # Safety
/// `d` must be a live handle, `src` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_kernel_from_expr(d: *const HkDomain, src: *const c_char, out: *mut *mut HkKernel) -> HkStatus {
    guard(|| {
        let domain = ref_arg(d)?.spec;
        let f = expr::generating_function(str_arg(src)?).or_status()?;
        let kernel = build_kernel(&domain, &f).or_status()?;
        write(out, Box::into_raw(Box::new(HkKernel { domain, kernel })))
    })
}

/// # Safety
/// `k` must be null or a live kernel handle.
#[no_mangle]
pub unsafe extern "C" fn hk_kernel_free(k: *mut HkKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// `K(x, y)` in the domain's chart coordinates.
///
/// # Safety
/// `k` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hk_kernel_eval(k: *const HkKernel, x0: f64, x1: f64, y0: f64, y1: f64, out: *mut f64) -> HkStatus {
    guard(|| {
        let v = ref_arg(k)?.kernel.eval(&Point::new(x0, x1), &Point::new(y0, y1)).or_status()?;
        write(out, v)
    })
}

/// Sampled strong-homogeneity check; writes the worst relative residual and
/// 1 when it is within `tol`, else 0.
///
/// # Safety
/// `k` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn hk_kernel_check_homogeneity(
    k: *const HkKernel,
    samples: usize,
    tol: f64,
    seed: u64,
    max_residual: *mut f64,
    pass: *mut i32,
) -> HkStatus {
    guard(|| {
        let k = ref_arg(k)?;
        let rep = check_strong_homogeneity(&k.domain, &k.kernel, samples, tol, seed).or_status()?;
        write(max_residual, rep.max_residual)?;
        write(pass, rep.pass as i32)
    })
}

/// Hardy–Littlewood constant of a named kernel (`hlp:1/(x+y)`,
/// `hlp:indicator`, `riesz:alpha=…`, `angular:a=…`); `divergent` is set to
/// 1 when the integral diverges, in which case `kappa` is +∞.
///
/// # Safety
/// `name` must be a NUL-terminated string; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn hk_hl_kappa(name: *const c_char, p: f64, kappa: *mut f64, divergent: *mut i32) -> HkStatus {
    guard(|| {
        let name = str_arg(name)?;
        let rep = match kernel_1d(name) {
            Ok(k) => kappa_1d(&k, p),
            Err(_) => kernel_2d(name).and_then(|k| kappa_2d(&k, p)),
        }
        .or_status()?;
        write(kappa, if rep.divergent { f64::INFINITY } else { rep.kappa })?;
        write(divergent, rep.divergent as i32)
    })
}

/// Stabilizer witness for `x ∈ ℝⁿ`: on success `found` is 1 and `out`
/// (row-major, `n·n` doubles) holds `h` with `h e₁ = e₁`, `h x = x`,
/// `det h = 2`; `found` is 0 when none exists (`n = 2`, `x` off the `e₁`
/// axis).
///
/// # Safety
/// `x` must hold `n` doubles and `out` `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hk_stabilizer_witness(
    x: *const f64,
    n: usize,
    out: *mut f64,
    out_len: usize,
    found: *mut i32,
) -> HkStatus {
    guard(|| {
        if x.is_null() || out.is_null() {
            set_error("null array");
            return Err(HkStatus::NullPointer);
        }
        if out_len < n.saturating_mul(n) {
            set_error("output needs n·n entries");
            return Err(HkStatus::BufferTooSmall);
        }
        let xs = std::slice::from_raw_parts(x, n);
        match stabilizer_witness(xs).or_status()? {
            Witness::Found(h) => {
                for (i, v) in h.approx.iter().flatten().enumerate() {
                    out.add(i).write(*v);
                }
                write(found, 1)
            }
            Witness::NoWitness => write(found, 0),
        }
    })
}
