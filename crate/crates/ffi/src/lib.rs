//! C ABI over `szlab`. Every function returns an [`SzStatus`]; on failure the message is
//! available from [`sz_last_error_message`] on the same thread. Objects are opaque handles
//! released with the matching `*_free`.

use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use szlab::generators::{generate_function, GeneratorSpec};
use szlab::gowers::{self, CountMethod};
use szlab::graph::{self, EdgeFunction};
use szlab::primes::prime_ap_average;
use szlab::{CyclicFunction, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ContractViolation = 3,
    PostconditionViolation = 4,
    Internal = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SzCountMethod {
    Naive = 0,
    Spectral = 1,
}

/// A complex-valued function on Z/N.
pub struct SzCyclic {
    inner: CyclicFunction,
}

/// A real weight function on V x V with entries in [-1, 1].
pub struct SzEdge {
    inner: EdgeFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SzStatus {
    match e {
        Error::ContractViolation(_) => SzStatus::ContractViolation,
        Error::PostconditionViolation(_) => SzStatus::PostconditionViolation,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => SzStatus::Internal,
        _ => SzStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> SzStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SzStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            SzStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(format!("{}: {e}", e.kind()));
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SzStatus::Panic
        }
    }
}

fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: the caller passes either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or(Fail::Null(what))
}

fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or(Fail::Null(what))
}

fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    // SAFETY: non-null and the caller guarantees `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

/// Message of the last failed call on this thread, or null. Valid until the next failing
/// call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn sz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a function on Z/n from real parts and optional imaginary parts (`im` may be null).
///
/// # Safety
/// `re` (and `im` if non-null) must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_cyclic_new(
    re: *const f64,
    im: *const f64,
    n: usize,
    out: *mut *mut SzCyclic,
) -> SzStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let re = slice(re, n, "re")?;
        let values: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&r| Complex64::new(r, 0.0)).collect()
        } else {
            let im = slice(im, n, "im")?;
            re.iter()
                .zip(im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect()
        };
        let inner = CyclicFunction::new(values)?;
        *out = Box::into_raw(Box::new(SzCyclic { inner }));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sz_cyclic_free(f: *mut SzCyclic) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_cyclic_modulus(f: *const SzCyclic, out: *mut usize) -> SzStatus {
    guard(|| {
        *out_ptr(out, "out")? = nonnull(f, "f")?.inner.modulus();
        Ok(())
    })
}

/// Copies the values into `re` / `im` (either may be null), each of length `n`.
///
/// # Safety
/// Non-null buffers must hold `n` writable doubles, `n` equal to the modulus.
#[no_mangle]
pub unsafe extern "C" fn sz_cyclic_values(
    f: *const SzCyclic,
    re: *mut f64,
    im: *mut f64,
    n: usize,
) -> SzStatus {
    guard(|| {
        let f = &nonnull(f, "f")?.inner;
        if n != f.modulus() {
            return Err(Error::ModulusMismatch {
                left: f.modulus(),
                right: n,
            }
            .into());
        }
        for (i, v) in f.values().iter().enumerate() {
            if !re.is_null() {
                *re.add(i) = v.re;
            }
            if !im.is_null() {
                *im.add(i) = v.im;
            }
        }
        Ok(())
    })
}

/// Function described by a generator spec such as `quadratic_phase:xi=1`; `seed` fills in
/// any unspecified seed.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_generate_function(
    spec: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut SzCyclic,
) -> SzStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        if spec.is_null() {
            return Err(Fail::Null("spec"));
        }
        let text = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| Error::Parse("spec is not UTF-8".into()))?;
        let parsed: GeneratorSpec = text.parse()?;
        let inner = generate_function(&parsed.with_default_seed(seed), n)?;
        *out = Box::into_raw(Box::new(SzCyclic { inner }));
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_u2_norm(f: *const SzCyclic, out: *mut f64) -> SzStatus {
    guard(|| {
        *out_ptr(out, "out")? = gowers::u2(&nonnull(f, "f")?.inner);
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_u3_norm(f: *const SzCyclic, out: *mut f64) -> SzStatus {
    guard(|| {
        *out_ptr(out, "out")? = gowers::u3(&nonnull(f, "f")?.inner);
        Ok(())
    })
}

/// `E_{x,r} f0(x) f1(x+r) f2(x+2r)`.
///
/// # Safety
/// All handles must be live; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_ap_form3(
    f0: *const SzCyclic,
    f1: *const SzCyclic,
    f2: *const SzCyclic,
    method: SzCountMethod,
    re: *mut f64,
    im: *mut f64,
) -> SzStatus {
    guard(|| {
        let fs = [
            &nonnull(f0, "f0")?.inner,
            &nonnull(f1, "f1")?.inner,
            &nonnull(f2, "f2")?.inner,
        ];
        let (re, im) = (out_ptr(re, "re")?, out_ptr(im, "im")?);
        let m = match method {
            SzCountMethod::Naive => CountMethod::Naive,
            SzCountMethod::Spectral => CountMethod::Spectral,
        };
        let r = gowers::ap_form(3, &fs, m)?;
        *re = r.value.re;
        *im = r.value.im;
        Ok(())
    })
}

/// Row-major `n x n` weights.
///
/// # Safety
/// `values` must hold `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_edge_new(
    values: *const f64,
    n: usize,
    out: *mut *mut SzEdge,
) -> SzStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let len = n
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidParameter("n * n overflows".into()))?;
        let v = slice(values, len, "values")?;
        let inner = EdgeFunction::new(n, v.to_vec())?;
        *out = Box::into_raw(Box::new(SzEdge { inner }));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sz_edge_free(g: *mut SzEdge) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_box2_norm(g: *const SzEdge, out: *mut f64) -> SzStatus {
    guard(|| {
        *out_ptr(out, "out")? = graph::box2_norm(&nonnull(g, "g")?.inner);
        Ok(())
    })
}

/// `E_{x,y,z} f(x,y) g(y,z) h(z,x)`.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_triangle_form(
    f: *const SzEdge,
    g: *const SzEdge,
    h: *const SzEdge,
    out: *mut f64,
) -> SzStatus {
    guard(|| {
        let v = graph::triangle_form(
            &nonnull(f, "f")?.inner,
            &nonnull(g, "g")?.inner,
            &nonnull(h, "h")?.inner,
        )?;
        *out_ptr(out, "out")? = v;
        Ok(())
    })
}

/// Average of `Λ_{W,b}` over k-term progressions with `d ≥ 1` inside `[1, kN]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sz_prime_ap_average(
    k: u32,
    n: u64,
    w: u64,
    b: u64,
    out: *mut f64,
) -> SzStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = prime_ap_average(k as usize, n, w, b)?.average;
        Ok(())
    })
}
