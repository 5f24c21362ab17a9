//! C ABI for `wco-lab`.
//!
//! Every function returns a [`WcoStatus`]; on failure a message is available from
//! [`wco_last_error_message`] on the same thread. Objects are opaque handles released with the
//! matching `_free` function. Strings returned by the library are released with
//! [`wco_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wco_lab::classify::{self, Tolerances, Verdict};
use wco_lab::job::{self, Command, JobError, JobSpec};
use wco_lab::linalg::{CMatrix, CVector};
use wco_lab::{BallPoint, Complex64, Error, ErrorKind, LinearFractionalMap, SpaceParams, WcoSymbol, WeightSpec};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed job or argument.
    Parse = 3,
    /// Mathematical precondition violated (not a self-map, point outside the ball, ...).
    Domain = 4,
    Numerical = 5,
    /// The caller's buffer is too small; the required size has been written.
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcoComplex {
    pub re: f64,
    pub im: f64,
}

impl From<WcoComplex> for Complex64 {
    fn from(z: WcoComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for WcoComplex {
    fn from(z: Complex64) -> Self {
        WcoComplex { re: z.re, im: z.im }
    }
}

/// Verdict bits written by [`wco_operator_classify`].
pub const WCO_VERDICT_UNITARY: u32 = 1;
pub const WCO_VERDICT_SELF_ADJOINT: u32 = 2;
pub const WCO_VERDICT_NORMAL_FIXED_POINT: u32 = 4;
pub const WCO_VERDICT_NORMAL_LFM: u32 = 8;

/// Opaque linear fractional self-map.
pub struct WcoMap(LinearFractionalMap);

/// Opaque operator symbol.
pub struct WcoOperator(WcoSymbol);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(WcoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Domain => WcoStatus::Domain,
            ErrorKind::Numerical => WcoStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

impl From<JobError> for Failure {
    fn from(e: JobError) -> Self {
        match e {
            JobError::Parse(m) => Failure(WcoStatus::Parse, format!("invalid job: {m}")),
            JobError::Compute(e) => e.into(),
        }
    }
}

fn null() -> Failure {
    Failure(WcoStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WcoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WcoStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WcoStatus::Panic
        }
    }
}

unsafe fn read_slice<'a>(p: *const WcoComplex, len: usize) -> Result<&'a [WcoComplex], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn read_vector(p: *const WcoComplex, n: usize) -> Result<CVector, Failure> {
    let s = read_slice(p, n)?;
    Ok(CVector::from_iterator(n, s.iter().map(|z| Complex64::from(*z))))
}

unsafe fn read_matrix(p: *const WcoComplex, n: usize) -> Result<CMatrix, Failure> {
    let s = read_slice(p, n * n)?;
    Ok(CMatrix::from_fn(n, n, |i, j| s[i * n + j].into()))
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(WcoStatus::InvalidUtf8, "string is not valid UTF-8".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn map_ref<'a>(m: *const WcoMap) -> Result<&'a LinearFractionalMap, Failure> {
    m.as_ref().map(|m| &m.0).ok_or_else(null)
}

unsafe fn op_ref<'a>(w: *const WcoOperator) -> Result<&'a WcoSymbol, Failure> {
    w.as_ref().map(|w| &w.0).ok_or_else(null)
}

fn boxed_op(w: WcoSymbol) -> *mut WcoOperator {
    Box::into_raw(Box::new(WcoOperator(w)))
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn wco_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn wco_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs a JSON job and returns the JSON report in `*out_report`. `command` may be NULL when the
/// job names its own command.
///
/// # Safety
/// `job_json` and (if non-null) `command` must be NUL-terminated strings; `out_report` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn wco_run_job(
    job_json: *const c_char,
    command: *const c_char,
    out_report: *mut *mut c_char,
) -> WcoStatus {
    guard(|| {
        let text = read_str(job_json)?;
        let cmd = if command.is_null() {
            None
        } else {
            Some(read_str(command)?.parse::<Command>()?)
        };
        let spec = JobSpec::from_json(text)?;
        let report = job::run(&spec, cmd)?;
        let s = CString::new(report.to_string()).expect("JSON has no NUL");
        write_out(out_report, s.into_raw())
    })
}

/// Number of basis monomials of degree at most `degree_cap` in `n` variables.
///
/// # Safety
/// `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wco_basis_len(n: usize, degree_cap: u32, out_len: *mut usize) -> WcoStatus {
    guard(|| {
        let p = SpaceParams::new(n, 1.0, degree_cap)?;
        write_out(out_len, p.basis_len())
    })
}

/// z -> (A z + B) / (<z, C> + d). `a` is n*n row-major, `b` and `c` have length n.
///
/// # Safety
/// Arrays must hold the stated number of elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wco_map_new(
    n: usize,
    a: *const WcoComplex,
    b: *const WcoComplex,
    c: *const WcoComplex,
    d: WcoComplex,
    out: *mut *mut WcoMap,
) -> WcoStatus {
    guard(|| {
        let m = LinearFractionalMap::new(read_matrix(a, n)?, read_vector(b, n)?, read_vector(c, n)?, d.into())?;
        write_out(out, Box::into_raw(Box::new(WcoMap(m))))
    })
}

/// The Moebius involution exchanging 0 and `a`.
///
/// # Safety
/// `a` must hold n elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wco_map_moebius(n: usize, a: *const WcoComplex, out: *mut *mut WcoMap) -> WcoStatus {
    guard(|| {
        let p = BallPoint::new(read_vector(a, n)?)?;
        let m = LinearFractionalMap::moebius_involution(&p);
        write_out(out, Box::into_raw(Box::new(WcoMap(m))))
    })
}

/// # Safety
/// `map` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn wco_map_free(map: *mut WcoMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// # Safety
/// `map` must be a live handle and `out_n` writable.
#[no_mangle]
pub unsafe extern "C" fn wco_map_dim(map: *const WcoMap, out_n: *mut usize) -> WcoStatus {
    guard(|| write_out(out_n, map_ref(map)?.dim()))
}

/// Writes phi(z) to `out` (n elements).
///
/// # Safety
/// `z` and `out` must hold n elements, n being the map dimension.
#[no_mangle]
pub unsafe extern "C" fn wco_map_apply(map: *const WcoMap, z: *const WcoComplex, out: *mut WcoComplex) -> WcoStatus {
    guard(|| {
        let m = map_ref(map)?;
        let w = m.apply(&read_vector(z, m.dim())?)?;
        if out.is_null() {
            return Err(null());
        }
        for (i, v) in w.iter().enumerate() {
            out.add(i).write((*v).into());
        }
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wco_map_is_automorphism(map: *const WcoMap, out: *mut bool) -> WcoStatus {
    guard(|| write_out(out, map_ref(map)?.is_automorphism()))
}

/// W = alpha K_c composed with `map`. `c` holds n elements; NULL means the origin.
///
/// # Safety
/// `map` must be a live handle, `c` NULL or n elements, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wco_operator_new_kernel(
    gamma: f64,
    map: *const WcoMap,
    alpha: WcoComplex,
    c: *const WcoComplex,
    out: *mut *mut WcoOperator,
) -> WcoStatus {
    guard(|| {
        let m = map_ref(map)?;
        let n = m.dim();
        let center = if c.is_null() { BallPoint::origin(n) } else { BallPoint::new(read_vector(c, n)?)? };
        let w = WcoSymbol::new(gamma, WeightSpec::kernel(alpha.into(), center), m.clone())?;
        write_out(out, boxed_op(w))
    })
}

/// lambda W_{k_a, psi} with a = psi^-1(0); `map` must be an automorphism and |lambda| = 1.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wco_operator_new_unitary(
    gamma: f64,
    map: *const WcoMap,
    lambda: WcoComplex,
    out: *mut *mut WcoOperator,
) -> WcoStatus {
    guard(|| {
        let w = classify::make_unitary(map_ref(map)?, gamma, lambda.into())?;
        write_out(out, boxed_op(w))
    })
}

/// # Safety
/// `op` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn wco_operator_free(op: *mut WcoOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// `*out = first * second` as operators.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wco_operator_product(
    first: *const WcoOperator,
    second: *const WcoOperator,
    out: *mut *mut WcoOperator,
) -> WcoStatus {
    guard(|| {
        let p = op_ref(first)?.product(op_ref(second)?)?;
        write_out(out, boxed_op(p))
    })
}

/// Closed-form adjoint; fails with `WCO_STATUS_DOMAIN` unless the weight is alpha K_{sigma(0)}.
///
/// # Safety
/// `op` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wco_operator_adjoint(op: *const WcoOperator, out: *mut *mut WcoOperator) -> WcoStatus {
    guard(|| {
        let a = op_ref(op)?.adjoint_symbol()?;
        write_out(out, boxed_op(a))
    })
}

/// Weight value f(z).
///
/// # Safety
/// `z` must hold n elements and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wco_operator_weight_at(
    op: *const WcoOperator,
    z: *const WcoComplex,
    out: *mut WcoComplex,
) -> WcoStatus {
    guard(|| {
        let w = op_ref(op)?;
        let v = w.weight_at(&read_vector(z, w.dim())?)?;
        write_out(out, v.into())
    })
}

/// Runs the four classifiers and writes a bitmask of `WCO_VERDICT_*` flags. Non-positive
/// tolerances select the defaults.
///
/// # Safety
/// `op` must be live and `out_verdicts` writable.
#[no_mangle]
pub unsafe extern "C" fn wco_operator_classify(
    op: *const WcoOperator,
    tol_symbol: f64,
    tol_matrix: f64,
    out_verdicts: *mut u32,
) -> WcoStatus {
    guard(|| {
        let d = Tolerances::default();
        let tol = Tolerances {
            symbol: if tol_symbol > 0.0 { tol_symbol } else { d.symbol },
            matrix: if tol_matrix > 0.0 { tol_matrix } else { d.matrix },
        };
        let mut bits = 0;
        for c in classify::classify_all(op_ref(op)?, &tol) {
            bits |= match c.verdict {
                Verdict::Unitary => WCO_VERDICT_UNITARY,
                Verdict::SelfAdjoint => WCO_VERDICT_SELF_ADJOINT,
                Verdict::NormalFixedPoint => WCO_VERDICT_NORMAL_FIXED_POINT,
                Verdict::NormalLfm => WCO_VERDICT_NORMAL_LFM,
                Verdict::None => 0,
            };
        }
        write_out(out_verdicts, bits)
    })
}

/// Compression to monomials of degree at most `degree_cap`, row-major into `buf`
/// (`buf_len` complex entries). `*out_size` receives the matrix size N; when N*N exceeds
/// `buf_len` nothing is written and `WCO_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `buf` must hold `buf_len` elements (may be NULL when `buf_len` is 0); `out_size` writable.
#[no_mangle]
pub unsafe extern "C" fn wco_operator_compress(
    op: *const WcoOperator,
    degree_cap: u32,
    buf: *mut WcoComplex,
    buf_len: usize,
    out_size: *mut usize,
) -> WcoStatus {
    guard(|| {
        let w = op_ref(op)?;
        let params = SpaceParams::new(w.dim(), w.gamma(), degree_cap)?;
        let size = params.basis_len();
        write_out(out_size, size)?;
        if size * size > buf_len {
            return Err(Failure(
                WcoStatus::BufferTooSmall,
                format!("buffer holds {buf_len} entries, {} needed", size * size),
            ));
        }
        if buf.is_null() {
            return Err(null());
        }
        let m = w.compress(params)?;
        for i in 0..size {
            for j in 0..size {
                buf.add(i * size + j).write(m[(i, j)].into());
            }
        }
        Ok(())
    })
}
