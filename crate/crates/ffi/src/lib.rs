//! C ABI over the mchrift library.
//!
//! Every fallible call returns an [`MchriftStatus`]; on failure the message is
//! kept per thread and read with [`mchrift_last_error`]. Handles are opaque
//! and must be released with their matching `_free` function.

use mchrift::asymptotics::{evaluate_solution, AsymptoticOptions, AsymptoticProblem, Region, ViiSign};
use mchrift::matrix::c;
use mchrift::painleve::{solve_pii, PainleveSolution};
use mchrift::scattering::{build_initial_datum, reflection_grid, DatumSpec, JostOptions, ScatteringData, SpectralGrid};
use mchrift::soliton::EigenRecord;
use mchrift::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MchriftStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NonDecayingDatum = 3,
    NonFinite = 4,
    Integration = 5,
    SpectralPoint = 6,
    Singular = 7,
    NoConvergence = 8,
    OutOfRange = 9,
    Io = 10,
    Other = 11,
    Panic = 12,
}

impl From<&Error> for MchriftStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Config { .. } => MchriftStatus::InvalidInput,
            Error::NonDecayingDatum { .. } => MchriftStatus::NonDecayingDatum,
            Error::NonFinite(_) => MchriftStatus::NonFinite,
            Error::Integration { .. } => MchriftStatus::Integration,
            Error::SpectralPoint { .. } => MchriftStatus::SpectralPoint,
            Error::Singular { .. } | Error::DressingDegeneracy { .. } => MchriftStatus::Singular,
            Error::NoConvergence { .. } | Error::Bracket(_) => MchriftStatus::NoConvergence,
            Error::OutOfRange(_) => MchriftStatus::OutOfRange,
            Error::Io(_) => MchriftStatus::Io,
            Error::MonitorDrift { .. } => MchriftStatus::Other,
        }
    }
}

/// Region codes written by [`mchrift_asymptotic_eval`].
pub const MCHRIFT_REGION_ONE: i32 = 1;
pub const MCHRIFT_REGION_TWO: i32 = 2;

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut buf = e.borrow_mut();
        buf.clear();
        buf.extend(msg.bytes().filter(|b| *b != 0));
    });
}

fn guard<F: FnOnce() -> Result<(), (MchriftStatus, String)>>(f: F) -> MchriftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MchriftStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside mchrift");
            MchriftStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (MchriftStatus, String) {
    (MchriftStatus::from(&e), e.to_string())
}

fn null_err(what: &str) -> (MchriftStatus, String) {
    (MchriftStatus::NullPointer, format!("`{what}` is null"))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mchrift_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

pub struct MchriftScattering {
    data: ScatteringData,
}

pub struct MchriftPainleve {
    solution: PainleveSolution,
}

pub struct MchriftProblem {
    problem: AsymptoticProblem,
}

/// Reflection data of a datum such as `"gaussian(0.3,2)"` sampled on
/// [−half_width, half_width) with `points` nodes.
///
/// # Safety
/// `datum` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mchrift_scattering_new(
    datum: *const c_char,
    half_width: f64,
    points: usize,
    z_max: f64,
    per_side: usize,
    out: *mut *mut MchriftScattering,
) -> MchriftStatus {
    guard(|| {
        if datum.is_null() {
            return Err(null_err("datum"));
        }
        if out.is_null() {
            return Err(null_err("out"));
        }
        let text = CStr::from_ptr(datum).to_str().map_err(|_| (MchriftStatus::InvalidInput, "datum is not UTF-8".to_string()))?;
        let spec = DatumSpec::parse(text).map_err(lib_err)?;
        let sampled = build_initial_datum(&spec, half_width, points).map_err(lib_err)?;
        let grid = SpectralGrid::new(z_max, per_side).map_err(lib_err)?;
        let data = reflection_grid(&sampled, grid, &JostOptions::default());
        *out = Box::into_raw(Box::new(MchriftScattering { data }));
        Ok(())
    })
}

/// r(z) on the real axis by interpolation of the sampled data.
///
/// # Safety
/// `handle` must come from [`mchrift_scattering_new`]; `re` and `im` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mchrift_scattering_reflection(handle: *const MchriftScattering, z: f64, re: *mut f64, im: *mut f64) -> MchriftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null_err("handle"))?;
        if re.is_null() || im.is_null() {
            return Err(null_err("re/im"));
        }
        if !z.is_finite() || z == 0.0 {
            return Err((MchriftStatus::InvalidInput, format!("z must be finite and nonzero, got {z}")));
        }
        let r = h.data.reflection_at(z);
        *re = r.re;
        *im = r.im;
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`mchrift_scattering_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn mchrift_scattering_free(handle: *mut MchriftScattering) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Solution of v'' = sv + 2v³ with v ~ κ Ai(s) as s → +∞ on [s_min, s_max].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mchrift_painleve_new(kappa: f64, s_min: f64, s_max: f64, out: *mut *mut MchriftPainleve) -> MchriftStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let solution = solve_pii(kappa, s_min, s_max).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MchriftPainleve { solution }));
        Ok(())
    })
}

/// v(s), v'(s) and ∫ₛ^∞ v² at one point of the tabulated range.
///
/// # Safety
/// `handle` must come from [`mchrift_painleve_new`]; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mchrift_painleve_eval(handle: *const MchriftPainleve, s: f64, v: *mut f64, v_prime: *mut f64, tail: *mut f64) -> MchriftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null_err("handle"))?;
        if v.is_null() || v_prime.is_null() || tail.is_null() {
            return Err(null_err("v/v_prime/tail"));
        }
        let (val, der) = h.solution.eval(s).map_err(lib_err)?;
        *tail = h.solution.tail_at(s).map_err(lib_err)?;
        *v = val;
        *v_prime = der;
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`mchrift_painleve_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn mchrift_painleve_free(handle: *mut MchriftPainleve) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Asymptotic problem from scattering data and `count` eigen records laid
/// out as Re ζ, Im ζ, Re C, Im C. `vii_sign` is 0 for the theorem sign and 1
/// for the opposite one. The scattering handle is not consumed.
///
/// # Safety
/// `scattering` must be valid, `records` must hold 4·count doubles (or be
/// null when count is 0) and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mchrift_problem_new(
    scattering: *const MchriftScattering,
    records: *const f64,
    count: usize,
    c_cap: f64,
    vii_sign: i32,
    out: *mut *mut MchriftProblem,
) -> MchriftStatus {
    guard(|| {
        let s = scattering.as_ref().ok_or_else(|| null_err("scattering"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        if count > 0 && records.is_null() {
            return Err(null_err("records"));
        }
        let raw = if count == 0 { &[][..] } else { std::slice::from_raw_parts(records, 4 * count) };
        let eigens = raw.chunks_exact(4).map(|r| EigenRecord { zeta: c(r[0], r[1]), coeff: c(r[2], r[3]) }).collect();
        let sign = match vii_sign {
            0 => ViiSign::Theorem,
            1 => ViiSign::Eq475,
            other => return Err((MchriftStatus::InvalidInput, format!("vii_sign must be 0 or 1, got {other}"))),
        };
        let options = AsymptoticOptions { c_cap, vii_sign: sign, ..AsymptoticOptions::default() };
        let problem = AsymptoticProblem::new(s.data.clone(), eigens, options).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(MchriftProblem { problem }));
        Ok(())
    })
}

/// u(x, t) from the transition-region expansion. `region` receives
/// [`MCHRIFT_REGION_ONE`] or [`MCHRIFT_REGION_TWO`].
///
/// # Safety
/// `handle` must come from [`mchrift_problem_new`]; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn mchrift_asymptotic_eval(handle: *const MchriftProblem, x: f64, t: f64, u: *mut f64, region: *mut i32) -> MchriftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null_err("handle"))?;
        if u.is_null() || region.is_null() {
            return Err(null_err("u/region"));
        }
        let e = evaluate_solution(x, t, &h.problem).map_err(lib_err)?;
        *u = e.u_value;
        *region = match e.region {
            Region::PI => MCHRIFT_REGION_ONE,
            Region::PII => MCHRIFT_REGION_TWO,
        };
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from [`mchrift_problem_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn mchrift_problem_free(handle: *mut MchriftProblem) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn message() -> String {
        let mut buf = vec![0 as c_char; 256];
        let n = unsafe { mchrift_last_error(buf.as_mut_ptr(), buf.len()) };
        let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
        assert_eq!(n, s.len());
        s
    }

    #[test]
    fn zero_datum_round_trip() {
        let datum = CString::new("zero").unwrap();
        let mut scat = ptr::null_mut();
        unsafe {
            assert_eq!(mchrift_scattering_new(datum.as_ptr(), 20.0, 256, 8.0, 51, &mut scat), MchriftStatus::Ok);
            let (mut re, mut im) = (1.0, 1.0);
            assert_eq!(mchrift_scattering_reflection(scat, 1.5, &mut re, &mut im), MchriftStatus::Ok);
            assert_eq!((re, im), (0.0, 0.0));

            let mut prob = ptr::null_mut();
            assert_eq!(mchrift_problem_new(scat, ptr::null(), 0, 3.0, 0, &mut prob), MchriftStatus::Ok);
            let (mut u, mut region) = (1.0, 0);
            assert_eq!(mchrift_asymptotic_eval(prob, -25.0, 100.0, &mut u, &mut region), MchriftStatus::Ok);
            assert_eq!((u, region), (0.0, MCHRIFT_REGION_TWO));
            assert_eq!(mchrift_asymptotic_eval(prob, 100.0, 100.0, &mut u, &mut region), MchriftStatus::OutOfRange);
            assert!(message().contains("neither"));
            mchrift_problem_free(prob);
            mchrift_scattering_free(scat);
        }
    }

    #[test]
    fn painleve_and_errors() {
        let mut sol = ptr::null_mut();
        unsafe {
            assert_eq!(mchrift_painleve_new(0.5, -4.0, 6.0, &mut sol), MchriftStatus::Ok);
            let (mut v, mut vp, mut tail) = (0.0, 0.0, 0.0);
            assert_eq!(mchrift_painleve_eval(sol, 0.0, &mut v, &mut vp, &mut tail), MchriftStatus::Ok);
            assert!(v > 0.0 && tail > 0.0);
            mchrift_painleve_free(sol);
            assert_eq!(mchrift_painleve_new(1.5, -4.0, 6.0, &mut sol), MchriftStatus::InvalidInput);
            assert_eq!(mchrift_painleve_eval(ptr::null(), 0.0, &mut v, &mut vp, &mut tail), MchriftStatus::NullPointer);
            let bad = CString::new("square(1,2)").unwrap();
            let mut scat = ptr::null_mut();
            assert_eq!(mchrift_scattering_new(bad.as_ptr(), 20.0, 256, 8.0, 51, &mut scat), MchriftStatus::InvalidInput);
            assert!(scat.is_null());
            assert!(message().contains("square"));
        }
    }
}
