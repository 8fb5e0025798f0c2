//! C interface to `corrconv`.
//!
//! Codes and spectra are opaque handles created by `cc_*_new` and released
//! with the matching `cc_*_free`. Every fallible function returns a
//! [`CcStatus`]; outputs are written through caller-provided pointers and
//! buffers, and nothing is written on failure. Panics never cross the
//! boundary.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use corrconv::code::{is_catastrophic, CodeSpec, Trellis};
use corrconv::decode::{sova, ProbSequence};
use corrconv::joint::{decode_joint_llr, JointConfig};
use corrconv::pep::{averaged_pep, packet_error_bound, PepParams};
use corrconv::spectrum::spectrum_with_offset;
use corrconv::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidCode = 3,
    Catastrophic = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

impl From<&Error> for CcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidPolynomial(_) | Error::InvalidCode(_) => CcStatus::InvalidCode,
            Error::Catastrophic(_) => CcStatus::Catastrophic,
            Error::InvalidParameter(_) | Error::Config(_) => CcStatus::InvalidArgument,
            _ => CcStatus::Internal,
        }
    }
}

/// Opaque rate-1/2 code with its trellis.
pub struct CcCode {
    spec: CodeSpec,
    trellis: Trellis,
}

/// Opaque weight spectrum, entries sorted by `(w, d)`.
pub struct CcSpectrum {
    entries: Vec<(u32, u32, u64)>,
    d_free: u32,
    d_max: u32,
}

type Res<T> = std::result::Result<T, CcStatus>;

fn guard(f: impl FnOnce() -> Res<()>) -> CcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => CcStatus::Internal,
    }
}

fn lift<T>(r: corrconv::Result<T>) -> Res<T> {
    r.map_err(|e| CcStatus::from(&e))
}

unsafe fn cstr<'a>(p: *const c_char) -> Res<&'a str> {
    if p.is_null() {
        return Err(CcStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| CcStatus::InvalidArgument)
}

unsafe fn handle<'a, T>(p: *const T) -> Res<&'a T> {
    p.as_ref().ok_or(CcStatus::NullPointer)
}

unsafe fn input<'a, T>(p: *const T, len: usize) -> Res<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(CcStatus::NullPointer);
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, needed: usize) -> Res<&'a mut [T]> {
    if needed > len {
        return Err(CcStatus::BufferTooSmall);
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(CcStatus::NullPointer);
    }
    Ok(slice::from_raw_parts_mut(p, needed))
}

unsafe fn put<T>(p: *mut T, v: T) -> Res<()> {
    if p.is_null() {
        return Err(CcStatus::NullPointer);
    }
    p.write(v);
    Ok(())
}

fn boxed_code(spec: CodeSpec) -> *mut CcCode {
    Box::into_raw(Box::new(CcCode {
        trellis: spec.trellis(),
        spec,
    }))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn cc_status_message(status: CcStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        CcStatus::Ok => b"ok\0",
        CcStatus::NullPointer => b"null pointer\0",
        CcStatus::InvalidArgument => b"invalid argument\0",
        CcStatus::InvalidCode => b"invalid code\0",
        CcStatus::Catastrophic => b"catastrophic code\0",
        CcStatus::BufferTooSmall => b"buffer too small\0",
        CcStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Creates a code from generator and feedback strings (binary with the
/// highest power first, or octal with an `o` prefix) and memory `nu`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_code_new(
    g1: *const c_char,
    g2: *const c_char,
    h: *const c_char,
    nu: u32,
    out: *mut *mut CcCode,
) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return Err(CcStatus::NullPointer);
        }
        let spec = lift(CodeSpec::parse(cstr(g1)?, cstr(g2)?, cstr(h)?, nu as usize))?;
        put(out, boxed_code(spec))
    })
}

/// Creates one of the built-in codes: `c80`, `c90`, `c95` or `nr3`.
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_code_builtin(name: *const c_char, out: *mut *mut CcCode) -> CcStatus {
    guard(|| {
        if out.is_null() {
            return Err(CcStatus::NullPointer);
        }
        let spec = match cstr(name)? {
            "c80" => CodeSpec::c80(),
            "c90" => CodeSpec::c90(),
            "c95" => CodeSpec::c95(),
            "nr3" => CodeSpec::nonrecursive_nu3(),
            _ => return Err(CcStatus::InvalidArgument),
        };
        put(out, boxed_code(spec))
    })
}

/// Releases a code. Null is ignored.
///
/// # Safety
/// `code` must come from `cc_code_new`/`cc_code_builtin` and not be used again.
#[no_mangle]
pub unsafe extern "C" fn cc_code_free(code: *mut CcCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Memory `nu` of the code, 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_code_memory(code: *const CcCode) -> u32 {
    code.as_ref().map_or(0, |c| c.spec.nu() as u32)
}

/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_code_is_recursive(code: *const CcCode) -> bool {
    code.as_ref().is_some_and(|c| c.spec.is_recursive())
}

/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_code_is_catastrophic(code: *const CcCode) -> bool {
    code.as_ref().is_some_and(|c| is_catastrophic(&c.spec))
}

/// Number of coded bits for `k` information bits.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_code_coded_len(code: *const CcCode, k: usize, terminated: bool) -> usize {
    code.as_ref().map_or(0, |c| c.trellis.coded_len(k, terminated))
}

/// Encodes `k` bits (values 0/1) into `out`, which must hold
/// `cc_code_coded_len(code, k, terminate)` bytes.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn cc_encode(
    code: *const CcCode,
    info: *const u8,
    k: usize,
    terminate: bool,
    out: *mut u8,
    out_len: usize,
) -> CcStatus {
    guard(|| {
        let c = handle(code)?;
        let info = input(info, k)?;
        if info.iter().any(|&b| b > 1) {
            return Err(CcStatus::InvalidArgument);
        }
        let n = c.trellis.coded_len(k, terminate);
        let dst = output(out, out_len, n)?;
        dst.copy_from_slice(&c.trellis.encode(info, terminate));
        Ok(())
    })
}

fn info_len(c: &CcCode, n_llr: usize, terminated: bool) -> Res<usize> {
    let tail = if terminated { c.spec.nu() } else { 0 };
    if n_llr % 2 != 0 || n_llr / 2 < tail {
        return Err(CcStatus::InvalidArgument);
    }
    Ok(n_llr / 2 - tail)
}

/// Soft-output Viterbi decoding. `llr` holds `n_llr` channel LLRs
/// (positive favours bit 0); `apriori` holds P(bit = 1) per information bit
/// or is null for a uniform prior. `hard` and `posterior` receive `k`
/// entries, where `k = n_llr / 2 - (terminated ? nu : 0)`; `posterior` may be
/// null.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn cc_sova(
    code: *const CcCode,
    llr: *const f64,
    n_llr: usize,
    apriori: *const f64,
    terminated: bool,
    hard: *mut u8,
    posterior: *mut f64,
    k: usize,
) -> CcStatus {
    guard(|| {
        let c = handle(code)?;
        let llr = input(llr, n_llr)?;
        let need = info_len(c, n_llr, terminated)?;
        let hard = output(hard, k, need)?;
        let prior = if apriori.is_null() {
            ProbSequence::uniform(need)
        } else {
            ProbSequence::new(input(apriori, need)?.to_vec())
        };
        let r = lift(sova(&c.trellis, llr, &prior, terminated))?;
        hard.copy_from_slice(&r.hard);
        if !posterior.is_null() {
            output(posterior, k, need)?.copy_from_slice(r.posterior.as_slice());
        }
        Ok(())
    })
}

/// Iterative joint decoding of two streams sharing `code`. `iterations` of
/// 0 selects the default (5). `iterations_run` may be null.
///
/// # Safety
/// Pointers must be valid for the given lengths.
#[no_mangle]
pub unsafe extern "C" fn cc_joint_decode(
    code: *const CcCode,
    llr_x: *const f64,
    llr_y: *const f64,
    n_llr: usize,
    rho: f64,
    iterations: u32,
    terminated: bool,
    x_hat: *mut u8,
    y_hat: *mut u8,
    k: usize,
    iterations_run: *mut u32,
) -> CcStatus {
    guard(|| {
        let c = handle(code)?;
        let lx = input(llr_x, n_llr)?;
        let ly = input(llr_y, n_llr)?;
        let need = info_len(c, n_llr, terminated)?;
        let xo = output(x_hat, k, need)?;
        let yo = output(y_hat, k, need)?;
        let mut cfg = JointConfig::new(rho);
        cfg.terminated = terminated;
        if iterations > 0 {
            cfg.iterations = iterations as usize;
        }
        let r = lift(decode_joint_llr(&c.trellis, lx, ly, &cfg))?;
        xo.copy_from_slice(&r.x_hat);
        yo.copy_from_slice(&r.y_hat);
        if !iterations_run.is_null() {
            iterations_run.write(r.iterations_run as u32);
        }
        Ok(())
    })
}

/// Pairwise error probability averaged over side-information patterns.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_averaged_pep(
    d_z: u32,
    d_x: u32,
    r: f64,
    rho: f64,
    gamma_b: f64,
    out: *mut f64,
) -> CcStatus {
    guard(|| {
        let p = lift(PepParams::new(r, rho, gamma_b))?;
        put(out, lift(averaged_pep(d_z, d_x, &p))?)
    })
}

/// Packet error union bound of a rate-1/2 code at `gamma_b_db`, using the
/// spectrum up to `d_free + d_max_offset`.
///
/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_packet_bound(
    code: *const CcCode,
    rho: f64,
    gamma_b_db: f64,
    l_pkt: usize,
    d_max_offset: u32,
    out: *mut f64,
) -> CcStatus {
    guard(|| {
        let c = handle(code)?;
        let s = lift(spectrum_with_offset(&c.trellis, d_max_offset))?;
        let p = lift(PepParams::half_rate_db(rho, gamma_b_db))?;
        put(out, packet_error_bound(&s, &p, l_pkt).value)
    })
}

/// Enumerates the weight spectrum up to `d_free + d_max_offset`.
///
/// # Safety
/// `code` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_new(
    code: *const CcCode,
    d_max_offset: u32,
    out: *mut *mut CcSpectrum,
) -> CcStatus {
    guard(|| {
        let c = handle(code)?;
        if out.is_null() {
            return Err(CcStatus::NullPointer);
        }
        let s = lift(spectrum_with_offset(&c.trellis, d_max_offset))?;
        let sp = CcSpectrum {
            entries: s.iter().collect(),
            d_free: s.d_free(),
            d_max: s.d_max(),
        };
        put(out, Box::into_raw(Box::new(sp)))
    })
}

/// # Safety
/// `s` must come from `cc_spectrum_new` and not be used again. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_free(s: *mut CcSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of nonzero `(w, d)` entries.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_len(s: *const CcSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.entries.len())
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_d_free(s: *const CcSpectrum) -> u32 {
    s.as_ref().map_or(0, |s| s.d_free)
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_d_max(s: *const CcSpectrum) -> u32 {
    s.as_ref().map_or(0, |s| s.d_max)
}

/// Entry `index` in `(w, d)` order.
///
/// # Safety
/// `s` must be a live handle; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_get(
    s: *const CcSpectrum,
    index: usize,
    w: *mut u32,
    d: *mut u32,
    count: *mut u64,
) -> CcStatus {
    guard(|| {
        let s = handle(s)?;
        if w.is_null() || d.is_null() || count.is_null() {
            return Err(CcStatus::NullPointer);
        }
        let &(ew, ed, ec) = s.entries.get(index).ok_or(CcStatus::InvalidArgument)?;
        w.write(ew);
        d.write(ed);
        count.write(ec);
        Ok(())
    })
}
