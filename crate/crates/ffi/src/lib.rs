//! C ABI over the `zslen` library.
//!
//! Conventions:
//! - every fallible function returns a [`ZslenStatus`] and writes results
//!   through out-pointers, which are left untouched on failure;
//! - groups and atom sets are opaque handles released with their `_free`
//!   function (passing NULL is a no-op);
//! - variable-length results are copied into caller buffers: the required
//!   length is always written to `*len`, and `ZSLEN_STATUS_BUFFER_TOO_SMALL`
//!   is returned when `cap` is short, so callers can query with `cap = 0`;
//! - the message of the most recent failure on the calling thread is
//!   available from [`zslen_last_error`];
//! - panics never cross the boundary and are reported as
//!   `ZSLEN_STATUS_INTERNAL`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zslen::{
    cf_regular, delta_rho_with, enumerate_atoms, local_profile, min_delta, min_delta_pair_cf, min_delta_quad_cf,
    scan_exceptional, smallest_witness, AbelianGroup, AtomSet, Engine, Error, FPMonoid, Provenance, ResourceConfig,
    ScanOptions, SupportSet,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZslenStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Malformed literal or non-UTF-8 string.
    Parse = 2,
    /// Arguments violate a mathematical precondition.
    InvalidArgument = 3,
    /// A resource budget was exhausted; the result would be incomplete.
    Budget = 4,
    /// An intermediate value left the supported integer range.
    Overflow = 5,
    /// Output buffer shorter than the required length.
    BufferTooSmall = 6,
    /// I/O or checkpoint failure.
    Io = 7,
    /// Internal error, including a caught panic.
    Internal = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZslenProvenance {
    TheoremCyclic = 0,
    TheoremElem2 = 1,
    TheoremRank2 = 2,
    TheoremC2c2c2n = 3,
    TheoremPpower = 4,
    SandwichOnly = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZslenEngine {
    E1 = 0,
    E2 = 1,
    Both = 2,
}

/// Elasticity `rho_num / rho_den`, value-gcd `d`, and `min_delta`
/// (0 when the set of distances is empty).
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZslenLocalProfile {
    pub rho_num: u64,
    pub rho_den: u64,
    pub d: u64,
    pub min_delta: u64,
}

/// Opaque finite abelian group.
pub struct ZslenGroup(AbelianGroup);

/// Opaque enumerated atom set.
pub struct ZslenAtomSet(AtomSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ZslenStatus {
    match e {
        Error::Budget { .. } => ZslenStatus::Budget,
        Error::Parse(_) => ZslenStatus::Parse,
        Error::Overflow(_) => ZslenStatus::Overflow,
        Error::Io(_) | Error::Checkpoint(_) => ZslenStatus::Io,
        Error::EngineDisagreement { .. } => ZslenStatus::Internal,
        _ => ZslenStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard<F>(f: F) -> ZslenStatus
where
    F: FnOnce() -> Result<(), ZslenStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZslenStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            ZslenStatus::Internal
        }
    }
}

fn lift<T>(r: zslen::Result<T>) -> Result<T, ZslenStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn fail(status: ZslenStatus, msg: &str) -> ZslenStatus {
    set_error(msg);
    status
}

unsafe fn nonnull<'a, T>(p: *const T, name: &str) -> Result<&'a T, ZslenStatus> {
    p.as_ref()
        .ok_or_else(|| fail(ZslenStatus::NullPointer, &format!("{name} is NULL")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, ZslenStatus> {
    p.as_mut()
        .ok_or_else(|| fail(ZslenStatus::NullPointer, &format!("{name} is NULL")))
}

unsafe fn string<'a>(p: *const c_char, name: &str) -> Result<&'a str, ZslenStatus> {
    if p.is_null() {
        return Err(fail(ZslenStatus::NullPointer, &format!("{name} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(ZslenStatus::Parse, &format!("{name} is not UTF-8")))
}

/// Copies `src` into `buf[..cap]`, always reporting the full length.
unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, cap: usize, len: *mut usize) -> Result<(), ZslenStatus> {
    *out(len, "len")? = src.len();
    if src.len() > cap {
        return Err(fail(ZslenStatus::BufferTooSmall, "output buffer too small"));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(fail(ZslenStatus::NullPointer, "buf is NULL"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

fn budget(max_atoms: u64) -> Result<ResourceConfig, ZslenStatus> {
    let mut b = lift(ResourceConfig::from_env())?;
    if max_atoms > 0 {
        b.max_atoms = max_atoms;
    }
    Ok(b)
}

/// Message of the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn zslen_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Group from cyclic factors in any order; factor 1 is dropped.
#[no_mangle]
pub unsafe extern "C" fn zslen_group_new(
    factors: *const u64,
    len: usize,
    out_group: *mut *mut ZslenGroup,
) -> ZslenStatus {
    guard(|| {
        let f: &[u64] = if len == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(nonnull(factors, "factors")?, len)
        };
        let g = lift(AbelianGroup::new(f))?;
        *out(out_group, "out_group")? = Box::into_raw(Box::new(ZslenGroup(g)));
        Ok(())
    })
}

/// Group from a literal such as `"C2xC4"`.
#[no_mangle]
pub unsafe extern "C" fn zslen_group_parse(literal: *const c_char, out_group: *mut *mut ZslenGroup) -> ZslenStatus {
    guard(|| {
        let g: AbelianGroup = lift(string(literal, "literal")?.parse())?;
        *out(out_group, "out_group")? = Box::into_raw(Box::new(ZslenGroup(g)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn zslen_group_free(group: *mut ZslenGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Invariant factors `n_1 | n_2 | ... | n_r`.
#[no_mangle]
pub unsafe extern "C" fn zslen_group_factors(
    group: *const ZslenGroup,
    buf: *mut u64,
    cap: usize,
    len: *mut usize,
) -> ZslenStatus {
    guard(|| copy_out(nonnull(group, "group")?.0.factors(), buf, cap, len))
}

unsafe fn group_scalar(group: *const ZslenGroup, value: *mut u64, f: fn(&AbelianGroup) -> u64) -> ZslenStatus {
    guard(|| {
        let g = &nonnull(group, "group")?.0;
        *out(value, "value")? = f(g);
        Ok(())
    })
}

/// `|G|`.
#[no_mangle]
pub unsafe extern "C" fn zslen_group_order(group: *const ZslenGroup, value: *mut u64) -> ZslenStatus {
    group_scalar(group, value, |g| g.order())
}

/// Number of invariant factors.
#[no_mangle]
pub unsafe extern "C" fn zslen_group_rank(group: *const ZslenGroup, value: *mut u64) -> ZslenStatus {
    group_scalar(group, value, |g| g.rank() as u64)
}

/// Largest invariant factor.
#[no_mangle]
pub unsafe extern "C" fn zslen_group_exponent(group: *const ZslenGroup, value: *mut u64) -> ZslenStatus {
    group_scalar(group, value, |g| g.exponent())
}

/// `1 + Σ (n_i - 1)`, a lower bound for the Davenport constant.
#[no_mangle]
pub unsafe extern "C" fn zslen_group_dstar(group: *const ZslenGroup, value: *mut u64) -> ZslenStatus {
    group_scalar(group, value, |g| g.dstar())
}

/// Davenport constant by atom enumeration; `max_atoms = 0` uses the default
/// budget.
#[no_mangle]
pub unsafe extern "C" fn zslen_davenport(group: *const ZslenGroup, max_atoms: u64, value: *mut u64) -> ZslenStatus {
    guard(|| {
        let g = &nonnull(group, "group")?.0;
        *out(value, "value")? = lift(zslen::davenport(g, &budget(max_atoms)?))?;
        Ok(())
    })
}

unsafe fn support(g: &AbelianGroup, text: *const c_char) -> Result<SupportSet, ZslenStatus> {
    if text.is_null() {
        Ok(SupportSet::full(g))
    } else {
        lift(SupportSet::parse(g, string(text, "support")?))
    }
}

/// Atoms over `support` (comma-separated elements, NULL for the whole
/// group), sorted by length then lexicographically.
#[no_mangle]
pub unsafe extern "C" fn zslen_atoms_enumerate(
    group: *const ZslenGroup,
    support_text: *const c_char,
    max_atoms: u64,
    out_atoms: *mut *mut ZslenAtomSet,
) -> ZslenStatus {
    guard(|| {
        let g = &nonnull(group, "group")?.0;
        let s = support(g, support_text)?;
        let set = lift(enumerate_atoms(&s, &budget(max_atoms)?))?;
        *out(out_atoms, "out_atoms")? = Box::into_raw(Box::new(ZslenAtomSet(set)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn zslen_atoms_free(atoms: *mut ZslenAtomSet) {
    if !atoms.is_null() {
        drop(Box::from_raw(atoms));
    }
}

#[no_mangle]
pub unsafe extern "C" fn zslen_atoms_count(atoms: *const ZslenAtomSet, count: *mut usize) -> ZslenStatus {
    guard(|| {
        *out(count, "count")? = nonnull(atoms, "atoms")?.0.len();
        Ok(())
    })
}

/// Largest atom length (the Davenport constant of the support).
#[no_mangle]
pub unsafe extern "C" fn zslen_atoms_davenport(atoms: *const ZslenAtomSet, value: *mut u64) -> ZslenStatus {
    guard(|| {
        *out(value, "value")? = nonnull(atoms, "atoms")?.0.davenport();
        Ok(())
    })
}

/// Number of support elements; the row length of [`zslen_atoms_get`].
#[no_mangle]
pub unsafe extern "C" fn zslen_atoms_support_len(atoms: *const ZslenAtomSet, len: *mut usize) -> ZslenStatus {
    guard(|| {
        *out(len, "len")? = nonnull(atoms, "atoms")?.0.support().len();
        Ok(())
    })
}

/// Multiplicities of atom `index`, one per support element.
#[no_mangle]
pub unsafe extern "C" fn zslen_atoms_get(
    atoms: *const ZslenAtomSet,
    index: usize,
    buf: *mut u32,
    cap: usize,
    len: *mut usize,
) -> ZslenStatus {
    guard(|| {
        let set = &nonnull(atoms, "atoms")?.0;
        let a = set
            .atoms()
            .get(index)
            .ok_or_else(|| fail(ZslenStatus::InvalidArgument, "atom index out of range"))?;
        copy_out(a.counts(), buf, cap, len)
    })
}

/// Atom `index` rendered as `g^m · h^k`, NUL-terminated; `*len` counts the
/// terminator.
#[no_mangle]
pub unsafe extern "C" fn zslen_atoms_format(
    atoms: *const ZslenAtomSet,
    index: usize,
    buf: *mut c_char,
    cap: usize,
    len: *mut usize,
) -> ZslenStatus {
    guard(|| {
        let set = &nonnull(atoms, "atoms")?.0;
        let a = set
            .atoms()
            .get(index)
            .ok_or_else(|| fail(ZslenStatus::InvalidArgument, "atom index out of range"))?;
        let c = CString::new(a.format(set.support())).expect("no interior NUL");
        let bytes: Vec<c_char> = c.as_bytes_with_nul().iter().map(|&b| b as c_char).collect();
        copy_out(&bytes, buf, cap, len)
    })
}

/// `min Δ` of the zero-sum monoid over `support`; writes 0 when the set of
/// distances is empty (half-factorial).
#[no_mangle]
pub unsafe extern "C" fn zslen_min_delta(
    group: *const ZslenGroup,
    support_text: *const c_char,
    max_atoms: u64,
    value: *mut u64,
) -> ZslenStatus {
    guard(|| {
        let g = &nonnull(group, "group")?.0;
        let s = support(g, support_text)?;
        *out(value, "value")? = lift(min_delta(&s, &budget(max_atoms)?))?.unwrap_or(0);
        Ok(())
    })
}

/// `Δ_ρ*(G)` in ascending order, with the rule that produced it. Nonzero
/// `enumerate` forces enumeration of qualifying supports.
#[no_mangle]
pub unsafe extern "C" fn zslen_delta_rho_star(
    group: *const ZslenGroup,
    enumerate: i32,
    max_atoms: u64,
    buf: *mut u64,
    cap: usize,
    len: *mut usize,
    provenance: *mut ZslenProvenance,
) -> ZslenStatus {
    guard(|| {
        let g = &nonnull(group, "group")?.0;
        let r = lift(delta_rho_with(g, &budget(max_atoms)?, enumerate != 0))?;
        if let Some(p) = provenance.as_mut() {
            *p = match r.provenance {
                Provenance::TheoremCyclic => ZslenProvenance::TheoremCyclic,
                Provenance::TheoremElem2 => ZslenProvenance::TheoremElem2,
                Provenance::TheoremRank2 => ZslenProvenance::TheoremRank2,
                Provenance::TheoremC2C2C2n => ZslenProvenance::TheoremC2c2c2n,
                Provenance::TheoremPpower => ZslenProvenance::TheoremPpower,
                Provenance::SandwichOnly => ZslenProvenance::SandwichOnly,
            };
        }
        let v: Vec<u64> = r.delta_rho_star.into_iter().collect();
        copy_out(&v, buf, cap, len)
    })
}

/// Regular continued fraction of `n/a`.
#[no_mangle]
pub unsafe extern "C" fn zslen_cf_regular(n: u64, a: u64, buf: *mut u64, cap: usize, len: *mut usize) -> ZslenStatus {
    guard(|| copy_out(lift(cf_regular(n, a))?.quotients(), buf, cap, len))
}

/// `min Δ({g, ag})` in `C_n` from the continued fraction of `n/a`.
#[no_mangle]
pub unsafe extern "C" fn zslen_min_delta_pair_cf(n: u64, a: u64, value: *mut u64) -> ZslenStatus {
    guard(|| {
        *out(value, "value")? = lift(min_delta_pair_cf(n, a))?;
        Ok(())
    })
}

/// `min Δ({±g, ±ag})` in `C_n` for `2 <= a < n/2`.
#[no_mangle]
pub unsafe extern "C" fn zslen_min_delta_quad_cf(n: u64, a: u64, value: *mut u64) -> ZslenStatus {
    guard(|| {
        *out(value, "value")? = lift(min_delta_quad_cf(n, a))?;
        Ok(())
    })
}

/// Smallest `a` certifying an extra element of `Δ_ρ*(C_n)`, or 0 if none.
#[no_mangle]
pub unsafe extern "C" fn zslen_cyclic_witness(n: u64, value: *mut u64) -> ZslenStatus {
    guard(|| {
        *out(value, "value")? = smallest_witness(n).unwrap_or(0);
        Ok(())
    })
}

/// Even `n` in `[lo, hi]` with `Δ_ρ*(C_n) = {1, n-2}`.
#[no_mangle]
pub unsafe extern "C" fn zslen_scan_exceptional(
    lo: u64,
    hi: u64,
    engine: ZslenEngine,
    shards: usize,
    buf: *mut u64,
    cap: usize,
    len: *mut usize,
) -> ZslenStatus {
    guard(|| {
        let opts = ScanOptions {
            engine: match engine {
                ZslenEngine::E1 => Engine::E1,
                ZslenEngine::E2 => Engine::E2,
                ZslenEngine::Both => Engine::Both,
            },
            shards: shards.max(1),
            checkpoint: None,
            witnesses: false,
        };
        copy_out(&lift(scan_exceptional(lo, hi, &opts))?.exceptional, buf, cap, len)
    })
}

/// Profile of the monoid generated by `class:value` pairs in `Z_q x N`.
#[no_mangle]
pub unsafe extern "C" fn zslen_fp_profile(
    q: u64,
    generators: *const c_char,
    profile: *mut ZslenLocalProfile,
) -> ZslenStatus {
    guard(|| {
        let m = lift(FPMonoid::parse(q, string(generators, "generators")?))?;
        let p = lift(local_profile(&m))?;
        *out(profile, "profile")? = ZslenLocalProfile {
            rho_num: *p.rho.numer(),
            rho_den: *p.rho.denom(),
            d: p.d,
            min_delta: p.min_delta.unwrap_or(0),
        };
        Ok(())
    })
}
