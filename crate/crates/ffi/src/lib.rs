//! C ABI over the `grinblat` crate.
//!
//! Instances and matchings are opaque heap handles owned by the caller and
//! released with their `_free` function. Every fallible call returns a
//! [`GrinblatStatus`]; on failure a message is kept per thread and can be
//! read with [`grinblat_last_error`]. Panics are caught at the boundary and
//! reported as `GRINBLAT_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use grinblat::construct::{solve, ConstructOptions};
use grinblat::gen::{gen_lower_bound_family, gen_random_hypothesis};
use grinblat::io::{parse_instance, write_instance};
use grinblat::oracle::exact::{exact_solve, ExactOutcome};
use grinblat::{verify_matching, ConstructError, Element, Instance, Matching, Partition};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrinblatStatus {
    Ok = 0,
    /// The instance has no rainbow matching.
    NoMatching = 1,
    /// Null pointer or out-of-range argument.
    InvalidArgument = 2,
    Parse = 3,
    /// Kernels are below `ceil(16n/5) + c`.
    Hypothesis = 4,
    /// The node budget ran out before a verdict.
    Budget = 5,
    /// A matching failed verification.
    InvalidMatching = 6,
    Internal = 7,
}

/// Opaque instance handle.
pub struct GrinblatInstance(Instance);

/// Opaque matching handle.
pub struct GrinblatMatching(Matching);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let s = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: GrinblatStatus, msg: impl Into<String>) -> GrinblatStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> GrinblatStatus) -> GrinblatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(GrinblatStatus::Internal, msg)
        }
    }
}

fn construct_status(e: &ConstructError) -> GrinblatStatus {
    match e {
        ConstructError::NoMatching => GrinblatStatus::NoMatching,
        ConstructError::HypothesisViolation { .. } => GrinblatStatus::Hypothesis,
        ConstructError::FallbackExhausted { .. } => GrinblatStatus::Budget,
        ConstructError::InvalidSubMatching(_) => GrinblatStatus::InvalidMatching,
        ConstructError::InternalLogic { .. } => GrinblatStatus::Internal,
    }
}

/// # Safety
/// `out` must be null or valid for writes.
unsafe fn put<T>(out: *mut *mut T, value: T) -> GrinblatStatus {
    if out.is_null() {
        return fail(GrinblatStatus::InvalidArgument, "null output pointer");
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    GrinblatStatus::Ok
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn grinblat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses the text format (`grinblat 1 <n> <ground_size>` ...).
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn grinblat_instance_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut GrinblatInstance,
) -> GrinblatStatus {
    guard(|| {
        if data.is_null() && len > 0 {
            return fail(GrinblatStatus::InvalidArgument, "null data");
        }
        let bytes = if len == 0 { &[][..] } else { unsafe { std::slice::from_raw_parts(data, len) } };
        match parse_instance(bytes) {
            Ok(inst) => unsafe { put(out, GrinblatInstance(inst)) },
            Err(e) => fail(GrinblatStatus::Parse, e.to_string()),
        }
    })
}

/// Builds an instance from flat arrays. Relation `r` has `class_counts[r]`
/// classes; class sizes are read in order from `class_sizes` and elements in
/// order from `elements`.
///
/// # Safety
/// `class_counts` must hold `n` values, `class_sizes` their sum, and
/// `elements` the sum of the class sizes.
#[no_mangle]
pub unsafe extern "C" fn grinblat_instance_new(
    ground_size: usize,
    n: usize,
    class_counts: *const usize,
    class_sizes: *const usize,
    elements: *const u32,
    out: *mut *mut GrinblatInstance,
) -> GrinblatStatus {
    guard(|| {
        if n > 0 && class_counts.is_null() {
            return fail(GrinblatStatus::InvalidArgument, "null class_counts");
        }
        let counts = if n == 0 { &[][..] } else { unsafe { std::slice::from_raw_parts(class_counts, n) } };
        let total_classes: usize = counts.iter().sum();
        if total_classes > 0 && class_sizes.is_null() {
            return fail(GrinblatStatus::InvalidArgument, "null class_sizes");
        }
        let sizes = if total_classes == 0 {
            &[][..]
        } else {
            unsafe { std::slice::from_raw_parts(class_sizes, total_classes) }
        };
        let total: usize = sizes.iter().sum();
        if total > 0 && elements.is_null() {
            return fail(GrinblatStatus::InvalidArgument, "null elements");
        }
        let elems: &[Element] = if total == 0 { &[] } else { unsafe { std::slice::from_raw_parts(elements, total) } };
        let (mut si, mut ei) = (0, 0);
        let mut rels = Vec::with_capacity(n);
        for &k in counts {
            let mut classes = Vec::with_capacity(k);
            for &sz in &sizes[si..si + k] {
                classes.push(elems[ei..ei + sz].to_vec());
                ei += sz;
            }
            si += k;
            match Partition::new(classes) {
                Ok(p) => rels.push(p),
                Err(e) => return fail(GrinblatStatus::InvalidArgument, format!("relation {}: {e}", rels.len() + 1)),
            }
        }
        match Instance::new(ground_size, rels) {
            Ok(inst) => unsafe { put(out, GrinblatInstance(inst)) },
            Err(e) => fail(GrinblatStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// `n` identical relations of `n - 1` triples; `n >= 2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn grinblat_gen_lower_bound(n: usize, out: *mut *mut GrinblatInstance) -> GrinblatStatus {
    guard(|| {
        if n < 2 {
            return fail(GrinblatStatus::InvalidArgument, "n must be at least 2");
        }
        unsafe { put(out, GrinblatInstance(gen_lower_bound_family(n))) }
    })
}

/// Random instance with every kernel at least `ceil(16n/5) + c + slack`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn grinblat_gen_random(
    n: usize,
    c: u64,
    seed: u64,
    slack: usize,
    out: *mut *mut GrinblatInstance,
) -> GrinblatStatus {
    guard(|| {
        if n == 0 {
            return fail(GrinblatStatus::InvalidArgument, "n must be positive");
        }
        unsafe { put(out, GrinblatInstance(gen_random_hypothesis(n, c, seed, slack))) }
    })
}

/// # Safety
/// `inst` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grinblat_instance_free(inst: *mut GrinblatInstance) {
    if !inst.is_null() {
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Number of relations; 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn grinblat_instance_len(inst: *const GrinblatInstance) -> usize {
    unsafe { inst.as_ref() }.map_or(0, |i| i.0.len())
}

/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn grinblat_instance_ground_size(inst: *const GrinblatInstance) -> usize {
    unsafe { inst.as_ref() }.map_or(0, |i| i.0.ground_size())
}

/// Smallest kernel size; 0 for a null handle or an instance without relations.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn grinblat_instance_min_kernel(inst: *const GrinblatInstance) -> usize {
    unsafe { inst.as_ref() }.and_then(|i| i.0.min_kernel().ok()).unwrap_or(0)
}

/// Serializes to the text format. Free the result with [`grinblat_string_free`].
///
/// # Safety
/// `inst` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn grinblat_instance_write(
    inst: *const GrinblatInstance,
    out: *mut *mut c_char,
) -> GrinblatStatus {
    guard(|| {
        let Some(i) = (unsafe { inst.as_ref() }) else {
            return fail(GrinblatStatus::InvalidArgument, "null instance");
        };
        if out.is_null() {
            return fail(GrinblatStatus::InvalidArgument, "null output pointer");
        }
        let s = CString::new(write_instance(&i.0)).expect("text has no nul bytes");
        unsafe { *out = s.into_raw() };
        GrinblatStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grinblat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Constructive solver. `n_min` 0 selects the default.
///
/// # Safety
/// `inst` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn grinblat_solve(
    inst: *const GrinblatInstance,
    c: u64,
    n_min: usize,
    exact_budget: u64,
    out: *mut *mut GrinblatMatching,
) -> GrinblatStatus {
    guard(|| {
        let Some(i) = (unsafe { inst.as_ref() }) else {
            return fail(GrinblatStatus::InvalidArgument, "null instance");
        };
        let mut opts = ConstructOptions { c, exact_budget, ..Default::default() };
        if n_min > 0 {
            opts.n_min = n_min;
        }
        match solve(&i.0, &opts) {
            Ok(rep) => unsafe { put(out, GrinblatMatching(rep.matching)) },
            Err(e) => fail(construct_status(&e), e.to_string()),
        }
    })
}

/// Exact backtracking solver with a node budget.
///
/// # Safety
/// `inst` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn grinblat_exact(
    inst: *const GrinblatInstance,
    budget: u64,
    out: *mut *mut GrinblatMatching,
) -> GrinblatStatus {
    guard(|| {
        let Some(i) = (unsafe { inst.as_ref() }) else {
            return fail(GrinblatStatus::InvalidArgument, "null instance");
        };
        let r = exact_solve(&i.0, budget);
        match r.outcome {
            ExactOutcome::Matched(m) => unsafe { put(out, GrinblatMatching(m)) },
            ExactOutcome::ProvenNone => fail(GrinblatStatus::NoMatching, "no rainbow matching"),
            ExactOutcome::BudgetExhausted => {
                fail(GrinblatStatus::Budget, format!("budget exhausted after {} nodes", r.nodes))
            }
        }
    })
}

/// Checks `pairs` (`2 * n` elements, relation by relation) against `inst`.
///
/// # Safety
/// `inst` must be a live handle; `pairs` must hold `2 * n` values.
#[no_mangle]
pub unsafe extern "C" fn grinblat_verify(inst: *const GrinblatInstance, pairs: *const u32, n: usize) -> GrinblatStatus {
    guard(|| {
        let Some(i) = (unsafe { inst.as_ref() }) else {
            return fail(GrinblatStatus::InvalidArgument, "null instance");
        };
        if n > 0 && pairs.is_null() {
            return fail(GrinblatStatus::InvalidArgument, "null pairs");
        }
        let flat = if n == 0 { &[][..] } else { unsafe { std::slice::from_raw_parts(pairs, 2 * n) } };
        let m = Matching::new(flat.chunks(2).map(|p| (p[0], p[1])).collect());
        match verify_matching(&i.0, &m).violation {
            None => GrinblatStatus::Ok,
            Some(v) => fail(GrinblatStatus::InvalidMatching, v.to_string()),
        }
    })
}

/// Number of pairs; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn grinblat_matching_len(m: *const GrinblatMatching) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.len())
}

/// Copies the pairs as `a_1, b_1, a_2, b_2, ...` into `out`, which must have
/// room for `2 * grinblat_matching_len(m)` values.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn grinblat_matching_pairs(
    m: *const GrinblatMatching,
    out: *mut u32,
    cap: usize,
) -> GrinblatStatus {
    guard(|| {
        let Some(m) = (unsafe { m.as_ref() }) else {
            return fail(GrinblatStatus::InvalidArgument, "null matching");
        };
        let need = 2 * m.0.len();
        if cap < need || (need > 0 && out.is_null()) {
            return fail(GrinblatStatus::InvalidArgument, format!("buffer holds {cap} values, {need} needed"));
        }
        let dst = unsafe { std::slice::from_raw_parts_mut(out, need) };
        for (k, &(a, b)) in m.0.pairs.iter().enumerate() {
            dst[2 * k] = a;
            dst[2 * k + 1] = b;
        }
        GrinblatStatus::Ok
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn grinblat_matching_free(m: *mut GrinblatMatching) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}
