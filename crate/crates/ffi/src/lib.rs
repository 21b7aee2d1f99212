//! C ABI over the simulated cluster and the planners.
//!
//! Every fallible call returns an [`AcStatus`]; on failure
//! [`ac_last_error`] describes the cause. Handles are opaque and must be
//! released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use arraycode::analysis::evenodd_gamma;
use arraycode::codes::{Code, CodeFamily};
use arraycode::repair::plan_low_bandwidth;
use arraycode::simnet::{Cluster, Strategy};
use arraycode::Error;

pub const AC_FAMILY_EVENODD: u32 = 0;
pub const AC_FAMILY_EXTENDED_EVENODD: u32 = 1;
pub const AC_FAMILY_RDP: u32 = 2;
pub const AC_FAMILY_XCODE: u32 = 3;
pub const AC_FAMILY_STAR: u32 = 4;

#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcStatus {
    AC_OK = 0,
    AC_NULL_POINTER = 1,
    AC_INVALID_ARGUMENT = 2,
    AC_UNRECOVERABLE = 3,
    AC_BUFFER_TOO_SMALL = 4,
    AC_VERIFY_FAILED = 5,
    AC_PANIC = 6,
}

/// Opaque cluster handle.
pub struct AcCluster {
    inner: Cluster,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> AcStatus {
    match e {
        Error::TooManyErasures { .. }
        | Error::RankDeficient(_)
        | Error::InsufficientSurvivors { .. }
        | Error::Corrupt
        | Error::ErasedSource(_) => AcStatus::AC_UNRECOVERABLE,
        _ => AcStatus::AC_INVALID_ARGUMENT,
    }
}

fn raise(e: Error) -> AcStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn guard(f: impl FnOnce() -> AcStatus) -> AcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            AcStatus::AC_PANIC
        }
    }
}

fn code_for(family: u32, p: u32, r: u32) -> Result<Code, Error> {
    let family = match family {
        AC_FAMILY_EVENODD => CodeFamily::Evenodd,
        AC_FAMILY_EXTENDED_EVENODD => CodeFamily::ExtendedEvenodd { r },
        AC_FAMILY_RDP => CodeFamily::Rdp,
        AC_FAMILY_XCODE => CodeFamily::XCode,
        AC_FAMILY_STAR => CodeFamily::Star,
        other => return Err(Error::InvalidParameters(format!("unknown family {other}"))),
    };
    Code::new(family, p)
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Encode `len` bytes of `data` (zero padded; `data` may be NULL when `len`
/// is 0) into a new cluster. `r` is read only for the extended family.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ac_cluster_new(
    family: u32,
    p: u32,
    r: u32,
    block_size: u32,
    data: *const u8,
    len: usize,
    out: *mut *mut AcCluster,
) -> AcStatus {
    guard(|| {
        if out.is_null() || (data.is_null() && len > 0) {
            return AcStatus::AC_NULL_POINTER;
        }
        let bytes: &[u8] = if len == 0 { &[] } else { std::slice::from_raw_parts(data, len) };
        let made = code_for(family, p, r).and_then(|code| Cluster::create(code, block_size as usize, bytes));
        match made {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(AcCluster { inner }));
                AcStatus::AC_OK
            }
            Err(e) => raise(e),
        }
    })
}

/// Release a cluster. NULL is ignored.
///
/// # Safety
/// `cluster` must come from [`ac_cluster_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ac_cluster_free(cluster: *mut AcCluster) {
    if !cluster.is_null() {
        drop(Box::from_raw(cluster));
    }
}

/// Number of nodes (columns), or 0 for NULL.
///
/// # Safety
/// `cluster` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ac_cluster_node_count(cluster: *const AcCluster) -> usize {
    cluster.as_ref().map_or(0, |c| c.inner.node_count())
}

/// Mark `n` nodes (1-based ids) as failed.
///
/// # Safety
/// `ids` must point to `n` readable values.
#[no_mangle]
pub unsafe extern "C" fn ac_cluster_fail(cluster: *mut AcCluster, ids: *const u32, n: usize) -> AcStatus {
    guard(|| {
        let Some(c) = cluster.as_mut() else {
            return AcStatus::AC_NULL_POINTER;
        };
        if ids.is_null() && n > 0 {
            return AcStatus::AC_NULL_POINTER;
        }
        let ids: &[u32] = if n == 0 { &[] } else { std::slice::from_raw_parts(ids, n) };
        match c.inner.fail_nodes(ids) {
            Ok(()) => AcStatus::AC_OK,
            Err(e) => raise(e),
        }
    })
}

/// Rebuild failed node `target`. `naive` non-zero downloads whole columns.
/// Blocks transferred go to `blocks_out` when it is not NULL. Returns
/// `AC_VERIFY_FAILED` if the rebuilt column differs from the original.
///
/// # Safety
/// `cluster` must be a live handle; `blocks_out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ac_cluster_repair(
    cluster: *mut AcCluster,
    target: u32,
    naive: i32,
    blocks_out: *mut u64,
) -> AcStatus {
    guard(|| {
        let Some(c) = cluster.as_mut() else {
            return AcStatus::AC_NULL_POINTER;
        };
        let strategy = if naive != 0 { Strategy::Naive } else { Strategy::Planned };
        match c.inner.run_repair(target, strategy) {
            Ok(outcome) => {
                if let Some(b) = blocks_out.as_mut() {
                    *b = outcome.report.gamma_blocks;
                }
                if outcome.report.verified {
                    AcStatus::AC_OK
                } else {
                    set_error(format!("node {target} rebuilt incorrectly"));
                    AcStatus::AC_VERIFY_FAILED
                }
            }
            Err(e) => raise(e),
        }
    })
}

/// Copy the column of live node `id` into `buf`. `written` receives the
/// column size in bytes, also when `cap` is too small.
///
/// # Safety
/// `buf` must have `cap` writable bytes; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_cluster_read_node(
    cluster: *const AcCluster,
    id: u32,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> AcStatus {
    guard(|| {
        let (Some(c), Some(written)) = (cluster.as_ref(), written.as_mut()) else {
            return AcStatus::AC_NULL_POINTER;
        };
        let node = match c.inner.node(id) {
            Ok(n) => n,
            Err(e) => return raise(e),
        };
        let Some(column) = node.column() else {
            return raise(Error::ErasedSource(id));
        };
        let size = column.len() * c.inner.block_size();
        *written = size;
        if cap < size {
            set_error(format!("column needs {size} bytes, buffer has {cap}"));
            return AcStatus::AC_BUFFER_TOO_SMALL;
        }
        if buf.is_null() {
            return AcStatus::AC_NULL_POINTER;
        }
        let out = std::slice::from_raw_parts_mut(buf, size);
        for (chunk, block) in out.chunks_mut(c.inner.block_size()).zip(column) {
            chunk.copy_from_slice(block.as_bytes());
        }
        AcStatus::AC_OK
    })
}

/// EVENODD single-erasure bandwidth for `x` horizontal groups, or 0 when
/// `p` is not an odd prime or `x >= p`.
#[no_mangle]
pub extern "C" fn ac_evenodd_gamma(p: u32, x: u32) -> u64 {
    if !arraycode::grid::is_prime(p) || p < 3 || x >= p {
        return 0;
    }
    evenodd_gamma(p, x)
}

/// Repair plan for failed columns `fail[0..n]` (rebuilding `fail[0]`) as a
/// JSON string. Free it with [`ac_string_free`].
///
/// # Safety
/// `fail` must point to `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ac_plan_json(
    family: u32,
    p: u32,
    r: u32,
    fail: *const u32,
    n: usize,
    out: *mut *mut c_char,
) -> AcStatus {
    guard(|| {
        if fail.is_null() || out.is_null() {
            return AcStatus::AC_NULL_POINTER;
        }
        if n == 0 {
            set_error("no failed columns given");
            return AcStatus::AC_INVALID_ARGUMENT;
        }
        let cols = std::slice::from_raw_parts(fail, n).to_vec();
        let plan = code_for(family, p, r).and_then(|code| {
            for &c in &cols {
                code.check_column(c)?;
            }
            plan_low_bandwidth(&code, cols[0], &cols)
                .unwrap_or_else(|| Err(Error::InvalidParameters(format!("no planner for columns {cols:?}"))))
        });
        match plan {
            Ok(plan) => {
                *out = CString::new(plan.to_json()).expect("JSON has no nul").into_raw();
                AcStatus::AC_OK
            }
            Err(e) => raise(e),
        }
    })
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ac_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Borrow a C string as UTF-8, for tests and Rust callers.
///
/// # Safety
/// `s` must be NULL or a valid nul-terminated string.
pub unsafe fn c_str<'a>(s: *const c_char) -> Option<&'a str> {
    if s.is_null() {
        None
    } else {
        CStr::from_ptr(s).to_str().ok()
    }
}
