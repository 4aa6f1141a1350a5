//! C ABI over `mwc`.
//!
//! Graphs are opaque `MwcGraph` handles created by one of the
//! `mwc_graph_*` constructors and released with [`mwc_graph_free`]. Every
//! fallible call returns an [`MwcStatus`]; on failure the message is
//! available from [`mwc_last_error`] until the next call on the same thread.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with [`mwc_string_free`].
//!
//! Rationals are returned as numerator/denominator pairs; a zero
//! denominator means infinity.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mwc::expansion::{expansion_exact, kway_expansion_exact, Caps};
use mwc::families::FamilySpec;
use mwc::partitioner::{recursive_partition, CutOracleMode};
use mwc::spectral::spectrum;
use mwc::verifier::{self, trace_json, Subject, VerifyConfig};
use mwc::{Error, Graph, Ratio};

/// Opaque graph handle.
pub struct MwcGraph {
    graph: Graph,
}

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MwcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    CapExceeded = 4,
    SolverFailure = 5,
    Unsplittable = 6,
    BufferTooSmall = 7,
    Io = 8,
    /// A must-pass verification check failed; the reports are still returned.
    CheckFailed = 9,
    Panic = 10,
}

/// Cut oracle for [`mwc_partition`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MwcMode {
    Exact = 0,
    Sweep = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> MwcStatus {
    match e {
        Error::Parse { .. } => MwcStatus::Parse,
        Error::CapExceeded { .. } => MwcStatus::CapExceeded,
        Error::SolverFailure { .. } => MwcStatus::SolverFailure,
        Error::Unsplittable(_) => MwcStatus::Unsplittable,
        Error::Io(_) => MwcStatus::Io,
        _ => MwcStatus::InvalidArgument,
    }
}

/// Clears the error slot, runs `f` and records any error or panic.
fn guard(f: impl FnOnce() -> Result<MwcStatus, (MwcStatus, String)>) -> MwcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MwcStatus::Panic
        }
    }
}

fn lib(e: Error) -> (MwcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MwcStatus, String) {
    (MwcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const MwcGraph) -> Result<&'a Graph, (MwcStatus, String)> {
    g.as_ref().map(|h| &h.graph).ok_or_else(|| null("graph"))
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, (MwcStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (MwcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put_graph(out: *mut *mut MwcGraph, graph: Graph) -> Result<MwcStatus, (MwcStatus, String)> {
    *out = Box::into_raw(Box::new(MwcGraph { graph }));
    Ok(MwcStatus::Ok)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) {
    *out = CString::new(s).expect("JSON has no nul bytes").into_raw();
}

unsafe fn put_ratio(r: Ratio, num: *mut u64, den: *mut u64) {
    let (p, q) = r.parts().unwrap_or((1, 0));
    *num = p;
    *den = q;
}

/// Last error message on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn mwc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Graph on `n` vertices from `edge_count` pairs stored flat in `edges`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (or be null when
/// `edge_count` is 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mwc_graph_new(n: usize, edges: *const u32, edge_count: usize, out: *mut *mut MwcGraph) -> MwcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let flat: &[u32] = if edge_count == 0 {
            &[]
        } else if edges.is_null() {
            return Err(null("edges"));
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let pairs = flat.chunks_exact(2).map(|p| (p[0] as usize, p[1] as usize));
        put_graph(out, Graph::new(n, pairs).map_err(lib)?)
    })
}

/// Graph from a family descriptor such as `chain(k3*8)`.
///
/// # Safety
/// `spec` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mwc_graph_from_family(spec: *const c_char, out: *mut *mut MwcGraph) -> MwcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec: FamilySpec = str_arg(spec, "spec")?.parse().map_err(lib)?;
        put_graph(out, spec.graph().map_err(lib)?)
    })
}

/// Graph from edge-list text (`n m` header, then `u v` lines).
///
/// # Safety
/// `text` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mwc_graph_from_edge_list(text: *const c_char, out: *mut *mut MwcGraph) -> MwcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put_graph(out, Graph::from_edge_list(str_arg(text, "text")?).map_err(lib)?)
    })
}

/// # Safety
/// `g` must come from a constructor here and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mwc_graph_free(g: *mut MwcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn mwc_graph_vertex_count(g: *const MwcGraph) -> usize {
    g.as_ref().map_or(0, |h| h.graph.n())
}

/// # Safety
/// `g` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn mwc_graph_edge_count(g: *const MwcGraph) -> usize {
    g.as_ref().map_or(0, |h| h.graph.edge_count())
}

/// Exact expansion constant `h(G)`.
///
/// # Safety
/// `g` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn mwc_expansion(g: *const MwcGraph, num: *mut u64, den: *mut u64) -> MwcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if num.is_null() || den.is_null() {
            return Err(null("num/den"));
        }
        put_ratio(expansion_exact(g, &Caps::default()).map_err(lib)?.value, num, den);
        Ok(MwcStatus::Ok)
    })
}

/// Exact `k`-way expansion constant `h_k(G)`.
///
/// # Safety
/// `g` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn mwc_kway_expansion(g: *const MwcGraph, k: usize, num: *mut u64, den: *mut u64) -> MwcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if num.is_null() || den.is_null() {
            return Err(null("num/den"));
        }
        put_ratio(kway_expansion_exact(g, k, &Caps::default()).map_err(lib)?.value, num, den);
        Ok(MwcStatus::Ok)
    })
}

/// Laplacian eigenvalues in ascending order into `values[0..n]`.
///
/// # Safety
/// `g` must be a live handle; `values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mwc_spectrum(g: *const MwcGraph, values: *mut f64, len: usize) -> MwcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if values.is_null() {
            return Err(null("values"));
        }
        if len < g.n() {
            return Err((MwcStatus::BufferTooSmall, format!("need {} slots, have {len}", g.n())));
        }
        let s = spectrum(g).map_err(lib)?;
        std::slice::from_raw_parts_mut(values, g.n()).copy_from_slice(s.values());
        Ok(MwcStatus::Ok)
    })
}

/// Recursive `k`-partition. Writes block labels into `labels[0..n]` and,
/// when `trace_json_out` is non-null, the division trace as JSON.
///
/// # Safety
/// `g` must be a live handle; `labels` must hold `len` values;
/// `trace_json_out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mwc_partition(
    g: *const MwcGraph,
    k: usize,
    mode: MwcMode,
    labels: *mut usize,
    len: usize,
    trace_json_out: *mut *mut c_char,
) -> MwcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        if len < g.n() {
            return Err((MwcStatus::BufferTooSmall, format!("need {} slots, have {len}", g.n())));
        }
        let oracle = match mode {
            MwcMode::Exact => CutOracleMode::Exact(Caps::default()),
            MwcMode::Sweep => CutOracleMode::Sweep,
        };
        let (p, trace) = recursive_partition(g, k, oracle).map_err(lib)?;
        std::slice::from_raw_parts_mut(labels, g.n()).copy_from_slice(&p.labels());
        if !trace_json_out.is_null() {
            put_string(trace_json_out, trace_json(&trace).to_string());
        }
        Ok(MwcStatus::Ok)
    })
}

/// Runs a verification suite. `corpus` is a `;`-separated list of family
/// descriptors, or null for the built-in corpus. Reports are written as
/// JSON lines to `reports_out`; `CheckFailed` signals a must-pass failure.
///
/// # Safety
/// `suite` must be a nul-terminated string, `corpus` null or one, and
/// `reports_out` writable.
#[no_mangle]
pub unsafe extern "C" fn mwc_verify(suite: *const c_char, corpus: *const c_char, reports_out: *mut *mut c_char) -> MwcStatus {
    guard(|| {
        let suite = str_arg(suite, "suite")?;
        if reports_out.is_null() {
            return Err(null("reports_out"));
        }
        let (subjects, custom) = if corpus.is_null() {
            (verifier::default_subjects().map_err(lib)?, false)
        } else {
            let list = str_arg(corpus, "corpus")?;
            let subjects = list
                .split(';')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<FamilySpec>().and_then(|s| Subject::from_spec(&s)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(lib)?;
            (subjects, true)
        };
        let reports = verifier::run_suite(suite, &subjects, &VerifyConfig::default(), custom).map_err(lib)?;
        let failed = reports.iter().filter(|r| r.is_failure()).count();
        put_string(reports_out, reports.iter().map(|r| r.to_json_line() + "\n").collect());
        if failed > 0 {
            set_error(&format!("{failed} must-pass checks failed"));
            return Ok(MwcStatus::CheckFailed);
        }
        Ok(MwcStatus::Ok)
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mwc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
