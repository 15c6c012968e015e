//! C interface to `bvkr`.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `_free` function. Every call returns a
//! [`BvkrStatus`]; on failure [`bvkr_last_error`] describes the cause.
//! Strings handed out by the library are released with
//! [`bvkr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use bvkr::bratteli::{
    builtin_diagram, vershik_successor, FinitePath, OrderedBratteliDiagram, Successor,
};
use bvkr::decisive::Verdict;
use bvkr::io::load_system;
use bvkr::pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
use bvkr::{is_complete_section, ClopenSet, EdgeShift, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvkrStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    StageFailed = 4,
    OutOfRange = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvkrVerdict {
    Holds = 0,
    Fails = 1,
    Unknown = 2,
}

pub struct BvkrSystem {
    shift: Arc<EdgeShift>,
}

pub struct BvkrPipeline {
    out: PipelineOutput,
}

pub struct BvkrDiagram {
    diagram: OrderedBratteliDiagram,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(BvkrStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(BvkrStatus::InvalidInput, e.to_string())
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> BvkrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BvkrStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BvkrStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BvkrStatus::NullArgument, format!("{what} is null"))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(BvkrStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` is null or valid for reads.
unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `p` is null or valid for writes.
unsafe fn put<T>(p: *mut T, value: T, what: &str) -> FfiResult {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn into_c(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(BvkrStatus::InvalidInput, "string holds a NUL byte".into()))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bvkr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bvkr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a bundled system (`full-2`, `golden-mean`, ...) or a system file.
///
/// # Safety
/// `source` is a NUL-terminated string and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_system_load(
    source: *const c_char,
    out: *mut *mut BvkrSystem,
) -> BvkrStatus {
    guard(|| {
        let shift = load_system(text(source, "source")?)?;
        put(out, Box::into_raw(Box::new(BvkrSystem { shift })), "out")
    })
}

/// # Safety
/// `sys` is null or a handle from [`bvkr_system_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bvkr_system_free(sys: *mut BvkrSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Decides whether a clopen set such as `"00@-1|101@-1"` is a complete
/// section. `forward_bound` receives the number of forward images covering
/// the space, or 0 when the set is not complete.
///
/// # Safety
/// Handles and strings are valid; the outputs are valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_section_is_complete(
    sys: *const BvkrSystem,
    set: *const c_char,
    complete: *mut bool,
    forward_bound: *mut usize,
) -> BvkrStatus {
    guard(|| {
        let sys = get(sys, "sys")?;
        let u = ClopenSet::parse(&sys.shift, text(set, "set")?)?;
        let rep = is_complete_section(&u);
        put(complete, rep.complete, "complete")?;
        put(
            forward_bound,
            rep.forward_bound.unwrap_or(0),
            "forward_bound",
        )
    })
}

/// Runs every stage to `depth`. A zero `shift_bound` or `window` selects
/// the level-dependent default.
///
/// # Safety
/// `sys` is a valid handle and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_pipeline_run(
    sys: *const BvkrSystem,
    depth: usize,
    shift_bound: usize,
    window: usize,
    out: *mut *mut BvkrPipeline,
) -> BvkrStatus {
    guard(|| {
        let sys = get(sys, "sys")?;
        let cfg = PipelineConfig {
            depth,
            shift_bound: (shift_bound > 0).then_some(shift_bound),
            window: (window > 0).then_some(window),
        };
        cfg.validate()?;
        let res = run_pipeline(&sys.shift, &cfg)
            .map_err(|e| Fail(BvkrStatus::StageFailed, e.to_string()))?;
        put(
            out,
            Box::into_raw(Box::new(BvkrPipeline { out: res })),
            "out",
        )
    })
}

/// # Safety
/// `p` is null or a handle from [`bvkr_pipeline_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bvkr_pipeline_free(p: *mut BvkrPipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of property verdicts the pipeline produced.
///
/// # Safety
/// `p` is a valid handle and `count` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_pipeline_verdict_count(
    p: *const BvkrPipeline,
    count: *mut usize,
) -> BvkrStatus {
    guard(|| put(count, get(p, "pipeline")?.out.verdicts.len(), "count"))
}

/// Verdict `index` with its property name.
///
/// # Safety
/// `p` is a valid handle; `verdict` and `property` are valid for writes.
/// The name is released with [`bvkr_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bvkr_pipeline_verdict(
    p: *const BvkrPipeline,
    index: usize,
    verdict: *mut BvkrVerdict,
    property: *mut *mut c_char,
) -> BvkrStatus {
    guard(|| {
        let v = get(p, "pipeline")?
            .out
            .verdicts
            .get(index)
            .ok_or_else(|| Fail(BvkrStatus::OutOfRange, format!("no verdict {index}")))?;
        if property.is_null() {
            return Err(null("property"));
        }
        let code = match v.verdict {
            Verdict::Holds => BvkrVerdict::Holds,
            Verdict::Fails => BvkrVerdict::Fails,
            Verdict::Unknown => BvkrVerdict::Unknown,
        };
        put(verdict, code, "verdict")?;
        put(property, into_c(v.property.clone())?, "property")
    })
}

/// Contents of one artifact (`kr.json`, `diagram.dot`, ...).
///
/// # Safety
/// `p` is a valid handle, `name` a NUL-terminated string and `contents`
/// valid for writes. The result is released with [`bvkr_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bvkr_pipeline_artifact(
    p: *const BvkrPipeline,
    name: *const c_char,
    contents: *mut *mut c_char,
) -> BvkrStatus {
    guard(|| {
        let p = get(p, "pipeline")?;
        let name = text(name, "name")?;
        let (_, body) = p
            .out
            .artifacts()?
            .into_iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Fail(BvkrStatus::OutOfRange, format!("no artifact {name}")))?;
        if contents.is_null() {
            return Err(null("contents"));
        }
        put(contents, into_c(body)?, "contents")
    })
}

/// A copy of the pipeline's diagram.
///
/// # Safety
/// `p` is a valid handle and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_pipeline_diagram(
    p: *const BvkrPipeline,
    out: *mut *mut BvkrDiagram,
) -> BvkrStatus {
    guard(|| {
        let diagram = get(p, "pipeline")?.out.diagram.clone();
        put(out, Box::into_raw(Box::new(BvkrDiagram { diagram })), "out")
    })
}

/// A bundled diagram (`odometer`, `fibonacci`, ...) to the given depth.
///
/// # Safety
/// `name` is a NUL-terminated string and `out` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_diagram_builtin(
    name: *const c_char,
    depth: usize,
    out: *mut *mut BvkrDiagram,
) -> BvkrStatus {
    guard(|| {
        if depth == 0 {
            return Err(Fail(
                BvkrStatus::InvalidInput,
                "depth must be positive".into(),
            ));
        }
        let diagram = builtin_diagram(text(name, "name")?, depth)?;
        put(out, Box::into_raw(Box::new(BvkrDiagram { diagram })), "out")
    })
}

/// # Safety
/// `d` is null or a diagram handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bvkr_diagram_free(d: *mut BvkrDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` is a valid handle and `depth` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_diagram_depth(
    d: *const BvkrDiagram,
    depth: *mut usize,
) -> BvkrStatus {
    guard(|| put(depth, get(d, "diagram")?.diagram.depth(), "depth"))
}

/// # Safety
/// `d` is a valid handle and `count` is valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_diagram_vertex_count(
    d: *const BvkrDiagram,
    level: usize,
    count: *mut usize,
) -> BvkrStatus {
    guard(|| {
        let d = &get(d, "diagram")?.diagram;
        if level > d.depth() {
            return Err(Fail(BvkrStatus::OutOfRange, format!("no level {level}")));
        }
        put(count, d.vertices(level).len(), "count")
    })
}

/// Vershik successor of a path given as `len` edge indices. On success
/// `next` holds the successor and `maximal` is false; when the path is
/// maximal at this depth `maximal` is true and `next` is left untouched.
///
/// # Safety
/// `edges` and `next` are valid for `len` elements; `maximal` is valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn bvkr_diagram_successor(
    d: *const BvkrDiagram,
    edges: *const usize,
    len: usize,
    next: *mut usize,
    maximal: *mut bool,
) -> BvkrStatus {
    guard(|| {
        let d = &get(d, "diagram")?.diagram;
        if len > 0 && (edges.is_null() || next.is_null()) {
            return Err(null("edges"));
        }
        let path = FinitePath {
            edges: if len == 0 {
                Vec::new()
            } else {
                std::slice::from_raw_parts(edges, len).to_vec()
            },
        };
        match vershik_successor(d, &path)? {
            Successor::Next(q) => {
                if len > 0 {
                    ptr::copy_nonoverlapping(q.edges.as_ptr(), next, len);
                }
                put(maximal, false, "maximal")
            }
            Successor::MaximalAtDepth => put(maximal, true, "maximal"),
        }
    })
}
