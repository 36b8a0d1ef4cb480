//! C interface to `rdfstar2pg`.
//!
//! Objects cross the boundary as opaque pointers that the caller releases
//! with the matching `*_free` function. Every fallible call returns an
//! [`Rdfstar2pgStatus`]; on failure, [`rdfstar2pg_last_error`] returns a
//! message for the calling thread. Strings returned through `char **` out
//! parameters are owned by the caller and released with
//! [`rdfstar2pg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rdfstar2pg::conformance::{conformance_config, run_conformance};
use rdfstar2pg::export::{export, ExportFormat};
use rdfstar2pg::pg::PropertyGraph;
use rdfstar2pg::rdf::Dataset;
use rdfstar2pg::transform::{transform, Approach, TransformConfig, TransformReport};
use rdfstar2pg::turtle::parse_turtle_star;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rdfstar2pgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    ExportError = 5,
    Panic = 6,
}

/// Parsed RDF-star dataset.
pub struct Rdfstar2pgDataset(Dataset);

/// Transformation settings.
pub struct Rdfstar2pgConfig(TransformConfig);

/// Property graph produced by a transformation.
pub struct Rdfstar2pgGraph(PropertyGraph);

/// Statement-level outcome of a transformation.
pub struct Rdfstar2pgReport(TransformReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', "\\0");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(text).expect("NUL bytes replaced")));
}

struct Failure(Rdfstar2pgStatus, String);

type Outcome = Result<(), Failure>;

fn guard(body: impl FnOnce() -> Outcome) -> Rdfstar2pgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => Rdfstar2pgStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            Rdfstar2pgStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(Rdfstar2pgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| Failure(Rdfstar2pgStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn put_string(out: *mut *mut c_char, value: String) -> Outcome {
    let c = CString::new(value)
        .map_err(|_| Failure(Rdfstar2pgStatus::ExportError, "output contains a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn invalid(message: impl ToString) -> Failure {
    Failure(Rdfstar2pgStatus::InvalidArgument, message.to_string())
}

/// Message describing the last failed call on this thread, or NULL. The
/// pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn rdfstar2pg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a NUL-terminated Turtle-star / TriG-star document.
///
/// # Safety
/// `input` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_parse(input: *const c_char, out: *mut *mut Rdfstar2pgDataset) -> Rdfstar2pgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let input = text(input, "input")?;
        let dataset = parse_turtle_star(input).map_err(|e| Failure(Rdfstar2pgStatus::ParseError, e.to_string()))?;
        put(out, Rdfstar2pgDataset(dataset));
        Ok(())
    })
}

/// Number of source statements, counting nested quoted RDF-star statements
/// and not counting collection cells. Returns 0 for NULL.
///
/// # Safety
/// `dataset` must be NULL or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_dataset_statement_count(dataset: *const Rdfstar2pgDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.0.unit_count())
}

/// # Safety
/// `dataset` must be NULL or a handle from [`rdfstar2pg_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_dataset_free(dataset: *mut Rdfstar2pgDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Creates a configuration for `approach` ("rpt", "pgt" or "hybrid") with
/// default policies.
///
/// # Safety
/// `approach` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_config_new(approach: *const c_char, out: *mut *mut Rdfstar2pgConfig) -> Rdfstar2pgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let approach: Approach = text(approach, "approach")?.parse().map_err(invalid)?;
        put(out, Rdfstar2pgConfig(TransformConfig::new(approach)));
        Ok(())
    })
}

/// Sets one policy. Keys and values match the command-line flags:
/// "datatype-policy", "rdf-type-policy", "named-graph-policy",
/// "list-policy", "multi-value-policy" and "kind-labels" ("true"/"false").
///
/// # Safety
/// `config` must be a live config handle; `key` and `value` valid C strings.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_config_set(
    config: *mut Rdfstar2pgConfig,
    key: *const c_char,
    value: *const c_char,
) -> Rdfstar2pgStatus {
    guard(|| {
        let cfg = &mut config.as_mut().ok_or_else(|| null("config"))?.0;
        let key = text(key, "key")?;
        let value = text(value, "value")?;
        match key {
            "datatype-policy" => cfg.hybrid_datatype_policy = value.parse().map_err(invalid)?,
            "rdf-type-policy" => cfg.rdf_type_policy = Some(value.parse().map_err(invalid)?),
            "named-graph-policy" => cfg.named_graph_policy = value.parse().map_err(invalid)?,
            "list-policy" => cfg.list_policy = value.parse().map_err(invalid)?,
            "multi-value-policy" => cfg.multi_value_policy = Some(value.parse().map_err(invalid)?),
            "kind-labels" => {
                cfg.edge_kind_tags = Some(match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(invalid(format!("kind-labels must be true or false, not {value:?}"))),
                })
            }
            _ => return Err(invalid(format!("unknown config key {key:?}"))),
        }
        Ok(())
    })
}

/// # Safety
/// `config` must be NULL or a handle from [`rdfstar2pg_config_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_config_free(config: *mut Rdfstar2pgConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Transforms `dataset` into a property graph. `out_report` may be NULL when
/// the report is not needed.
///
/// # Safety
/// `dataset` and `config` must be live handles; `out_graph` a valid pointer;
/// `out_report` NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_transform(
    dataset: *const Rdfstar2pgDataset,
    config: *const Rdfstar2pgConfig,
    out_graph: *mut *mut Rdfstar2pgGraph,
    out_report: *mut *mut Rdfstar2pgReport,
) -> Rdfstar2pgStatus {
    guard(|| {
        let dataset = handle(dataset, "dataset")?;
        let config = handle(config, "config")?;
        if out_graph.is_null() {
            return Err(null("out_graph"));
        }
        let (graph, report) = transform(&dataset.0, &config.0);
        put(out_graph, Rdfstar2pgGraph(graph));
        if !out_report.is_null() {
            put(out_report, Rdfstar2pgReport(report));
        }
        Ok(())
    })
}

/// # Safety
/// `graph` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_graph_node_count(graph: *const Rdfstar2pgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// # Safety
/// `graph` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_graph_edge_count(graph: *const Rdfstar2pgGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Serializes `graph` as "json", "graphml" or "cypher".
///
/// # Safety
/// `graph` must be a live graph handle, `format` a valid C string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_graph_export(
    graph: *const Rdfstar2pgGraph,
    format: *const c_char,
    out: *mut *mut c_char,
) -> Rdfstar2pgStatus {
    guard(|| {
        let graph = handle(graph, "graph")?;
        let format: ExportFormat = text(format, "format")?.parse().map_err(invalid)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = export(&graph.0, format).map_err(|e| Failure(Rdfstar2pgStatus::ExportError, e.to_string()))?;
        put_string(out, text)
    })
}

/// # Safety
/// `graph` must be NULL or a handle from [`rdfstar2pg_transform`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_graph_free(graph: *mut Rdfstar2pgGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_report_total(report: *const Rdfstar2pgReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.total_statements)
}

/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_report_converted(report: *const Rdfstar2pgReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.converted)
}

/// 1 when nothing was reported partial, ignored or in error; 0 otherwise
/// (including NULL).
///
/// # Safety
/// `report` must be NULL or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_report_is_lossless(report: *const Rdfstar2pgReport) -> i32 {
    report.as_ref().map_or(0, |r| r.0.is_lossless() as i32)
}

/// # Safety
/// `report` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_report_to_json(report: *const Rdfstar2pgReport, out: *mut *mut c_char) -> Rdfstar2pgStatus {
    guard(|| {
        let report = handle(report, "report")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put_string(out, report.0.to_json())
    })
}

/// # Safety
/// `report` must be NULL or a handle from [`rdfstar2pg_transform`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_report_free(report: *mut Rdfstar2pgReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Runs the built-in corpus for a comma-separated list of approaches and
/// returns the report as JSON. `all_passed` may be NULL.
///
/// # Safety
/// `approaches` must be a valid C string, `out` a valid pointer and
/// `all_passed` NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_conformance_json(
    approaches: *const c_char,
    out: *mut *mut c_char,
    all_passed: *mut i32,
) -> Rdfstar2pgStatus {
    guard(|| {
        let list = text(approaches, "approaches")?
            .split(',')
            .map(|a| a.trim().parse::<Approach>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(invalid)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = run_conformance(&list, &conformance_config(Approach::Hybrid));
        if !all_passed.is_null() {
            *all_passed = report.all_passed() as i32;
        }
        put_string(out, report.to_json())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rdfstar2pg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
