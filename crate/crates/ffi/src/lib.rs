//! C ABI over `mecheval`.
//!
//! Every fallible call returns a [`MecStatus`]. On failure the message is kept
//! per thread and read with [`mec_last_error_message`]. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`mec_string_free`]; handles are released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use mecheval::card::{parse_interaction_value, CardId};
use mecheval::explanation_checker::propagate_sign;
use mecheval::harness::{score_offline, Decision, HarnessError, QueueFilter, ReviewService, RunConfig, SystemClock};
use mecheval::judgments::{Judgment, JudgmentStore, StoreError};
use mecheval::matcher::{match_interactions, EquivalenceTable};
use mecheval::model_graph::{load_model, MechModel, Sign};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MecStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    NotFound = 4,
    Conflict = 5,
    Forbidden = 6,
    Io = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(MecStatus, String);

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let status = match &e {
            HarnessError::UnknownRun(_) | HarnessError::UnknownItem(_) => MecStatus::NotFound,
            HarnessError::AlreadyClaimed(_)
            | HarnessError::AlreadyResolved(_)
            | HarnessError::DuplicateRun(_)
            | HarnessError::Store(StoreError::StaleRevision { .. }) => MecStatus::Conflict,
            HarnessError::NotClaimant(_) => MecStatus::Forbidden,
            HarnessError::Io(_) | HarnessError::Store(StoreError::Io { .. }) => MecStatus::Io,
            _ => MecStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        HarnessError::Store(e).into()
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure(MecStatus::InvalidInput, e.to_string())
}

/// Runs `f`, turning errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MecStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MecStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MecStatus::NullArgument, format!("`{name}` is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(MecStatus::InvalidUtf8, format!("`{name}` is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(MecStatus::NullArgument, format!("`{name}` is null")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(MecStatus::NullArgument, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_json(out: *mut *mut c_char, v: &impl serde::Serialize) -> Result<(), Failure> {
    let s = serde_json::to_string(v).map_err(invalid)?;
    let c = CString::new(s).map_err(invalid)?;
    put(out, c.into_raw())
}

fn json_arg<T: serde::de::DeserializeOwned>(s: &str, name: &str) -> Result<T, Failure> {
    serde_json::from_str(s).map_err(|e| Failure(MecStatus::InvalidInput, format!("`{name}`: {e}")))
}

/// Last error message on this thread, or null. Valid until the next call
/// into this library from the same thread.
#[no_mangle]
pub extern "C" fn mec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

pub struct MecEquivalenceTable(EquivalenceTable);

/// Loads an equivalence table; a null `path` gives the bundled default.
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mec_equivalence_table_load(
    path: *const c_char,
    out: *mut *mut MecEquivalenceTable,
) -> MecStatus {
    guard(|| {
        let table = match opt_str_arg(path, "path")? {
            Some(p) => EquivalenceTable::load(Path::new(p)).map_err(|e| Failure(MecStatus::Io, e.to_string()))?,
            None => EquivalenceTable::default(),
        };
        put(out, Box::into_raw(Box::new(MecEquivalenceTable(table))))
    })
}

/// # Safety
/// `table` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mec_equivalence_table_free(table: *mut MecEquivalenceTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Matches two interactions given as card JSON `interaction` objects.
/// Writes `{"class","flags","auto_flagged","swapped"}`.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn mec_match_interactions(
    table: *const MecEquivalenceTable,
    candidate_json: *const c_char,
    gold_json: *const c_char,
    out_json: *mut *mut c_char,
) -> MecStatus {
    guard(|| {
        let table = &handle(table, "table")?.0;
        let parse = |p, name| -> Result<_, Failure> {
            let v: serde_json::Value = json_arg(str_arg(p, name)?, name)?;
            parse_interaction_value(&v).map_err(invalid)
        };
        let cand = parse(candidate_json, "candidate_json")?;
        let gold = parse(gold_json, "gold_json")?;
        let (class, flags, auto_flagged, swapped) = match_interactions(&cand, &gold, table);
        put_json(
            out_json,
            &serde_json::json!({ "class": class, "flags": flags, "auto_flagged": auto_flagged, "swapped": swapped }),
        )
    })
}

pub struct MecModel(MechModel);

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mec_model_load(path: *const c_char, out: *mut *mut MecModel) -> MecStatus {
    guard(|| {
        let model = load_model(Path::new(str_arg(path, "path")?))
            .map_err(|e| Failure(MecStatus::InvalidInput, e.to_string()))?;
        put(out, Box::into_raw(Box::new(MecModel(model))))
    })
}

/// # Safety
/// `model` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mec_model_free(model: *mut MecModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Sign reaching the end of a path (JSON array of edge ids) when the
/// first node is perturbed with `perturbation` (+1 or -1).
///
/// # Safety
/// Pointers must be valid; `out_sign` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mec_propagate_sign(
    model: *const MecModel,
    path_json: *const c_char,
    perturbation: i8,
    out_sign: *mut i8,
) -> MecStatus {
    guard(|| {
        let model = &handle(model, "model")?.0;
        let path: Vec<String> = json_arg(str_arg(path_json, "path_json")?, "path_json")?;
        let p = Sign::from_i64(i64::from(perturbation)).ok_or_else(|| invalid("perturbation must be +1 or -1"))?;
        let s = propagate_sign(model, &path, p).map_err(invalid)?;
        put(out_sign, s.as_i8())
    })
}

pub struct MecJudgmentStore(JudgmentStore);

/// Opens (or creates) an append-only judgment log. `known_cards_json` is a
/// JSON array of card ids that may be judged; a null `path` keeps the log
/// in memory.
///
/// # Safety
/// Pointers must be valid or null where allowed; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mec_judgment_store_open(
    path: *const c_char,
    known_cards_json: *const c_char,
    out: *mut *mut MecJudgmentStore,
) -> MecStatus {
    guard(|| {
        let known: Vec<CardId> = json_arg(str_arg(known_cards_json, "known_cards_json")?, "known_cards_json")?;
        let store = match opt_str_arg(path, "path")? {
            Some(p) => JudgmentStore::open(Path::new(p), known)?,
            None => JudgmentStore::in_memory(known),
        };
        put(out, Box::into_raw(Box::new(MecJudgmentStore(store))))
    })
}

/// # Safety
/// `store` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mec_judgment_store_free(store: *mut MecJudgmentStore) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// Appends a judgment (JSON) if `based_on` is the subject's current
/// revision; writes the new revision.
///
/// # Safety
/// Pointers must be valid; `out_revision` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mec_judgment_store_record(
    store: *const MecJudgmentStore,
    judgment_json: *const c_char,
    based_on: u32,
    out_revision: *mut u32,
) -> MecStatus {
    guard(|| {
        let store = &handle(store, "store")?.0;
        let j: Judgment = json_arg(str_arg(judgment_json, "judgment_json")?, "judgment_json")?;
        let rev = store.record(j, based_on)?;
        put(out_revision, rev)
    })
}

/// Latest judgment per subject, as a JSON array.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn mec_judgment_store_snapshot(
    store: *const MecJudgmentStore,
    out_json: *mut *mut c_char,
) -> MecStatus {
    guard(|| {
        let store = &handle(store, "store")?.0;
        let latest: Vec<Judgment> = store.snapshot().into_values().collect();
        put_json(out_json, &latest)
    })
}

/// Scores a run configuration (JSON) without persisting anything.
/// `judgments_path` may be null.
///
/// # Safety
/// Pointers must be valid or null where allowed; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn mec_score(
    config_json: *const c_char,
    judgments_path: *const c_char,
    out_json: *mut *mut c_char,
) -> MecStatus {
    guard(|| {
        let config: RunConfig = json_arg(str_arg(config_json, "config_json")?, "config_json")?;
        let judgments = opt_str_arg(judgments_path, "judgments_path")?;
        let report = score_offline(&config, judgments.map(Path::new))?;
        put_json(out_json, &report)
    })
}

pub struct MecReviewService(Arc<ReviewService>);

/// # Safety
/// `data_root` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mec_review_service_open(
    data_root: *const c_char,
    claim_timeout_secs: u64,
    out: *mut *mut MecReviewService,
) -> MecStatus {
    guard(|| {
        let root = str_arg(data_root, "data_root")?;
        let svc = ReviewService::new(root, Arc::new(SystemClock), claim_timeout_secs);
        put(out, Box::into_raw(Box::new(MecReviewService(Arc::new(svc)))))
    })
}

/// # Safety
/// `svc` must be null or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mec_review_service_free(svc: *mut MecReviewService) {
    if !svc.is_null() {
        drop(Box::from_raw(svc));
    }
}

/// Creates a run from a configuration (JSON) and writes the run as JSON.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn mec_review_service_ingest(
    svc: *const MecReviewService,
    config_json: *const c_char,
    out_json: *mut *mut c_char,
) -> MecStatus {
    guard(|| {
        let svc = &handle(svc, "svc")?.0;
        let config: RunConfig = json_arg(str_arg(config_json, "config_json")?, "config_json")?;
        let run = mecheval::harness::ingest_run(svc.root(), &config)?;
        put_json(out_json, &run)
    })
}

/// Queue of a run. `filter_json` may be null or `{"kind","state","paper"}`.
///
/// # Safety
/// Pointers must be valid or null where allowed; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn mec_review_service_queue(
    svc: *const MecReviewService,
    run_id: *const c_char,
    filter_json: *const c_char,
    out_json: *mut *mut c_char,
) -> MecStatus {
    guard(|| {
        let svc = &handle(svc, "svc")?.0;
        let filter: QueueFilter = match opt_str_arg(filter_json, "filter_json")? {
            Some(s) => json_arg(s, "filter_json")?,
            None => QueueFilter::default(),
        };
        put_json(out_json, &svc.list_queue(str_arg(run_id, "run_id")?, &filter)?)
    })
}

/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn mec_review_service_claim(
    svc: *const MecReviewService,
    item_id: *const c_char,
    reviewer: *const c_char,
    out_json: *mut *mut c_char,
) -> MecStatus {
    guard(|| {
        let svc = &handle(svc, "svc")?.0;
        let item = svc.claim(str_arg(item_id, "item_id")?, str_arg(reviewer, "reviewer")?)?;
        put_json(out_json, &item)
    })
}

/// Resolves a claimed item with a decision (JSON). Writes
/// `{"item","judgment"}`.
///
/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn mec_review_service_resolve(
    svc: *const MecReviewService,
    item_id: *const c_char,
    reviewer: *const c_char,
    decision_json: *const c_char,
    out_json: *mut *mut c_char,
) -> MecStatus {
    guard(|| {
        let svc = &handle(svc, "svc")?.0;
        let decision: Decision = json_arg(str_arg(decision_json, "decision_json")?, "decision_json")?;
        let (item, judgment) = svc.resolve(str_arg(item_id, "item_id")?, str_arg(reviewer, "reviewer")?, &decision)?;
        put_json(out_json, &serde_json::json!({ "item": item, "judgment": judgment }))
    })
}

/// # Safety
/// Pointers must be valid; `out_json` receives a string to free.
#[no_mangle]
pub unsafe extern "C" fn mec_review_service_report(
    svc: *const MecReviewService,
    run_id: *const c_char,
    out_json: *mut *mut c_char,
) -> MecStatus {
    guard(|| {
        let svc = &handle(svc, "svc")?.0;
        put_json(out_json, &svc.report(str_arg(run_id, "run_id")?)?)
    })
}
