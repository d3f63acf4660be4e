//! C ABI over `ris-im`.
//!
//! Every fallible function returns a [`RisStatus`] and writes results
//! through out-pointers. On failure the message is kept per thread and can
//! be read with [`ris_last_error_message`]. Constellations and simulation
//! plans are opaque handles created by `*_new` and released by `*_free`.
//! Enumerated inputs are plain integers checked against the `RIS_*`
//! constants, so out-of-range values are reported instead of invoking
//! undefined behaviour.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ris_im::modulation::{Constellation, ConstellationKind};
use ris_im::montecarlo::{run_point_with, run_sweep_with, BerRecord, SimPlan, StopRule};
use ris_im::theory::{evaluate, pep_ssk_greedy, BoundMode, TheoryRequest};
use ris_im::{Detector, Error, Scheme};

pub const RIS_SCHEME_SSK: u32 = 0;
pub const RIS_SCHEME_SM: u32 = 1;
pub const RIS_DETECTOR_GREEDY: u32 = 0;
pub const RIS_DETECTOR_ML: u32 = 1;
pub const RIS_MODULATION_PSK: u32 = 0;
pub const RIS_MODULATION_QAM: u32 = 1;
pub const RIS_MODE_EXACT: u32 = 0;
pub const RIS_MODE_UPPER_BOUND: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numeric = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque constellation handle.
pub struct RisConstellation(Constellation);

/// Opaque simulation plan handle.
pub struct RisSimPlan(SimPlan);

/// BER estimate at one SNR point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisBerRecord {
    pub snr_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub wall_seconds: f64,
    /// Nonzero when the bit budget ran out before the error target.
    pub truncated: u8,
}

impl From<&BerRecord> for RisBerRecord {
    fn from(r: &BerRecord) -> Self {
        Self {
            snr_db: r.snr_db,
            bits_sent: r.bits_sent,
            bit_errors: r.bit_errors,
            ber: r.ber,
            ci_lo: r.ci_lo,
            ci_hi: r.ci_hi,
            wall_seconds: r.wall_seconds,
            truncated: r.truncated as u8,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: RisStatus, msg: &str) -> RisStatus {
    set_last_error(msg);
    status
}

fn from_error(e: Error) -> RisStatus {
    let status = if e.is_numeric() {
        RisStatus::Numeric
    } else {
        RisStatus::InvalidArgument
    };
    fail(status, &e.to_string())
}

fn guard<F: FnOnce() -> RisStatus>(f: F) -> RisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == RisStatus::Ok {
                set_last_error("");
            }
            s
        }
        Err(_) => fail(RisStatus::Panic, "internal panic"),
    }
}

fn scheme(v: u32) -> Result<Scheme, RisStatus> {
    match v {
        RIS_SCHEME_SSK => Ok(Scheme::Ssk),
        RIS_SCHEME_SM => Ok(Scheme::Sm),
        _ => Err(fail(RisStatus::InvalidArgument, &format!("unknown scheme {v}"))),
    }
}

fn detector(v: u32) -> Result<Detector, RisStatus> {
    match v {
        RIS_DETECTOR_GREEDY => Ok(Detector::Greedy),
        RIS_DETECTOR_ML => Ok(Detector::Ml),
        _ => Err(fail(RisStatus::InvalidArgument, &format!("unknown detector {v}"))),
    }
}

fn mode(v: u32) -> Result<BoundMode, RisStatus> {
    match v {
        RIS_MODE_EXACT => Ok(BoundMode::Exact),
        RIS_MODE_UPPER_BOUND => Ok(BoundMode::UpperBound),
        _ => Err(fail(RisStatus::InvalidArgument, &format!("unknown mode {v}"))),
    }
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! lib {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return from_error(e),
        }
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ris_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    V.as_ptr()
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ris_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ris_constellation_new(
    modulation: u32,
    order: u32,
    es: f64,
    out: *mut *mut RisConstellation,
) -> RisStatus {
    guard(|| {
        if out.is_null() {
            return fail(RisStatus::NullPointer, "out is null");
        }
        let kind = match modulation {
            RIS_MODULATION_PSK => ConstellationKind::Psk,
            RIS_MODULATION_QAM => ConstellationKind::Qam,
            _ => return fail(RisStatus::InvalidArgument, &format!("unknown modulation {modulation}")),
        };
        let c = lib!(Constellation::build(kind, order as usize, es));
        *out = Box::into_raw(Box::new(RisConstellation(c)));
        RisStatus::Ok
    })
}

/// # Safety
/// `c` must be null or a handle from [`ris_constellation_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ris_constellation_free(c: *mut RisConstellation) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle, `order` writable.
#[no_mangle]
pub unsafe extern "C" fn ris_constellation_order(c: *const RisConstellation, order: *mut u32) -> RisStatus {
    guard(|| {
        let (Some(c), false) = (c.as_ref(), order.is_null()) else {
            return fail(RisStatus::NullPointer, "null argument");
        };
        *order = c.0.order() as u32;
        RisStatus::Ok
    })
}

/// Point carrying bit label `label`.
///
/// # Safety
/// `c` must be a live handle, `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn ris_constellation_point(
    c: *const RisConstellation,
    label: u32,
    re: *mut f64,
    im: *mut f64,
) -> RisStatus {
    guard(|| {
        let Some(c) = c.as_ref() else {
            return fail(RisStatus::NullPointer, "constellation is null");
        };
        if re.is_null() || im.is_null() {
            return fail(RisStatus::NullPointer, "output is null");
        }
        if label as usize >= c.0.order() {
            return from_error(Error::Index {
                index: label as usize,
                len: c.0.order(),
            });
        }
        let p = c.0.point(label);
        *re = p.re;
        *im = p.im;
        RisStatus::Ok
    })
}

/// Creates a simulation plan. `constellation` is required for SM and must
/// be null for SSK; it is copied, so the caller keeps ownership.
///
/// # Safety
/// `grid` must point to `grid_len` readable doubles, `constellation` must
/// be null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ris_sim_plan_new(
    scheme_id: u32,
    detector_id: u32,
    n_ref: u32,
    n_rx: u32,
    constellation: *const RisConstellation,
    grid: *const f64,
    grid_len: usize,
    seed: u64,
    min_bit_errors: u64,
    max_bits: u64,
    out: *mut *mut RisSimPlan,
) -> RisStatus {
    guard(|| {
        if out.is_null() || (grid.is_null() && grid_len > 0) {
            return fail(RisStatus::NullPointer, "null argument");
        }
        let snr_grid_db = if grid_len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(grid, grid_len).to_vec()
        };
        let plan = SimPlan {
            scheme: tri!(scheme(scheme_id)),
            detector: tri!(detector(detector_id)),
            n_ref: n_ref as usize,
            n_rx: n_rx as usize,
            constellation: constellation.as_ref().map(|c| c.0.clone()),
            snr_grid_db,
            kappa: None,
            seed,
            stop: StopRule {
                min_bit_errors,
                max_bits,
            },
        };
        lib!(plan.validate());
        *out = Box::into_raw(Box::new(RisSimPlan(plan)));
        RisStatus::Ok
    })
}

/// Sets the von Mises phase-error concentration; a negative value restores
/// perfect phases.
///
/// # Safety
/// `plan` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ris_sim_plan_set_kappa(plan: *mut RisSimPlan, kappa: f64) -> RisStatus {
    guard(|| {
        let Some(p) = plan.as_mut() else {
            return fail(RisStatus::NullPointer, "plan is null");
        };
        if kappa.is_nan() {
            return fail(RisStatus::InvalidArgument, "kappa is NaN");
        }
        p.0.kappa = (kappa >= 0.0).then_some(kappa);
        RisStatus::Ok
    })
}

/// # Safety
/// `plan` must be null or a handle from [`ris_sim_plan_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ris_sim_plan_free(plan: *mut RisSimPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Simulates one SNR point with `workers` threads (0 picks the default).
///
/// # Safety
/// `plan` must be live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ris_sim_run_point(
    plan: *const RisSimPlan,
    snr_db: f64,
    workers: u32,
    out: *mut RisBerRecord,
) -> RisStatus {
    guard(|| {
        let Some(p) = plan.as_ref() else {
            return fail(RisStatus::NullPointer, "plan is null");
        };
        if out.is_null() {
            return fail(RisStatus::NullPointer, "out is null");
        }
        let r = lib!(run_point_with(&p.0, snr_db, worker_count(workers)));
        *out = RisBerRecord::from(&r);
        RisStatus::Ok
    })
}

/// Simulates the whole grid into `out[0..capacity]`; `written` receives the
/// number of records. Fails with `BufferTooSmall` before simulating when
/// the grid does not fit.
///
/// # Safety
/// `plan` must be live, `out` must hold `capacity` records, `written` writable.
#[no_mangle]
pub unsafe extern "C" fn ris_sim_run_sweep(
    plan: *const RisSimPlan,
    workers: u32,
    out: *mut RisBerRecord,
    capacity: usize,
    written: *mut usize,
) -> RisStatus {
    guard(|| {
        let Some(p) = plan.as_ref() else {
            return fail(RisStatus::NullPointer, "plan is null");
        };
        if out.is_null() || written.is_null() {
            return fail(RisStatus::NullPointer, "output is null");
        }
        let n = p.0.snr_grid_db.len();
        if capacity < n {
            *written = n;
            return fail(RisStatus::BufferTooSmall, &format!("need room for {n} records"));
        }
        let records = lib!(run_sweep_with(&p.0, worker_count(workers)));
        for (k, r) in records.iter().enumerate() {
            *out.add(k) = RisBerRecord::from(r);
        }
        *written = records.len();
        RisStatus::Ok
    })
}

fn worker_count(w: u32) -> usize {
    if w == 0 {
        ris_im::montecarlo::default_workers()
    } else {
        w as usize
    }
}

/// Analytical BEP at one SNR. `constellation` is required for SM and
/// ignored for SSK; `mode` only affects greedy SSK.
///
/// # Safety
/// `constellation` must be null or live, `bep` writable.
#[no_mangle]
pub unsafe extern "C" fn ris_theory_bep(
    scheme_id: u32,
    detector_id: u32,
    n_ref: u32,
    n_rx: u32,
    constellation: *const RisConstellation,
    snr_db: f64,
    mode_id: u32,
    bep: *mut f64,
) -> RisStatus {
    guard(|| {
        if bep.is_null() {
            return fail(RisStatus::NullPointer, "bep is null");
        }
        let req = TheoryRequest {
            scheme: tri!(scheme(scheme_id)),
            detector: tri!(detector(detector_id)),
            n_ref: n_ref as usize,
            n_rx: n_rx as usize,
            constellation: constellation.as_ref().map(|c| c.0.clone()),
            snr_grid_db: vec![snr_db],
            mode: tri!(mode(mode_id)),
        };
        let curve = lib!(evaluate(&req));
        *bep = curve.points[0].bep;
        RisStatus::Ok
    })
}

/// Greedy RIS-SSK pairwise error probability at `es_n0` (linear).
///
/// # Safety
/// `pep` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ris_pep_ssk_greedy(n_ref: u32, es_n0: f64, mode_id: u32, pep: *mut f64) -> RisStatus {
    guard(|| {
        if pep.is_null() {
            return fail(RisStatus::NullPointer, "pep is null");
        }
        *pep = lib!(pep_ssk_greedy(n_ref as usize, es_n0, tri!(mode(mode_id))));
        RisStatus::Ok
    })
}
