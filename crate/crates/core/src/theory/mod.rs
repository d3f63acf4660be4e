//! Analytical bit error probability of RIS-SSK and RIS-SM under greedy and
//! ML detection.
//!
//! Greedy RIS-SSK pairwise errors come from Gil-Pelaez inversion of a
//! product of chi-square characteristic functions, greedy RIS-SM index
//! errors from the same inversion applied to a Gaussian quadratic form, and
//! all ML pairwise errors from MGF integrals over a finite angle. Union
//! bounds assemble the bit error probabilities.

pub mod chi_square;
pub mod gil_pelaez;
pub mod greedy;
pub mod ml;
pub mod quadform;

use serde::{Deserialize, Serialize};

pub use chi_square::{cf_chi_square, ChiSquareSpec};
pub use gil_pelaez::{gil_pelaez_cdf, gil_pelaez_prob_negative};
pub use greedy::{
    bep_sm_greedy_point, bep_ssk_greedy_point, mgf_snr, pep_sm_index_greedy, pep_ssk_greedy, sep_conditioned,
};
pub use ml::{bep_ml_ssk_point, mgf_gamma_ml, pep_ml, GammaMgf, SmUnionBound};
pub use quadform::{mgf_quadratic_form, QuadFormSpec};

use crate::error::{Error, Result};
use crate::modulation::Constellation;
use crate::system::{Detector, Scheme};

/// Exact (Gil-Pelaez) or closed-form upper bound PEP for greedy RIS-SSK.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    #[default]
    Exact,
    UpperBound,
}

/// Whether a curve is an exact expression (within the Gaussian
/// approximation) or an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Exact,
    Bound,
}

impl CurveKind {
    /// Value of the CSV `source` column.
    pub fn source(self) -> &'static str {
        match self {
            CurveKind::Exact => "theory-exact",
            CurveKind::Bound => "theory-bound",
        }
    }
}

/// Below this reflector count the Gaussian approximation is unreliable.
pub const CLT_WARN_BELOW: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryRequest {
    pub scheme: Scheme,
    pub detector: Detector,
    pub n_ref: usize,
    pub n_rx: usize,
    /// Required for SM, ignored for SSK.
    pub constellation: Option<Constellation>,
    pub snr_grid_db: Vec<f64>,
    pub mode: BoundMode,
}

impl TheoryRequest {
    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::config("SNR grid is empty"));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::config("SNR grid values must be finite"));
        }
        if self.n_ref == 0 {
            return Err(Error::config("reflector count must be at least 1"));
        }
        if self.n_rx < 2 || !self.n_rx.is_power_of_two() {
            return Err(Error::config(format!(
                "receive antenna count must be a power of two >= 2, got {}",
                self.n_rx
            )));
        }
        if self.scheme == Scheme::Sm && self.constellation.is_none() {
            return Err(Error::config("SM needs a constellation"));
        }
        Ok(())
    }

    /// Exact vs bound classification of the resulting curve.
    pub fn curve_kind(&self) -> CurveKind {
        let single_pair = self.n_rx == 2;
        match (self.scheme, self.detector) {
            (Scheme::Ssk, Detector::Greedy) if self.mode == BoundMode::Exact && single_pair => CurveKind::Exact,
            (Scheme::Ssk, Detector::Greedy) => CurveKind::Bound,
            (Scheme::Sm, Detector::Greedy) if single_pair => CurveKind::Exact,
            (Scheme::Sm, Detector::Greedy) => CurveKind::Bound,
            (Scheme::Ssk, Detector::Ml) if single_pair => CurveKind::Exact,
            (_, Detector::Ml) => CurveKind::Bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPoint {
    pub snr_db: f64,
    pub bep: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryCurve {
    pub request: TheoryRequest,
    pub kind: CurveKind,
    pub points: Vec<TheoryPoint>,
    pub warnings: Vec<String>,
}

fn es_n0(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

fn sweep<F: FnMut(f64) -> Result<f64>>(req: &TheoryRequest, mut f: F) -> Result<TheoryCurve> {
    req.validate()?;
    let mut points = Vec::with_capacity(req.snr_grid_db.len());
    for &snr_db in &req.snr_grid_db {
        let bep = f(es_n0(snr_db)).map_err(|e| match e {
            Error::Numeric { what, estimate } => Error::Numeric {
                what: format!("at {snr_db} dB: {what}"),
                estimate,
            },
            Error::Pole(msg) => Error::Pole(format!("at {snr_db} dB: {msg}")),
            other => other,
        })?;
        points.push(TheoryPoint { snr_db, bep });
    }
    let mut warnings = Vec::new();
    if req.n_ref < CLT_WARN_BELOW {
        warnings.push(format!(
            "N = {} is below {CLT_WARN_BELOW}; the Gaussian approximation may be inaccurate",
            req.n_ref
        ));
    }
    Ok(TheoryCurve {
        request: req.clone(),
        kind: req.curve_kind(),
        points,
        warnings,
    })
}

fn expect(req: &TheoryRequest, scheme: Scheme, detector: Detector) -> Result<()> {
    if req.scheme != scheme || req.detector != detector {
        return Err(Error::config(format!(
            "request is {}-{}, expected {scheme}-{detector}",
            req.scheme, req.detector
        )));
    }
    Ok(())
}

/// Greedy RIS-SSK: `P_b ≤ (n_R/2)·P(m → m̂)`, exact for `n_R = 2`.
pub fn bep_ssk_greedy(req: &TheoryRequest) -> Result<TheoryCurve> {
    expect(req, Scheme::Ssk, Detector::Greedy)?;
    sweep(req, |s| bep_ssk_greedy_point(req.n_ref, req.n_rx, s, req.mode))
}

/// Greedy RIS-SM approximation combining index errors and conditional
/// symbol errors.
pub fn bep_sm_greedy(req: &TheoryRequest) -> Result<TheoryCurve> {
    expect(req, Scheme::Sm, Detector::Greedy)?;
    req.validate()?;
    let c = req.constellation.as_ref().expect("validated");
    sweep(req, |s| bep_sm_greedy_point(c, req.n_ref, req.n_rx, s))
}

/// ML union bound for either scheme.
pub fn bep_ml(req: &TheoryRequest) -> Result<TheoryCurve> {
    if req.detector != Detector::Ml {
        return Err(Error::config("bep_ml needs an ML request"));
    }
    req.validate()?;
    match req.scheme {
        Scheme::Ssk => sweep(req, |s| bep_ml_ssk_point(req.n_ref, req.n_rx, s)),
        Scheme::Sm => {
            let c = req.constellation.as_ref().expect("validated");
            let bound = SmUnionBound::new(c, req.n_ref, req.n_rx)?;
            sweep(req, |s| bound.bep(s))
        }
    }
}

/// Dispatches a request to the matching analysis.
pub fn evaluate(req: &TheoryRequest) -> Result<TheoryCurve> {
    match (req.scheme, req.detector) {
        (Scheme::Ssk, Detector::Greedy) => bep_ssk_greedy(req),
        (Scheme::Sm, Detector::Greedy) => bep_sm_greedy(req),
        (_, Detector::Ml) => bep_ml(req),
    }
}
