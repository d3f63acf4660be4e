//! Curve records shared by simulation and theory, their CSV/JSON forms,
//! provenance metadata and SNR gap reports.
//!
//! The CSV header is fixed:
//!
//! `scheme,detector,N,n_R,M,kappa,snr_db,ber,ci_lo,ci_hi,bits,errors,source`
//!
//! `M` is 1 for SSK, `kappa` is empty for perfect phases, and the
//! confidence interval and counts are empty for theory rows. Floats are
//! written in shortest round-trip form, so CSV and JSON convert into each
//! other without loss.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulation::{Constellation, ConstellationKind};
use crate::montecarlo::{BerRecord, SimPlan, StopRule};
use crate::system::{Detector, Scheme};
use crate::theory::{BoundMode, CurveKind, TheoryCurve};

pub const CSV_HEADER: &str = "scheme,detector,N,n_R,M,kappa,snr_db,ber,ci_lo,ci_hi,bits,errors,source";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "sim")]
    Sim,
    #[serde(rename = "theory-exact")]
    TheoryExact,
    #[serde(rename = "theory-bound")]
    TheoryBound,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Sim => "sim",
            Source::TheoryExact => "theory-exact",
            Source::TheoryBound => "theory-bound",
        }
    }

    pub fn is_theory(self) -> bool {
        self != Source::Sim
    }
}

impl From<CurveKind> for Source {
    fn from(k: CurveKind) -> Self {
        match k {
            CurveKind::Exact => Source::TheoryExact,
            CurveKind::Bound => Source::TheoryBound,
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// JSON cannot hold infinities; they travel as the strings `"inf"` and
/// `"-inf"`.
mod float_or_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() || !s.is_human_readable() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One line of the curve schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub scheme: Scheme,
    pub detector: Detector,
    #[serde(rename = "N")]
    pub n_ref: usize,
    #[serde(rename = "n_R")]
    pub n_rx: usize,
    #[serde(rename = "M")]
    pub order: usize,
    pub kappa: Option<f64>,
    #[serde(with = "float_or_string")]
    pub snr_db: f64,
    pub ber: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub bits: Option<u64>,
    pub errors: Option<u64>,
    pub source: Source,
}

/// Everything needed to reproduce one curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub label: String,
    pub scheme: Scheme,
    pub detector: Detector,
    #[serde(rename = "N")]
    pub n_ref: usize,
    #[serde(rename = "n_R")]
    pub n_rx: usize,
    pub constellation: Option<ConstellationMeta>,
    pub kappa: Option<f64>,
    pub source: Source,
    pub snr_grid_db: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stop: Option<StopRule>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<BoundMode>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub truncated_points_db: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstellationMeta {
    pub kind: ConstellationKind,
    pub order: usize,
    pub es: f64,
}

impl From<&Constellation> for ConstellationMeta {
    fn from(c: &Constellation) -> Self {
        Self {
            kind: c.kind(),
            order: c.order(),
            es: c.es(),
        }
    }
}

/// A labelled curve with its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub meta: CurveMeta,
    pub rows: Vec<CurveRow>,
}

fn describe(
    scheme: Scheme,
    detector: Detector,
    n_ref: usize,
    n_rx: usize,
    c: Option<&Constellation>,
    kappa: Option<f64>,
) -> String {
    let mut s = format!(
        "{} {} N={n_ref} n_R={n_rx}",
        scheme.to_string().to_uppercase(),
        detector
    );
    if let Some(c) = c {
        s.push_str(&format!(" {}-{}", c.order(), c.kind().to_string().to_uppercase()));
    }
    if let Some(k) = kappa {
        s.push_str(&format!(" kappa={k}"));
    }
    s
}

impl Curve {
    pub fn from_sim(plan: &SimPlan, records: &[BerRecord]) -> Self {
        let c = plan.constellation.as_ref();
        let order = c.map_or(1, |c| c.order());
        let rows = records
            .iter()
            .map(|r| CurveRow {
                scheme: plan.scheme,
                detector: plan.detector,
                n_ref: plan.n_ref,
                n_rx: plan.n_rx,
                order,
                kappa: plan.kappa,
                snr_db: r.snr_db,
                ber: r.ber,
                ci_lo: Some(r.ci_lo),
                ci_hi: Some(r.ci_hi),
                bits: Some(r.bits_sent),
                errors: Some(r.bit_errors),
                source: Source::Sim,
            })
            .collect();
        Self {
            meta: CurveMeta {
                label: format!(
                    "{} sim",
                    describe(plan.scheme, plan.detector, plan.n_ref, plan.n_rx, c, plan.kappa)
                ),
                scheme: plan.scheme,
                detector: plan.detector,
                n_ref: plan.n_ref,
                n_rx: plan.n_rx,
                constellation: c.map(ConstellationMeta::from),
                kappa: plan.kappa,
                source: Source::Sim,
                snr_grid_db: plan.snr_grid_db.clone(),
                seed: Some(plan.seed),
                stop: Some(plan.stop),
                mode: None,
                truncated_points_db: records.iter().filter(|r| r.truncated).map(|r| r.snr_db).collect(),
                warnings: Vec::new(),
                wall_seconds: records.iter().map(|r| r.wall_seconds).sum(),
            },
            rows,
        }
    }

    pub fn from_theory(curve: &TheoryCurve, wall_seconds: f64) -> Self {
        let req = &curve.request;
        let c = if req.scheme == Scheme::Sm {
            req.constellation.as_ref()
        } else {
            None
        };
        let source = Source::from(curve.kind);
        let rows = curve
            .points
            .iter()
            .map(|p| CurveRow {
                scheme: req.scheme,
                detector: req.detector,
                n_ref: req.n_ref,
                n_rx: req.n_rx,
                order: c.map_or(1, |c| c.order()),
                kappa: None,
                snr_db: p.snr_db,
                ber: p.bep,
                ci_lo: None,
                ci_hi: None,
                bits: None,
                errors: None,
                source,
            })
            .collect();
        Self {
            meta: CurveMeta {
                label: format!(
                    "{} {}",
                    describe(req.scheme, req.detector, req.n_ref, req.n_rx, c, None),
                    source
                ),
                scheme: req.scheme,
                detector: req.detector,
                n_ref: req.n_ref,
                n_rx: req.n_rx,
                constellation: c.map(ConstellationMeta::from),
                kappa: None,
                source,
                snr_grid_db: req.snr_grid_db.clone(),
                seed: None,
                stop: None,
                mode: (req.scheme == Scheme::Ssk && req.detector == Detector::Greedy).then_some(req.mode),
                truncated_points_db: Vec::new(),
                warnings: curve.warnings.clone(),
                wall_seconds,
            },
            rows,
        }
    }

    /// `(snr_db, ber)` pairs in grid order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.snr_db, r.ber)).collect()
    }
}

/// SNR at which a curve crosses `target`, by linear interpolation of
/// `log10(ber)` against SNR between the first bracketing pair of grid
/// points. Zero-BER points are skipped.
pub fn snr_at_ber(points: &[(f64, f64)], target: f64) -> Option<f64> {
    if target.is_nan() || target <= 0.0 {
        return None;
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(s, b)| b > 0.0 && s.is_finite())
        .collect();
    let lt = target.log10();
    for w in usable.windows(2) {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        let (l0, l1) = (b0.log10(), b1.log10());
        if (l0 - lt) * (l1 - lt) > 0.0 {
            continue;
        }
        if l0 == l1 {
            return Some(s0);
        }
        return Some(s0 + (l0 - lt) / (l0 - l1) * (s1 - s0));
    }
    None
}

/// SNR difference at a target BER between two curves; positive when the
/// candidate needs less SNR than the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub target_ber: f64,
    pub reference: String,
    pub candidate: String,
    pub snr_reference_db: Option<f64>,
    pub snr_candidate_db: Option<f64>,
    pub gap_db: Option<f64>,
}

pub fn gap_row(reference: &Curve, candidate: &Curve, target_ber: f64) -> GapRow {
    let a = snr_at_ber(&reference.points(), target_ber);
    let b = snr_at_ber(&candidate.points(), target_ber);
    GapRow {
        target_ber,
        reference: reference.meta.label.clone(),
        candidate: candidate.meta.label.clone(),
        snr_reference_db: a,
        snr_candidate_db: b,
        gap_db: a.zip(b).map(|(a, b)| a - b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Provenance written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub job: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub figure: Option<String>,
    pub chunk_uses: u64,
    pub workers: usize,
    pub curves: Vec<CurveMeta>,
    pub wall_seconds: f64,
}

impl Metadata {
    pub fn new(job: &str, figure: Option<&str>, curves: &[Curve], workers: usize, wall_seconds: f64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            job: job.to_string(),
            figure: figure.map(str::to_string),
            chunk_uses: crate::montecarlo::CHUNK_USES,
            workers,
            curves: curves.iter().map(|c| c.meta.clone()).collect(),
            wall_seconds,
        }
    }
}

/// A job's complete result: curves, optional gap report and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub name: String,
    pub title: String,
    pub curves: Vec<Curve>,
    pub gaps: Vec<GapRow>,
    pub metadata: Metadata,
}

impl Bundle {
    pub fn rows(&self) -> Vec<CurveRow> {
        self.curves.iter().flat_map(|c| c.rows.iter().cloned()).collect()
    }
}

pub fn write_csv<W: Write>(rows: &[CurveRow], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wr.write_record(CSV_HEADER.split(','))
        .map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        wr.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<CurveRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd
        .headers()
        .map_err(|e| Error::config(format!("bad CSV header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::config(format!("unexpected CSV header {}", header.join(","))));
    }
    rd.deserialize()
        .map(|row| row.map_err(|e| Error::config(format!("bad CSV row: {e}"))))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    metadata: Metadata,
    rows: Vec<CurveRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    gaps: Vec<GapRow>,
}

pub fn rows_to_json(rows: &[CurveRow]) -> Result<String> {
    serde_json::to_string_pretty(rows).map_err(|e| Error::Io(e.to_string()))
}

pub fn rows_from_json(text: &str) -> Result<Vec<CurveRow>> {
    serde_json::from_str(text).map_err(|e| Error::config(format!("bad JSON rows: {e}")))
}

fn write_gaps(gaps: &[GapRow], path: &Path) -> Result<()> {
    let mut wr = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    for g in gaps {
        wr.serialize(g).map_err(|e| Error::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

/// Writes `<name>.csv` (or `<name>.json`), `<name>.meta.json`,
/// `<name>.gaps.csv` when there is a gap report, and `<name>.svg` when
/// `svg` is set. Returns the written paths.
pub fn write_bundle(bundle: &Bundle, dir: &Path, format: Format, svg: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let rows = bundle.rows();
    match format {
        Format::Csv => {
            let path = dir.join(format!("{}.csv", bundle.name));
            write_csv(&rows, std::fs::File::create(&path)?)?;
            written.push(path);
            let meta = dir.join(format!("{}.meta.json", bundle.name));
            let text = serde_json::to_string_pretty(&bundle.metadata).map_err(|e| Error::Io(e.to_string()))?;
            std::fs::write(&meta, text + "\n")?;
            written.push(meta);
        }
        Format::Json => {
            let path = dir.join(format!("{}.json", bundle.name));
            let doc = JsonDoc {
                metadata: bundle.metadata.clone(),
                rows,
                gaps: bundle.gaps.clone(),
            };
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
            std::fs::write(&path, text + "\n")?;
            written.push(path);
        }
    }
    if !bundle.gaps.is_empty() && format == Format::Csv {
        let path = dir.join(format!("{}.gaps.csv", bundle.name));
        write_gaps(&bundle.gaps, &path)?;
        written.push(path);
    }
    if svg {
        let path = dir.join(format!("{}.svg", bundle.name));
        crate::plot::write_svg(bundle, &path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(snr: f64, ber: f64, source: Source) -> CurveRow {
        CurveRow {
            scheme: Scheme::Sm,
            detector: Detector::Ml,
            n_ref: 64,
            n_rx: 2,
            order: 4,
            kappa: if source == Source::Sim { Some(10.0) } else { None },
            snr_db: snr,
            ber,
            ci_lo: (source == Source::Sim).then_some(ber * 0.9),
            ci_hi: (source == Source::Sim).then_some(ber * 1.1),
            bits: (source == Source::Sim).then_some(123_456),
            errors: (source == Source::Sim).then_some(201),
            source,
        }
    }

    #[test]
    fn csv_header_and_round_trip() {
        let rows = vec![
            row(-20.0, 1.234_567_890_123e-4, Source::Sim),
            row(-19.5, 0.1 + 0.2, Source::TheoryExact),
            row(f64::INFINITY, 0.0, Source::TheoryBound),
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert!(text.contains(",theory-exact"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
        let json = rows_to_json(&back).unwrap();
        assert_eq!(rows_from_json(&json).unwrap(), rows);
    }

    #[test]
    fn interpolation_is_log_linear() {
        let pts = [(0.0, 1e-2), (2.0, 1e-4), (4.0, 1e-6)];
        assert!((snr_at_ber(&pts, 1e-3).unwrap() - 1.0).abs() < 1e-12);
        assert!((snr_at_ber(&pts, 1e-5).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(snr_at_ber(&pts, 1e-1), None);
        let with_zero = [(0.0, 1e-2), (2.0, 0.0), (4.0, 1e-6)];
        assert!((snr_at_ber(&with_zero, 1e-4).unwrap() - 2.0).abs() < 1e-12);
    }
}
