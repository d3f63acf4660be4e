//! Job runner behind the `ris-im` binary.
//!
//! A job is declared by an optional JSON config file and command-line
//! flags. Precedence, lowest to highest: built-in defaults, config file,
//! flags. Everything is validated before any output is written, so a bad
//! config leaves the output directory untouched.
//!
//! Exit status: 0 success, 2 invalid configuration, 3 numerical failure,
//! 1 I/O failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modulation::{Constellation, ConstellationKind};
use crate::montecarlo::{default_workers, run_sweep_with, SimPlan, StopRule};
use crate::output::{gap_row, write_bundle, Bundle, Curve, Format, GapRow, Metadata};
use crate::presets::{FigureId, Grid, PresetCurve};
use crate::system::{Detector, Scheme};
use crate::theory::{evaluate, BoundMode, TheoryRequest};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT: &str = "out";
const MAX_GRID_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum JobKind {
    Simulate,
    Theory,
    Compare,
    Figure,
}

impl JobKind {
    pub fn name(self) -> &'static str {
        match self {
            JobKind::Simulate => "simulate",
            JobKind::Theory => "theory",
            JobKind::Compare => "compare",
            JobKind::Figure => "figure",
        }
    }
}

/// Expands `start:step:stop` (dB, inclusive) into grid values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [a, s, b] = parts.as_slice() else {
        return Err(Error::config(format!("grid must be start:step:stop, got {text:?}")));
    };
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::config(format!("grid value {v:?} is not a number")))
    };
    expand_grid(Grid {
        start: num(a)?,
        step: num(s)?,
        stop: num(b)?,
    })
}

pub fn expand_grid(g: Grid) -> Result<Vec<f64>> {
    if !(g.start.is_finite() && g.stop.is_finite() && g.step.is_finite()) {
        return Err(Error::config("grid bounds must be finite"));
    }
    if g.step <= 0.0 || g.stop < g.start {
        return Err(Error::config(format!(
            "grid needs step > 0 and stop >= start, got {}:{}:{}",
            g.start, g.step, g.stop
        )));
    }
    let count = ((g.stop - g.start) / g.step + 1e-9).floor() as usize + 1;
    if count > MAX_GRID_POINTS {
        return Err(Error::config(format!(
            "grid has {count} points, limit is {MAX_GRID_POINTS}"
        )));
    }
    // Computed from the index, not accumulated, so values are reproducible.
    Ok((0..count).map(|k| g.start + k as f64 * g.step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSpec {
    pub kind: ConstellationKind,
    pub order: usize,
    #[serde(default = "unit_energy")]
    pub es: f64,
}

fn unit_energy() -> f64 {
    1.0
}

/// Config file contents. Every field is optional so flags can fill gaps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub job: Option<JobKind>,
    pub scheme: Option<Scheme>,
    pub detector: Option<Detector>,
    /// Detectors compared by a `compare` job.
    pub detectors: Option<Vec<Detector>>,
    #[serde(rename = "N")]
    pub n_ref: Option<usize>,
    #[serde(rename = "n_R")]
    pub n_rx: Option<usize>,
    pub modulation: Option<ModulationSpec>,
    pub snr_grid_db: Option<Vec<f64>>,
    /// `start:step:stop` alternative to `snr_grid_db`.
    pub grid: Option<String>,
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
    pub min_bit_errors: Option<u64>,
    pub max_bits: Option<u64>,
    pub mode: Option<BoundMode>,
    pub targets_ber: Option<Vec<f64>>,
    pub figure: Option<FigureId>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub svg: Option<bool>,
    pub workers: Option<usize>,
}

impl JobFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("invalid config: {e}")))
    }

    /// Fills every field set in `over`, keeping `self` elsewhere.
    fn overlay(mut self, over: JobFile) -> Self {
        if over.grid.is_some() {
            self.snr_grid_db = None;
        }
        if over.snr_grid_db.is_some() {
            self.grid = None;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            job,
            scheme,
            detector,
            detectors,
            n_ref,
            n_rx,
            modulation,
            snr_grid_db,
            grid,
            kappa,
            seed,
            min_bit_errors,
            max_bits,
            mode,
            targets_ber,
            figure,
            out,
            format,
            svg,
            workers
        );
        self
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct JobArgs {
    /// JSON job file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Master seed of all random streams.
    #[arg(long)]
    pub seed: Option<u64>,
    /// SNR grid in dB as start:step:stop, inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    #[arg(long, value_enum)]
    pub detector: Option<Detector>,
    /// Detectors for `compare`, comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub detectors: Option<Vec<Detector>>,
    /// Number of RIS reflectors N.
    #[arg(long = "reflectors", short = 'N')]
    pub n_ref: Option<usize>,
    /// Number of receive antennas n_R.
    #[arg(long = "antennas", short = 'R')]
    pub n_rx: Option<usize>,
    /// Constellation family for SM.
    #[arg(long, value_enum)]
    pub modulation: Option<ConstellationKind>,
    /// Constellation order M for SM.
    #[arg(long, short = 'M')]
    pub order: Option<usize>,
    /// Von Mises concentration of RIS phase errors.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Bit errors that end an SNR point (default 200).
    #[arg(long)]
    pub min_errors: Option<u64>,
    /// Bit budget per SNR point (default 1e8).
    #[arg(long)]
    pub max_bits: Option<u64>,
    /// Exact or upper-bound PEP for greedy SSK theory.
    #[arg(long, value_enum)]
    pub mode: Option<BoundMode>,
    /// Target BERs of the gap report, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub targets: Option<Vec<f64>>,
    /// Skip the SVG plot.
    #[arg(long)]
    pub no_svg: bool,
    /// Worker threads; defaults to RIS_IM_WORKERS or the core count.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl JobArgs {
    fn as_file(&self) -> Result<JobFile> {
        let modulation = match (self.modulation, self.order) {
            (None, None) => None,
            (kind, order) => Some(ModulationSpec {
                kind: kind.unwrap_or(ConstellationKind::Psk),
                order: order.ok_or_else(|| Error::config("--modulation needs --order"))?,
                es: 1.0,
            }),
        };
        Ok(JobFile {
            scheme: self.scheme,
            detector: self.detector,
            detectors: self.detectors.clone(),
            n_ref: self.n_ref,
            n_rx: self.n_rx,
            modulation,
            grid: self.grid.clone(),
            kappa: self.kappa,
            seed: self.seed,
            min_bit_errors: self.min_errors,
            max_bits: self.max_bits,
            mode: self.mode,
            targets_ber: self.targets.clone(),
            out: self.out.clone(),
            format: self.format,
            svg: self.no_svg.then_some(false),
            workers: self.workers,
            ..JobFile::default()
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ris-im",
    version,
    about = "RIS index modulation BER simulator and analytical engine"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo BER sweep.
    Simulate(JobArgs),
    /// Analytical BEP curve.
    Theory(JobArgs),
    /// Simulation and theory for several detectors plus an SNR gap report.
    Compare(JobArgs),
    /// Curves behind a published figure.
    Figure {
        #[arg(value_enum)]
        id: Option<FigureId>,
        #[command(flatten)]
        args: JobArgs,
    },
}

/// A fully validated job.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Simulate(SimPlan),
    Theory(TheoryRequest),
    Compare {
        plans: Vec<SimPlan>,
        requests: Vec<TheoryRequest>,
        targets: Vec<f64>,
    },
    Figure {
        id: FigureId,
        seed: u64,
        stop: StopRule,
        grid: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub kind: JobKind,
    pub job: Job,
    pub out: PathBuf,
    pub format: Format,
    pub svg: bool,
    pub workers: usize,
}

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(format!("missing required field {what}")))
}

impl JobConfig {
    /// Merges a config file (if any) with flags and validates the result.
    pub fn resolve(kind: JobKind, figure: Option<FigureId>, args: &JobArgs) -> Result<Self> {
        let base = match &args.config {
            Some(p) => JobFile::load(p)?,
            None => JobFile::default(),
        };
        let mut merged = base.overlay(args.as_file()?);
        if figure.is_some() {
            merged.figure = figure;
        }
        Self::from_file(kind, merged)
    }

    pub fn from_file(kind: JobKind, f: JobFile) -> Result<Self> {
        if let Some(k) = f.job {
            if k != kind {
                return Err(Error::config(format!(
                    "config declares a {} job but {} was requested",
                    k.name(),
                    kind.name()
                )));
            }
        }
        let grid = match (&f.grid, &f.snr_grid_db) {
            (Some(_), Some(_)) => return Err(Error::config("give either grid or snr_grid_db, not both")),
            (Some(g), None) => Some(parse_grid(g)?),
            (None, Some(v)) => Some(v.clone()),
            (None, None) => None,
        };
        let stop = {
            let d = StopRule::default();
            StopRule {
                min_bit_errors: f.min_bit_errors.unwrap_or(d.min_bit_errors),
                max_bits: f.max_bits.unwrap_or(d.max_bits),
            }
        };
        let seed = f.seed.unwrap_or(DEFAULT_SEED);
        let mode = f.mode.unwrap_or_default();
        if let Some(w) = f.workers {
            if w == 0 {
                return Err(Error::config("workers must be at least 1"));
            }
        }

        let job = match kind {
            JobKind::Figure => {
                if f.scheme.is_some() || f.detector.is_some() || f.n_ref.is_some() || f.n_rx.is_some() {
                    return Err(Error::config("figure jobs take their system setup from the preset"));
                }
                let id = need(f.figure, "figure")?;
                if let Some(g) = &grid {
                    check_grid(g)?;
                }
                Job::Figure { id, seed, stop, grid }
            }
            _ => {
                let scheme = need(f.scheme, "scheme")?;
                let n_ref = need(f.n_ref, "N")?;
                let n_rx = need(f.n_rx, "n_R")?;
                let grid = need(grid, "snr_grid_db or grid")?;
                check_grid(&grid)?;
                let constellation = match (scheme, f.modulation) {
                    (Scheme::Sm, Some(m)) => Some(Constellation::build(m.kind, m.order, m.es)?),
                    (Scheme::Sm, None) => return Err(Error::config("SM needs a modulation")),
                    (Scheme::Ssk, Some(_)) => return Err(Error::config("SSK takes no modulation")),
                    (Scheme::Ssk, None) => None,
                };
                let plan_for = |detector| SimPlan {
                    scheme,
                    detector,
                    n_ref,
                    n_rx,
                    constellation: constellation.clone(),
                    snr_grid_db: grid.clone(),
                    kappa: f.kappa,
                    seed,
                    stop,
                };
                let request_for = |detector| TheoryRequest {
                    scheme,
                    detector,
                    n_ref,
                    n_rx,
                    constellation: constellation.clone(),
                    snr_grid_db: grid.clone(),
                    mode,
                };
                match kind {
                    JobKind::Simulate => {
                        let plan = plan_for(need(f.detector, "detector")?);
                        plan.validate()?;
                        Job::Simulate(plan)
                    }
                    JobKind::Theory => {
                        if f.kappa.is_some() {
                            return Err(Error::config("theory curves assume perfect phases; drop kappa"));
                        }
                        let req = request_for(need(f.detector, "detector")?);
                        req.validate()?;
                        Job::Theory(req)
                    }
                    _ => {
                        let detectors = match (f.detectors, f.detector) {
                            (Some(d), _) => d,
                            (None, Some(d)) => vec![d],
                            (None, None) => vec![Detector::Greedy, Detector::Ml],
                        };
                        if detectors.is_empty() {
                            return Err(Error::config("compare needs at least one detector"));
                        }
                        let targets = f.targets_ber.unwrap_or_else(|| vec![1e-3, 1e-4]);
                        if targets.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
                            return Err(Error::config("target BERs must lie in (0, 1)"));
                        }
                        let plans: Vec<SimPlan> = detectors.iter().map(|&d| plan_for(d)).collect();
                        let requests: Vec<TheoryRequest> = detectors.iter().map(|&d| request_for(d)).collect();
                        for (p, r) in plans.iter().zip(&requests) {
                            p.validate()?;
                            r.validate()?;
                        }
                        Job::Compare {
                            plans,
                            requests,
                            targets,
                        }
                    }
                }
            }
        };
        Ok(Self {
            kind,
            job,
            out: f.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            format: f.format.unwrap_or_default(),
            svg: f.svg.unwrap_or(true),
            workers: f.workers.unwrap_or_else(default_workers),
        })
    }

    /// Base name of the output files.
    pub fn name(&self) -> String {
        match &self.job {
            Job::Figure { id, .. } => id.name().to_string(),
            _ => self.kind.name().to_string(),
        }
    }
}

fn check_grid(g: &[f64]) -> Result<()> {
    if g.is_empty() {
        return Err(Error::config("SNR grid is empty"));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::config("SNR grid values must be finite"));
    }
    Ok(())
}

fn simulate_curve(plan: &SimPlan, workers: usize) -> Result<Curve> {
    Ok(Curve::from_sim(plan, &run_sweep_with(plan, workers)?))
}

fn theory_curve(req: &TheoryRequest) -> Result<Curve> {
    let t = Instant::now();
    let curve = evaluate(req)?;
    Ok(Curve::from_theory(&curve, t.elapsed().as_secs_f64()))
}

/// Curves from a figure preset; `grid` replaces every preset grid.
pub fn figure_bundle(id: FigureId, seed: u64, stop: StopRule, grid: Option<&[f64]>, workers: usize) -> Result<Bundle> {
    let started = Instant::now();
    let preset = id.preset();
    let mut curves = Vec::new();
    let mut sim_index = vec![None; preset.curves.len()];
    for (i, pc) in preset.curves.iter().enumerate() {
        let snr_grid_db = match grid {
            Some(g) => g.to_vec(),
            None => expand_grid(pc.grid)?,
        };
        let constellation = preset_constellation(pc)?;
        if pc.simulate {
            let plan = SimPlan {
                scheme: pc.scheme,
                detector: pc.detector,
                n_ref: pc.n_ref,
                n_rx: pc.n_rx,
                constellation: constellation.clone(),
                snr_grid_db: snr_grid_db.clone(),
                kappa: pc.kappa,
                seed,
                stop,
            };
            sim_index[i] = Some(curves.len());
            curves.push(simulate_curve(&plan, workers)?);
        }
        if pc.theory {
            curves.push(theory_curve(&TheoryRequest {
                scheme: pc.scheme,
                detector: pc.detector,
                n_ref: pc.n_ref,
                n_rx: pc.n_rx,
                constellation,
                snr_grid_db,
                mode: BoundMode::Exact,
            })?);
        }
    }
    let mut gaps = Vec::new();
    for &t in preset.gap_targets {
        for &(a, b) in preset.gap_pairs {
            if let (Some(a), Some(b)) = (sim_index[a], sim_index[b]) {
                gaps.push(gap_row(&curves[a], &curves[b], t));
            }
        }
    }
    let metadata = Metadata::new(
        "figure",
        Some(id.name()),
        &curves,
        workers,
        started.elapsed().as_secs_f64(),
    );
    Ok(Bundle {
        name: id.name().to_string(),
        title: preset.title.to_string(),
        curves,
        gaps,
        metadata,
    })
}

fn preset_constellation(pc: &PresetCurve) -> Result<Option<Constellation>> {
    pc.modulation
        .map(|(kind, order)| Constellation::build(kind, order, 1.0))
        .transpose()
}

/// Runs a job in memory.
pub fn build_bundle(cfg: &JobConfig) -> Result<Bundle> {
    let started = Instant::now();
    let name = cfg.name();
    let (title, curves, gaps): (String, Vec<Curve>, Vec<GapRow>) = match &cfg.job {
        Job::Figure { id, seed, stop, grid } => {
            return figure_bundle(*id, *seed, *stop, grid.as_deref(), cfg.workers);
        }
        Job::Simulate(plan) => {
            let c = simulate_curve(plan, cfg.workers)?;
            (c.meta.label.clone(), vec![c], Vec::new())
        }
        Job::Theory(req) => {
            let c = theory_curve(req)?;
            (c.meta.label.clone(), vec![c], Vec::new())
        }
        Job::Compare {
            plans,
            requests,
            targets,
        } => {
            let mut curves = Vec::new();
            for (p, r) in plans.iter().zip(requests) {
                curves.push(simulate_curve(p, cfg.workers)?);
                curves.push(theory_curve(r)?);
            }
            let mut gaps = Vec::new();
            for &t in targets {
                for k in (2..curves.len()).step_by(2) {
                    gaps.push(gap_row(&curves[0], &curves[k], t));
                }
                for k in (0..curves.len()).step_by(2) {
                    gaps.push(gap_row(&curves[k], &curves[k + 1], t));
                }
            }
            ("Simulation and theory by detector".to_string(), curves, gaps)
        }
    };
    let metadata = Metadata::new(
        cfg.kind.name(),
        None,
        &curves,
        cfg.workers,
        started.elapsed().as_secs_f64(),
    );
    Ok(Bundle {
        name,
        title,
        curves,
        gaps,
        metadata,
    })
}

/// Runs a job and writes its files.
pub fn run_job(cfg: &JobConfig) -> Result<(Bundle, Vec<PathBuf>)> {
    let bundle = build_bundle(cfg)?;
    let files = write_bundle(&bundle, &cfg.out, cfg.format, cfg.svg)?;
    Ok((bundle, files))
}

fn diagnostic(e: &Error) -> String {
    serde_json::json!({
        "status": "error",
        "category": e.category(),
        "exit_code": e.exit_code(),
        "message": e.to_string(),
    })
    .to_string()
}

/// Parses arguments, runs the job and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let resolved = match &cli.command {
        Command::Simulate(a) => JobConfig::resolve(JobKind::Simulate, None, a),
        Command::Theory(a) => JobConfig::resolve(JobKind::Theory, None, a),
        Command::Compare(a) => JobConfig::resolve(JobKind::Compare, None, a),
        Command::Figure { id, args } => JobConfig::resolve(JobKind::Figure, *id, args),
    };
    let outcome = resolved.and_then(|cfg| run_job(&cfg));
    match outcome {
        Ok((bundle, files)) => {
            for c in &bundle.curves {
                for w in &c.meta.warnings {
                    eprintln!("warning: {}: {w}", c.meta.label);
                }
                if !c.meta.truncated_points_db.is_empty() {
                    eprintln!(
                        "warning: {}: bit budget exhausted before the error target at {:?} dB",
                        c.meta.label, c.meta.truncated_points_db
                    );
                }
            }
            for g in &bundle.gaps {
                if let Some(gap) = g.gap_db {
                    println!(
                        "gap at BER {:e}: {} vs {}: {gap:.3} dB",
                        g.target_ber, g.reference, g.candidate
                    );
                }
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{}", diagnostic(&e));
            e.exit_code()
        }
    }
}
