//! End-to-end bit error rate simulation over SNR sweeps.
//!
//! Every channel use draws a fresh channel (fast fading), fresh bits and
//! fresh noise. Uses are grouped into chunks of [`CHUNK_USES`]; chunk `k` of
//! the point at `snr_db` draws from the stream keyed by
//! `(seed, snr_key(snr_db), k)` (see [`crate::rng`]). Chunks are evaluated
//! in parallel waves but accumulated strictly in chunk order, and the
//! stopping rule is applied to that ordered prefix, so records depend only
//! on `(plan, snr_db)`.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{complex_gaussian, ChannelRealization, NoiseSpec, VonMises};
use crate::detectors::{greedy_sm, greedy_ssk, ml_sm_cached, ml_ssk_cached, HypothesisSignals};
use crate::error::{Error, Result};
use crate::modulation::{demap_decision, map_bits, BitFrame, Constellation};
use crate::rng;
use crate::system::{Detector, Scheme};

/// Channel uses per random-stream chunk.
pub const CHUNK_USES: u64 = 2048;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "RIS_IM_WORKERS";

/// Two-sided 95% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 200,
            max_bits: 100_000_000,
        }
    }
}

/// A simulation sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimPlan {
    pub scheme: Scheme,
    pub detector: Detector,
    pub n_ref: usize,
    pub n_rx: usize,
    /// Required for SM, must be absent for SSK.
    pub constellation: Option<Constellation>,
    pub snr_grid_db: Vec<f64>,
    /// Von Mises concentration of the RIS phase error; `None` is perfect
    /// phase knowledge.
    pub kappa: Option<f64>,
    pub seed: u64,
    pub stop: StopRule,
}

impl SimPlan {
    /// Bits per channel use: `log₂ n_R (+ log₂ M)`.
    pub fn bits_per_use(&self) -> u64 {
        let idx = self.n_rx.trailing_zeros() as u64;
        idx + self.constellation.as_ref().map_or(0, |c| c.bits_per_symbol() as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::config("SNR grid is empty"));
        }
        if self.snr_grid_db.iter().any(|s| s.is_nan() || *s == f64::NEG_INFINITY) {
            return Err(Error::config("SNR grid values must be numbers above -inf"));
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
        match (self.scheme, &self.constellation) {
            (Scheme::Sm, None) => return Err(Error::config("SM needs a constellation")),
            (Scheme::Ssk, Some(_)) => return Err(Error::config("SSK takes no constellation")),
            _ => {}
        }
        if let Some(k) = self.kappa {
            if k.is_nan() || k < 0.0 {
                return Err(Error::config(format!("kappa must be >= 0, got {k}")));
            }
        }
        if self.stop.min_bit_errors < 1 {
            return Err(Error::config("min_bit_errors must be at least 1"));
        }
        if self.stop.max_bits < self.bits_per_use() {
            return Err(Error::config("max_bits is smaller than one channel use"));
        }
        Ok(())
    }
}

/// Result at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub snr_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `max_bits` ran out before `min_bit_errors` were seen.
    pub truncated: bool,
    pub wall_seconds: f64,
}

pub type BerCurve = Vec<BerRecord>;

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors >= trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Default worker count: `RIS_IM_WORKERS` if set, else the available
/// parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    bits: u64,
    errors: u64,
}

struct PointContext<'a> {
    plan: &'a SimPlan,
    noise: NoiseSpec,
    phase_error: Option<VonMises>,
    snr_key: u64,
}

/// Reusable per-chunk buffers.
struct Workspace {
    ch: ChannelRealization,
    hyp: HypothesisSignals,
    phasors: Vec<Complex64>,
    scratch: Vec<Complex64>,
    r: Vec<Complex64>,
    amplitudes: Vec<f64>,
}

impl PointContext<'_> {
    fn simulate_chunk(&self, chunk: u64, uses: u64) -> Result<Tally> {
        let plan = self.plan;
        let mut rng = rng::stream(plan.seed, &[self.snr_key, chunk]);
        let n_rx = plan.n_rx;
        let n_ref = plan.n_ref;
        let c = plan.constellation.as_ref();
        let antenna_width = n_rx.trailing_zeros();
        let (order, symbol_width) = c.map_or((1, 0), |c| (c.order() as u32, c.bits_per_symbol()));
        let carrier = Complex64::new(self.noise.es().sqrt(), 0.0);
        let ch = ChannelRealization::from_gains(n_rx, n_ref, vec![Complex64::new(1.0, 0.0); n_rx * n_ref])?;
        let mut ws = Workspace {
            hyp: HypothesisSignals::new(&ch),
            ch,
            phasors: Vec::with_capacity(n_ref),
            scratch: Vec::with_capacity(n_ref),
            r: vec![Complex64::new(0.0, 0.0); n_rx],
            amplitudes: vec![0.0; n_rx],
        };
        let mut tally = Tally::default();
        for _ in 0..uses {
            ws.ch.resample(&mut rng);
            let frame = BitFrame::from_values(
                rng.random_range(0..n_rx as u32),
                antenna_width,
                rng.random_range(0..order),
                symbol_width,
            )?;
            let (m, symbol) = map_bits(&frame, n_rx, c)?;
            let x = symbol.unwrap_or(carrier);

            ws.ch.aligned_phasors(m, &mut ws.phasors);
            if let Some(vm) = &self.phase_error {
                for w in &mut ws.phasors {
                    *w *= Complex64::from_polar(1.0, vm.sample(&mut rng));
                }
            }
            if plan.detector == Detector::Ml {
                ws.hyp.refresh(&ws.ch, &mut ws.scratch);
            }
            for l in 0..n_rx {
                let h = ws.ch.combined_gain(l, &ws.phasors);
                ws.r[l] = h * x + complex_gaussian(&mut rng, self.noise.n0());
            }

            let decision = match (plan.scheme, plan.detector) {
                (Scheme::Ssk, Detector::Greedy) => greedy_ssk(&ws.r)?,
                (Scheme::Ssk, Detector::Ml) => ml_ssk_cached(&ws.r, &ws.hyp, self.noise.es())?,
                (Scheme::Sm, Detector::Greedy) => {
                    let c = c.expect("validated");
                    if c.kind() == crate::modulation::ConstellationKind::Qam {
                        for (l, a) in ws.amplitudes.iter_mut().enumerate() {
                            *a = ws.ch.amplitude_sum(l);
                        }
                        greedy_sm(&ws.r, Some(&ws.amplitudes), c)?
                    } else {
                        greedy_sm(&ws.r, None, c)?
                    }
                }
                (Scheme::Sm, Detector::Ml) => ml_sm_cached(&ws.r, &ws.hyp, c.expect("validated"))?,
            };
            let decided = demap_decision(decision.antenna, decision.symbol, n_rx, c)?;
            tally.bits += frame.len() as u64;
            tally.errors += frame.bit_errors(&decided) as u64;
        }
        Ok(tally)
    }
}

/// Simulates one SNR point with the default worker count.
pub fn run_point(plan: &SimPlan, snr_db: f64) -> Result<BerRecord> {
    run_point_with(plan, snr_db, default_workers())
}

/// Simulates one SNR point. `snr_db = +∞` runs noise-free.
pub fn run_point_with(plan: &SimPlan, snr_db: f64, workers: usize) -> Result<BerRecord> {
    plan.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    point_in_pool(plan, snr_db, &pool, workers.max(1))
}

fn point_in_pool(plan: &SimPlan, snr_db: f64, pool: &rayon::ThreadPool, workers: usize) -> Result<BerRecord> {
    let started = Instant::now();
    let es = plan.constellation.as_ref().map_or(1.0, |c| c.es());
    let ctx = PointContext {
        plan,
        noise: NoiseSpec::from_snr_db(snr_db, es)?,
        phase_error: plan.kappa.filter(|k| k.is_finite()).map(VonMises::new).transpose()?,
        snr_key: rng::snr_key(snr_db),
    };
    let bpu = plan.bits_per_use();
    let max_uses = plan.stop.max_bits / bpu;
    let n_chunks = max_uses.div_ceil(CHUNK_USES);
    let wave = (2 * workers) as u64;

    let mut total = Tally::default();
    let mut next = 0u64;
    let mut done = false;
    while !done && next < n_chunks {
        let end = (next + wave).min(n_chunks);
        let tallies: Vec<Result<Tally>> = pool.install(|| {
            (next..end)
                .into_par_iter()
                .map(|k| {
                    let uses = CHUNK_USES.min(max_uses - k * CHUNK_USES);
                    ctx.simulate_chunk(k, uses)
                })
                .collect()
        });
        for t in tallies {
            let t = t?;
            total.bits += t.bits;
            total.errors += t.errors;
            if total.errors >= plan.stop.min_bit_errors {
                done = true;
                break;
            }
        }
        next = end;
    }
    let ber = if total.bits > 0 {
        total.errors as f64 / total.bits as f64
    } else {
        0.0
    };
    let (ci_lo, ci_hi) = wilson_interval(total.errors, total.bits);
    Ok(BerRecord {
        snr_db,
        bits_sent: total.bits,
        bit_errors: total.errors,
        ber,
        ci_lo,
        ci_hi,
        truncated: total.errors < plan.stop.min_bit_errors,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Simulates every grid point in order with the default worker count.
pub fn run_sweep(plan: &SimPlan) -> Result<BerCurve> {
    run_sweep_with(plan, default_workers())
}

pub fn run_sweep_with(plan: &SimPlan, workers: usize) -> Result<BerCurve> {
    plan.validate()?;
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    plan.snr_grid_db
        .iter()
        .map(|&s| point_in_pool(plan, s, &pool, workers))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::ConstellationKind;

    fn plan(scheme: Scheme, detector: Detector) -> SimPlan {
        SimPlan {
            scheme,
            detector,
            n_ref: 16,
            n_rx: 4,
            constellation: (scheme == Scheme::Sm)
                .then(|| Constellation::build(ConstellationKind::Qam, 4, 1.0).unwrap()),
            snr_grid_db: vec![-10.0],
            kappa: None,
            seed: 9,
            stop: StopRule {
                min_bit_errors: 50,
                max_bits: 20_000,
            },
        }
    }

    #[test]
    fn wilson_brackets_estimate() {
        for (e, n) in [(0, 100), (1, 100), (50, 100), (100, 100), (200, 1_000_000)] {
            let (lo, hi) = wilson_interval(e, n);
            let p = e as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
        }
    }

    #[test]
    fn validation_catches_bad_plans() {
        let mut p = plan(Scheme::Ssk, Detector::Greedy);
        p.snr_grid_db.clear();
        assert!(p.validate().is_err());
        let mut p = plan(Scheme::Ssk, Detector::Greedy);
        p.n_rx = 3;
        assert!(p.validate().is_err());
        let mut p = plan(Scheme::Sm, Detector::Ml);
        p.constellation = None;
        assert!(p.validate().is_err());
        let mut p = plan(Scheme::Ssk, Detector::Ml);
        p.stop.min_bit_errors = 0;
        assert!(p.validate().is_err());
        let mut p = plan(Scheme::Ssk, Detector::Ml);
        p.kappa = Some(-1.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn noiseless_points_are_error_free() {
        for scheme in [Scheme::Ssk, Scheme::Sm] {
            for detector in [Detector::Greedy, Detector::Ml] {
                let mut p = plan(scheme, detector);
                p.n_ref = 64;
                let r = run_point_with(&p, f64::INFINITY, 1).unwrap();
                assert_eq!(r.bit_errors, 0, "{scheme}-{detector}");
                assert_eq!(r.bits_sent, 20_000 / p.bits_per_use() * p.bits_per_use());
                assert!(r.truncated);
            }
        }
    }

    #[test]
    fn stops_on_error_budget() {
        let p = plan(Scheme::Ssk, Detector::Greedy);
        let r = run_point_with(&p, -40.0, 1).unwrap();
        assert!(r.bit_errors >= 50);
        assert!(!r.truncated);
        assert!(r.bits_sent <= 20_000);
    }
}
