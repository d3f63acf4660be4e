//! Greedy (energy-based) and maximum-likelihood receivers for RIS-SSK and
//! RIS-SM. All ties resolve to the lowest antenna index, then the lowest
//! symbol label.

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::modulation::{Constellation, ConstellationKind};

/// Detector output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    /// Detected antenna index (0-based).
    pub antenna: usize,
    /// Detected symbol label, absent for SSK.
    pub label: Option<u32>,
    /// Detected symbol, absent for SSK.
    pub symbol: Option<Complex64>,
    /// Score of the winning hypothesis: energy for greedy index detection,
    /// squared residual for ML.
    pub metric: f64,
    /// Number of hypothesis metrics evaluated.
    pub evaluated: usize,
}

fn strongest(r: &[Complex64]) -> Result<(usize, f64)> {
    if r.is_empty() {
        return Err(Error::dimension("received vector is empty"));
    }
    let mut best = 0;
    let mut best_e = f64::NEG_INFINITY;
    for (l, v) in r.iter().enumerate() {
        let e = v.norm_sqr();
        if e > best_e {
            best_e = e;
            best = l;
        }
    }
    Ok((best, best_e))
}

/// Picks the antenna with the highest received energy. Needs no channel
/// knowledge.
pub fn greedy_ssk(r: &[Complex64]) -> Result<Decision> {
    let (antenna, metric) = strongest(r)?;
    Ok(Decision {
        antenna,
        label: None,
        symbol: None,
        metric,
        evaluated: r.len(),
    })
}

/// Noise-free hypothesis signals `H[l][m] = Σ_i g_{l,i} e^{jψ_{m,i}}`,
/// computed once per channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSignals {
    n_rx: usize,
    /// Row-major by target antenna: `h[m * n_rx + l]`.
    h: Vec<Complex64>,
}

impl HypothesisSignals {
    pub fn new(ch: &ChannelRealization) -> Self {
        let mut out = Self { n_rx: 0, h: Vec::new() };
        let mut scratch = Vec::new();
        out.refresh(ch, &mut scratch);
        out
    }

    /// Recomputes the cache for a new realization, reusing buffers.
    pub fn refresh(&mut self, ch: &ChannelRealization, scratch: &mut Vec<Complex64>) {
        let n = ch.n_rx();
        self.n_rx = n;
        self.h.clear();
        for m in 0..n {
            ch.aligned_phasors(m, scratch);
            for l in 0..n {
                self.h.push(ch.combined_gain(l, scratch));
            }
        }
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    /// Signals at every antenna when the RIS targets antenna `m`.
    pub fn target(&self, m: usize) -> &[Complex64] {
        &self.h[m * self.n_rx..(m + 1) * self.n_rx]
    }
}

fn residual(r: &[Complex64], h: &[Complex64], x: Complex64) -> f64 {
    r.iter().zip(h).map(|(rl, hl)| (rl - hl * x).norm_sqr()).sum()
}

/// ML detection of the targeted antenna for RIS-SSK, with the unmodulated
/// carrier `√Es`.
pub fn ml_ssk(r: &[Complex64], ch: &ChannelRealization, es: f64) -> Result<Decision> {
    if r.len() != ch.n_rx() {
        return Err(Error::dimension(format!(
            "{} received samples for {} antennas",
            r.len(),
            ch.n_rx()
        )));
    }
    ml_ssk_cached(r, &HypothesisSignals::new(ch), es)
}

/// [`ml_ssk`] against precomputed hypothesis signals.
pub fn ml_ssk_cached(r: &[Complex64], hyp: &HypothesisSignals, es: f64) -> Result<Decision> {
    if r.len() != hyp.n_rx() {
        return Err(Error::dimension("received vector and hypotheses differ in size"));
    }
    let x = Complex64::new(es.sqrt(), 0.0);
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for m in 0..hyp.n_rx() {
        let d = residual(r, hyp.target(m), x);
        if d < best_d {
            best_d = d;
            best = m;
        }
    }
    Ok(Decision {
        antenna: best,
        label: None,
        symbol: None,
        metric: best_d,
        evaluated: hyp.n_rx(),
    })
}

/// Sequential greedy RIS-SM detection: strongest antenna first, then the
/// symbol. PSK needs no amplitudes; QAM scales the constellation by the
/// detected antenna's amplitude sum `Σ_i β_{m̂,i}`.
pub fn greedy_sm(r: &[Complex64], amplitudes: Option<&[f64]>, c: &Constellation) -> Result<Decision> {
    let (antenna, metric) = strongest(r)?;
    let scale = match c.kind() {
        ConstellationKind::Psk => 1.0,
        ConstellationKind::Qam => {
            let a = amplitudes.ok_or_else(|| Error::config("greedy QAM detection needs per-antenna amplitude sums"))?;
            if a.len() != r.len() {
                return Err(Error::dimension(format!(
                    "{} amplitude sums for {} antennas",
                    a.len(),
                    r.len()
                )));
            }
            a[antenna]
        }
    };
    let label = c.nearest_scaled(r[antenna], scale);
    Ok(Decision {
        antenna,
        label: Some(label),
        symbol: Some(c.point(label)),
        metric,
        evaluated: r.len() + c.order(),
    })
}

/// Joint ML search over all `(antenna, symbol)` hypotheses.
pub fn ml_sm(r: &[Complex64], ch: &ChannelRealization, c: &Constellation) -> Result<Decision> {
    if r.len() != ch.n_rx() {
        return Err(Error::dimension(format!(
            "{} received samples for {} antennas",
            r.len(),
            ch.n_rx()
        )));
    }
    ml_sm_cached(r, &HypothesisSignals::new(ch), c)
}

/// [`ml_sm`] against precomputed hypothesis signals.
pub fn ml_sm_cached(r: &[Complex64], hyp: &HypothesisSignals, c: &Constellation) -> Result<Decision> {
    if r.len() != hyp.n_rx() {
        return Err(Error::dimension("received vector and hypotheses differ in size"));
    }
    let mut best = (0usize, 0u32);
    let mut best_d = f64::INFINITY;
    for m in 0..hyp.n_rx() {
        let h = hyp.target(m);
        for (label, &x) in c.points().iter().enumerate() {
            let d = residual(r, h, x);
            if d < best_d {
                best_d = d;
                best = (m, label as u32);
            }
        }
    }
    Ok(Decision {
        antenna: best.0,
        label: Some(best.1),
        symbol: Some(c.point(best.1)),
        metric: best_d,
        evaluated: hyp.n_rx() * c.order(),
    })
}
