//! Flat Rayleigh channels between the RIS and the receive antennas, RIS
//! phase alignment, phase-estimation error and received-signal synthesis.
//!
//! Gains follow the convention `g = β e^{-jψ}`: the complex gain is stored
//! and `β = |g|`, `ψ = -arg(g)` wrapped to `[0, 2π)` are derived from it.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Wraps an angle to `[0, 2π)`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Draws a circularly symmetric complex Gaussian with total variance `var`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

fn check_antennas(n_rx: usize) -> Result<()> {
    if n_rx < 2 || !n_rx.is_power_of_two() {
        return Err(Error::dimension(format!(
            "receive antenna count must be a power of two >= 2, got {n_rx}"
        )));
    }
    Ok(())
}

/// One realization of the `n_rx × n_ref` RIS-to-receiver channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_rx: usize,
    n_ref: usize,
    /// Row-major: `gains[l * n_ref + i]` is `g_{l,i}`.
    gains: Vec<Complex64>,
}

impl ChannelRealization {
    /// Wraps an explicit gain matrix (row-major, one row per antenna).
    pub fn from_gains(n_rx: usize, n_ref: usize, gains: Vec<Complex64>) -> Result<Self> {
        check_antennas(n_rx)?;
        if n_ref == 0 {
            return Err(Error::dimension("reflector count must be at least 1"));
        }
        if gains.len() != n_rx * n_ref {
            return Err(Error::dimension(format!(
                "expected {} gains, got {}",
                n_rx * n_ref,
                gains.len()
            )));
        }
        if gains.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return Err(Error::parameter("channel gains must be finite"));
        }
        Ok(Self { n_rx, n_ref, gains })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_ref(&self) -> usize {
        self.n_ref
    }

    pub fn gain(&self, l: usize, i: usize) -> Complex64 {
        self.gains[l * self.n_ref + i]
    }

    /// Gains seen by receive antenna `l`.
    pub fn row(&self, l: usize) -> &[Complex64] {
        &self.gains[l * self.n_ref..(l + 1) * self.n_ref]
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    /// `β_{l,i}`
    pub fn amplitude(&self, l: usize, i: usize) -> f64 {
        self.gain(l, i).norm()
    }

    /// `ψ_{l,i}` in `[0, 2π)`.
    pub fn phase(&self, l: usize, i: usize) -> f64 {
        wrap_phase(-self.gain(l, i).arg())
    }

    /// `Σ_i β_{l,i}`, the aligned gain when the RIS focuses on antenna `l`.
    pub fn amplitude_sum(&self, l: usize) -> f64 {
        self.row(l).iter().map(|g| g.norm()).sum()
    }

    /// `Σ_i g_{l,i} e^{jφ_i}` for the given reflector phasors.
    pub fn combined_gain(&self, l: usize, phasors: &[Complex64]) -> Complex64 {
        self.row(l).iter().zip(phasors).map(|(g, w)| g * w).sum()
    }

    /// Unit phasors `e^{jψ_{m,i}}` that co-phase every reflector at antenna
    /// `m`. Equivalent to `align_phases(..).phasors()` without trigonometry.
    pub fn aligned_phasors(&self, m: usize, out: &mut Vec<Complex64>) {
        out.clear();
        out.extend(self.row(m).iter().map(|g| {
            let a = g.norm();
            if a > 0.0 {
                g.conj() / a
            } else {
                Complex64::new(1.0, 0.0)
            }
        }));
    }

    /// Redraws every gain in place from `CN(0, 1)`.
    pub fn resample<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for g in &mut self.gains {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *g = Complex64::new(FRAC_1_SQRT_2 * re, FRAC_1_SQRT_2 * im);
        }
    }
}

/// Draws an `n_rx × n_ref` matrix of iid `CN(0, 1)` gains.
pub fn sample_channel<R: Rng + ?Sized>(n_rx: usize, n_ref: usize, rng: &mut R) -> Result<ChannelRealization> {
    check_antennas(n_rx)?;
    if n_ref == 0 {
        return Err(Error::dimension("reflector count must be at least 1"));
    }
    let mut ch = ChannelRealization {
        n_rx,
        n_ref,
        gains: vec![Complex64::new(0.0, 0.0); n_rx * n_ref],
    };
    ch.resample(rng);
    Ok(ch)
}

/// Reflector phases `φ_i`, canonically wrapped to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    phases: Vec<f64>,
}

impl PhaseProfile {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::parameter("phases must be finite"));
        }
        Ok(Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
        })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// `e^{jφ_i}` for every reflector.
    pub fn phasors(&self) -> Vec<Complex64> {
        self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect()
    }
}

/// Sets `φ_i = ψ_{m,i}` so that all reflected paths add in phase at
/// antenna `m`.
pub fn align_phases(ch: &ChannelRealization, m: usize) -> Result<PhaseProfile> {
    if m >= ch.n_rx() {
        return Err(Error::Index {
            index: m,
            len: ch.n_rx(),
        });
    }
    Ok(PhaseProfile {
        phases: (0..ch.n_ref()).map(|i| ch.phase(m, i)).collect(),
    })
}

/// Von Mises distribution with zero mean, sampled with the Best–Fisher
/// rejection scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMises {
    kappa: f64,
    r: f64,
}

impl VonMises {
    /// Below this concentration the draw is taken as uniform on the circle.
    const UNIFORM_KAPPA: f64 = 1e-8;

    pub fn new(kappa: f64) -> Result<Self> {
        if kappa.is_nan() || kappa < 0.0 {
            return Err(Error::parameter(format!(
                "von Mises concentration must be >= 0, got {kappa}"
            )));
        }
        let r = if kappa.is_finite() && kappa >= Self::UNIFORM_KAPPA {
            let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
            let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
            (1.0 + rho * rho) / (2.0 * rho)
        } else {
            0.0
        };
        Ok(Self { kappa, r })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Draws an angle in `(-π, π]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.kappa.is_infinite() {
            return 0.0;
        }
        if self.kappa < Self::UNIFORM_KAPPA {
            return PI * (2.0 * rng.random::<f64>() - 1.0);
        }
        let f = loop {
            let u1: f64 = rng.random();
            let u2: f64 = rng.random();
            let z = (PI * u1).cos();
            let f = (1.0 + self.r * z) / (self.r + z);
            let c = self.kappa * (self.r - f);
            if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
                break f.clamp(-1.0, 1.0);
            }
        };
        let theta = f.acos();
        if rng.random::<f64>() < 0.5 {
            -theta
        } else {
            theta
        }
    }
}

/// Adds iid von Mises phase errors of concentration `kappa` to every
/// reflector phase. `kappa = ∞` returns the profile unchanged.
pub fn perturb_phases<R: Rng + ?Sized>(p: &PhaseProfile, kappa: f64, rng: &mut R) -> Result<PhaseProfile> {
    let vm = VonMises::new(kappa)?;
    if kappa.is_infinite() {
        return Ok(p.clone());
    }
    Ok(PhaseProfile {
        phases: p.phases.iter().map(|&phi| wrap_phase(phi + vm.sample(rng))).collect(),
    })
}

/// Transmit energy and noise level. The SNR is `Es/N0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    es: f64,
    n0: f64,
}

impl NoiseSpec {
    pub fn new(es: f64, n0: f64) -> Result<Self> {
        if !(es > 0.0 && es.is_finite()) || !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::parameter(format!(
                "Es and N0 must be positive and finite, got Es={es}, N0={n0}"
            )));
        }
        Ok(Self { es, n0 })
    }

    /// `N0 = Es / 10^{snr_db/10}`; `snr_db = +∞` gives the noiseless limit.
    pub fn from_snr_db(snr_db: f64, es: f64) -> Result<Self> {
        if snr_db == f64::INFINITY {
            return Self::noiseless(es);
        }
        Self::new(es, es / 10f64.powf(snr_db / 10.0))
    }

    /// The `N0 → 0` limit.
    pub fn noiseless(es: f64) -> Result<Self> {
        if !(es > 0.0 && es.is_finite()) {
            return Err(Error::parameter(format!("Es must be positive, got {es}")));
        }
        Ok(Self { es, n0: 0.0 })
    }

    pub fn es(&self) -> f64 {
        self.es
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.es / self.n0).log10()
    }
}

/// Synthesizes `r_l = (Σ_i g_{l,i} e^{jφ_i}) x + n_l` for every antenna.
pub fn received_signals<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    p: &PhaseProfile,
    x: Complex64,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if p.len() != ch.n_ref() {
        return Err(Error::dimension(format!(
            "phase profile has {} entries for {} reflectors",
            p.len(),
            ch.n_ref()
        )));
    }
    let w = p.phasors();
    Ok((0..ch.n_rx())
        .map(|l| ch.combined_gain(l, &w) * x + complex_gaussian(rng, noise.n0()))
        .collect())
}
