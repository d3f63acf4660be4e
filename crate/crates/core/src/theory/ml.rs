//! Error probabilities of the maximum-likelihood receivers.
//!
//! Conditioned on the channel, an ML pairwise error has probability
//! `Q(√(Γ/(2N0)))` with `Γ = Σ_l |G_l x - Ĝ_l x̂|²`. Averaging through the
//! alternative Q-function form gives
//!
//! `P̄ = (1/π) ∫_0^{π/2} M_Γ(-1/(4 sin²η N0)) dη`.
//!
//! Symbols are normalized to unit average energy (`N0 = 1/(Es/N0)`).

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::quadform::{CanonicalForm, QuadFormSpec};
use crate::error::{Error, Result};
use crate::modulation::{hamming, Constellation};
use crate::quadrature::fixed_checked;

const FOUR_MINUS_PI: f64 = 4.0 - PI;

/// Mean and covariance of `[Re γ₁, Im γ₁, Re γ₂, Im γ₂]`, the Γ terms at
/// the transmitted antenna and at the wrongly detected one.
pub fn mismatch_quadform(x: Complex64, xh: Complex64, n_ref: usize) -> Result<QuadFormSpec> {
    let n = n_ref as f64;
    let k = n * FOUR_MINUS_PI / 4.0;
    let c = n * PI / 8.0;
    let mu = n * PI.sqrt() / 2.0;
    let s11 = k * x.re * x.re + n * xh.norm_sqr() / 2.0;
    let s22 = k * x.im * x.im + n * xh.norm_sqr() / 2.0;
    let s33 = k * xh.re * xh.re + n * x.norm_sqr() / 2.0;
    let s44 = k * xh.im * xh.im + n * x.norm_sqr() / 2.0;
    let s12 = k * x.re * x.im;
    let s34 = k * xh.re * xh.im;
    let s13 = c * (-x.re * xh.re + x.im * xh.im);
    let s14 = -c * (x.re * xh.im + xh.re * x.im);
    let s23 = s14;
    let s24 = -s13;
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            s11, s12, s13, s14, //
            s12, s22, s23, s24, //
            s13, s23, s33, s34, //
            s14, s24, s34, s44,
        ],
    );
    QuadFormSpec::new(vec![1.0; 4], vec![mu * x.re, mu * x.im, -mu * xh.re, -mu * xh.im], cov)
}

/// `M_Γ(s)` for one `(x, x̂)` pair, precomputed so it can be evaluated
/// along a quadrature grid cheaply.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaMgf {
    /// `m ≠ m̂`: quadratic form of Γ₁ + Γ₂ times `(1 - sN(|x|²+|x̂|²))^{-(n_R-2)}`.
    Mismatch {
        form: CanonicalForm,
        idle_scale: f64,
        idle_count: i32,
    },
    /// `m = m̂`, `x ≠ x̂`: closed form in `d = |x - x̂|²`.
    Match { n: f64, d: f64, n_rx: i32 },
}

impl GammaMgf {
    pub fn new(x: Complex64, xh: Complex64, same_antenna: bool, n_ref: usize, n_rx: usize) -> Result<Self> {
        if n_ref == 0 {
            return Err(Error::parameter("reflector count must be at least 1"));
        }
        let n = n_ref as f64;
        if same_antenna {
            if n_rx < 1 {
                return Err(Error::parameter("need at least one receive antenna"));
            }
            let d = (x - xh).norm_sqr();
            if d == 0.0 {
                return Err(Error::parameter("same antenna and same symbol is not an error event"));
            }
            Ok(GammaMgf::Match {
                n,
                d,
                n_rx: n_rx as i32,
            })
        } else {
            if n_rx < 2 {
                return Err(Error::parameter("antenna mismatch needs at least two antennas"));
            }
            Ok(GammaMgf::Mismatch {
                form: mismatch_quadform(x, xh, n_ref)?.canonical(),
                idle_scale: n * (x.norm_sqr() + xh.norm_sqr()),
                idle_count: n_rx as i32 - 2,
            })
        }
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            GammaMgf::Mismatch {
                ref form,
                idle_scale,
                idle_count,
            } => {
                let q = form.mgf(s)?;
                if idle_count == 0 {
                    return Ok(q);
                }
                let z = one - s * idle_scale;
                if z.norm() < 1e-14 {
                    return Err(Error::Pole(format!("idle-antenna MGF pole at s = {s}")));
                }
                Ok(q * z.powi(-idle_count))
            }
            GammaMgf::Match { n, d, n_rx } => {
                let z1 = one - s * n * FOUR_MINUS_PI * d / 2.0;
                let z2 = one - s * n * d;
                if z1.norm() < 1e-14 || z2.norm() < 1e-14 {
                    return Err(Error::Pole(format!("matched-antenna MGF pole at s = {s}")));
                }
                let nc = (s * n * n * d * PI / 4.0 / z1).exp() / z1.sqrt();
                Ok(nc * z2.powi(-(n_rx - 1)))
            }
        }
    }

    /// `(1/π) ∫_0^{π/2} M_Γ(-1/(4 sin²η N0)) dη`
    pub fn pep(&self, n0: f64) -> Result<f64> {
        let f = |eta: f64| {
            let sn = eta.sin();
            let s = -1.0 / (4.0 * sn * sn * n0);
            self.eval(Complex64::new(s, 0.0)).map(|v| v.re).unwrap_or(f64::NAN)
        };
        Ok((fixed_checked(0.0, FRAC_PI_2, f, "ML PEP")? / PI).clamp(0.0, 1.0))
    }
}

/// MGF of Γ for the pair `(x → x̂)` at complex `s`.
pub fn mgf_gamma_ml(
    s: Complex64,
    x: Complex64,
    xh: Complex64,
    same_antenna: bool,
    n_ref: usize,
    n_rx: usize,
) -> Result<Complex64> {
    GammaMgf::new(x, xh, same_antenna, n_ref, n_rx)?.eval(s)
}

/// Unconditional ML pairwise error probability for unit-energy symbols.
pub fn pep_ml(x: Complex64, xh: Complex64, same_antenna: bool, n_ref: usize, n_rx: usize, es_n0: f64) -> Result<f64> {
    if !(es_n0 > 0.0 && es_n0.is_finite()) {
        return Err(Error::parameter(format!(
            "Es/N0 must be positive and finite, got {es_n0}"
        )));
    }
    GammaMgf::new(x, xh, same_antenna, n_ref, n_rx)?.pep(1.0 / es_n0)
}

/// Union bound for ML RIS-SSK, `(n_R/2)·P̄`.
pub fn bep_ml_ssk_point(n_ref: usize, n_rx: usize, es_n0: f64) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let p = pep_ml(one, one, false, n_ref, n_rx, es_n0)?;
    Ok((n_rx as f64 / 2.0 * p).clamp(0.0, 0.5))
}

/// Pairwise MGFs for every ordered symbol pair of a constellation, reused
/// across an SNR grid.
#[derive(Debug, Clone)]
pub struct SmUnionBound {
    n_rx: usize,
    order: usize,
    /// `(label x, label x̂, mismatch mgf, match mgf if x ≠ x̂)`
    pairs: Vec<(u32, u32, GammaMgf, Option<GammaMgf>)>,
}

impl SmUnionBound {
    pub fn new(c: &Constellation, n_ref: usize, n_rx: usize) -> Result<Self> {
        let norm = c.es().sqrt();
        let mut pairs = Vec::with_capacity(c.order() * c.order());
        for (a, &x) in c.points().iter().enumerate() {
            for (b, &xh) in c.points().iter().enumerate() {
                let (x, xh) = (x / norm, xh / norm);
                let mis = GammaMgf::new(x, xh, false, n_ref, n_rx)?;
                let mat = if a != b {
                    Some(GammaMgf::new(x, xh, true, n_ref, n_rx)?)
                } else {
                    None
                };
                pairs.push((a as u32, b as u32, mis, mat));
            }
        }
        Ok(Self {
            n_rx,
            order: c.order(),
            pairs,
        })
    }

    /// Union bound over all `(m, x) → (m̂, x̂)` events weighted by bit
    /// errors. The antenna sums collapse because the PEP only depends on
    /// whether `m = m̂`: `n_R` matched pairs, and `n_R(n_R-1)` mismatched
    /// pairs whose index bit errors total `n_R·(n_R/2)·log₂ n_R`.
    pub fn bep(&self, es_n0: f64) -> Result<f64> {
        if !(es_n0 > 0.0 && es_n0.is_finite()) {
            return Err(Error::parameter(format!(
                "Es/N0 must be positive and finite, got {es_n0}"
            )));
        }
        let n0 = 1.0 / es_n0;
        let nr = self.n_rx as f64;
        let index_bits = nr.log2();
        let mut total = 0.0;
        for (a, b, mis, mat) in &self.pairs {
            let d = hamming(*a, *b) as f64;
            total += mis.pep(n0)? * (nr * nr / 2.0 * index_bits + nr * (nr - 1.0) * d);
            if let Some(mat) = mat {
                total += mat.pep(n0)? * nr * d;
            }
        }
        let m = self.order as f64;
        Ok((total / (m * nr * (m * nr).log2())).clamp(0.0, 0.5))
    }
}
