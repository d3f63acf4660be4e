//! Error probabilities of the greedy (maximum-energy) receivers.
//!
//! All expressions rely on the large-N Gaussian approximation of the
//! aligned gain `B = Σβ_{m,i} ~ N(N√π/2, N(4-π)/4)` and of the
//! misaligned gain `B̂ ~ CN(0, N)`. Symbols are normalized to unit
//! average energy, so `N0 = 1/(Es/N0)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::chi_square::ChiSquareSpec;
use super::gil_pelaez::gil_pelaez_prob_negative;
use super::quadform::QuadFormSpec;
use super::BoundMode;
use crate::error::{Error, Result};
use crate::modulation::{Constellation, ConstellationKind};
use crate::quadrature::fixed_checked;

const FOUR_MINUS_PI: f64 = 4.0 - PI;

fn check_inputs(n_ref: usize, es_n0: f64) -> Result<()> {
    if n_ref == 0 {
        return Err(Error::parameter("reflector count must be at least 1"));
    }
    if !(es_n0 > 0.0 && es_n0.is_finite()) {
        return Err(Error::parameter(format!(
            "Es/N0 must be positive and finite, got {es_n0}"
        )));
    }
    Ok(())
}

/// The three chi-square terms of `Y = Y₁ + Y₂ - Y₃` for greedy RIS-SSK:
/// `Y₁` the squared in-phase part of the aligned antenna, `Y₂` its
/// quadrature noise, `Y₃` the energy at a competing antenna.
pub fn ssk_greedy_terms(n_ref: usize, es_n0: f64) -> Result<[ChiSquareSpec; 3]> {
    check_inputs(n_ref, es_n0)?;
    let n = n_ref as f64;
    let n0 = 1.0 / es_n0;
    let mu = n * PI.sqrt() / 2.0;
    Ok([
        ChiSquareSpec::new(1, n * FOUR_MINUS_PI / 4.0 + n0 / 2.0, mu * mu)?,
        ChiSquareSpec::central(1, n0 / 2.0)?,
        ChiSquareSpec::central(2, (n + n0) / 2.0)?.negated(),
    ])
}

/// Closed-form bound `P(Y₁ - Y₃ < 0)` that drops the quadrature noise term:
///
/// `((1 + NEs/N0) / (2 + NEs(6-π)/(2N0)))^{1/2}
///   · exp(-(N²πEs/N0) / (8 + 2NEs(6-π)/N0))`
pub fn pep_ssk_greedy_bound(n_ref: usize, es_n0: f64) -> Result<f64> {
    check_inputs(n_ref, es_n0)?;
    let n = n_ref as f64;
    let g = n * es_n0;
    let pre = ((1.0 + g) / (2.0 + g * (6.0 - PI) / 2.0)).sqrt();
    let expo = -(n * n * PI * es_n0) / (8.0 + 2.0 * g * (6.0 - PI));
    Ok((pre * expo.exp()).min(1.0))
}

/// Pairwise error probability of greedy RIS-SSK index detection.
pub fn pep_ssk_greedy(n_ref: usize, es_n0: f64, mode: BoundMode) -> Result<f64> {
    match mode {
        BoundMode::UpperBound => pep_ssk_greedy_bound(n_ref, es_n0),
        BoundMode::Exact => {
            let terms = ssk_greedy_terms(n_ref, es_n0)?;
            gil_pelaez_prob_negative(|w| terms.iter().map(|t| t.mgf(Complex64::new(0.0, w))).product())
        }
    }
}

/// Union bound `(n_R/2)·PEP`, clamped to `[0, 0.5]`.
pub fn bep_ssk_greedy_point(n_ref: usize, n_rx: usize, es_n0: f64, mode: BoundMode) -> Result<f64> {
    let pep = pep_ssk_greedy(n_ref, es_n0, mode)?;
    Ok((n_rx as f64 / 2.0 * pep).clamp(0.0, 0.5))
}

/// Quadratic form `D = B₁² + B₂² - B₃² - B₄²` whose negative event is an
/// index error given the unit-energy-normalized symbol `x`.
pub fn sm_index_quadform(x: Complex64, n_ref: usize, es_n0: f64) -> Result<QuadFormSpec> {
    check_inputs(n_ref, es_n0)?;
    let n = n_ref as f64;
    let n0 = 1.0 / es_n0;
    let k = n * FOUR_MINUS_PI / 4.0;
    let mean_scale = n * PI.sqrt() / 2.0;
    let competitor = (n * x.norm_sqr() + n0) / 2.0;
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            k * x.re * x.re + n0 / 2.0,
            k * x.re * x.im,
            0.0,
            0.0,
            k * x.re * x.im,
            k * x.im * x.im + n0 / 2.0,
            0.0,
            0.0,
            0.0,
            0.0,
            competitor,
            0.0,
            0.0,
            0.0,
            0.0,
            competitor,
        ],
    );
    QuadFormSpec::new(
        vec![1.0, 1.0, -1.0, -1.0],
        vec![mean_scale * x.re, mean_scale * x.im, 0.0, 0.0],
        cov,
    )
}

/// Index-error PEP of greedy RIS-SM conditioned on symbol `x` (unit
/// average energy).
pub fn pep_sm_index_given(x: Complex64, n_ref: usize, es_n0: f64) -> Result<f64> {
    let form = sm_index_quadform(x, n_ref, es_n0)?.canonical();
    gil_pelaez_prob_negative(|w| {
        form.mgf(Complex64::new(0.0, w))
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    })
}

/// Index-error PEP of greedy RIS-SM averaged over the constellation.
/// BPSK reduces to the RIS-SSK value.
pub fn pep_sm_index_greedy(c: &Constellation, n_ref: usize, es_n0: f64) -> Result<f64> {
    if c.order() == 2 && c.kind() == ConstellationKind::Psk {
        return pep_ssk_greedy(n_ref, es_n0, BoundMode::Exact);
    }
    let norm = c.es().sqrt();
    let mut total = 0.0;
    for &x in c.points() {
        total += pep_sm_index_given(x / norm, n_ref, es_n0)?;
    }
    Ok(total / c.order() as f64)
}

/// MGF of the instantaneous SNR `γ = Es B²/N0` at the aligned antenna:
///
/// `(1 - sN(4-π)Es/(2N0))^{-1/2} exp((sN²πEs/(4N0)) / (1 - sN(4-π)Es/(2N0)))`
///
/// Defined for `s` below the pole at `2N0/(N(4-π)Es)`.
pub fn mgf_snr(s: f64, n_ref: usize, es_n0: f64) -> Result<f64> {
    check_inputs(n_ref, es_n0)?;
    let n = n_ref as f64;
    let den = 1.0 - s * n * FOUR_MINUS_PI * es_n0 / 2.0;
    if den <= 0.0 {
        return Err(Error::Pole(format!(
            "SNR MGF evaluated at or beyond its pole (s = {s})"
        )));
    }
    Ok(den.powf(-0.5) * ((s * n * n * PI * es_n0 / 4.0) / den).exp())
}

/// Symbol error probability of the aligned-antenna link `r = Bx + n`,
/// for BPSK and square QAM (QPSK is treated as 4-QAM).
pub fn sep_conditioned(c: &Constellation, n_ref: usize, es_n0: f64) -> Result<f64> {
    check_inputs(n_ref, es_n0)?;
    let m = c.order();
    if m == 2 {
        let f = |eta: f64| {
            let s = eta.sin();
            mgf_snr(-1.0 / (s * s), n_ref, es_n0).unwrap_or(0.0)
        };
        return Ok(fixed_checked(0.0, FRAC_PI_2, f, "BPSK SEP")? / PI);
    }
    let square = m.trailing_zeros().is_multiple_of(2);
    let usable = match c.kind() {
        ConstellationKind::Qam => square,
        ConstellationKind::Psk => m == 4,
    };
    if !usable {
        return Err(Error::parameter(format!(
            "conditional SEP is available for BPSK and square QAM only, got {}-{}",
            m,
            c.kind()
        )));
    }
    let mf = m as f64;
    let g = 3.0 / (2.0 * (mf - 1.0));
    let f = |eta: f64| {
        let s = eta.sin();
        mgf_snr(-g / (s * s), n_ref, es_n0).unwrap_or(0.0)
    };
    let q = 1.0 - 1.0 / mf.sqrt();
    let first = fixed_checked(0.0, FRAC_PI_2, f, "QAM SEP")?;
    let second = fixed_checked(0.0, FRAC_PI_4, f, "QAM SEP")?;
    Ok((4.0 / PI * q * first - 4.0 / PI * q * q * second).clamp(0.0, 1.0))
}

/// Approximate BEP of greedy RIS-SM,
/// `P_b ≈ P_c·P_s/log₂(M n_R) + 0.5·P_e`, with the union bound
/// `P_e ≤ (n_R - 1)·P̄` clamped to `[0, 1]`.
pub fn bep_sm_greedy_point(c: &Constellation, n_ref: usize, n_rx: usize, es_n0: f64) -> Result<f64> {
    let pep = pep_sm_index_greedy(c, n_ref, es_n0)?;
    let pe = ((n_rx as f64 - 1.0) * pep).clamp(0.0, 1.0);
    let pc = 1.0 - pe;
    let ps = sep_conditioned(c, n_ref, es_n0)?;
    let bits = ((c.order() * n_rx) as f64).log2();
    Ok((pc * ps / bits + 0.5 * pe).clamp(0.0, 0.5))
}
