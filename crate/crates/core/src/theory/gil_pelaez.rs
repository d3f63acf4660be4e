//! CDF values from characteristic functions by Gil-Pelaez inversion:
//!
//! `F_Y(y) = 1/2 - (1/π) ∫_0^∞ Im{e^{-jwy} Ψ_Y(w)} / w dw`
//!
//! The upper limit is truncated at [`UPPER_LIMIT`] and the integrand's
//! removable singularity at `w = 0` is avoided by starting at
//! [`LOWER_LIMIT`]. The integrand tends to `E[Y] - y` there, so the
//! skipped sliver `[0, LOWER_LIMIT]` is added back as its value at
//! `LOWER_LIMIT` times the width; dropping it would bias probabilities by
//! about `|E[Y]|·LOWER_LIMIT/π`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;

pub const UPPER_LIMIT: f64 = 1e3;
pub const LOWER_LIMIT: f64 = 1e-12;
/// Absolute tolerance on the inversion integral.
pub const ABS_TOL: f64 = 1e-10;
const MAX_PANELS: usize = 20_000;

const BREAKS: [f64; 17] = [
    LOWER_LIMIT,
    1e-7,
    1e-6,
    1e-5,
    1e-4,
    3e-4,
    1e-3,
    3e-3,
    1e-2,
    3e-2,
    0.1,
    0.3,
    1.0,
    3.0,
    10.0,
    100.0,
    UPPER_LIMIT,
];

/// `P(Y ≤ y)` from the characteristic function of `Y`.
pub fn gil_pelaez_cdf<F: Fn(f64) -> Complex64>(cf: F, y: f64) -> Result<f64> {
    let integrand = |w: f64| {
        let v = Complex64::new(0.0, -w * y).exp() * cf(w);
        v.im / w
    };
    let r = quadrature::adaptive(&BREAKS, integrand, ABS_TOL, MAX_PANELS).map_err(|e| match e {
        Error::Numeric { what, estimate } => Error::Numeric {
            what: format!("Gil-Pelaez inversion: {what}"),
            estimate,
        },
        other => other,
    })?;
    let sliver = integrand(LOWER_LIMIT) * LOWER_LIMIT;
    Ok((0.5 - (r.value + sliver) / std::f64::consts::PI).clamp(0.0, 1.0))
}

/// `P(Y < 0)` for a variable with a density.
pub fn gil_pelaez_prob_negative<F: Fn(f64) -> Complex64>(cf: F) -> Result<f64> {
    gil_pelaez_cdf(cf, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal_cf(mu: f64, sigma: f64) -> impl Fn(f64) -> Complex64 {
        move |w| Complex64::new(-0.5 * sigma * sigma * w * w, mu * w).exp()
    }

    #[test]
    fn symmetric_law_gives_half() {
        let p = gil_pelaez_prob_negative(normal_cf(0.0, 1.0)).unwrap();
        assert!((p - 0.5).abs() < 1e-10);
    }

    #[test]
    fn shifted_normal() {
        // Φ(-3)
        let p = gil_pelaez_prob_negative(normal_cf(3.0, 1.0)).unwrap();
        assert!((p - 1.349_898_031_630_094_6e-3).abs() < 1e-6, "{p}");
    }

    #[test]
    fn cdf_at_nonzero_point() {
        // Φ(1) for N(0,1)
        let p = gil_pelaez_cdf(normal_cf(0.0, 1.0), 1.0).unwrap();
        assert!((p - 0.841_344_746_068_542_9).abs() < 1e-8, "{p}");
    }
}
