use num_complex::Complex64;

use crate::error::{Error, Result};

/// A (possibly noncentral, possibly negated) chi-square variable
/// `±Σ_{k=1}^{n} X_k²` with `X_k ~ N(μ_k, σ²)` and `μ² = Σ μ_k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareSpec {
    pub dof: u32,
    pub sigma2: f64,
    pub mu2: f64,
    /// `-1.0` for a subtracted term, else `1.0`.
    pub sign: f64,
}

impl ChiSquareSpec {
    pub fn new(dof: u32, sigma2: f64, mu2: f64) -> Result<Self> {
        if dof == 0 {
            return Err(Error::parameter("chi-square needs at least one degree of freedom"));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::parameter(format!("sigma^2 must be positive, got {sigma2}")));
        }
        if !(mu2 >= 0.0 && mu2.is_finite()) {
            return Err(Error::parameter(format!("noncentrality must be >= 0, got {mu2}")));
        }
        Ok(Self {
            dof,
            sigma2,
            mu2,
            sign: 1.0,
        })
    }

    pub fn central(dof: u32, sigma2: f64) -> Result<Self> {
        Self::new(dof, sigma2, 0.0)
    }

    /// The same law for `-X`.
    pub fn negated(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sign * (self.dof as f64 * self.sigma2 + self.mu2)
    }

    /// `E[e^{sX}]` for complex `s`, using per-factor principal roots.
    pub fn mgf(&self, s: Complex64) -> Complex64 {
        let s = s * self.sign;
        let z = Complex64::new(1.0, 0.0) - 2.0 * s * self.sigma2;
        let half = self.dof / 2;
        let mut out = z.powi(-(half as i32));
        if self.dof % 2 == 1 {
            out /= z.sqrt();
        }
        out * (s * self.mu2 / z).exp()
    }
}

/// `Ψ(w) = (1 - 2jwσ²)^{-n/2} exp(jwμ²/(1 - 2jwσ²))`, evaluated at `-w`
/// for negated specs.
pub fn cf_chi_square(w: f64, spec: &ChiSquareSpec) -> Complex64 {
    spec.mgf(Complex64::new(0.0, w))
}
