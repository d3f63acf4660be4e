//! Moment generating function of a quadratic form `xᵀAx` of a Gaussian
//! vector `x ~ N(m, C)`:
//!
//! `M(s) = det(I - 2sAC)^{-1/2} exp(-½ mᵀ[I - (I - 2sAC)^{-1}] C^{-1} m)`
//!
//! Evaluation goes through the canonical form. With `C = LLᵀ` (Cholesky)
//! and `LᵀAL = PΛPᵀ`, the form equals `Σ_k λ_k (z_k + b_k)²` for iid
//! standard normal `z_k` and `b = PᵀL^{-1}m`, so
//!
//! `M(s) = Π_k (1 - 2sλ_k)^{-1/2} exp(sλ_k b_k² / (1 - 2sλ_k))`.
//!
//! The `λ_k` are the (real) eigenvalues of `AC`, and taking the principal
//! square root factor by factor keeps the branch continuous along the
//! imaginary axis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Diagonal sign matrix, mean vector and covariance of a Gaussian quadratic
/// form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadFormSpec {
    signs: Vec<f64>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl QuadFormSpec {
    pub fn new(signs: Vec<f64>, mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let k = signs.len();
        if k == 0 || mean.len() != k || cov.nrows() != k || cov.ncols() != k {
            return Err(Error::dimension(format!(
                "quadratic form sizes disagree: A {k}, m {}, C {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        if signs.iter().any(|&a| a != 1.0 && a != -1.0) {
            return Err(Error::parameter("A must be diagonal with entries ±1"));
        }
        let scale = cov.amax().max(f64::MIN_POSITIVE);
        for i in 0..k {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::parameter("covariance must be symmetric"));
                }
            }
        }
        if cov.clone().cholesky().is_none() {
            return Err(Error::parameter("covariance must be positive definite"));
        }
        Ok(Self {
            signs,
            mean: DVector::from_vec(mean),
            cov,
        })
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Reduces the form to independent scaled noncentral chi-square terms.
    pub fn canonical(&self) -> CanonicalForm {
        let l = self
            .cov
            .clone()
            .cholesky()
            .expect("validated positive definite")
            .unpack();
        let a = DMatrix::from_diagonal(&DVector::from_column_slice(&self.signs));
        let mut s = l.transpose() * a * &l;
        // symmetrize away rounding before the eigen solve
        s = (&s + s.transpose()) * 0.5;
        let eig = s.symmetric_eigen();
        let u = l
            .solve_lower_triangular(&self.mean)
            .expect("Cholesky factor is invertible");
        let b = eig.eigenvectors.transpose() * u;
        CanonicalForm {
            weights: eig.eigenvalues.iter().copied().collect(),
            offsets2: b.iter().map(|v| v * v).collect(),
        }
    }
}

/// `Σ_k λ_k (z_k + b_k)²` with iid standard normal `z_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub weights: Vec<f64>,
    pub offsets2: Vec<f64>,
}

impl CanonicalForm {
    pub fn mean(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.offsets2)
            .map(|(l, b2)| l * (1.0 + b2))
            .sum()
    }

    pub fn mgf(&self, s: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let mut out = one;
        for (&lambda, &b2) in self.weights.iter().zip(&self.offsets2) {
            let z = one - 2.0 * s * lambda;
            if z.norm() < 1e-14 {
                return Err(Error::Pole(format!("I - 2sAC is singular at s = {s}")));
            }
            out *= (s * lambda * b2 / z).exp() / z.sqrt();
        }
        Ok(out)
    }
}

/// Evaluates the quadratic-form MGF at complex `s`.
pub fn mgf_quadratic_form(s: Complex64, spec: &QuadFormSpec) -> Result<Complex64> {
    spec.canonical().mgf(s)
}
