//! Shared helpers for the integration suites: reference special functions
//! and sample statistics written independently of the library.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// A generator unrelated to the library's own stream derivation.
pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Modified Bessel function of the first kind by its power series.
pub fn bessel_i(nu: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(nu as i32) / (1..=nu).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200u32 {
        term *= half * half / (f64::from(k) * f64::from(k + nu));
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    (mean(xs), (variance(xs) / xs.len() as f64).sqrt())
}

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Gaussian tail `Q(x)`, accurate deep into the tail.
pub fn q_func(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

pub fn phi(x: f64) -> f64 {
    q_func(-x)
}

pub fn std_normal<R: rand::Rng + ?Sized>(r: &mut R) -> f64 {
    r.sample(rand_distr::StandardNormal)
}

/// Mean and standard error of complex samples, per component.
pub fn complex_mean_se(re: &[f64], im: &[f64]) -> (num_complex::Complex64, f64, f64) {
    let (mr, sr) = mean_se(re);
    let (mi, si) = mean_se(im);
    (num_complex::Complex64::new(mr, mi), sr, si)
}

/// Draws from `N(mean, cov)` through an independent Cholesky factor.
pub struct Mvn {
    mean: nalgebra::DVector<f64>,
    chol: nalgebra::DMatrix<f64>,
}

impl Mvn {
    pub fn new(mean: Vec<f64>, cov: nalgebra::DMatrix<f64>) -> Self {
        let chol = nalgebra::Cholesky::new(cov)
            .expect("covariance not positive definite")
            .l();
        Self {
            mean: nalgebra::DVector::from_vec(mean),
            chol,
        }
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, r: &mut R) -> nalgebra::DVector<f64> {
        let z = nalgebra::DVector::from_iterator(self.mean.len(), (0..self.mean.len()).map(|_| std_normal(r)));
        &self.mean + &self.chol * z
    }
}
