//! Gauss–Legendre quadrature: a fixed rule with a node-doubling check and a
//! globally adaptive integrator for oscillatory semi-infinite integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on P_n from Chebyshev-like
    /// initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule(n: usize) -> &'static GaussLegendre {
    static G10: OnceLock<GaussLegendre> = OnceLock::new();
    static G20: OnceLock<GaussLegendre> = OnceLock::new();
    static G256: OnceLock<GaussLegendre> = OnceLock::new();
    static G512: OnceLock<GaussLegendre> = OnceLock::new();
    match n {
        10 => G10.get_or_init(|| GaussLegendre::new(10)),
        20 => G20.get_or_init(|| GaussLegendre::new(20)),
        256 => G256.get_or_init(|| GaussLegendre::new(256)),
        512 => G512.get_or_init(|| GaussLegendre::new(512)),
        _ => unreachable!("no cached rule with {n} nodes"),
    }
}

/// Node count of the fixed rule used for the finite-angle integrals.
pub const FIXED_NODES: usize = 256;

/// Relative change tolerated when the fixed rule's node count is doubled.
pub const DOUBLING_RTOL: f64 = 1e-8;

/// Integrates a smooth integrand over a finite interval with the 256-node
/// rule and verifies the value against the 512-node rule.
pub fn fixed_checked<F: Fn(f64) -> f64>(a: f64, b: f64, f: F, what: &str) -> Result<f64> {
    let coarse = rule(FIXED_NODES).integrate(a, b, &f);
    let fine = rule(2 * FIXED_NODES).integrate(a, b, &f);
    if !coarse.is_finite() || !fine.is_finite() {
        return Err(Error::Numeric {
            what: format!("{what}: non-finite integrand"),
            estimate: f64::INFINITY,
        });
    }
    let diff = (fine - coarse).abs();
    if diff > DOUBLING_RTOL * fine.abs().max(1e-300) {
        return Err(Error::Numeric {
            what: format!("{what}: node doubling changed the value"),
            estimate: diff,
        });
    }
    Ok(fine)
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn panel<F: Fn(f64) -> f64>(a: f64, b: f64, f: &F) -> Panel {
    let lo = rule(10).integrate(a, b, f);
    let hi = rule(20).integrate(a, b, f);
    let error = if lo.is_finite() && hi.is_finite() {
        (hi - lo).abs()
    } else {
        f64::INFINITY
    };
    Panel { a, b, value: hi, error }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Globally adaptive Gauss–Legendre (10/20-point pair) integration over
/// the panels delimited by `breaks`, bisecting the worst panel until the
/// summed error estimate falls below `abs_tol`.
pub fn adaptive<F: Fn(f64) -> f64>(breaks: &[f64], f: F, abs_tol: f64, max_panels: usize) -> Result<Adaptive> {
    if breaks.len() < 2 {
        return Err(Error::dimension("adaptive quadrature needs at least one panel"));
    }
    let mut heap: BinaryHeap<Panel> = breaks.windows(2).map(|w| panel(w[0], w[1], &f)).collect();
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        if total_err <= abs_tol {
            let value = heap.iter().map(|p| p.value).sum();
            return Ok(Adaptive {
                value,
                error: total_err,
                panels: heap.len(),
            });
        }
        if heap.len() >= max_panels || !total_err.is_finite() {
            return Err(Error::Numeric {
                what: format!("adaptive quadrature stopped after {} panels", heap.len()),
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(panel(worst.a, mid, &f));
        heap.push(panel(mid, worst.b, &f));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 10, 20, 256, 512] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n={n} sum={s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(5);
        // ∫_0^2 x^9 dx = 2^10 / 10
        let v = g.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 102.4).abs() < 1e-10);
    }

    #[test]
    fn fixed_rule_integrates_sin() {
        let v = fixed_checked(0.0, PI, f64::sin, "sin").unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // ∫_0^∞ 1/(1+x^2) = π/2, truncated at 1e6 loses 1e-6
        let breaks = [0.0, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6];
        let r = adaptive(&breaks, |x| 1.0 / (1.0 + x * x), 1e-12, 5000).unwrap();
        assert!((r.value - (PI / 2.0 - 1e-6)).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let err = adaptive(&[0.0, 1.0], |x| (1.0 / x).sin(), 1e-14, 8).unwrap_err();
        assert!(err.is_numeric());
    }
}
