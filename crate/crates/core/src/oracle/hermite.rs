//! Gauss-Hermite rules for the weight `exp(-x^2)` on the real line.

use crate::error::{invalid, Result};

const PI_M4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Rule with `n` nodes, exact for polynomials of degree `2n - 1`.
    ///
    /// Roots of the orthonormal Hermite polynomial are found by Newton
    /// iteration from asymptotic starting guesses, largest root first.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("Gauss-Hermite rule needs at least one node");
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            for _ in 0..100 {
                let (p1, p2) = orthonormal_hermite(n, z);
                let step = p1 / ((2.0 * nf).sqrt() * p2);
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            let derivative = (2.0 * nf).sqrt() * orthonormal_hermite(n, z).1;
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (derivative * derivative);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        nodes.reverse();
        weights.reverse();
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `int exp(-x^2) f(x) dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `E[f(Z)]` for a standard normal `Z`.
    pub fn expect_standard_normal(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.integrate(|x| f(std::f64::consts::SQRT_2 * x)) / std::f64::consts::PI.sqrt()
    }
}

/// Values of the orthonormal Hermite polynomials of degree `n` and `n - 1`.
fn orthonormal_hermite(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI_M4;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}
