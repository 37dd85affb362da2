//! Composite Gauss–Legendre quadrature.

use crate::special::gauss_legendre;
use crate::{c64, C64};

/// Fixed-order Gauss–Legendre rule applied on equal panels.
#[derive(Debug, Clone)]
pub struct CompositeGauss {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeGauss {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    /// Integrate a real function over `[a, b]` split into `panels` pieces.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + 0.5 * h * x);
            }
            total += 0.5 * h * s;
        }
        total
    }

    /// Complex-valued variant of [`CompositeGauss::integrate`].
    pub fn integrate_complex<F: FnMut(f64) -> C64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> C64 {
        let h = (b - a) / panels as f64;
        let mut total = c64(0.0, 0.0);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            let mut s = c64(0.0, 0.0);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += f(mid + 0.5 * h * x) * *w;
            }
            total += s * (0.5 * h);
        }
        total
    }
}
