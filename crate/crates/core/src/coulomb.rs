//! One-dimensional Coulomb problem on the half axis, in its Hermitian form
//! `p^2 - a/x` and its rotated form `p^2 - i alpha/x`.
//!
//! Both share the eigenfunctions
//! `Phi_n(x; a) = exp(-a x / 2n) (a x / n) L^(1)_{n-1}(a x / n)` with
//! `E_n = -(a / 2n)^2`; the rotated branch is the substitution `a = i alpha`.
//! Along `x = exp(3 i pi / 2) s = -i s` the rotated eigenfunction equals the
//! Hermitian one with coupling `alpha`, and the kinetic term flips sign.

use std::f64::consts::PI;

use crate::error::invalid;
use crate::quad::CompositeGauss;
use crate::special::laguerre;
use crate::{c64, Error, Result, C64};

/// Rotation angle of the anti-Stokes line used for the rotated branch.
pub const THETA: f64 = 1.5 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// `H = p^2 - a/x`, `a > 0`.
    Hermitian(f64),
    /// `H = p^2 - i alpha/x`, `alpha > 0`.
    Rotated(f64),
}

impl Coupling {
    fn check(self) -> Result<Self> {
        let v = match self {
            Coupling::Hermitian(a) | Coupling::Rotated(a) => a,
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("coupling {v} must be positive")));
        }
        Ok(self)
    }

    /// The complex constant `a` in `p^2 - a/x`.
    pub fn constant(self) -> C64 {
        match self {
            Coupling::Hermitian(a) => c64(a, 0.0),
            Coupling::Rotated(alpha) => c64(0.0, alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombModel {
    pub coupling: Coupling,
    pub n_max: usize,
}

impl CoulombModel {
    pub fn new(coupling: Coupling, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(invalid("n_max must be at least 1"));
        }
        Ok(Self { coupling: coupling.check()?, n_max })
    }

    pub fn energies(&self) -> Vec<f64> {
        (1..=self.n_max).map(|n| energy(n, self.coupling)).collect()
    }
}

fn energy(n: usize, coupling: Coupling) -> f64 {
    let e = -(coupling.constant() / (2.0 * n as f64)).powi(2);
    e.re
}

/// `Phi_n(x; a)` for complex `a` and `x`.
pub fn coulomb_eigenfunction(n: usize, a: C64, x: C64) -> Result<C64> {
    if n < 1 {
        return Err(invalid("eigenfunction index starts at 1"));
    }
    let nf = n as f64;
    let y = a * x / nf;
    Ok((-a * x / (2.0 * nf)).exp() * y * laguerre(n - 1, 1.0, y))
}

/// `-(a/2n)^2` on the Hermitian branch, `+(alpha/2n)^2` on the rotated one.
pub fn coulomb_spectrum(n: usize, coupling: Coupling) -> Result<f64> {
    if n < 1 {
        return Err(invalid("level index starts at 1"));
    }
    Ok(energy(n, coupling.check()?))
}

/// Values of `Phi_n(.; a)` on a real grid.
fn sample(n: usize, a: C64, grid: &[f64]) -> Result<Vec<C64>> {
    grid.iter().map(|&x| coulomb_eigenfunction(n, a, c64(x, 0.0))).collect()
}

fn check_grid(grid: &[f64]) -> Result<f64> {
    if grid.len() < 5 {
        return Err(invalid("grid needs at least 5 nodes"));
    }
    if let Some(j) = grid.iter().position(|&x| !(x > 0.0)) {
        return Err(invalid(format!("grid node {j} at x = {} is not in (0, inf)", grid[j])));
    }
    let h = grid[1] - grid[0];
    if !(h > 0.0) || grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(invalid("grid must be uniform and increasing"));
    }
    Ok(h)
}

/// Fourth-order second derivative at interior nodes `2..len-2`.
fn second_derivative(f: &[C64], h: f64) -> Vec<C64> {
    let s = 1.0 / (12.0 * h * h);
    (2..f.len() - 2)
        .map(|j| (-f[j - 2] + f[j - 1] * 16.0 - f[j] * 30.0 + f[j + 1] * 16.0 - f[j + 2]) * s)
        .collect()
}

/// `max |(p^2 - a/x) psi_n - E psi_n|` over interior nodes of a uniform grid
/// in `(0, inf)`, with `p^2 = -d^2/dx^2` from fourth-order differences.
pub fn schrodinger_residual(n: usize, coupling: Coupling, grid: &[f64]) -> Result<f64> {
    let e = coulomb_spectrum(n, coupling)?;
    schrodinger_residual_at(n, coupling, grid, e)
}

/// As [`schrodinger_residual`] with a caller-supplied energy.
pub fn schrodinger_residual_at(n: usize, coupling: Coupling, grid: &[f64], energy: f64) -> Result<f64> {
    let h = check_grid(grid)?;
    let a = coupling.check()?.constant();
    let psi = sample(n, a, grid)?;
    let d2 = second_derivative(&psi, h);
    let worst = d2
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let j = k + 2;
            (-d - a / grid[j] * psi[j] - psi[j] * energy).norm()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Outcome of the canonical-form check for the rotated model.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalEquivalence {
    pub n: usize,
    pub alpha: f64,
    /// `E_n` of the rotated model, `(alpha/2n)^2`.
    pub energy: f64,
    /// `E_n^(0)(alpha)` of the Hermitian model with the same coupling.
    pub hermitian_energy: f64,
    /// `max |(d^2/ds^2 + alpha/s) Phi_n - E_n Phi_n|` on the check grid.
    pub residual: f64,
    /// Ratio of `psi_n(exp(i theta) s)` to `Phi_n(s; alpha)` on the grid;
    /// the largest deviation from the constant phase 1.
    pub rotation_defect: f64,
    pub flag: &'static str,
}

/// Flag attached to a canonical form whose kinetic term is negative.
pub const UNPHYSICAL_KINETIC_SIGN: &str = "unphysical_kinetic_sign";

/// Check `(-(p^c)^2 + alpha/x^c) Phi_n(.; alpha) = E_n Phi_n` on `(0.1, 20]`.
pub fn canonical_equivalence_report(n: usize, alpha: f64) -> Result<CanonicalEquivalence> {
    if !(alpha > 0.0) {
        return Err(invalid(format!("alpha = {alpha}: no bound states")));
    }
    let energy = coulomb_spectrum(n, Coupling::Rotated(alpha))?;
    let grid = uniform(0.1, 20.0, 1e-3);
    let h = grid[1] - grid[0];
    let phi = sample(n, c64(alpha, 0.0), &grid)?;
    let d2 = second_derivative(&phi, h);
    let residual = d2
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let j = k + 2;
            (d + phi[j] * (alpha / grid[j]) - phi[j] * energy).norm()
        })
        .fold(0.0, f64::max);
    let rot = c64(0.0, THETA).exp();
    let mut rotation_defect: f64 = 0.0;
    for (x, p) in grid.iter().zip(&phi) {
        let psi = coulomb_eigenfunction(n, c64(0.0, alpha), rot * *x)?;
        rotation_defect = rotation_defect.max((psi - p).norm());
    }
    Ok(CanonicalEquivalence {
        n,
        alpha,
        energy,
        hermitian_energy: coulomb_spectrum(n, Coupling::Hermitian(alpha))?,
        residual,
        rotation_defect,
        flag: UNPHYSICAL_KINETIC_SIGN,
    })
}

/// `(lo, lo + h, ..., hi]` stepping by `h` from `lo`.
pub fn uniform(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let m = ((hi - lo) / h).round() as usize;
    (0..=m).map(|j| lo + h * j as f64).collect()
}

/// `|psi_n(r e^{i theta})|` of the rotated branch.
pub fn rotated_modulus(n: usize, alpha: f64, r: f64, theta: f64) -> Result<f64> {
    let x = c64(0.0, theta).exp() * r;
    Ok(coulomb_eigenfunction(n, c64(0.0, alpha), x)?.norm())
}

/// Decay along the anti-Stokes line versus growth along the opposite ray.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesSample {
    pub r: f64,
    pub anti_stokes: f64,
    pub opposite: f64,
}

pub fn anti_stokes_profile(n: usize, alpha: f64, radii: &[f64]) -> Result<Vec<StokesSample>> {
    radii
        .iter()
        .map(|&r| {
            Ok(StokesSample {
                r,
                anti_stokes: rotated_modulus(n, alpha, r, THETA)?,
                opposite: rotated_modulus(n, alpha, r, 0.5 * PI)?,
            })
        })
        .collect()
}

/// Radius `2 n^2 / alpha` where the envelope `r^n e^{-alpha r / 2n}` of
/// `|psi_n|` along the anti-Stokes line peaks; decay sets in beyond it.
pub fn envelope_peak(n: usize, alpha: f64) -> f64 {
    2.0 * (n * n) as f64 / alpha
}

/// True when `|psi|` decreases along `3 pi / 2` and increases along `pi / 2`
/// over increasing radii, and the two moduli separate.
pub fn anti_stokes_check(n: usize, alpha: f64, radii: &[f64]) -> Result<bool> {
    let prof = anti_stokes_profile(n, alpha, radii)?;
    let mono = prof.windows(2).all(|w| w[1].anti_stokes < w[0].anti_stokes && w[1].opposite > w[0].opposite);
    Ok(mono && prof.iter().all(|s| s.anti_stokes < s.opposite))
}

/// `int_0^inf Phi_n Phi_m dx` on the Hermitian branch (real coupling).
pub fn overlap(n: usize, m: usize, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(invalid("overlap needs a > 0"));
    }
    if n < 1 || m < 1 {
        return Err(Error::InvalidArgument("level index starts at 1".into()));
    }
    // integrand ~ poly * exp(-a x (1/2n + 1/2m)); cut where exp < 1e-16 with margin
    let rate = a * (0.5 / n as f64 + 0.5 / m as f64);
    let x_max = (60.0 + 4.0 * (n + m) as f64) / rate;
    let q = CompositeGauss::new(16);
    let panels = (x_max.ceil() as usize).max(64);
    let ac = c64(a, 0.0);
    Ok(q.integrate(0.0, x_max, panels, |x| {
        let u = coulomb_eigenfunction(n, ac, c64(x, 0.0)).map(|z| z.re).unwrap_or(f64::NAN);
        let v = coulomb_eigenfunction(m, ac, c64(x, 0.0)).map(|z| z.re).unwrap_or(f64::NAN);
        u * v
    }))
}
