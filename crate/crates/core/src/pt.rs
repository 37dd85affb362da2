//! Antilinear `Theta = P T` symmetry on coefficient vectors.
//!
//! `Theta psi = P conj(psi)` with `P` an involutive permutation, so
//! `Theta^2 = 1`. `[H, Theta] = 0` reads `P conj(H) P = H`.

use rand::Rng;

use crate::hilbert::{conjugate_all, spectral_distance};
use crate::linalg::eig;
use crate::{c64, CMat, CVec, Error, Result, C64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parity {
    /// `j -> dim - 1 - j`.
    LatticeReflection,
    /// `(P v)_i = v[perm[i]]`; must be an involution.
    Custom(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntilinearOp {
    perm: Vec<usize>,
}

pub fn build_pt_operator(dim: usize, parity: Parity) -> Result<AntilinearOp> {
    let perm = match parity {
        Parity::LatticeReflection => (0..dim).rev().collect(),
        Parity::Custom(p) => p,
    };
    if perm.len() != dim {
        return Err(Error::InvalidPermutation(format!("length {} for dimension {dim}", perm.len())));
    }
    let mut seen = vec![false; dim];
    for &k in &perm {
        if k >= dim || seen[k] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a permutation")));
        }
        seen[k] = true;
    }
    if perm.iter().enumerate().any(|(i, &k)| perm[k] != i) {
        return Err(Error::InvalidPermutation(format!("{perm:?} is not an involution")));
    }
    Ok(AntilinearOp { perm })
}

impl AntilinearOp {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `P conj(v)`.
    pub fn apply(&self, v: &CVec) -> CVec {
        CVec::from_iterator(self.dim(), self.perm.iter().map(|&k| v[k].conj()))
    }

    /// `P conj(H) P`.
    pub fn conjugate_matrix(&self, h: &CMat) -> CMat {
        CMat::from_fn(self.dim(), self.dim(), |r, c| h[(self.perm[r], self.perm[c])].conj())
    }
}

/// `max |P conj(H) P - H|`.
pub fn pt_defect(h: &CMat, theta: &AntilinearOp) -> Result<f64> {
    if h.nrows() != theta.dim() || h.ncols() != theta.dim() {
        return Err(Error::DimensionMismatch { expected: theta.dim(), got: h.nrows() });
    }
    Ok((theta.conjugate_matrix(h) - h).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Symmetrize a matrix: `(A + P conj(A) P) / 2`.
pub fn pt_symmetrize(a: &CMat, theta: &AntilinearOp) -> CMat {
    (a + theta.conjugate_matrix(a)) * c64(0.5, 0.0)
}

/// Random matrix with entries uniform in the unit square, then symmetrized.
pub fn random_pt_symmetric<R: Rng>(theta: &AntilinearOp, rng: &mut R) -> CMat {
    let n = theta.dim();
    let a = CMat::from_fn(n, n, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    pt_symmetrize(&a, theta)
}

/// `1 - |<u, v>| / (|u| |v|)`.
fn misalignment(u: &CVec, v: &CVec) -> f64 {
    1.0 - u.dotc(v).norm() / (u.norm() * v.norm())
}

/// Threshold of the proportionality test and the cluster diameter.
pub const PROPORTIONAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeClass {
    /// `Theta psi` is proportional to `psi`.
    Unbroken,
    /// `Theta psi` is proportional to the eigenvector of `conj(E)`.
    Broken { partner: usize },
    /// `Theta psi` lies in a degenerate eigenspace but matches no single vector.
    Cluster,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairAnalysis {
    pub eigenvalues: Vec<C64>,
    pub modes: Vec<ModeClass>,
    /// `d(spec, conj spec)`.
    pub closure_defect: f64,
    /// Largest `|Im E|` over unbroken modes.
    pub unbroken_imag: f64,
    /// Largest misalignment of `Theta psi_k` with its partner over broken pairs.
    pub swap_defect: f64,
}

impl PairAnalysis {
    pub fn unbroken(&self) -> usize {
        self.modes.iter().filter(|m| **m == ModeClass::Unbroken).count()
    }

    pub fn broken(&self) -> usize {
        self.modes.iter().filter(|m| matches!(m, ModeClass::Broken { .. })).count()
    }
}

/// Classify every eigenvector of a PT-symmetric matrix.
pub fn spectrum_pair_analysis(h: &CMat, theta: &AntilinearOp) -> Result<PairAnalysis> {
    let d = pt_defect(h, theta)?;
    if d >= 1e-10 {
        return Err(Error::NotPtSymmetric(d));
    }
    let e = eig(h)?;
    let n = e.values.len();
    let closure = spectral_distance(&e.values, &conjugate_all(&e.values))?;
    let mut modes = Vec::with_capacity(n);
    let mut unbroken_imag: f64 = 0.0;
    let mut swap: f64 = 0.0;
    for k in 0..n {
        let psi = e.vectors.column(k).into_owned();
        let tp = theta.apply(&psi);
        if misalignment(&tp, &psi) < PROPORTIONAL_TOL {
            unbroken_imag = unbroken_imag.max(e.values[k].im.abs());
            modes.push(ModeClass::Unbroken);
            continue;
        }
        let target = e.values[k].conj();
        let scale = e.values[k].norm().max(1.0);
        let cluster: Vec<usize> = (0..n).filter(|&j| (e.values[j] - target).norm() < PROPORTIONAL_TOL * scale).collect();
        let best = cluster
            .iter()
            .filter(|&&j| j != k)
            .map(|&j| (j, misalignment(&tp, &e.vectors.column(j).into_owned())))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, m)) if m < PROPORTIONAL_TOL => {
                swap = swap.max(m);
                modes.push(ModeClass::Broken { partner: j });
            }
            _ if cluster.len() > 1 => modes.push(ModeClass::Cluster),
            _ => modes.push(ModeClass::Unclassified),
        }
    }
    Ok(PairAnalysis { eigenvalues: e.values, modes, closure_defect: closure, unbroken_imag, swap_defect: swap })
}

/// For a linear `A` commuting with `H`: largest `|A psi - (psi, A psi) psi|`
/// over the unit eigenvectors of `H`. Vanishes when the spectrum of `H` is simple.
pub fn linear_symmetry_check(h: &CMat, a: &CMat) -> Result<f64> {
    if a.shape() != h.shape() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: a.nrows() });
    }
    let e = eig(h)?;
    Ok((0..e.values.len())
        .map(|k| {
            let v = e.vectors.column(k).into_owned();
            let av = a * &v;
            let mu = v.dotc(&av);
            (av - v * mu).norm()
        })
        .fold(0.0, f64::max))
}

/// Largest misalignment of `Theta psi` with `psi` over eigenvectors; nonzero
/// exactly when some mode is not a simultaneous eigenvector of `Theta`.
pub fn antilinear_contrast(h: &CMat, theta: &AntilinearOp) -> Result<f64> {
    let e = eig(h)?;
    Ok((0..e.values.len())
        .map(|k| {
            let v = e.vectors.column(k).into_owned();
            misalignment(&theta.apply(&v), &v)
        })
        .fold(0.0, f64::max))
}
