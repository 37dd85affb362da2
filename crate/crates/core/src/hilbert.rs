//! Operators in weighted orthogonal bases.
//!
//! A coefficient vector `f` represents `sum_n f_n psi_n`. The scalar product
//! is `(f, g) = sum_n w_n conj(f_n) g_n` with positive weights `w_n`, i.e.
//! the basis vectors are declared mutually orthogonal with squared norms
//! `w_n`. A matrix acts on coefficient vectors from the left, so column `m`
//! holds the coefficients of `A psi_m`.
//!
//! With that convention the adjoint is fixed once:
//!
//! ```text
//! (A‡)_{mk} = (w_k / w_m) conj(a_{km})
//! ```
//!
//! which is the unique matrix with `(A‡ f, g) = (f, A g)` for all `f, g`.

use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::{linalg, Error, Result, C64, CMat};

/// Which coefficient basis a matrix is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    /// Rescaled eigenfunctions of a model Hamiltonian.
    HatPsi,
    /// Two-term combinations of hat-basis vectors (domain of a canonical position).
    Xi,
    /// Nodal values on a real grid.
    Grid,
    /// Lattice sites.
    Lattice,
}

impl std::fmt::Display for BasisTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BasisTag::HatPsi => "hat_psi",
            BasisTag::Xi => "xi",
            BasisTag::Grid => "grid",
            BasisTag::Lattice => "lattice",
        };
        f.write_str(s)
    }
}

/// Default truncation buffer `max(2, N/4)`.
pub fn default_bulk_buffer(dim: usize) -> usize {
    (dim / 4).max(2)
}

/// Coefficient space with a diagonal positive metric.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBasisSpace {
    weights: Vec<f64>,
    labels: Option<Vec<C64>>,
    bulk_buffer: usize,
}

impl WeightedBasisSpace {
    /// Space of dimension `dim` with the given weights and truncation buffer.
    pub fn new(dim: usize, weights: Vec<f64>, bulk_buffer: usize) -> Result<Self> {
        if dim < 2 {
            return Err(invalid(format!("dimension {dim} < 2")));
        }
        if weights.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: weights.len() });
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::NonPositiveWeight { index, value });
        }
        if bulk_buffer >= dim {
            return Err(Error::BulkBuffer { buffer: bulk_buffer, dim });
        }
        Ok(Self { weights, labels: None, bulk_buffer })
    }

    /// Unit weights.
    pub fn orthonormal(dim: usize, bulk_buffer: usize) -> Result<Self> {
        Self::new(dim, vec![1.0; dim], bulk_buffer)
    }

    /// Attach eigenvalue labels `E_n`.
    pub fn with_labels(mut self, labels: Vec<C64>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[C64]> {
        self.labels.as_deref()
    }

    pub fn bulk_buffer(&self) -> usize {
        self.bulk_buffer
    }

    /// Largest index for which infinite-dimensional identities are asserted.
    pub fn bulk_last(&self) -> usize {
        self.dim() - 1 - self.bulk_buffer
    }

    /// `sum_n w_n conj(f_n) g_n`.
    pub fn inner(&self, f: &[C64], g: &[C64]) -> Result<C64> {
        if f.len() != self.dim() || g.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: f.len().min(g.len()) });
        }
        Ok(self.weights.iter().zip(f.iter().zip(g)).map(|(w, (a, b))| a.conj() * b * *w).sum())
    }

    /// Diagonal operator built from the labels (the Hamiltonian in its own eigenbasis).
    pub fn label_operator(&self) -> Option<OperatorRep> {
        self.labels.as_ref().map(|e| OperatorRep {
            matrix: CMat::from_diagonal(&nalgebra::DVector::from_column_slice(e)),
            basis: BasisTag::HatPsi,
            bandwidth: Some(0),
        })
    }
}

/// Dense operator matrix with its basis tag.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorRep {
    matrix: CMat,
    basis: BasisTag,
    bandwidth: Option<usize>,
}

impl OperatorRep {
    /// Square, finite matrix.
    pub fn new(matrix: CMat, basis: BasisTag) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
        }
        for c in 0..matrix.ncols() {
            for r in 0..matrix.nrows() {
                let z = matrix[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self { matrix, basis, bandwidth: None })
    }

    /// Declare a band structure; every entry outside it must be exactly zero.
    pub fn with_bandwidth(mut self, k: usize) -> Result<Self> {
        let n = self.dim();
        for c in 0..n {
            for r in 0..n {
                if r.abs_diff(c) > k && self.matrix[(r, c)] != C64::new(0.0, 0.0) {
                    return Err(Error::Bandwidth { row: r, col: c, bandwidth: k });
                }
            }
        }
        self.bandwidth = Some(k);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn bandwidth(&self) -> Option<usize> {
        self.bandwidth
    }

    /// Adjoint with respect to the weighted scalar product of `space`.
    pub fn adjoint_in(&self, space: &WeightedBasisSpace) -> Result<OperatorRep> {
        adjoint_in_space(self, space)
    }
}

fn check_dim(a: &OperatorRep, s: &WeightedBasisSpace) -> Result<()> {
    if a.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: a.dim() });
    }
    Ok(())
}

/// Build a weighted space; `dim` must equal the number of weights.
pub fn build_weighted_space(dim: usize, weights: &[f64], bulk_buffer: usize) -> Result<WeightedBasisSpace> {
    WeightedBasisSpace::new(dim, weights.to_vec(), bulk_buffer)
}

/// Weighted adjoint of a raw matrix: `W^{-1} A^† W`.
pub fn weighted_adjoint(a: &CMat, weights: &[f64]) -> CMat {
    let n = a.nrows();
    CMat::from_fn(n, n, |m, k| a[(k, m)].conj() * (weights[k] / weights[m]))
}

/// `A‡` with `(A‡)_{mk} = (w_k / w_m) conj(a_{km})`.
pub fn adjoint_in_space(a: &OperatorRep, space: &WeightedBasisSpace) -> Result<OperatorRep> {
    check_dim(a, space)?;
    Ok(OperatorRep {
        matrix: weighted_adjoint(&a.matrix, space.weights()),
        basis: a.basis,
        bandwidth: a.bandwidth,
    })
}

/// Max over index pairs of `|(e_n, A e_m) - (A e_n, e_m)|` in the weighted product.
pub fn weighted_hermiticity_defect(a: &CMat, weights: &[f64], last: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 0..=last {
        for m in 0..=last {
            let lhs = a[(n, m)] * weights[n];
            let rhs = a[(m, n)].conj() * weights[m];
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// Hermiticity defect, optionally restricted to the truncation bulk.
pub fn hermiticity_defect(a: &OperatorRep, space: &WeightedBasisSpace, bulk_only: bool) -> Result<f64> {
    check_dim(a, space)?;
    let last = if bulk_only { space.bulk_last() } else { a.dim() - 1 };
    Ok(weighted_hermiticity_defect(&a.matrix, space.weights(), last))
}

/// `AB - BA`; refuses to mix bases.
pub fn commutator(a: &OperatorRep, b: &OperatorRep) -> Result<OperatorRep> {
    if a.basis != b.basis {
        return Err(Error::BasisMismatch { left: a.basis.to_string(), right: b.basis.to_string() });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(OperatorRep {
        matrix: &a.matrix * &b.matrix - &b.matrix * &a.matrix,
        basis: a.basis,
        bandwidth: match (a.bandwidth, b.bandwidth) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        },
    })
}

fn check_weights(w: &[f64]) -> Result<()> {
    match w.iter().enumerate().find(|(_, x)| !(**x > 0.0) || !x.is_finite()) {
        Some((index, &value)) => Err(Error::NonPositiveWeight { index, value }),
        None => Ok(()),
    }
}

/// Re-express `A` after rescaling the basis from weights `old` to `new`.
///
/// With `c_n = sqrt(old_n / new_n)` the new basis vectors are `psi_n / c_n`
/// and coefficient vectors map as `f -> diag(c) f`, so the matrix becomes
/// `diag(c) A diag(c)^{-1}`. An operator Hermitian for `old` is Hermitian for
/// `new`, and the spectrum is unchanged.
pub fn rescale_basis(a: &OperatorRep, old: &[f64], new: &[f64]) -> Result<OperatorRep> {
    check_weights(old)?;
    check_weights(new)?;
    let n = a.dim();
    if old.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: old.len() });
    }
    if new.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: new.len() });
    }
    let c: Vec<f64> = old.iter().zip(new).map(|(o, w)| (o / w).sqrt()).collect();
    let matrix = CMat::from_fn(n, n, |r, k| a.matrix[(r, k)] * (c[r] / c[k]));
    Ok(OperatorRep { matrix, basis: a.basis, bandwidth: a.bandwidth })
}

/// Eigenvalues of the dense matrix.
pub fn spectrum(a: &OperatorRep) -> Result<Vec<C64>> {
    linalg::eigenvalues(&a.matrix)
}

/// Greedy nearest-neighbour matching distance between two multisets.
///
/// Each element of `s1`, in index order, is paired with the closest unused
/// element of `s2` (lowest index on ties). Returns the largest pair
/// distance. Zero iff the multisets coincide.
pub fn spectral_distance(s1: &[C64], s2: &[C64]) -> Result<f64> {
    if s1.len() != s2.len() {
        return Err(Error::DimensionMismatch { expected: s1.len(), got: s2.len() });
    }
    let mut used = vec![false; s2.len()];
    let mut worst: f64 = 0.0;
    for a in s1 {
        let mut best: Option<(usize, f64)> = None;
        for (j, b) in s2.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (a - b).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.expect("sizes checked");
        used[j] = true;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Conjugate every element.
pub fn conjugate_all(s: &[C64]) -> Vec<C64> {
    s.iter().map(|z| z.conj()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{c64, I};

    fn op(rows: usize, data: &[C64]) -> OperatorRep {
        OperatorRep::new(CMat::from_row_slice(rows, rows, data), BasisTag::HatPsi).unwrap()
    }

    fn z(x: f64) -> C64 {
        c64(x, 0.0)
    }

    #[test]
    fn orthonormal_space_products() {
        let s = build_weighted_space(3, &[1.0, 1.0, 1.0], 0).unwrap();
        let e0 = [z(1.0), z(0.0), z(0.0)];
        let e1 = [z(0.0), z(1.0), z(0.0)];
        assert_eq!(s.inner(&e0, &e0).unwrap(), z(1.0));
        assert_eq!(s.inner(&e0, &e1).unwrap(), z(0.0));
    }

    #[test]
    fn weighted_norm() {
        let s = build_weighted_space(2, &[1.0, 4.0], 0).unwrap();
        let e1 = [z(0.0), z(1.0)];
        assert_eq!(s.inner(&e1, &e1).unwrap(), z(4.0));
    }

    #[test]
    fn rejects_bad_weights_and_buffer() {
        let e = build_weighted_space(2, &[1.0, -1.0], 0).unwrap_err();
        assert_eq!(e, Error::NonPositiveWeight { index: 1, value: -1.0 });
        assert_eq!(e.to_string(), "weight 1 non-positive (-1)");
        assert!(matches!(build_weighted_space(2, &[1.0, 1.0], 2), Err(Error::BulkBuffer { .. })));
        assert!(build_weighted_space(1, &[1.0], 0).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let a = op(2, &[z(0.0), z(1.0), z(0.0), z(0.0)]);
        let flat = build_weighted_space(2, &[1.0, 1.0], 0).unwrap();
        let adj = adjoint_in_space(&a, &flat).unwrap();
        assert_eq!(adj.matrix(), op(2, &[z(0.0), z(0.0), z(1.0), z(0.0)]).matrix());

        let w = build_weighted_space(2, &[1.0, 4.0], 0).unwrap();
        let adj = adjoint_in_space(&a, &w).unwrap();
        assert_eq!(adj.matrix(), op(2, &[z(0.0), z(0.0), z(0.25), z(0.0)]).matrix());
        let back = adjoint_in_space(&adj, &w).unwrap();
        assert_eq!(back.matrix(), a.matrix());
    }

    #[test]
    fn adjoint_dimension_mismatch() {
        let a = op(2, &[z(0.0); 4]);
        let s = build_weighted_space(3, &[1.0; 3], 0).unwrap();
        assert!(matches!(adjoint_in_space(&a, &s), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hermiticity_defect_examples() {
        let s = build_weighted_space(3, &[1.0; 3], 0).unwrap();
        let d = op(3, &[z(1.0), z(0.0), z(0.0), z(0.0), z(2.0), z(0.0), z(0.0), z(0.0), z(3.0)]);
        assert_eq!(hermiticity_defect(&d, &s, false).unwrap(), 0.0);
        let s2 = build_weighted_space(2, &[1.0; 2], 0).unwrap();
        let a = op(2, &[z(0.0), I, I, z(0.0)]);
        assert!((hermiticity_defect(&a, &s2, false).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let sx = op(2, &[z(0.0), z(1.0), z(1.0), z(0.0)]);
        let sy = op(2, &[z(0.0), -I, I, z(0.0)]);
        let c = commutator(&sx, &sy).unwrap();
        assert_eq!(c.matrix(), op(2, &[2.0 * I, z(0.0), z(0.0), -2.0 * I]).matrix());
        assert!(linalg::max_abs(commutator(&sx, &sx).unwrap().matrix()) == 0.0);
        let xi = OperatorRep::new(sx.matrix().clone(), BasisTag::Xi).unwrap();
        assert!(matches!(commutator(&sx, &xi), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn rescale_examples() {
        let a = op(2, &[z(0.0), z(1.0), z(0.0), z(0.0)]);
        let same = rescale_basis(&a, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(same.matrix(), a.matrix());
        // c = (1, 1/2): entry (0,1) picks up c_0 / c_1 = 2
        let r = rescale_basis(&a, &[1.0, 1.0], &[1.0, 4.0]).unwrap();
        assert_eq!(r.matrix(), op(2, &[z(0.0), z(2.0), z(0.0), z(0.0)]).matrix());
        let d = op(2, &[z(3.0), z(0.0), z(0.0), I]);
        let rd = rescale_basis(&d, &[1.0, 2.0], &[5.0, 0.1]).unwrap();
        assert_eq!(rd.matrix(), d.matrix());
        assert!(rescale_basis(&a, &[1.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn rescale_carries_hermiticity_between_weights() {
        // Hermitian for weights (1, 4): w_n a_nm = conj(w_m a_mn)
        let a = op(2, &[z(1.0), c64(4.0, 2.0), c64(1.0, -0.5), z(-3.0)]);
        let old = build_weighted_space(2, &[1.0, 4.0], 0).unwrap();
        assert!(hermiticity_defect(&a, &old, false).unwrap() < 1e-15);
        let new = build_weighted_space(2, &[2.0, 0.5], 0).unwrap();
        let r = rescale_basis(&a, old.weights(), new.weights()).unwrap();
        assert!(hermiticity_defect(&r, &new, false).unwrap() < 1e-14);
    }

    #[test]
    fn spectrum_examples() {
        let d = op(3, &[z(1.0), z(0.0), z(0.0), z(0.0), z(2.0), z(0.0), z(0.0), z(0.0), z(3.0)]);
        let s = spectrum(&d).unwrap();
        assert!(spectral_distance(&s, &[z(1.0), z(2.0), z(3.0)]).unwrap() < 1e-14);
        let nil = op(2, &[z(0.0), z(1.0), z(0.0), z(0.0)]);
        let s = spectrum(&nil).unwrap();
        assert!(s.iter().all(|e| e.norm() == 0.0));
        // ring with hopping -1/2: E_k = -cos(2 pi k / 4)
        let h = -0.5;
        let ring = op(4, &[
            z(0.0), z(h), z(0.0), z(h),
            z(h), z(0.0), z(h), z(0.0),
            z(0.0), z(h), z(0.0), z(h),
            z(h), z(0.0), z(h), z(0.0),
        ]);
        let s = spectrum(&ring).unwrap();
        assert!(spectral_distance(&s, &[z(-1.0), z(0.0), z(0.0), z(1.0)]).unwrap() < 1e-14);
    }

    #[test]
    fn spectral_distance_examples() {
        assert_eq!(spectral_distance(&[z(1.0), I], &[z(1.0), I]).unwrap(), 0.0);
        assert_eq!(spectral_distance(&[I, z(1.0)], &[z(1.0), I]).unwrap(), 0.0);
        assert_eq!(spectral_distance(&[z(0.0)], &[z(1.0)]).unwrap(), 1.0);
        assert!(spectral_distance(&[z(0.0)], &[z(1.0), z(2.0)]).is_err());
    }

    #[test]
    fn operator_validation() {
        let mut m = CMat::zeros(2, 2);
        m[(1, 0)] = c64(f64::NAN, 0.0);
        assert_eq!(OperatorRep::new(m, BasisTag::Grid), Err(Error::NonFinite { row: 1, col: 0 }));
        let mut t = CMat::zeros(3, 3);
        t[(0, 2)] = z(1.0);
        let o = OperatorRep::new(t, BasisTag::Grid).unwrap();
        assert!(matches!(o.clone().with_bandwidth(1), Err(Error::Bandwidth { row: 0, col: 2, .. })));
        assert_eq!(o.with_bandwidth(2).unwrap().bandwidth(), Some(2));
    }

    #[test]
    fn labels_give_hermitian_diagonal_for_any_weights() {
        let s = build_weighted_space(3, &[0.3, 7.0, 2.0], 1)
            .unwrap()
            .with_labels(vec![z(-1.0), z(0.5), z(4.0)])
            .unwrap();
        let h = s.label_operator().unwrap();
        assert_eq!(hermiticity_defect(&h, &s, false).unwrap(), 0.0);
    }
}
