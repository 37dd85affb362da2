//! Dense eigenvalue plumbing.
//!
//! General matrices are balanced before the eigendecomposition, which is
//! delegated to `faer`. Balancing matters for the open-boundary
//! asymmetric-hopping lattice, which is a diagonal similarity of a symmetric
//! matrix with condition number `e^{g L}`; without it the computed spectrum
//! is swamped by pseudospectral noise.

use nalgebra::{DMatrix, SVD};

use crate::{Error, Result, C64, CMat, CVec};

/// Diagonal similarity `B = S^{-1} A S` equalizing off-diagonal row and
/// column 2-norms. Returns `B` and the diagonal of `S`.
///
/// Scales are first seeded along a breadth-first spanning tree so that each
/// tree edge gets `|b_ij| = |b_ji|`, which is exact for chains. Osborne
/// sweeps then polish the result. Starting from the tree matters: plain
/// sweeps propagate scale diffusively and stall on long chains.
pub fn balance(a: &CMat) -> (CMat, Vec<f64>) {
    let n = a.nrows();
    let mut log_s = vec![f64::NAN; n];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..n {
        if !log_s[root].is_nan() {
            continue;
        }
        log_s[root] = 0.0;
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                let (fwd, back) = (a[(i, j)].norm(), a[(j, i)].norm());
                if log_s[j].is_nan() && fwd > 0.0 && back > 0.0 {
                    log_s[j] = log_s[i] + 0.5 * (back.ln() - fwd.ln());
                    queue.push_back(j);
                }
            }
        }
    }
    let mut scale: Vec<f64> = log_s.iter().map(|l| l.exp()).collect();
    let mut b = CMat::from_fn(n, n, |r, c| a[(r, c)] * (scale[c] / scale[r]));
    // On graphs with cycles the seed can be far worse than no scaling at all
    // (a ring closes with a mismatch of the accumulated ratio); keep it only
    // if it lowers the Frobenius norm, which the sweeps minimize.
    if !(b.norm() <= a.norm()) {
        scale = vec![1.0; n];
        b = a.clone();
    }
    for _ in 0..SWEEPS {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                c += b[(j, i)].norm_sqr();
                r += b[(i, j)].norm_sqr();
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let f = (r / c).sqrt().sqrt();
            worst = worst.max(f.ln().abs());
            scale[i] *= f;
            for j in 0..n {
                b[(i, j)] /= f;
                b[(j, i)] *= f;
            }
        }
        if worst < 1e-12 {
            break;
        }
    }
    (b, scale)
}

const SWEEPS: usize = 500;

fn check_square(a: &CMat) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    for ((r, c), z) in a.iter().enumerate().map(|(k, z)| ((k % a.nrows(), k / a.nrows()), z)) {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite { row: r, col: c });
        }
    }
    Ok(a.nrows())
}

fn to_faer(a: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)])
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    let n = check_square(a)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (b, _) = balance(a);
    to_faer(&b).eigenvalues().map_err(|_| Error::NoConvergence { dim: n })
}

/// Right eigenpairs of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    /// Columns are unit-norm right eigenvectors.
    pub vectors: CMat,
}

/// Eigenvalues and unit right eigenvectors, computed on the balanced matrix
/// and scaled back.
pub fn eig(a: &CMat) -> Result<Eigen> {
    let n = check_square(a)?;
    if n == 0 {
        return Ok(Eigen { values: Vec::new(), vectors: CMat::zeros(0, 0) });
    }
    let (b, scale) = balance(a);
    let e = to_faer(&b).eigen().map_err(|_| Error::NoConvergence { dim: n })?;
    let values: Vec<C64> = (0..n).map(|i| e.S()[i]).collect();
    let u = e.U();
    let mut vectors = CMat::from_fn(n, n, |r, c| u[(r, c)] * scale[r]);
    for mut col in vectors.column_iter_mut() {
        let nrm = col.norm();
        col /= C64::new(nrm, 0.0);
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues with right and left eigenvectors, `L^† R = I`. Both are
/// formed in the balanced basis, `R = S V` and `L = S^{-1} V^{-†}`, so the
/// inverse is taken of the well-conditioned `V` rather than of `R`. Right
/// columns have unit norm.
pub fn eig_biorthogonal(a: &CMat) -> Result<(Vec<C64>, CMat, CMat)> {
    let n = check_square(a)?;
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0), CMat::zeros(0, 0)));
    }
    let (b, scale) = balance(a);
    let e = to_faer(&b).eigen().map_err(|_| Error::NoConvergence { dim: n })?;
    let values: Vec<C64> = (0..n).map(|i| e.S()[i]).collect();
    let u = e.U();
    let v = CMat::from_fn(n, n, |r, c| u[(r, c)]);
    let vinv_h = inverse(&v)?.adjoint();
    let mut right = CMat::from_fn(n, n, |r, c| v[(r, c)] * scale[r]);
    let mut left = CMat::from_fn(n, n, |r, c| vinv_h[(r, c)] / scale[r]);
    for k in 0..n {
        let nrm = right.column(k).norm();
        right.column_mut(k).unscale_mut(nrm);
        left.column_mut(k).scale_mut(nrm);
    }
    Ok((values, right, left))
}

/// Largest singular value.
pub fn largest_singular_value(a: &CMat) -> f64 {
    let svd = SVD::new(a.clone(), false, false);
    svd.singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Inverse via LU; refuses numerically singular input.
pub fn inverse(a: &CMat) -> Result<CMat> {
    let inv = a.clone().try_inverse().ok_or(Error::Singular)?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(inv)
}

/// Largest entry modulus.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Promote a real matrix.
pub fn complexify(a: &DMatrix<f64>) -> CMat {
    a.map(|x| C64::new(x, 0.0))
}

/// `n x n` identity.
pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Unit vector `e_k` of length `n`.
pub fn unit(n: usize, k: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[k] = C64::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn balance_is_similarity() {
        let a = CMat::from_row_slice(3, 3, &[
            c64(1.0, 0.0), c64(1e6, 0.0), c64(0.0, 0.0),
            c64(1e-6, 0.0), c64(2.0, 0.0), c64(1e4, 1.0),
            c64(0.0, 0.0), c64(1e-4, 0.0), c64(3.0, 0.0),
        ]);
        let (b, s) = balance(&a);
        for i in 0..3 {
            for j in 0..3 {
                let back = b[(i, j)] * s[i] / s[j];
                assert!((back - a[(i, j)]).norm() <= 1e-14 * a[(i, j)].norm().max(1.0));
            }
        }
        // a chain: the balanced magnitudes are symmetric
        assert!((b[(0, 1)].norm() - b[(1, 0)].norm()).abs() < 1e-12);
        assert!((b[(1, 2)].norm() - b[(2, 1)].norm()).abs() < 1e-9);
    }

    #[test]
    fn biorthogonal_pairs() {
        let a = CMat::from_fn(5, 5, |i, j| c64(((i * 3 + j) % 4) as f64 - 1.5, (i as f64 - j as f64) * 0.3));
        let (vals, r, l) = eig_biorthogonal(&a).unwrap();
        assert!((l.adjoint() * &r - identity(5)).norm() < 1e-12);
        for k in 0..5 {
            assert!((&a * r.column(k) - r.column(k) * vals[k]).norm() < 1e-12);
            assert!((a.adjoint() * l.column(k) - l.column(k) * vals[k].conj()).norm() < 1e-11 * l.column(k).norm());
        }
    }

    #[test]
    fn eigenvectors_satisfy_equation() {
        let a = CMat::from_fn(6, 6, |i, j| c64(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 * 0.5));
        let e = eig(&a).unwrap();
        for k in 0..6 {
            let v = e.vectors.column(k);
            let r = &a * v - v * e.values[k];
            assert!(r.norm() < 1e-12, "residual {}", r.norm());
        }
    }

    #[test]
    fn triangular_input_keeps_diagonal() {
        let a = CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        let ev = eigenvalues(&a).unwrap();
        assert!(ev.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = CMat::zeros(3, 3);
        assert_eq!(inverse(&a), Err(Error::Singular));
    }
}
