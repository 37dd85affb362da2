//! The Cannata model `H = p^2/2 + exp(2 i x)/2` in the rescaled eigenbasis.
//!
//! Everything lives in coordinates of the hat basis `psi^_n`, which is
//! orthonormal for the product used here. Column `n` of a matrix holds the
//! image of `psi^_n`. The vectors
//! `xi_n = psi^_{n-1}/sqrt(n - 1/2) + psi^_{n+1}/sqrt(n + 3/2)` (`n >= 1`)
//! span the domain of the canonical position, which is realized as the
//! inverse of the truncated `exp(-ix)` matrix. Identities of the infinite
//! space are asserted on the truncation bulk only.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use crate::error::invalid;
use crate::hilbert::{default_bulk_buffer, weighted_adjoint, weighted_hermiticity_defect, BasisTag, OperatorRep};
use crate::linalg::{identity, inverse, largest_singular_value, unit};
use crate::quad::CompositeGauss;
use crate::special::{bessel_j, spherical_bessel_all};
use crate::{c64, CMat, CVec, Error, Result, C64, I};

fn check_dim(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(invalid(format!("truncation {n} below {min}")));
    }
    Ok(())
}

/// Matrices of `exp(-ix)` and `exp(-ix) p` in the hat basis.
pub fn build_primitive_ops(n: usize) -> Result<(CMat, CMat)> {
    check_dim(n, 8)?;
    let mut e = CMat::zeros(n, n);
    let mut p = CMat::zeros(n, n);
    let r3 = 3f64.sqrt();
    e[(0, 0)] = I;
    e[(1, 0)] = c64(1.0 / r3, 0.0);
    p[(0, 0)] = c64(0.0, 0.5);
    p[(1, 0)] = c64(-0.5 / r3, 0.0);
    for k in 1..n {
        let a = k as f64 + 0.5;
        let lo = k as f64 - 0.5;
        let hi = k as f64 + 1.5;
        e[(k - 1, k)] = c64(0.5 / (a * lo).sqrt(), 0.0);
        p[(k - 1, k)] = c64(0.5 * a.sqrt() / lo.sqrt(), 0.0);
        if k + 1 < n {
            e[(k + 1, k)] = c64(0.5 / (a * hi).sqrt(), 0.0);
            p[(k + 1, k)] = c64(-0.5 * a.sqrt() / hi.sqrt(), 0.0);
        }
    }
    Ok((e, p))
}

/// `xi_n` in hat coordinates (`n >= 1`), truncated to `dim`.
pub fn xi_vector(dim: usize, n: usize) -> CVec {
    assert!(n >= 1 && n <= dim, "xi index out of range");
    let mut v = CVec::zeros(dim);
    v[n - 1] = c64(1.0 / (n as f64 - 0.5).sqrt(), 0.0);
    if n + 1 < dim {
        v[n + 1] = c64(1.0 / (n as f64 + 1.5).sqrt(), 0.0);
    }
    v
}

/// Norm weights of the hat basis in the product where the unscaled
/// eigenfunctions are orthonormal: `(n + 1/2)/sqrt 2`.
pub fn psi_product_weights(dim: usize) -> Vec<f64> {
    (0..dim).map(|k| (k as f64 + 0.5) * FRAC_1_SQRT_2).collect()
}

/// Primitive operators, canonical pair and the `xi` columns at one truncation.
#[derive(Debug, Clone)]
pub struct CannataAlgebra {
    pub dim: usize,
    pub mexp: CMat,
    pub mexpp: CMat,
    pub pc: CMat,
    pub xc: CMat,
    /// `dim x (dim - 1)`; column `k` is `xi_{k+1}`.
    pub s: CMat,
}

pub fn build_canonical_pair(n: usize) -> Result<CannataAlgebra> {
    let (mexp, mexpp) = build_primitive_ops(n)?;
    let pc = (&mexpp - &mexp * c64(0.5, 0.0)) * (-I);
    let xc = inverse(&mexp)?;
    let mut s = CMat::zeros(n, n - 1);
    for k in 1..n {
        s.set_column(k - 1, &xi_vector(n, k));
    }
    Ok(CannataAlgebra { dim: n, mexp, mexpp, pc, xc, s })
}

fn vnorm(v: &CVec) -> f64 {
    v.norm()
}

impl CannataAlgebra {
    pub fn xi(&self, n: usize) -> CVec {
        self.s.column(n - 1).into_owned()
    }

    /// Largest index where infinite-space identities are asserted.
    pub fn bulk_last(&self) -> usize {
        self.dim - 1 - default_bulk_buffer(self.dim)
    }

    /// `max_n |Xc xi_n - 2 sqrt(n + 1/2) e_n|` over bulk `n >= 1`.
    pub fn xc_on_xi_defect(&self) -> f64 {
        (1..=self.bulk_last())
            .map(|n| {
                let want = unit(self.dim, n) * c64(2.0 * (n as f64 + 0.5).sqrt(), 0.0);
                vnorm(&(&self.xc * self.xi(n) - want))
            })
            .fold(0.0, f64::max)
    }

    /// Bulk Hermiticity defect of `Pc` in the orthonormal hat product.
    pub fn pc_hermiticity_defect(&self) -> f64 {
        weighted_hermiticity_defect(&self.pc, &vec![1.0; self.dim], self.bulk_last())
    }

    /// Gram-type matrix `(xi_n, A xi_m)` for bulk `n, m >= 1`.
    pub fn xi_matrix_elements(&self, a: &CMat) -> CMat {
        let b = self.bulk_last();
        let s = self.s.columns(0, b).into_owned();
        s.adjoint() * a * s
    }

    /// Hermiticity defect of `Xc` on `xi` columns, and the deviation from
    /// `(xi_n, Xc xi_m) = 2 (delta_{n,m+1} + delta_{n+1,m})`.
    pub fn xc_on_xi_hermiticity(&self) -> (f64, f64) {
        let g = self.xi_matrix_elements(&self.xc);
        let b = g.nrows();
        let herm = weighted_hermiticity_defect(&g, &vec![1.0; b], b - 1);
        let mut dev: f64 = 0.0;
        for r in 0..b {
            for c in 0..b {
                let want = if r.abs_diff(c) == 1 { 2.0 } else { 0.0 };
                dev = dev.max((g[(r, c)] - want).norm());
            }
        }
        (herm, dev)
    }

    /// `max_n |[Xc, Pc] xi_n - i xi_n|` over bulk `n >= 1`.
    pub fn commutator_defect(&self) -> f64 {
        let c = &self.xc * &self.pc - &self.pc * &self.xc;
        (1..=self.bulk_last())
            .map(|n| {
                let x = self.xi(n);
                vnorm(&(&c * &x - &x * I))
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of `Mexpp‡ + Mexpp` in the unscaled eigenfunction product.
    pub fn mexpp_antihermitian_defect(&self) -> f64 {
        let adj = weighted_adjoint(&self.mexpp, &psi_product_weights(self.dim));
        (adj + &self.mexpp).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hermiticity defect of `Mexp` over all indices, and over `1..=bulk`.
    pub fn mexp_hermiticity(&self) -> (f64, f64) {
        let full = weighted_hermiticity_defect(&self.mexp, &vec![1.0; self.dim], self.dim - 1);
        let b = self.bulk_last();
        let sub = self.mexp.view((1, 1), (b, b)).into_owned();
        let tail = weighted_hermiticity_defect(&sub, &vec![1.0; b], b - 1);
        (full, tail)
    }

    /// Deviation of `(xi_n, p xi_m)` from `delta_{n+2,m} - delta_{n,m+2}`,
    /// with `p = Mexpp Xc - 1`.
    pub fn momentum_on_xi_defect(&self) -> f64 {
        let p = &self.mexpp * &self.xc - identity(self.dim);
        let g = self.xi_matrix_elements(&p);
        let b = g.nrows();
        let mut dev: f64 = 0.0;
        for r in 0..b {
            for c in 0..b {
                let want = if c == r + 2 {
                    1.0
                } else if r == c + 2 {
                    -1.0
                } else {
                    0.0
                };
                dev = dev.max((g[(r, c)] - want).norm());
            }
        }
        dev
    }

    /// `max_n |Mexp Xc xi_n - xi_n|` over bulk `n >= 1`.
    pub fn right_inverse_on_xi_defect(&self) -> f64 {
        let m = &self.mexp * &self.xc;
        (1..=self.bulk_last()).map(|n| vnorm(&(&m * self.xi(n) - self.xi(n)))).fold(0.0, f64::max)
    }

    /// `|Xc Mexp xi_n - xi_n|` for one `n`.
    pub fn left_inverse_on_xi_defect(&self, n: usize) -> f64 {
        vnorm(&(&self.xc * (&self.mexp * self.xi(n)) - self.xi(n)))
    }

    /// The grouped or naive canonical Hamiltonian.
    pub fn hamiltonian(&self, form: HamiltonianForm) -> OperatorRep {
        let id = identity(self.dim);
        let pc2 = &self.pc * &self.pc;
        let m = match form {
            HamiltonianForm::Grouped => {
                let inner = &self.xc * (&id - &pc2) + &self.pc * (2.0 * I);
                (&self.xc * inner + &id * c64(0.25, 0.0)) * c64(0.5, 0.0)
            }
            HamiltonianForm::Naive => {
                let x2 = &self.xc * &self.xc;
                (-(&x2 * &pc2) + &self.xc * &self.pc * (2.0 * I) + &id * c64(0.25, 0.0) + &x2) * c64(0.5, 0.0)
            }
        };
        OperatorRep::new(m, BasisTag::HatPsi).expect("finite products of finite matrices")
    }

    /// `(Xc (1 - Pc^2) + 2i Pc)`, the inner bracket of the grouped form.
    pub fn inner_bracket(&self) -> CMat {
        let id = identity(self.dim);
        &self.xc * (&id - &self.pc * &self.pc) + &self.pc * (2.0 * I)
    }

    /// `max_n |bracket psi^_n - n(n+1)/(2 sqrt(n+1/2)) xi_n|` over bulk `n >= 1`.
    pub fn inner_bracket_defect(&self) -> f64 {
        let b = self.inner_bracket();
        (1..=self.bulk_last())
            .map(|n| {
                let nf = n as f64;
                let want = self.xi(n) * c64(nf * (nf + 1.0) / (2.0 * (nf + 0.5).sqrt()), 0.0);
                vnorm(&(b.column(n) - want))
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianForm {
    /// Ordered so that no intermediate product leaves the hat space.
    Grouped,
    /// Expanded form; intermediate products diverge.
    Naive,
}

/// `H(Xc, Pc)` at truncation `n`.
pub fn canonical_hamiltonian(n: usize, form: HamiltonianForm) -> Result<OperatorRep> {
    check_dim(n, 16)?;
    Ok(build_canonical_pair(n)?.hamiltonian(form))
}

/// Per-level comparison of `H psi^_n` with `(n + 1/2)^2 / 2 psi^_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCheck {
    pub n: usize,
    pub expected: f64,
    /// `(psi^_n, H psi^_n)`.
    pub rayleigh: C64,
    /// `|rayleigh - expected| / expected`.
    pub relative_error: f64,
    /// `|H psi^_n - expected psi^_n| / expected`.
    pub relative_residual: f64,
}

pub fn level_checks(h: &OperatorRep, upto: usize) -> Vec<LevelCheck> {
    let m = h.matrix();
    (0..=upto.min(m.nrows() - 1))
        .map(|n| {
            let expected = (n as f64 + 0.5).powi(2) / 2.0;
            let rayleigh = m[(n, n)];
            let mut col = m.column(n).into_owned();
            col[n] -= c64(expected, 0.0);
            LevelCheck {
                n,
                expected,
                rayleigh,
                relative_error: (rayleigh - expected).norm() / expected,
                relative_residual: col.norm() / expected,
            }
        })
        .collect()
}

/// Largest change of `Xc` entries with indices `<= n/2` when the truncation doubles.
pub fn xc_doubling_stability(n: usize) -> Result<f64> {
    let a = build_canonical_pair(n)?;
    let b = build_canonical_pair(2 * n)?;
    let k = n / 2 + 1;
    let d = a.xc.view((0, 0), (k, k)) - b.xc.view((0, 0), (k, k));
    Ok(d.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `f_K^(n) = sum_{k=0}^K (-1)^k xi_{n+2k+1}` with its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSum {
    pub vector: CVec,
    /// `|f - psi^_n / sqrt(n + 1/2)|`.
    pub remainder_norm: f64,
    /// Deviation from `psi^_n/sqrt(n+1/2) + (-1)^K psi^_{n+2K+2}/sqrt(n+2K+5/2)`.
    pub identity_defect: f64,
}

pub fn xi_partial_sum(n: usize, k: usize, dim: usize) -> Result<PartialSum> {
    let top = n + 2 * (k + 1);
    if top >= dim {
        return Err(invalid(format!("partial sum reaches index {top} >= truncation {dim}")));
    }
    let mut f = CVec::zeros(dim);
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        f += xi_vector(dim, n + 2 * j + 1) * c64(sign, 0.0);
    }
    let lead = unit(dim, n) * c64(1.0 / (n as f64 + 0.5).sqrt(), 0.0);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let tail = unit(dim, top) * c64(sign / (top as f64 + 0.5).sqrt(), 0.0);
    Ok(PartialSum {
        remainder_norm: (&f - &lead).norm(),
        identity_defect: (&f - lead - tail).norm(),
        vector: f,
    })
}

/// Largest singular value of `Pc` together with its largest column norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumNorm {
    pub dim: usize,
    pub largest_singular_value: f64,
    pub largest_column_norm: f64,
}

/// The claimed bound on the momentum norm.
pub fn momentum_bound() -> f64 {
    (3.0f64 / 5.0).sqrt()
}

pub fn momentum_norm(n: usize) -> Result<MomentumNorm> {
    check_dim(n, 16)?;
    let a = build_canonical_pair(n)?;
    let col = (0..n).map(|k| a.pc.column(k).norm()).fold(0.0, f64::max);
    Ok(MomentumNorm { dim: n, largest_singular_value: largest_singular_value(&a.pc), largest_column_norm: col })
}

/// Evidence that the canonical position cannot be applied to hat vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceWitness {
    pub n: usize,
    pub dims: Vec<usize>,
    /// `|Xc psi^_n|` per truncation.
    pub xc_norms: Vec<f64>,
    /// `|Xc^2 psi^_n|` per truncation (an intermediate of the naive form).
    pub naive_term_norms: Vec<f64>,
    pub strictly_increasing: bool,
    /// Series orders `K` for `S_K = xi_2/5 - sum_{k<=K} (-i)^k xi_k`, which
    /// converges to `exp(-ix) xi_1`.
    pub series_orders: Vec<usize>,
    /// `|S_K - exp(-ix) xi_1|`.
    pub series_remainders: Vec<f64>,
    /// `|Xc S_K|`; unbounded in `K`.
    pub series_images: Vec<f64>,
    /// `|Xc exp(-ix) xi_2 - xi_2|` at the largest truncation.
    pub xi2_defect: f64,
    /// `max_n |exp(-ix) Xc xi_n - xi_n|` over the bulk at the largest truncation.
    pub right_inverse_defect: f64,
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

pub fn divergence_witness(n: usize, dims: &[usize]) -> Result<DivergenceWitness> {
    if dims.is_empty() {
        return Err(invalid("empty truncation list"));
    }
    let mut xc_norms = Vec::new();
    let mut naive = Vec::new();
    let mut last = None;
    for &d in dims {
        if n + 8 > d {
            return Err(invalid(format!("index {n} too close to truncation {d}")));
        }
        let a = build_canonical_pair(d)?;
        let v = a.xc.column(n).into_owned();
        xc_norms.push(v.norm());
        naive.push((&a.xc * v).norm());
        last = Some(a);
    }
    let a = last.expect("non-empty");
    let d = a.dim;
    let target = &a.mexp * a.xi(1);
    let mut series_orders = Vec::new();
    let mut series_remainders = Vec::new();
    let mut series_images = Vec::new();
    let mut sum = a.xi(2) * c64(0.2, 0.0);
    let mut phase = c64(1.0, 0.0);
    let kmax = d / 2;
    let mut next_report = 4;
    for k in 1..=kmax {
        phase *= -I;
        sum -= a.xi(k) * phase;
        if k == next_report {
            series_orders.push(k);
            series_remainders.push((&sum - &target).norm());
            series_images.push((&a.xc * &sum).norm());
            next_report *= 2;
        }
    }
    Ok(DivergenceWitness {
        n,
        dims: dims.to_vec(),
        strictly_increasing: strictly_increasing(&xc_norms),
        xc_norms,
        naive_term_norms: naive,
        series_orders,
        series_remainders,
        series_images,
        xi2_defect: a.left_inverse_on_xi_defect(2),
        right_inverse_defect: a.right_inverse_on_xi_defect(),
    })
}

/// Defects of the alternative canonical pair built from `exp(ix)`,
/// measured in the product where the unscaled eigenfunctions are orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeReport {
    pub p_hermiticity: f64,
    pub x_hermiticity: f64,
    pub x_prime_hermiticity: f64,
    pub mexpp_antihermitian: f64,
    /// `max_k |([X, p~] + i) Mexp e_k|` over bulk `k`, with `X = exp(ix)`.
    pub x_commutator_on_range: f64,
    /// `max_k |([X‡, p~] + i) Mexp‡ e_k|` over bulk `k`.
    pub x_adjoint_commutator_on_range: f64,
    /// Bound on `|[x~, p~] - i|` and `|[x~', p~]|` on vectors in both ranges.
    pub canonical_defect: f64,
    /// `max |[x~, p~] - i|` over bulk matrix entries; not a domain-respecting test.
    pub full_matrix_commutator: f64,
}

#[derive(Debug, Clone)]
pub struct TildePair {
    pub x: CMat,
    pub p: CMat,
    pub x_prime: CMat,
    pub weights: Vec<f64>,
    pub report: TildeReport,
}

pub fn tilde_canonical_pair(n: usize) -> Result<TildePair> {
    check_dim(n, 16)?;
    let a = build_canonical_pair(n)?;
    let w = psi_product_weights(n);
    let last = a.bulk_last();
    let p = &a.mexpp * I;
    let x_up = a.xc.clone();
    let x_up_adj = weighted_adjoint(&x_up, &w);
    let x = (&x_up + &x_up_adj) * c64(-0.5, 0.0);
    let x_prime = (&x_up - &x_up_adj) * (0.5 * I);
    let id = identity(n);
    let c1 = &x_up * &p - &p * &x_up + &id * I;
    let c2 = &x_up_adj * &p - &p * &x_up_adj + &id * I;
    let range_defect = |c: &CMat, r: &CMat| {
        let m = c * r;
        (0..=last).map(|k| m.column(k).norm()).fold(0.0, f64::max)
    };
    let e_adj = weighted_adjoint(&a.mexp, &w);
    let on_e = range_defect(&c1, &a.mexp);
    let on_eadj = range_defect(&c2, &e_adj);
    let full = &x * &p - &p * &x - &id * I;
    let mut full_max: f64 = 0.0;
    for r in 0..=last {
        for c in 0..=last {
            full_max = full_max.max(full[(r, c)].norm());
        }
    }
    let report = TildeReport {
        p_hermiticity: weighted_hermiticity_defect(&p, &w, last),
        x_hermiticity: weighted_hermiticity_defect(&x, &w, last),
        x_prime_hermiticity: weighted_hermiticity_defect(&x_prime, &w, last),
        mexpp_antihermitian: a.mexpp_antihermitian_defect(),
        x_commutator_on_range: on_e,
        x_adjoint_commutator_on_range: on_eadj,
        canonical_defect: on_e.max(on_eadj),
        full_matrix_commutator: full_max,
    };
    Ok(TildePair { x, p, x_prime, weights: w, report })
}

/// `Pc + f(Xc)` for a real polynomial `f` of degree at most 3.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeShift {
    /// `max_n |[Xc, pi] xi_n - i xi_n|` with the polynomial part measured
    /// relative to `|f(Xc) Xc xi_n|`, the size of the terms that cancel.
    pub commutator_defect: f64,
    /// `max_n |pi xi_n|` over the bulk.
    pub largest_image: f64,
}

pub fn gauge_shift_check(n: usize, coeffs: &[f64]) -> Result<GaugeShift> {
    if coeffs.is_empty() || coeffs.len() > 4 {
        return Err(invalid("polynomial degree must be 0..=3"));
    }
    let a = build_canonical_pair(n)?;
    let horner = |v: &CVec| {
        let mut acc = v * c64(*coeffs.last().expect("non-empty"), 0.0);
        for c in coeffs.iter().rev().skip(1) {
            acc = &a.xc * acc + v * c64(*c, 0.0);
        }
        acc
    };
    let mut defect: f64 = 0.0;
    let mut largest: f64 = 0.0;
    for k in 1..=a.bulk_last() {
        let x = a.xi(k);
        let xx = &a.xc * &x;
        let canon = &a.xc * (&a.pc * &x) - &a.pc * &xx - &x * I;
        let fx = horner(&x);
        let shift = &a.xc * &fx - horner(&xx);
        let scale = (&a.xc * &fx).norm().max(1.0);
        defect = defect.max(canon.norm() + shift.norm() / scale);
        largest = largest.max((&a.pc * &x + fx).norm());
    }
    Ok(GaugeShift { commutator_defect: defect, largest_image: largest })
}

/// `sqrt((2n+1)/pi) j_n(x)`, orthonormal on the real line.
pub fn position_wavefunction(n: usize, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("x = {x} must be positive")));
    }
    let j = spherical_bessel_all(n, x);
    Ok(((2 * n + 1) as f64 / PI).sqrt() * j[n])
}

/// Partial sums `sum_{n<=k} (2n+1)/pi j_n(x)^2` for `k = 0..=nmax`.
pub fn completeness_partial_sums(x: f64, nmax: usize) -> Result<Vec<f64>> {
    if !(x > 0.0) {
        return Err(invalid(format!("x = {x} must be positive")));
    }
    let j = spherical_bessel_all(nmax, x);
    let mut acc = 0.0;
    Ok(j.iter()
        .enumerate()
        .map(|(n, v)| {
            acc += (2 * n + 1) as f64 / PI * v * v;
            acc
        })
        .collect())
}

/// `D(x, x)` truncated at `nmax >= x + 40`.
pub fn completeness_diagonal(x: f64, nmax: usize) -> Result<f64> {
    if (nmax as f64) < x + 40.0 {
        return Err(invalid(format!("truncation {nmax} < x + 40")));
    }
    Ok(*completeness_partial_sums(x, nmax)?.last().expect("nmax + 1 terms"))
}

fn sinc(z: C64) -> C64 {
    if z.norm() < 1e-8 {
        c64(1.0, 0.0) - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// `(phi_nu, phi_mu)` on the real line, `phi_nu(x) = J_{nu+1/2}(x)/sqrt x`.
pub fn overlap_closed_form(nu: C64, mu: C64) -> Result<C64> {
    let s = nu.conj() + mu;
    if !(s.re > -1.0) {
        return Err(invalid(format!("Re(conj(nu) + mu) = {} <= -1", s.re)));
    }
    let d = nu.conj() - mu;
    Ok((-I * PI * d / 2.0).exp() * 2.0 / (s + 1.0) * sinc(d * PI))
}

/// `|phi_nu|^2` for `Re nu > -1/2`.
pub fn norm_squared(nu: C64) -> Result<f64> {
    if !(nu.re > -0.5) {
        return Err(invalid(format!("Re nu = {} <= -1/2", nu.re)));
    }
    let y = nu.im;
    let t = 2.0 * PI * y;
    let shape = if t.abs() < 1e-8 { 1.0 + t * t / 6.0 } else { t.sinh() / t };
    Ok((-PI * y).exp() / (nu.re + 0.5) * shape)
}

/// Quadrature of `(phi_nu, phi_mu)`: Gauss–Legendre on unit panels over
/// `[0, x_max]`, the leading `1/x^2` tail added analytically, and the
/// negative half-line folded in through `phi_nu(-x) = exp(i pi nu) phi_nu(x)`.
pub fn overlap_quadrature(nu: C64, mu: C64, x_max: f64) -> C64 {
    let q = CompositeGauss::new(10);
    let (an, am) = (nu + 0.5, mu + 0.5);
    let half = q.integrate_complex(0.0, x_max, x_max.ceil() as usize, |x| {
        bessel_j(an, x).conj() * bessel_j(am, x) / x
    });
    let phase = |a: C64| a * (PI / 2.0) + PI / 4.0;
    let tail = (phase(am) - phase(an).conj()).cos() / (PI * x_max);
    (half + tail) * (c64(1.0, 0.0) + (I * PI * (mu - nu.conj())).exp())
}

/// `|phi^_n|^2` by quadrature of `(2n+1)/pi j_n^2` over the real line.
pub fn hat_norm_quadrature(n: usize, x_max: f64) -> f64 {
    let q = CompositeGauss::new(10);
    let c = (2 * n + 1) as f64 / PI;
    let half = q.integrate(0.0, x_max, x_max.ceil() as usize, |x| {
        if x == 0.0 {
            return if n == 0 { c } else { 0.0 };
        }
        let j = spherical_bessel_all(n, x)[n];
        c * j * j
    });
    2.0 * (half + c / (2.0 * x_max))
}

/// How a straight line `x = a + b s` relates to the strips `n pi < Re x < (n+1) pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineVerdict {
    /// `Re b = 0` and `Re a` a multiple of `pi/2`: the Hamiltonian is Hermitian on the line.
    pub hermitizing: bool,
    /// Both ends go to `Im x -> -inf`.
    pub both_ends_down: bool,
    /// Strip index of each vertical asymptote (`None` for a slanted line).
    pub strips: Option<(i64, i64)>,
    /// Both ends go down vertically in strips two apart.
    pub connects_quantizing_strips: bool,
}

/// Classify a straight line against the requirements of the quantizing curve.
pub fn classify_line(a: C64, b: C64) -> Result<LineVerdict> {
    if b.norm() == 0.0 {
        return Err(invalid("b = 0"));
    }
    let tol = 1e-12;
    let quarter = (a.re / (PI / 2.0)).round() * (PI / 2.0);
    let hermitizing = b.re.abs() <= tol * b.norm() && (a.re - quarter).abs() <= tol * a.re.abs().max(1.0);
    // ends at s -> +inf and s -> -inf move along +b and -b
    let both_ends_down = [b, -b].iter().all(|d| d.im < 0.0);
    let vertical = b.re.abs() <= tol * b.norm();
    let strips = vertical.then(|| {
        let k = (a.re / PI).floor() as i64;
        (k, k)
    });
    let connects = both_ends_down && matches!(strips, Some((s, t)) if (s - t).abs() == 2);
    Ok(LineVerdict { hermitizing, both_ends_down, strips, connects_quantizing_strips: connects })
}

/// `row,col,re,im` lines for every entry, row-major.
pub fn matrix_csv(a: &CMat) -> String {
    let mut out = String::from("row,col,re,im\n");
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            let z = a[(r, c)];
            let _ = writeln!(out, "{r},{c},{},{}", z.re, z.im);
        }
    }
    out
}

pub fn write_matrix_csv(a: &CMat, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, matrix_csv(a)).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}
