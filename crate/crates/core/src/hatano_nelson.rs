//! Asymmetric-hopping (Hatano–Nelson) lattice with a random potential.
//!
//! The continuum Hamiltonian `(p + i g)^2 / 2m + V(x)` is discretized with
//! nearest-neighbour hopping, `2 m a^2 = 1` and `g` measured in units of the
//! inverse spacing:
//!
//! ```text
//! H_{j,j}   = V_j + 2t
//! H_{j,j+1} = -t e^{-g}
//! H_{j+1,j} = -t e^{+g}
//! ```
//!
//! with corner entries `H_{0,L-1} = -t e^{g}`, `H_{L-1,0} = -t e^{-g}` for a
//! ring. This sign choice makes `D_g H(g) D_g^{-1} = H(0)` for the open chain
//! with `D_g = diag(e^{-g j})`, the lattice form of the gauge factor
//! `T_g(x) = e^{-g x}`, so right eigenvectors scale as `e^{+g j}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::hilbert::{conjugate_all, spectral_distance};
use crate::linalg::{eig, eig_biorthogonal, eigenvalues, identity};
use crate::{c64, CMat, CVec, Error, Result, C64, I};

/// Identifier of the generator behind [`random_potential`].
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    pub sites: usize,
    pub t: f64,
    pub g: f64,
    pub potential: Vec<f64>,
    pub bc: Boundary,
}

impl LatticeModel {
    pub fn new(sites: usize, t: f64, g: f64, potential: Vec<f64>, bc: Boundary) -> Result<Self> {
        if sites < 4 {
            return Err(invalid(format!("lattice needs at least 4 sites, got {sites}")));
        }
        if potential.len() != sites {
            return Err(Error::DimensionMismatch { expected: sites, got: potential.len() });
        }
        if !t.is_finite() || !g.is_finite() || potential.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite lattice parameter"));
        }
        Ok(Self { sites, t, g, potential, bc })
    }

    /// Same lattice at another `g`.
    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..self.clone() }
    }

    /// Same lattice with another boundary condition.
    pub fn clone_with_bc(&self, bc: Boundary) -> Self {
        Self { bc, ..self.clone() }
    }

    pub fn matrix(&self) -> CMat {
        let l = self.sites;
        let t = self.t;
        let (fwd, bwd) = (-t * (-self.g).exp(), -t * self.g.exp());
        let mut h = CMat::zeros(l, l);
        for j in 0..l {
            h[(j, j)] = c64(self.potential[j] + 2.0 * t, 0.0);
            if j + 1 < l {
                h[(j, j + 1)] = c64(fwd, 0.0);
                h[(j + 1, j)] = c64(bwd, 0.0);
            }
        }
        if self.bc == Boundary::Periodic {
            h[(0, l - 1)] = c64(bwd, 0.0);
            h[(l - 1, 0)] = c64(fwd, 0.0);
        }
        h
    }

    pub fn spectrum(&self) -> Result<Vec<C64>> {
        eigenvalues(&self.matrix())
    }
}

pub fn build_lattice(sites: usize, t: f64, g: f64, potential: Vec<f64>, bc: Boundary) -> Result<LatticeModel> {
    LatticeModel::new(sites, t, g, potential, bc)
}

/// Uniform disorder on `[-w/2, w/2]` from a seeded ChaCha8 stream.
pub fn random_potential(sites: usize, w: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sites).map(|_| w * (rng.gen::<f64>() - 0.5)).collect()
}

/// Plane-wave energies of the clean ring: `2t - t (e^{g} e^{-ik} + e^{-g} e^{ik})`.
pub fn clean_ring_spectrum(sites: usize, t: f64, g: f64) -> Vec<C64> {
    (0..sites)
        .map(|k| {
            let q = 2.0 * std::f64::consts::PI * k as f64 / sites as f64;
            c64(2.0 * t - 2.0 * t * g.cosh() * q.cos(), 2.0 * t * g.sinh() * q.sin())
        })
        .collect()
}

/// Matched right and left eigenvectors with `<psi^L_n, psi^R_m> = delta_nm`.
#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    pub values: Vec<C64>,
    /// Columns `psi^R_n`.
    pub right: CMat,
    /// Columns `psi^L_n`.
    pub left: CMat,
}

/// Smallest admissible `|<psi^L, psi^R>|` for unit vectors.
pub const EXCEPTIONAL_OVERLAP: f64 = 1e-10;

/// Left eigenvectors come from the inverse of the right eigenvector matrix,
/// which makes them biorthogonal by construction.
/// The largest component of each `psi^R_n` is made real and positive.
pub fn biorthogonal_eigensystem(h: &CMat) -> Result<BiorthogonalSystem> {
    let (values, mut right, mut left) = match eig_biorthogonal(h) {
        Ok(t) => t,
        Err(Error::Singular) => return Err(Error::ExceptionalPoint { mode: 0, overlap: 0.0 }),
        Err(e) => return Err(e),
    };
    for k in 0..values.len() {
        let overlap = 1.0 / left.column(k).norm();
        if !(overlap >= EXCEPTIONAL_OVERLAP) {
            return Err(Error::ExceptionalPoint { mode: k, overlap });
        }
        let big = right.column(k).iter().cloned().fold(c64(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
        let phase = big.conj() / big.norm();
        right.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        left.column_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(BiorthogonalSystem { values, right, left })
}

impl BiorthogonalSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max |L^† R - I|`.
    pub fn biorthogonality_defect(&self) -> f64 {
        let g = self.left.adjoint() * &self.right - identity(self.len());
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |sum_n psi^R_n psi^L_n^† - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let g = &self.right * self.left.adjoint() - identity(self.len());
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max_n |H^† psi^L_n - conj(E_n) psi^L_n| / |psi^L_n|`.
    pub fn left_residual(&self, h: &CMat) -> f64 {
        let ha = h.adjoint();
        (0..self.len())
            .map(|k| {
                let l = self.left.column(k);
                (&ha * l - l * self.values[k].conj()).norm() / l.norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `rho_j = conj(psi^L_n(j)) psi^R_n(j)`; sums to one.
pub fn density_profile(sys: &BiorthogonalSystem, n: usize) -> Result<Vec<C64>> {
    if n >= sys.len() {
        return Err(invalid(format!("mode {n} out of range")));
    }
    Ok((0..sys.len()).map(|j| sys.left[(j, n)].conj() * sys.right[(j, n)]).collect())
}

/// Conjugation pairing of spectra at `+g` and `-g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingReport {
    /// `d(spec H(-g), conj spec H(g))`.
    pub sign_pairing: f64,
    /// `d(spec H(g), conj spec H(g))`.
    pub closure: f64,
}

pub fn pairing_defect(model: &LatticeModel) -> Result<PairingReport> {
    let s = model.spectrum()?;
    let sm = model.with_g(-model.g).spectrum()?;
    let cs = conjugate_all(&s);
    Ok(PairingReport { sign_pairing: spectral_distance(&sm, &cs)?, closure: spectral_distance(&s, &cs)? })
}

/// Threshold scan for the onset of complex eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelocalizationScan {
    pub g_grid: Vec<f64>,
    pub max_imag: Vec<f64>,
    /// `f64::INFINITY` when the threshold is never exceeded.
    pub g_c: f64,
    /// Width of the final bisection bracket.
    pub bracket: f64,
    pub tau: f64,
}

/// Bisection target for `g_c`.
pub const BISECTION_WIDTH: f64 = 1e-4;

fn max_imag(model: &LatticeModel, g: f64) -> Result<f64> {
    Ok(model.with_g(g).spectrum()?.iter().map(|z| z.im.abs()).fold(0.0, f64::max))
}

/// Smallest `g` with `max_n |Im E_n| > tau`, refined by bisection.
/// `tau` defaults to `1e-8` times the spectral radius at the first grid point.
pub fn critical_g_scan(model: &LatticeModel, g_grid: &[f64], tau: Option<f64>) -> Result<DelocalizationScan> {
    if g_grid.is_empty() {
        return Err(invalid("empty g grid"));
    }
    if g_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("g grid must be increasing"));
    }
    let tau = match tau {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(invalid(format!("threshold {t} must be positive"))),
        None => {
            let r = model.with_g(g_grid[0]).spectrum()?.iter().map(|z| z.norm()).fold(0.0, f64::max);
            1e-8 * r.max(f64::MIN_POSITIVE)
        }
    };
    let max_im: Vec<f64> = g_grid.iter().map(|&g| max_imag(model, g)).collect::<Result<_>>()?;
    let (g_c, bracket) = match max_im.iter().position(|&m| m > tau) {
        None => (f64::INFINITY, 0.0),
        Some(0) => (g_grid[0], 0.0),
        Some(i) => {
            let (mut lo, mut hi) = (g_grid[i - 1], g_grid[i]);
            while hi - lo >= BISECTION_WIDTH {
                let mid = 0.5 * (lo + hi);
                if max_imag(model, mid)? > tau {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            (hi, hi - lo)
        }
    };
    Ok(DelocalizationScan { g_grid: g_grid.to_vec(), max_imag: max_im, g_c, bracket, tau })
}

/// `diag(e^{-g j})`.
pub fn gauge_matrix(sites: usize, g: f64) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(sites, (0..sites).map(|j| c64((-g * j as f64).exp(), 0.0))))
}

fn require_open(model: &LatticeModel, what: &str) -> Result<()> {
    if model.bc != Boundary::Open {
        return Err(Error::Unsupported(format!("{what}: similarity not defined on a ring; corner terms obstruct")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeReport {
    /// `max |D_g H(g) D_g^{-1} - H(0)|`.
    pub similarity_defect: f64,
    /// `d(spec H(g), spec H(0))`.
    pub spectral_distance: f64,
    /// `max_n (1 - |<D_g psi^R_n(g), psi_n(0)>|)` over unit vectors.
    pub eigenvector_map_defect: f64,
    /// Mean shift of the centre of `|psi^R_n|^2` between `g` and 0.
    pub center_shift: f64,
}

fn center(v: &[C64]) -> f64 {
    let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    v.iter().enumerate().map(|(j, z)| j as f64 * z.norm_sqr()).sum::<f64>() / w
}

fn sorted_by_re(e: &crate::linalg::Eigen) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..e.values.len()).collect();
    idx.sort_by(|&a, &b| e.values[a].re.total_cmp(&e.values[b].re));
    idx
}

pub fn imaginary_gauge_check(model: &LatticeModel) -> Result<GaugeReport> {
    require_open(model, "imaginary gauge")?;
    let h = model.matrix();
    let h0 = model.with_g(0.0).matrix();
    let d = gauge_matrix(model.sites, model.g);
    let dinv = gauge_matrix(model.sites, -model.g);
    let sim = &d * &h * &dinv - &h0;
    let eg = eig(&h)?;
    let e0 = eig(&h0)?;
    let (ig, i0) = (sorted_by_re(&eg), sorted_by_re(&e0));
    let mut map_defect: f64 = 0.0;
    let mut shift = 0.0;
    for (&a, &b) in ig.iter().zip(&i0) {
        let r = eg.vectors.column(a).into_owned();
        let u = &d * &r;
        let u = &u / c64(u.norm(), 0.0);
        let v = e0.vectors.column(b);
        map_defect = map_defect.max(1.0 - u.dotc(&v).norm());
        shift += center(r.as_slice()) - center(v.as_slice());
    }
    Ok(GaugeReport {
        similarity_defect: sim.iter().map(|z| z.norm()).fold(0.0, f64::max),
        spectral_distance: spectral_distance(&eg.values, &e0.values)?,
        eigenvector_map_defect: map_defect,
        center_shift: shift / model.sites as f64,
    })
}

/// Eigenvectors of `H(g)` sorted by energy, each scaled so that its gauge
/// image `D_g psi` has unit norm and a real positive largest component.
/// Returns the energies, the right vectors and the rows of their inverse.
fn gauge_normalized_vectors(model: &LatticeModel) -> Result<(Vec<C64>, CMat, CMat)> {
    let (values, right, left) = eig_biorthogonal(&model.matrix())?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
    let d = gauge_matrix(model.sites, model.g);
    let n = model.sites;
    let (mut r_out, mut l_out) = (CMat::zeros(n, n), CMat::zeros(n, n));
    for (k, &i) in order.iter().enumerate() {
        let r = right.column(i).into_owned();
        let u = &d * &r;
        let big = u.iter().cloned().fold(c64(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
        let s = big.conj() / (big.norm() * u.norm());
        r_out.set_column(k, &(r * s));
        l_out.set_column(k, &(left.column(i) / s.conj()));
    }
    Ok((order.iter().map(|&i| values[i]).collect(), r_out, l_out))
}

/// `M_g = R(-g) R(g)^{-1}`, the map `psi_n(g) -> psi_n(-g)`.
pub fn metric_operator(model: &LatticeModel) -> Result<CMat> {
    require_open(model, "metric")?;
    let (ep, _, lp) = gauge_normalized_vectors(model)?;
    let (em, rm, _) = gauge_normalized_vectors(&model.with_g(-model.g))?;
    let worst = ep.iter().zip(&em).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let scale = ep.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if worst > 1e-8 * scale {
        return Err(invalid(format!("eigenbasis matching failed (energy mismatch {worst:e})")));
    }
    Ok(rm * lp.adjoint())
}

/// `A‡ = M_{-g} A^† M_g`.
pub fn metric_adjoint(a: &CMat, m_g: &CMat, m_minus_g: &CMat) -> CMat {
    m_minus_g * a.adjoint() * m_g
}

/// Central first-derivative weights of the given even order.
pub fn central_stencil(order: usize) -> Vec<f64> {
    assert!(order >= 2 && order % 2 == 0, "order must be even");
    let m = order / 2;
    // c_k = (-1)^{k+1} (m!)^2 / (k (m-k)! (m+k)!) for k = 1..m
    let fact = |n: usize| (1..=n).fold(1.0, |a, b| a * b as f64);
    let mut w = vec![0.0; 2 * m + 1];
    for k in 1..=m {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let c = sign * fact(m) * fact(m) / (k as f64 * fact(m - k) * fact(m + k));
        w[m + k] = c;
        w[m - k] = -c;
    }
    w
}

/// `-i d/dx` on `sites` nodes with spacing `a`, truncated at the ends.
pub fn momentum_matrix(sites: usize, spacing: f64, order: usize) -> CMat {
    let w = central_stencil(order);
    let m = order / 2;
    let mut p = CMat::zeros(sites, sites);
    for j in 0..sites {
        for (k, c) in w.iter().enumerate() {
            let col = j as isize + k as isize - m as isize;
            if c != &0.0 && col >= 0 && (col as usize) < sites {
                p[(j, col as usize)] = c64(0.0, -c / spacing);
            }
        }
    }
    p
}

/// Parameters of the fine lattice on which the momentum adjoint is tested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumSetup {
    pub sites: usize,
    pub spacing: f64,
    /// `g` in physical units; the lattice uses `g * spacing`.
    pub g: f64,
    pub order: usize,
    pub disorder: f64,
    pub seed: u64,
}

impl Default for MomentumSetup {
    fn default() -> Self {
        Self { sites: 121, spacing: 0.1, g: 0.3, order: 8, disorder: 1.0, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// `max |M_g M_{-g} - I|` on the coarse lattice.
    pub inverse_defect: f64,
    /// `max |x‡ - x|` over bulk entries.
    pub position_defect: f64,
    /// `max |(p‡ - p - 2ig) f|` over bulk sites and smooth test functions.
    pub momentum_defect: f64,
    /// Same for the alternative `p‡ = -p`.
    pub alternative_defect: f64,
    /// `max |(pc‡ - pc) f|` with `pc = p + ig`.
    pub kinetic_defect: f64,
}

fn bulk_max(v: &CVec, lo: usize, hi: usize) -> f64 {
    (lo..hi).map(|j| v[j].norm()).fold(0.0, f64::max)
}

/// Metric checks: `M_g M_{-g} = 1` and `x‡ = x` on `model`; the momentum
/// relations on the fine lattice of `setup`, applied to Gaussians well inside it.
pub fn metric_adjoint_relation(model: &LatticeModel, setup: &MomentumSetup) -> Result<MetricReport> {
    let m_g = metric_operator(model)?;
    let m_mg = metric_operator(&model.with_g(-model.g))?;
    let l = model.sites;
    let inv = &m_g * &m_mg - identity(l);
    let x = CMat::from_diagonal(&CVec::from_iterator(l, (0..l).map(|j| c64(j as f64, 0.0))));
    let xd = metric_adjoint(&x, &m_g, &m_mg) - &x;
    let b = crate::hilbert::default_bulk_buffer(l);
    let mut pos: f64 = 0.0;
    for r in b..l - b {
        for c in b..l - b {
            pos = pos.max(xd[(r, c)].norm());
        }
    }

    let ls = setup.sites;
    let a = setup.spacing;
    let fine = LatticeModel::new(ls, 1.0, setup.g * a, random_potential(ls, setup.disorder, setup.seed), Boundary::Open)?;
    let fm = metric_operator(&fine)?;
    let fmm = metric_operator(&fine.with_g(-fine.g))?;
    let p = momentum_matrix(ls, a, setup.order);
    let pd = metric_adjoint(&p, &fm, &fmm);
    let mid = (ls / 2) as f64;
    let (lo, hi) = (setup.order, ls - setup.order);
    let gi = I * setup.g;
    let (mut mom, mut alt, mut kin) = (0.0f64, 0.0f64, 0.0f64);
    for c in [-1.0, 0.0, 1.0] {
        let f = CVec::from_iterator(ls, (0..ls).map(|j| {
            let xj = (j as f64 - mid) * a - c;
            c64((-xj * xj / 2.0).exp(), 0.0)
        }));
        let pf = &p * &f;
        let pdf = &pd * &f;
        mom = mom.max(bulk_max(&(&pdf - &pf - &f * (gi * 2.0)), lo, hi));
        alt = alt.max(bulk_max(&(&pdf + &pf), lo, hi));
        // pc‡ = p‡ - ig
        kin = kin.max(bulk_max(&((&pdf - &f * gi) - (&pf + &f * gi)), lo, hi));
    }
    Ok(MetricReport {
        inverse_defect: inv.iter().map(|z| z.norm()).fold(0.0, f64::max),
        position_defect: pos,
        momentum_defect: mom,
        alternative_defect: alt,
        kinetic_defect: kin,
    })
}

/// The vector potential of the canonical form and its consequences.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalField {
    /// `A(x_j; g)` at the sites.
    pub field: Vec<f64>,
    /// `max |{pc, A}|` entrywise.
    pub anticommutator: f64,
    /// `max_g d(spec D_g H(g) D_g^{-1}, spec H(0))`.
    pub g_dependence: f64,
    pub step_form: String,
}

/// `A(x; g) = (i/2) d/dx ln|T_g(x)|^2 + i g` with `T_g = e^{-g x}`, evaluated
/// with central differences on the sites, for each `g` in `gs`.
pub fn canonical_field_a(model: &LatticeModel, gs: &[f64]) -> Result<CanonicalField> {
    require_open(model, "canonical field")?;
    let l = model.sites;
    let mut field = vec![0.0f64; l];
    let mut g_dep: f64 = 0.0;
    let spec0 = model.with_g(0.0).spectrum()?;
    for &g in gs {
        let ln_t2: Vec<f64> = (0..l).map(|j| (-g * j as f64).exp().powi(2).ln()).collect();
        for j in 0..l {
            let d = if j == 0 {
                ln_t2[1] - ln_t2[0]
            } else if j == l - 1 {
                ln_t2[l - 1] - ln_t2[l - 2]
            } else {
                0.5 * (ln_t2[j + 1] - ln_t2[j - 1])
            };
            // (i/2) d + i g is purely imaginary; record its imaginary part
            let a_im = 0.5 * d + g;
            field[j] = field[j].max(a_im.abs());
        }
        let m = model.with_g(g);
        let dg = gauge_matrix(l, g);
        let canon = &dg * m.matrix() * gauge_matrix(l, -g);
        g_dep = g_dep.max(spectral_distance(&eigenvalues(&canon)?, &spec0)?);
    }
    let p = momentum_matrix(l, 1.0, 2);
    let a = CMat::from_diagonal(&CVec::from_iterator(l, field.iter().map(|&v| c64(0.0, v))));
    let anti = &p * &a + &a * &p;
    Ok(CanonicalField {
        field,
        anticommutator: anti.iter().map(|z| z.norm()).fold(0.0, f64::max),
        g_dependence: g_dep,
        step_form: "A(x; g) = theta(g - g_c) * 0 with g_c = inf".to_string(),
    })
}

/// `g,index,re_e,im_e` rows for a sequence of spectra.
pub fn spectra_csv(rows: &[(f64, Vec<C64>)]) -> String {
    let mut out = String::from("g,index,re_e,im_e\n");
    for (g, spec) in rows {
        for (k, e) in spec.iter().enumerate() {
            out.push_str(&format!("{g},{k},{},{}\n", e.re, e.im));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| c64(x, 0.0)).collect()
    }

    #[test]
    fn clean_ring_of_four() {
        let m = build_lattice(4, 1.0, 0.0, vec![0.0; 4], Boundary::Periodic).unwrap();
        let s = m.spectrum().unwrap();
        assert!(spectral_distance(&s, &reals(&[0.0, 2.0, 2.0, 4.0])).unwrap() < 1e-12);
        assert!(build_lattice(3, 1.0, 0.0, vec![0.0; 3], Boundary::Open).is_err());
    }

    #[test]
    fn symmetric_at_zero_g() {
        let m = build_lattice(12, 1.0, 0.0, random_potential(12, 1.0, 3), Boundary::Open).unwrap();
        let h = m.matrix();
        assert_eq!(h, h.transpose());
        assert!(m.spectrum().unwrap().iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn potential_is_reproducible() {
        let a = random_potential(10, 2.0, 42);
        assert_eq!(a, random_potential(10, 2.0, 42));
        assert!(a.iter().all(|v| v.abs() <= 1.0));
        assert_ne!(a, random_potential(10, 2.0, 43));
    }

    #[test]
    fn open_chain_spectrum_independent_of_g() {
        let v = random_potential(24, 1.0, 5);
        let m0 = build_lattice(24, 1.0, 0.0, v.clone(), Boundary::Open).unwrap();
        let m1 = m0.with_g(0.7);
        let d = spectral_distance(&m0.spectrum().unwrap(), &m1.spectrum().unwrap()).unwrap();
        assert!(d < 1e-10);
    }

    #[test]
    fn biorthogonal_system() {
        let m = build_lattice(32, 1.0, 0.5, random_potential(32, 1.0, 11), Boundary::Open).unwrap();
        let h = m.matrix();
        let sys = biorthogonal_eigensystem(&h).unwrap();
        assert!(sys.biorthogonality_defect() < 1e-10, "{}", sys.biorthogonality_defect());
        assert!(sys.completeness_defect() < 1e-8);
        assert!(sys.left_residual(&h) < 1e-9);
        for n in [0, 7, 31] {
            let rho = density_profile(&sys, n).unwrap();
            let total: C64 = rho.iter().sum();
            assert!((total - 1.0).norm() < 1e-10);
            assert!(rho.iter().all(|z| z.im.abs() < 1e-9));
        }
        let herm = build_lattice(16, 1.0, 0.0, random_potential(16, 1.0, 1), Boundary::Open).unwrap();
        let sys = biorthogonal_eigensystem(&herm.matrix()).unwrap();
        assert!((&sys.left - &sys.right).norm() < 1e-10);
        let rho = density_profile(&sys, 2).unwrap();
        assert!(rho.iter().all(|z| z.re >= -1e-15));
    }

    #[test]
    fn defective_matrix_flagged() {
        let mut j = CMat::zeros(2, 2);
        j[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(biorthogonal_eigensystem(&j), Err(Error::ExceptionalPoint { .. })));
    }

    #[test]
    fn pairing_and_ellipse() {
        let m = build_lattice(20, 1.0, 0.5, vec![0.0; 20], Boundary::Periodic).unwrap();
        let s = m.spectrum().unwrap();
        assert!(spectral_distance(&s, &clean_ring_spectrum(20, 1.0, 0.5)).unwrap() < 1e-10);
        let p = pairing_defect(&m).unwrap();
        assert!(p.closure < 1e-10 && p.sign_pairing < 1e-10);
        let r = build_lattice(20, 1.0, 0.3, random_potential(20, 1.0, 9), Boundary::Periodic).unwrap();
        let p = pairing_defect(&r).unwrap();
        assert!(p.closure < 1e-10 && p.sign_pairing < 1e-10);
        assert_eq!(pairing_defect(&r.with_g(0.0)).unwrap().sign_pairing, 0.0);
    }

    #[test]
    fn scans() {
        let grid: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
        let open = build_lattice(32, 1.0, 0.0, random_potential(32, 1.0, 2), Boundary::Open).unwrap();
        assert!(critical_g_scan(&open, &grid, None).unwrap().g_c.is_infinite());
        let clean = build_lattice(32, 1.0, 0.0, vec![0.0; 32], Boundary::Periodic).unwrap();
        let s = critical_g_scan(&clean, &grid, None).unwrap();
        assert!(s.g_c < 1e-3, "{}", s.g_c);
        assert!(critical_g_scan(&clean, &[], None).is_err());
    }

    #[test]
    fn gauge_identity() {
        let m = build_lattice(64, 1.0, 0.5, random_potential(64, 1.0, 4), Boundary::Open).unwrap();
        let r = imaginary_gauge_check(&m).unwrap();
        assert!(r.similarity_defect < 1e-13);
        assert!(r.spectral_distance < 1e-10, "{}", r.spectral_distance);
        assert!(r.eigenvector_map_defect < 1e-8, "{}", r.eigenvector_map_defect);
        assert!(r.center_shift > 0.0);
        assert_eq!(gauge_matrix(5, 0.0), identity(5));
        assert!(imaginary_gauge_check(&m.clone_with_bc(Boundary::Periodic)).is_err());
    }

    #[test]
    fn stencil_weights() {
        assert_eq!(central_stencil(2), vec![-0.5, 0.0, 0.5]);
        let w = central_stencil(4);
        assert!((w[3] - 2.0 / 3.0).abs() < 1e-15 && (w[4] + 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn metric_relations() {
        let m = build_lattice(32, 1.0, 0.3, random_potential(32, 1.0, 17), Boundary::Open).unwrap();
        let r = metric_adjoint_relation(&m, &MomentumSetup::default()).unwrap();
        assert!(r.inverse_defect < 1e-9, "{}", r.inverse_defect);
        assert!(r.position_defect < 1e-8, "{}", r.position_defect);
        assert!(r.momentum_defect < 1e-6, "{}", r.momentum_defect);
        assert!(r.kinetic_defect < 1e-6);
        assert!(r.alternative_defect > 0.1);
    }

    #[test]
    fn vanishing_field() {
        let m = build_lattice(16, 1.0, 0.0, random_potential(16, 1.0, 8), Boundary::Open).unwrap();
        let f = canonical_field_a(&m, &[0.0, 0.25, 1.0]).unwrap();
        assert!(f.field.iter().all(|v| v.abs() < 1e-12));
        assert!(f.anticommutator < 1e-12);
        assert!(f.g_dependence < 1e-8);
        let ring = m.clone_with_bc(Boundary::Periodic);
        assert!(canonical_field_a(&ring, &[0.5]).is_err());
    }

    #[test]
    fn csv_rows() {
        let csv = spectra_csv(&[(0.5, vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 2.0)])]);
        assert_eq!(csv.lines().next(), Some("g,index,re_e,im_e"));
        assert_eq!(csv.lines().nth(4), Some("0.5,3,1,2"));
    }
}
