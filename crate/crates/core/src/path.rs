//! Scalar products along complex paths, realized on a uniform grid.
//!
//! A path `z(s)`, `s in [-L, L]`, carries the scalar product
//! `(f, g) = sum_j w_j conj(f_j) g_j` with trapezoid weights on the grid.
//! The canonical pair is `x^c = diag(s_j)` and `p^c = -i d/ds` (second-order
//! central differences, one-sided at the ends). The path operators are
//! `x_H = diag(z(s_j))` and `p_H = diag(1/z'(s_j)) p^c`.
//!
//! `x_H` and `x^c` are simultaneously diagonal here, so every function of
//! `x^c` that appears in the adjoint of `p_H` (the phase `v` and the
//! curvature term `w`) collapses to a pointwise grid function.
//!
//! Boundary rows carry stencil artifacts; all defects are measured on the
//! interior index range, which drops [`BOUNDARY_WIDTH`] nodes at each end.

use std::f64::consts::FRAC_PI_2;
use std::ops::Range;

use crate::error::invalid;
use crate::hilbert::{weighted_adjoint, weighted_hermiticity_defect};
use crate::{c64, CMat, CVec, Error, Result, C64, I};

/// Nodes excluded at each end of the grid.
pub const BOUNDARY_WIDTH: usize = 4;

/// Minimum grid size accepted by [`build_path_rep`].
pub const MIN_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum PathKind {
    /// `z(s) = a + b s`.
    Straight { a: C64, b: C64 },
    /// Values of `z`, `z'` and `z''` at the grid nodes.
    Sampled { z: Vec<C64>, dz: Vec<C64>, d2z: Vec<C64> },
}

/// A parameterized complex path on the uniform grid `s_j = -L + 2 L j / (M - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub kind: PathKind,
    pub half_length: f64,
    pub samples: usize,
}

impl PathSpec {
    pub fn straight(a: C64, b: C64, half_length: f64, samples: usize) -> Result<Self> {
        if b.norm() == 0.0 {
            return Err(invalid("straight path needs b != 0"));
        }
        Self::check_grid(half_length, samples)?;
        Ok(Self { kind: PathKind::Straight { a, b }, half_length, samples })
    }

    /// Sample an analytic parameterization and its first two derivatives.
    pub fn from_fn(
        half_length: f64,
        samples: usize,
        z: impl Fn(f64) -> C64,
        dz: impl Fn(f64) -> C64,
        d2z: impl Fn(f64) -> C64,
    ) -> Result<Self> {
        Self::check_grid(half_length, samples)?;
        let s = uniform_grid(half_length, samples);
        let spec = Self {
            kind: PathKind::Sampled {
                z: s.iter().map(|&t| z(t)).collect(),
                dz: s.iter().map(|&t| dz(t)).collect(),
                d2z: s.iter().map(|&t| d2z(t)).collect(),
            },
            half_length,
            samples,
        };
        spec.check_nondegenerate()?;
        Ok(spec)
    }

    /// Parse a whitespace- or comma-separated table with columns
    /// `s, Re z, Im z, Re z', Im z', Re z'', Im z''`. Lines starting with `#`
    /// are ignored. The `s` column must be a uniform grid symmetric about 0.
    pub fn from_table(text: &str) -> Result<Self> {
        let mut s = Vec::new();
        let (mut z, mut dz, mut d2z) = (Vec::new(), Vec::new(), Vec::new());
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<f64> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))?;
            if cols.len() != 7 {
                return Err(invalid(format!("line {}: expected 7 columns, got {}", lineno + 1, cols.len())));
            }
            s.push(cols[0]);
            z.push(c64(cols[1], cols[2]));
            dz.push(c64(cols[3], cols[4]));
            d2z.push(c64(cols[5], cols[6]));
        }
        let samples = s.len();
        if samples < 2 {
            return Err(invalid("path table needs at least two rows"));
        }
        let half_length = s[samples - 1];
        Self::check_grid(half_length, samples)?;
        let expected = uniform_grid(half_length, samples);
        let h = 2.0 * half_length / (samples - 1) as f64;
        if let Some(j) = s.iter().zip(&expected).position(|(a, b)| (a - b).abs() > 1e-9 * h.max(1.0)) {
            return Err(invalid(format!("s column is not the uniform grid on [-L, L] (row {j})")));
        }
        let spec = Self { kind: PathKind::Sampled { z, dz, d2z }, half_length, samples };
        spec.check_nondegenerate()?;
        Ok(spec)
    }

    fn check_grid(half_length: f64, samples: usize) -> Result<()> {
        if !(half_length > 0.0) {
            return Err(invalid(format!("half length {half_length} must be positive")));
        }
        if samples < MIN_SAMPLES {
            return Err(invalid(format!("grid size {samples} below {MIN_SAMPLES}")));
        }
        Ok(())
    }

    fn check_nondegenerate(&self) -> Result<()> {
        if let PathKind::Sampled { z, dz, d2z } = &self.kind {
            let m = self.samples;
            if z.len() != m || dz.len() != m || d2z.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: z.len().min(dz.len()).min(d2z.len()) });
            }
            if let Some(node) = dz.iter().position(|d| d.norm() == 0.0) {
                return Err(Error::DegeneratePath { node });
            }
        }
        Ok(())
    }

    pub fn s_grid(&self) -> Vec<f64> {
        uniform_grid(self.half_length, self.samples)
    }

    /// `(z, z', z'')` at the nodes.
    pub fn derivatives(&self) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        match &self.kind {
            PathKind::Straight { a, b } => {
                let s = self.s_grid();
                (
                    s.iter().map(|&t| a + b * t).collect(),
                    vec![*b; self.samples],
                    vec![c64(0.0, 0.0); self.samples],
                )
            }
            PathKind::Sampled { z, dz, d2z } => (z.clone(), dz.clone(), d2z.clone()),
        }
    }
}

fn uniform_grid(half_length: f64, samples: usize) -> Vec<f64> {
    let h = 2.0 * half_length / (samples - 1) as f64;
    (0..samples).map(|j| -half_length + h * j as f64).collect()
}

/// Second-order first-derivative matrix on a uniform grid.
pub fn first_derivative_matrix(samples: usize, h: f64) -> CMat {
    let mut d = CMat::zeros(samples, samples);
    let c = 1.0 / (2.0 * h);
    for j in 1..samples - 1 {
        d[(j, j - 1)] = c64(-c, 0.0);
        d[(j, j + 1)] = c64(c, 0.0);
    }
    d[(0, 0)] = c64(-3.0 * c, 0.0);
    d[(0, 1)] = c64(4.0 * c, 0.0);
    d[(0, 2)] = c64(-c, 0.0);
    let l = samples - 1;
    d[(l, l)] = c64(3.0 * c, 0.0);
    d[(l, l - 1)] = c64(-4.0 * c, 0.0);
    d[(l, l - 2)] = c64(c, 0.0);
    d
}

/// Grid matrices of one path.
#[derive(Debug, Clone)]
pub struct PathGridRep {
    pub s: Vec<f64>,
    pub quad_weights: Vec<f64>,
    /// `z'` at the nodes; needed to realize `d/dx_H`.
    pub dz: Vec<C64>,
    pub xc: CMat,
    pub pc: CMat,
    pub xh: CMat,
    pub ph: CMat,
    pub interior: Range<usize>,
}

impl PathGridRep {
    pub fn samples(&self) -> usize {
        self.s.len()
    }

    pub fn spacing(&self) -> f64 {
        self.s[1] - self.s[0]
    }

    /// Adjoint with respect to the trapezoid product.
    pub fn adjoint(&self, a: &CMat) -> CMat {
        weighted_adjoint(a, &self.quad_weights)
    }

    /// Hermiticity defect of `a` restricted to interior index pairs.
    pub fn interior_hermiticity_defect(&self, a: &CMat) -> f64 {
        let r = self.interior.clone();
        let n = r.len();
        let sub = a.view((r.start, r.start), (n, n)).into_owned();
        weighted_hermiticity_defect(&sub, &self.quad_weights[r], n - 1)
    }

    /// `d/dx_H g = (1/z') dg/ds` for a grid function.
    pub fn d_dxh(&self, g: &[C64]) -> Vec<C64> {
        let d = &self.pc * CVec::from_column_slice(g) * I;
        d.iter().zip(&self.dz).map(|(v, dz)| v / dz).collect()
    }
}

/// Build the grid representation of a path.
pub fn build_path_rep(path: &PathSpec) -> Result<PathGridRep> {
    path.check_nondegenerate()?;
    let m = path.samples;
    let s = path.s_grid();
    let h = s[1] - s[0];
    let mut quad_weights = vec![h; m];
    quad_weights[0] = 0.5 * h;
    quad_weights[m - 1] = 0.5 * h;
    let (z, dz, _) = path.derivatives();
    if let Some(node) = dz.iter().position(|d| d.norm() == 0.0) {
        return Err(Error::DegeneratePath { node });
    }
    let pc = first_derivative_matrix(m, h) * (-I);
    let xc = CMat::from_diagonal(&CVec::from_iterator(m, s.iter().map(|&t| c64(t, 0.0))));
    let xh = CMat::from_diagonal(&CVec::from_column_slice(&z));
    let mut ph = pc.clone();
    for (r, d) in dz.iter().enumerate() {
        let inv = d.inv();
        for c in 0..m {
            ph[(r, c)] *= inv;
        }
    }
    Ok(PathGridRep {
        s,
        quad_weights,
        dz,
        xc,
        pc,
        xh,
        ph,
        interior: BOUNDARY_WIDTH..m - BOUNDARY_WIDTH,
    })
}

/// `v = z'/conj(z')` and `w = conj(z'')/(z' conj(z'))` at the nodes.
pub fn compute_v_w(path: &PathSpec) -> Result<(Vec<C64>, Vec<C64>)> {
    path.check_nondegenerate()?;
    let (_, dz, d2z) = path.derivatives();
    if let Some(node) = dz.iter().position(|d| d.norm() == 0.0) {
        return Err(Error::DegeneratePath { node });
    }
    let v = dz.iter().map(|d| d / d.conj()).collect();
    let w = dz.iter().zip(&d2z).map(|(d, dd)| dd.conj() / (d * d.conj())).collect();
    Ok((v, w))
}

/// Pointwise residual of the consistency condition between `v` and `w`:
/// `dv/ds - [conj(w) - v w] z'`, with `dv/ds` taken analytically from
/// `z'` and `z''`. Returns the largest interior magnitude.
pub fn vw_condition_defect(path: &PathSpec) -> Result<f64> {
    let (v, w) = compute_v_w(path)?;
    let (_, dz, d2z) = path.derivatives();
    let m = path.samples;
    let mut worst: f64 = 0.0;
    for j in BOUNDARY_WIDTH..m - BOUNDARY_WIDTH {
        let (d, dd) = (dz[j], d2z[j]);
        let dv = (dd * d.conj() - d * dd.conj()) / (d.conj() * d.conj());
        let rhs = (w[j].conj() - v[j] * w[j]) * d;
        worst = worst.max((dv - rhs).norm());
    }
    Ok(worst)
}

fn diag(v: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(v))
}

/// Assemble `(p_H‡)^2` from its expansion in `v`, `w` and `p_H`:
/// `[v d(vw)/dx_H - (vw)^2] + i [2 v^2 w - v dv/dx_H] p_H + v^2 p_H^2`.
pub fn adjoint_p_squared_via_formula(rep: &PathGridRep, v: &[C64], w: &[C64]) -> Result<CMat> {
    let m = rep.samples();
    if v.len() != m || w.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: v.len().min(w.len()) });
    }
    let vw: Vec<C64> = v.iter().zip(w).map(|(a, b)| a * b).collect();
    let dvw = rep.d_dxh(&vw);
    let dv = rep.d_dxh(v);
    let c0: Vec<C64> = (0..m).map(|j| v[j] * dvw[j] - vw[j] * vw[j]).collect();
    let c1: Vec<C64> = (0..m).map(|j| I * (v[j] * v[j] * w[j] * 2.0 - v[j] * dv[j])).collect();
    let c2: Vec<C64> = v.iter().map(|a| a * a).collect();
    let ph2 = &rep.ph * &rep.ph;
    Ok(diag(&c0) + diag(&c1) * &rep.ph + diag(&c2) * ph2)
}

/// `(p_H‡)^2` from the weighted matrix adjoint; independent of the expansion.
pub fn adjoint_p_squared_direct(rep: &PathGridRep) -> CMat {
    let a = rep.adjoint(&rep.ph);
    &a * &a
}

/// Smooth test functions supported well inside the grid.
pub fn interior_test_functions(rep: &PathGridRep) -> CMat {
    let l = rep.s[rep.samples() - 1];
    let sigma = l / 8.0;
    let centers = [-0.25 * l, 0.0, 0.25 * l];
    let waves = [0.0, 1.0];
    let mut t = CMat::zeros(rep.samples(), centers.len() * waves.len());
    let mut col = 0;
    for &c in &centers {
        for &k in &waves {
            for (j, &s) in rep.s.iter().enumerate() {
                let g = (-(s - c) * (s - c) / (2.0 * sigma * sigma)).exp();
                t[(j, col)] = c64(0.0, k * s).exp() * g;
            }
            col += 1;
        }
    }
    t
}

/// Relative Frobenius difference of two operators on the interior test functions.
pub fn relative_action_difference(rep: &PathGridRep, a: &CMat, b: &CMat) -> f64 {
    let t = interior_test_functions(rep);
    let (ya, yb) = (a * &t, b * &t);
    let r = rep.interior.clone();
    let n = r.len();
    let da = (ya.rows(r.start, n) - yb.rows(r.start, n)).norm();
    da / yb.rows(r.start, n).norm()
}

/// Outcome of the straight-line classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct StraightLineReport {
    pub hermitian: bool,
    /// Distance of `arg b` from the nearest multiple of pi/2.
    pub angle_residual: f64,
    /// Interior Hermiticity defect of `p_H^2` on the grid.
    pub grid_defect: f64,
}

/// Default angular tolerance for `arg b = n pi / 2`.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

/// Distance of `arg b` from the nearest multiple of pi/2.
pub fn quarter_turn_residual(b: C64) -> f64 {
    let r = b.arg().rem_euclid(FRAC_PI_2);
    r.min(FRAC_PI_2 - r)
}

/// Decide whether `p_H^2` is Hermitian on the line `a + b s` and measure it on a grid.
pub fn straight_line_hermiticity_check(a: C64, b: C64, half_length: f64, samples: usize) -> Result<StraightLineReport> {
    let path = PathSpec::straight(a, b, half_length, samples)?;
    let rep = build_path_rep(&path)?;
    let ph2 = &rep.ph * &rep.ph;
    let angle_residual = quarter_turn_residual(b);
    Ok(StraightLineReport {
        hermitian: angle_residual < ANGLE_TOLERANCE,
        angle_residual,
        grid_defect: rep.interior_hermiticity_defect(&ph2),
    })
}

/// Interior Hermiticity defect of `p_H^2 + V(x_H)`.
pub fn hamiltonian_defect(rep: &PathGridRep, potential: impl Fn(C64) -> C64) -> f64 {
    let mut h = &rep.ph * &rep.ph;
    for j in 0..rep.samples() {
        h[(j, j)] += potential(rep.xh[(j, j)]);
    }
    rep.interior_hermiticity_defect(&h)
}

/// Rectangle in the complex plane on which an analytic function may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Domain {
    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }
}

/// A function handed to [`apply_translation_dilatation`].
pub enum FunctionRep<'a> {
    /// Evaluable anywhere in the domain.
    Analytic { f: &'a dyn Fn(C64) -> C64, domain: Domain },
    /// Samples on an increasing real grid; linear interpolation, real arguments only.
    Sampled { x: &'a [f64], values: &'a [C64] },
}

/// Result of a translation-dilatation.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub values: Vec<C64>,
    /// True when the modulus at either end of the grid exceeds the modulus at
    /// the centre, i.e. the transformed function is not decaying.
    pub grows: bool,
}

/// `s -> psi(a + b s)` on the given parameter grid.
///
/// This is `(1/sqrt b) T_t(a/b) T_d(ln b)` acting on `psi`; the `sqrt b`
/// factors of the dilatation and the prefactor cancel.
pub fn apply_translation_dilatation(f: &FunctionRep<'_>, a: C64, b: C64, s: &[f64]) -> Result<Transformed> {
    if b.norm() == 0.0 {
        return Err(invalid("b = 0"));
    }
    let mut values = Vec::with_capacity(s.len());
    for (node, &t) in s.iter().enumerate() {
        let z = a + b * t;
        let outside = || Error::OutsideDomain { node, point: format!("{z}") };
        let val = match f {
            FunctionRep::Analytic { f, domain } => {
                if !domain.contains(z) {
                    return Err(outside());
                }
                f(z)
            }
            FunctionRep::Sampled { x, values: ys } => {
                if z.im != 0.0 {
                    return Err(outside());
                }
                let xr = z.re;
                let n = x.len();
                if n < 2 || xr < x[0] || xr > x[n - 1] {
                    return Err(outside());
                }
                let k = match x.partition_point(|&p| p <= xr) {
                    0 => 0,
                    k if k >= n => n - 2,
                    k => k - 1,
                };
                let u = (xr - x[k]) / (x[k + 1] - x[k]);
                ys[k] * (1.0 - u) + ys[k + 1] * u
            }
        };
        values.push(val);
    }
    let mid = values[values.len() / 2].norm();
    let grows = values.first().map_or(false, |v| v.norm() > mid) || values.last().map_or(false, |v| v.norm() > mid);
    Ok(Transformed { values, grows })
}
