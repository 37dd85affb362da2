//! Special functions: generalized Laguerre, spherical Bessel, complex Gamma
//! and cylinder Bessel functions of complex order on the positive real axis.

use std::f64::consts::PI;

use crate::{c64, C64};

/// `L^{(alpha)}_k(y)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k + 1 + alpha - y) L_k - (k + alpha) L_{k-1}`.
pub fn laguerre(k: usize, alpha: f64, y: C64) -> C64 {
    let mut prev = c64(1.0, 0.0);
    if k == 0 {
        return prev;
    }
    let mut cur = c64(1.0 + alpha, 0.0) - y;
    for j in 1..k {
        let jf = j as f64;
        let next = ((c64(2.0 * jf + 1.0 + alpha, 0.0) - y) * cur - prev * (jf + alpha)) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Spherical Bessel functions `j_0(x) .. j_nmax(x)` for `x > 0`.
///
/// Orders below `x` come from the upward recurrence, which is stable there.
/// Higher orders use Miller's downward recurrence started at
/// `nmax + ceil(10 + 1.5 x)` and normalized against the closed form of
/// `j_0` or `j_1`, whichever is larger in magnitude at `x`.
pub fn spherical_bessel_all(nmax: usize, x: f64) -> Vec<f64> {
    assert!(x > 0.0, "spherical_bessel_all needs x > 0");
    let requested = nmax;
    let nmax = nmax.max(1);
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let j1 = s / (x * x) - c / x;
    let mut out = vec![0.0; nmax + 1];
    if (nmax as f64) < x {
        out[0] = j0;
        out[1] = j1;
        for k in 1..nmax {
            out[k + 1] = (2.0 * k as f64 + 1.0) / x * out[k] - out[k - 1];
        }
        out.truncate(requested + 1);
        return out;
    }
    let start = nmax + (10.0 + 1.5 * x).ceil() as usize;
    let mut above = 0.0f64;
    let mut cur = 1e-300f64;
    for k in (1..=start).rev() {
        let below = (2.0 * k as f64 + 1.0) / x * cur - above;
        above = cur;
        cur = below;
        if k - 1 <= nmax {
            out[k - 1] = cur;
        }
        if k <= nmax {
            out[k] = above;
        }
        if cur.abs() > 1e250 {
            let r = 1e-250;
            cur *= r;
            above *= r;
            for v in out.iter_mut() {
                *v *= r;
            }
        }
    }
    let norm = if j0.abs() >= j1.abs() { j0 / out[0] } else { j1 / out[1] };
    for v in out.iter_mut() {
        *v *= norm;
    }
    // stable upward part overrides for orders below x
    let upto = (x.floor() as usize).min(nmax);
    if upto >= 1 {
        out[0] = j0;
        out[1] = j1;
        for k in 1..upto {
            out[k + 1] = (2.0 * k as f64 + 1.0) / x * out[k] - out[k - 1];
        }
    }
    out.truncate(requested + 1);
    out
}

/// Spherical Bessel `j_n(x)` for `x > 0`.
pub fn spherical_bessel(n: usize, x: f64) -> f64 {
    spherical_bessel_all(n, x)[n]
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex Gamma function (Lanczos, with reflection for `Re z < 1/2`).
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let s = (c64(PI, 0.0) * z).sin();
        return c64(PI, 0.0) / (s * gamma(c64(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut acc = c64(LANCZOS[0], 0.0);
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        acc += coef / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    c64((2.0 * PI).sqrt(), 0.0) * t.powc(z + 0.5) * (-t).exp() * acc
}

/// Cylinder Bessel function `J_alpha(x)` for complex order and `x > 0`.
///
/// Power series below `x = 12`, Hankel asymptotic expansion above.
pub fn bessel_j(alpha: C64, x: f64) -> C64 {
    assert!(x > 0.0, "bessel_j needs x > 0");
    if x < 12.0 {
        let half = x / 2.0;
        let mut term = c64(half, 0.0).powc(alpha) / gamma(alpha + 1.0);
        let mut sum = term;
        for k in 1..200 {
            term *= -(half * half) / (k as f64 * (alpha + k as f64));
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        return sum;
    }
    let mu = alpha * alpha * 4.0;
    let mut p = c64(1.0, 0.0);
    let mut q = c64(0.0, 0.0);
    let mut term = c64(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let mag = term.norm();
        if mag > last {
            break;
        }
        last = mag;
        if k % 2 == 1 {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += term * sign;
        } else {
            let sign = if (k / 2) % 2 == 1 { -1.0 } else { 1.0 };
            p += term * sign;
        }
        if mag < 1e-17 {
            break;
        }
    }
    let chi = c64(x, 0.0) - alpha * (PI / 2.0) - PI / 4.0;
    (p * chi.cos() - q * chi.sin()) * (2.0 / (PI * x)).sqrt()
}

/// Nodes and weights of `n`-point Gauss–Legendre quadrature on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_low_orders() {
        let y = c64(0.7, -0.2);
        assert_eq!(laguerre(0, 1.0, y), c64(1.0, 0.0));
        assert!((laguerre(1, 1.0, y) - (c64(2.0, 0.0) - y)).norm() < 1e-15);
        // L^(1)_2(y) = 3 - 3y + y^2/2
        let l2 = c64(3.0, 0.0) - y * 3.0 + y * y * 0.5;
        assert!((laguerre(2, 1.0, y) - l2).norm() < 1e-14);
    }

    #[test]
    fn spherical_bessel_closed_forms() {
        for &x in &[0.1, 0.5, 1.0, 2.0, 5.0, 17.3] {
            let (s, c) = f64::sin_cos(x);
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            let all = spherical_bessel_all(4, x);
            assert!((all[0] - s / x).abs() < 1e-14);
            assert!((all[1] - (s / (x * x) - c / x)).abs() < 1e-13);
            assert!((all[2] - j2).abs() < 1e-12 * (1.0 + 1.0 / (x * x)), "x={x}");
        }
        assert!((spherical_bessel(1, 1.0) - 0.301_168_678_939_756_8).abs() < 1e-15);
    }

    #[test]
    fn spherical_bessel_at_sine_zero_uses_j1() {
        let v = spherical_bessel_all(5, PI);
        assert!(v[0].abs() < 1e-16);
        assert!((v[1] - 1.0 / PI).abs() < 1e-15);
        assert!(v[5].is_finite() && v[5] != 0.0);
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(c64(5.0, 0.0)) - c64(24.0, 0.0)).norm() < 1e-12);
        assert!((gamma(c64(0.5, 0.0)) - c64(PI.sqrt(), 0.0)).norm() < 1e-13);
        // |Gamma(i)|^2 = pi / (sinh pi)
        let g = gamma(c64(0.0, 1.0));
        assert!((g.norm_sqr() - PI / PI.sinh()).abs() < 1e-13);
    }

    #[test]
    fn bessel_half_integer_matches_spherical() {
        for &x in &[0.3, 3.0, 11.9, 12.1, 40.0, 900.0] {
            for n in 0..4 {
                let j = bessel_j(c64(n as f64 + 0.5, 0.0), x);
                let sph = spherical_bessel(n, x) * (2.0 * x / PI).sqrt();
                assert!((j - c64(sph, 0.0)).norm() < 1e-11, "n={n} x={x}: {j} vs {sph}");
            }
        }
    }

    #[test]
    fn bessel_series_and_asymptotic_agree_for_complex_order() {
        let a = c64(0.5, 1.0);
        let lo = bessel_j(a, 11.999_999);
        let hi = bessel_j(a, 12.000_001);
        assert!((lo - hi).norm() < 1e-5);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
