//! Independent closed forms and solvers that the library must reproduce.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, SymmetricEigen};
use nhspec::cannata::{norm_squared, position_wavefunction};
use nhspec::coulomb::{coulomb_eigenfunction, coulomb_spectrum, overlap, Coupling};
use nhspec::hatano_nelson::{build_lattice, clean_ring_spectrum, random_potential, Boundary};
use nhspec::hilbert::spectral_distance;
use nhspec::linalg::eigenvalues;
use nhspec::quad::CompositeGauss;
use nhspec::special::{bessel_j, gamma, laguerre, spherical_bessel_all};
use nhspec::{c64, CMat, I};

#[test]
fn spherical_bessel_matches_closed_forms() {
    for x in [0.3, 1.0, 4.2, 17.0, 60.0] {
        let (s, c) = (f64::sin(x), f64::cos(x));
        let j = spherical_bessel_all(2, x);
        assert_relative_eq!(j[0], s / x, max_relative = 1e-13);
        assert_relative_eq!(j[1], s / (x * x) - c / x, max_relative = 1e-12, epsilon = 1e-15);
        let j2 = (3.0 / (x * x * x) - 1.0 / x) * s - 3.0 * c / (x * x);
        assert_relative_eq!(j[2], j2, max_relative = 1e-11, epsilon = 1e-15);
    }
}

#[test]
fn spherical_bessel_agrees_with_half_integer_cylinder_functions() {
    for x in [0.7, 3.0, 9.5] {
        let j = spherical_bessel_all(8, x);
        for (n, jn) in j.iter().enumerate() {
            let via_cyl = (PI / (2.0 * x)).sqrt() * bessel_j(c64(n as f64 + 0.5, 0.0), x).re;
            // the power series loses a few digits to cancellation as x approaches 12
            assert!((jn - via_cyl).abs() < 1e-11, "n={n} x={x}: {}", jn - via_cyl);
        }
    }
}

#[test]
fn laguerre_low_orders() {
    for y in [0.0, 0.5, 2.0, 7.0] {
        let z = c64(y, 0.0);
        assert_eq!(laguerre(0, 1.0, z), c64(1.0, 0.0));
        assert_relative_eq!(laguerre(1, 1.0, z).re, 2.0 - y, epsilon = 1e-15);
        assert_relative_eq!(laguerre(2, 1.0, z).re, (y * y - 6.0 * y + 6.0) / 2.0, epsilon = 1e-13);
    }
}

#[test]
fn gamma_values() {
    assert_relative_eq!(gamma(c64(5.0, 0.0)).re, 24.0, max_relative = 1e-13);
    assert_relative_eq!(gamma(c64(0.5, 0.0)).re, PI.sqrt(), max_relative = 1e-13);
    // |Gamma(i)|^2 = pi / sinh(pi)
    assert_relative_eq!(gamma(I).norm_sqr(), PI / PI.sinh(), max_relative = 1e-12);
}

#[test]
fn gauss_legendre_is_exact_on_polynomials() {
    let q = CompositeGauss::new(10);
    let v = q.integrate(-1.0, 2.0, 3, |x| x.powi(7) - 3.0 * x * x);
    assert_relative_eq!(v, (2f64.powi(8) - 1.0) / 8.0 - 9.0, max_relative = 1e-13);
}

#[test]
fn zero_asymmetry_matches_symmetric_solver() {
    let m = build_lattice(40, 1.0, 0.0, random_potential(40, 2.0, 5), Boundary::Open).unwrap();
    let h = m.matrix();
    let real = DMatrix::from_fn(40, 40, |r, c| h[(r, c)].re);
    let sym = SymmetricEigen::new(real).eigenvalues;
    let ours = eigenvalues(&h).unwrap();
    let want: Vec<_> = sym.iter().map(|&e| c64(e, 0.0)).collect();
    assert!(spectral_distance(&ours, &want).unwrap() < 1e-12);
}

#[test]
fn clean_ring_is_the_ellipse() {
    for g in [0.0, 0.3, 1.0] {
        let m = build_lattice(24, 1.0, g, vec![0.0; 24], Boundary::Periodic).unwrap();
        let d = spectral_distance(&m.spectrum().unwrap(), &clean_ring_spectrum(24, 1.0, g)).unwrap();
        assert!(d < 1e-12, "g={g}: {d}");
    }
}

#[test]
fn coulomb_closed_forms() {
    let one = c64(1.0, 0.0);
    assert_relative_eq!(coulomb_eigenfunction(1, one, c64(2.0, 0.0)).unwrap().re, 2.0 * (-1f64).exp(), max_relative = 1e-15);
    for x in [0.5f64, 3.0, 11.0] {
        let want = (-x / 4.0).exp() * (x / 2.0) * (2.0 - x / 2.0);
        assert_relative_eq!(coulomb_eigenfunction(2, one, c64(x, 0.0)).unwrap().re, want, max_relative = 1e-13, epsilon = 1e-15);
    }
    assert_eq!(coulomb_spectrum(2, Coupling::Hermitian(2.0)).unwrap(), -0.25);
    assert_eq!(coulomb_spectrum(1, Coupling::Rotated(2.0)).unwrap(), 1.0);
    assert!(overlap(1, 2, 1.0).unwrap().abs() < 1e-10);
    assert!(overlap(2, 3, 1.5).unwrap().abs() < 1e-10);
}

#[test]
fn bessel_picture_closed_forms() {
    assert_relative_eq!(position_wavefunction(0, PI / 2.0).unwrap(), (1.0 / PI).sqrt() * 2.0 / PI, max_relative = 1e-15);
    assert_relative_eq!(norm_squared(I).unwrap(), (-PI).exp() * (2.0 * PI).sinh() / PI, max_relative = 1e-13);
}

#[test]
fn two_level_characteristic_polynomial() {
    // eigenvalues of [[ia, 1], [1, -ia]] solve lambda^2 = 1 - a^2
    for a in [0.0, 0.5, 0.99, 1.5, 2.0] {
        let h = CMat::from_row_slice(2, 2, &[c64(0.0, a), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, -a)]);
        let r = c64(1.0 - a * a, 0.0).sqrt();
        let d = spectral_distance(&eigenvalues(&h).unwrap(), &[r, -r]).unwrap();
        assert!(d < 1e-12, "a={a}: {d}");
    }
}
