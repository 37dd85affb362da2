use nhspec::hatano_nelson::{
    biorthogonal_eigensystem, build_lattice, canonical_field_a, critical_g_scan, density_profile, imaginary_gauge_check,
    metric_adjoint_relation, pairing_defect, random_potential, spectra_csv, Boundary, MomentumSetup,
};
use nhspec::hilbert::spectral_distance;
use nhspec::{c64, C64};

#[test]
fn long_open_chain_spectrum_is_real_and_g_independent() {
    let v = random_potential(128, 1.0, 2024);
    let base = build_lattice(128, 1.0, 0.0, v, Boundary::Open).unwrap();
    let s0 = base.spectrum().unwrap();
    for g in [0.25, 0.5, 1.0] {
        let s = base.with_g(g).spectrum().unwrap();
        assert!(spectral_distance(&s, &s0).unwrap() < 1e-8, "g={g}");
        assert!(s.iter().all(|z| z.im.abs() < 1e-8));
    }
    let gauge = imaginary_gauge_check(&base.with_g(0.5)).unwrap();
    assert!(gauge.similarity_defect < 1e-13);
    assert!(gauge.center_shift.abs() > 1.0);
}

#[test]
fn disorder_raises_the_delocalization_threshold() {
    let grid: Vec<f64> = (0..=20).map(|k| 0.05 * k as f64).collect();
    let g_c = |w: f64| {
        let m = build_lattice(96, 1.0, 0.0, random_potential(96, w, 8), Boundary::Periodic).unwrap();
        critical_g_scan(&m, &grid, None).unwrap()
    };
    let (weak, strong) = (g_c(1.0), g_c(4.0));
    assert!(weak.g_c.is_finite() && strong.g_c.is_finite());
    assert!(strong.g_c > weak.g_c);
    assert!(strong.bracket < 1e-4);
}

#[test]
fn ring_pairing_and_densities() {
    let m = build_lattice(48, 1.0, 0.4, random_potential(48, 2.0, 3), Boundary::Periodic).unwrap();
    let p = pairing_defect(&m).unwrap();
    assert!(p.closure < 1e-10 && p.sign_pairing < 1e-10);
    let sys = biorthogonal_eigensystem(&m.matrix()).unwrap();
    assert!(sys.completeness_defect() < 1e-8);
    for k in 0..sys.len() {
        let total: C64 = density_profile(&sys, k).unwrap().iter().sum();
        assert!((total - 1.0).norm() < 1e-10);
    }
}

#[test]
fn metric_and_canonical_field() {
    let m = build_lattice(24, 1.0, 0.2, random_potential(24, 1.0, 5), Boundary::Open).unwrap();
    let r = metric_adjoint_relation(&m, &MomentumSetup::default()).unwrap();
    assert!(r.inverse_defect < 1e-9 && r.momentum_defect < 1e-6);
    assert!(r.alternative_defect > 0.1);
    let f = canonical_field_a(&m, &[0.1, 0.5, 1.0]).unwrap();
    assert!(f.field.iter().all(|a| a.abs() < 1e-12));
    assert!(f.g_dependence < 1e-9);
    assert!(canonical_field_a(&m.clone_with_bc(Boundary::Periodic), &[0.1]).is_err());
}

#[test]
fn spectra_csv_is_reproducible() {
    let rows = |seed| {
        let m = build_lattice(16, 1.0, 0.0, random_potential(16, 1.0, seed), Boundary::Periodic).unwrap();
        let v: Vec<(f64, Vec<C64>)> = [0.0, 0.5].iter().map(|&g| (g, m.with_g(g).spectrum().unwrap())).collect();
        spectra_csv(&v)
    };
    assert_eq!(rows(11), rows(11));
    assert_ne!(rows(11), rows(12));
    assert_eq!(spectra_csv(&[(0.5, vec![C64::new(0.0, 0.0); 3].into_iter().chain([c64(1.0, 2.0)]).collect())]).lines().nth(4), Some("0.5,3,1,2"));
}
