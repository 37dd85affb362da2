use nhspec::coulomb::{
    anti_stokes_check, anti_stokes_profile, canonical_equivalence_report, coulomb_spectrum, envelope_peak,
    schrodinger_residual, uniform, CoulombModel, Coupling,
};

#[test]
fn both_branches_solve_their_equations() {
    let grid = uniform(0.1, 20.0, 1e-2);
    for n in 1..=4 {
        for c in [Coupling::Rotated(1.0), Coupling::Hermitian(1.0), Coupling::Rotated(2.5)] {
            let r = schrodinger_residual(n, c, &grid).unwrap();
            assert!(r < 1e-6, "n={n} {c:?}: {r}");
        }
    }
}

#[test]
fn rotated_spectrum_is_minus_hermitian_and_positive() {
    let rot = CoulombModel::new(Coupling::Rotated(1.3), 6).unwrap().energies();
    let herm = CoulombModel::new(Coupling::Hermitian(1.3), 6).unwrap().energies();
    assert!(rot.iter().zip(&herm).all(|(a, b)| *a == -*b && *a > 0.0));
    assert!(rot.windows(2).all(|w| w[1] < w[0]));
    for n in 1..=5 {
        let r = canonical_equivalence_report(n, 1.0).unwrap();
        assert_eq!(r.energy, -r.hermitian_energy);
        assert_eq!(r.energy, coulomb_spectrum(n, Coupling::Rotated(1.0)).unwrap());
    }
}

#[test]
fn decay_past_the_envelope_maximum() {
    let radii = [10.0, 20.0, 40.0];
    for n in 1..=4 {
        let prof = anti_stokes_profile(n, 1.0, &radii).unwrap();
        assert!(prof.iter().all(|s| s.anti_stokes < s.opposite), "n={n}");
        if envelope_peak(n, 1.0) < radii[0] {
            assert!(anti_stokes_check(n, 1.0, &radii).unwrap());
        }
    }
    // n = 4 peaks at r = 32 and is still rising at r = 20
    assert!(!anti_stokes_check(4, 1.0, &radii).unwrap());
    assert!(anti_stokes_check(4, 1.0, &[80.0, 120.0, 160.0]).unwrap());
}
