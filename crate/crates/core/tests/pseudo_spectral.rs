mod common;

use std::sync::Arc;

use num_complex::Complex64;
use resonant_core::field::{random_real_field, SpectralField};
use resonant_core::lattice::{Basis, Helicity, LatticeVector};
use resonant_core::operators::{apply_full, apply_resonant};
use resonant_core::resonance::build_triad_table;

#[test]
fn full_operator_matches_grid_products() {
    let b = Arc::new(Basis::new(4).unwrap());
    let table = build_triad_table(b.clone(), true).unwrap();
    for seed in 0..3 {
        let u = random_real_field(b.clone(), seed);
        let got = apply_full(&table, &u, &u, 0.0).unwrap();
        let want = common::pseudo_spectral_advection(&u, 13);
        let err = common::relative_error(got.amplitudes(), &want);
        assert!(err < 1e-12, "seed {seed}: {err}");
    }
}

#[test]
fn coarse_grid_aliases() {
    let b = Arc::new(Basis::new(4).unwrap());
    let table = build_triad_table(b.clone(), true).unwrap();
    let u = random_real_field(b.clone(), 5);
    let got = apply_full(&table, &u, &u, 0.0).unwrap();
    let want = common::pseudo_spectral_advection(&u, 9);
    assert!(common::relative_error(got.amplitudes(), &want) > 1e-6);
}

#[test]
fn single_helical_wave_is_a_steady_solution() {
    // u . grad u = grad(|u|^2 / 2) for a Beltrami wave pair, so P kills it.
    let b = Arc::new(Basis::new(3).unwrap());
    let table = build_triad_table(b.clone(), true).unwrap();
    let u = SpectralField::real_mode_pair(b.clone(), &LatticeVector::new(1, 2, 0), Helicity::Minus, Complex64::new(0.3, 0.7)).unwrap();
    let full = apply_full(&table, &u, &u, 0.0).unwrap();
    assert!(full.amplitudes().iter().all(|z| z.norm() < 1e-14));
    assert!(apply_resonant(&table, &u, &u).unwrap().amplitudes().iter().all(|z| z.norm() < 1e-14));
}
