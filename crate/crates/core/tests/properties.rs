use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use proptest::prelude::*;
use resonant_core::analysis::{hminus1_bound, trilinear_ratio};
use resonant_core::field::{inner_product, l2_norm, random_real_field, sobolev_norm};
use resonant_core::io::{decode_state, encode_state, parse_config};
use resonant_core::lattice::{Basis, Helicity, LatticeVector};
use resonant_core::operators::{apply_resonant, poincare_propagate};
use resonant_core::resonance::{build_triad_table, phase_rate_f64, resonance_holds, squarefree_decompose, TriadTable};

fn table() -> &'static TriadTable {
    static T: OnceLock<TriadTable> = OnceLock::new();
    T.get_or_init(|| build_triad_table(Arc::new(Basis::new(4).unwrap()), false).unwrap())
}

fn lattice(r: i64) -> impl Strategy<Value = LatticeVector> {
    (-r..=r, -r..=r, -r..=r)
        .prop_map(|(a, b, c)| LatticeVector::new(a, b, c))
        .prop_filter("nonzero", |k| !k.is_zero())
}

fn helicity() -> impl Strategy<Value = Helicity> {
    prop_oneof![Just(Helicity::Plus), Just(Helicity::Minus)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn squarefree_parts_multiply_back(a in 1u64..10_000_000) {
        let (r, s) = squarefree_decompose(a).unwrap();
        prop_assert_eq!(r * r * s, a);
        let mut p = 2;
        while p * p <= s {
            prop_assert!(s % (p * p) != 0);
            p += 1;
        }
    }

    #[test]
    fn resonance_symmetries(k in lattice(12), m in lattice(12), s1 in helicity(), s2 in helicity(), s3 in helicity()) {
        prop_assume!(!(k + m).is_zero());
        let r = resonance_holds(&k, &m, s1, s2, s3).unwrap();
        prop_assert_eq!(r, resonance_holds(&m, &k, s2, s1, s3).unwrap());
        prop_assert_eq!(r, resonance_holds(&-k, &-m, s1, s2, s3).unwrap());
        let d = phase_rate_f64(&k, &m, s1, s2, s3);
        if r {
            prop_assert!(d.abs() < 1e-12);
        } else {
            prop_assert!(d.abs() > 1e-9, "nonresonant with |D| = {}", d.abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn resonant_cancellation_and_polarization(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let t = table();
        let basis = t.basis().clone();
        let (u, v, w) = (random_real_field(basis.clone(), a), random_real_field(basis.clone(), b), random_real_field(basis, c));
        let buv = apply_resonant(t, &u, &v).unwrap();
        prop_assert!(inner_product(&buv, &v).unwrap().norm() < 1e-13);
        let lhs = inner_product(&buv, &w).unwrap();
        let rhs = inner_product(&apply_resonant(t, &u, &w).unwrap(), &v).unwrap();
        prop_assert!((lhs + rhs).norm() < 1e-13);
    }

    #[test]
    fn resonant_bilinearity(a in any::<u64>(), b in any::<u64>(), x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let t = table();
        let basis = t.basis().clone();
        let (u, v, w) = (random_real_field(basis.clone(), a), random_real_field(basis.clone(), b), random_real_field(basis, a ^ b));
        let mix = u.lin_comb(x, &w, y).unwrap();
        let left = apply_resonant(t, &mix, &v).unwrap();
        let right = apply_resonant(t, &u, &v).unwrap().lin_comb(x, &apply_resonant(t, &w, &v).unwrap(), y).unwrap();
        prop_assert!(l2_norm(&left.sub(&right).unwrap()) < 1e-12);
    }

    #[test]
    fn trilinear_ratio_is_dominated_by_its_dual_bound(a in any::<u64>(), b in any::<u64>()) {
        let t = table();
        let basis = t.basis().clone();
        let (u, v) = (random_real_field(basis.clone(), a), random_real_field(basis, b));
        let r = trilinear_ratio(t, &u, &v).unwrap();
        prop_assert!(r.is_finite() && r >= 0.0);
        prop_assert!(r <= hminus1_bound(t, &u).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn propagator_preserves_sobolev_norms(a in any::<u64>(), theta in -50.0f64..50.0) {
        let u = random_real_field(table().basis().clone(), a);
        let e = poincare_propagate(&u, theta);
        for s in [0.0, 1.0] {
            prop_assert!((sobolev_norm(&e, s) - sobolev_norm(&u, s)).abs() <= 1e-12 * sobolev_norm(&u, s));
        }
        prop_assert!(e.is_real());
    }

    #[test]
    fn state_round_trip(a in any::<u64>(), radius in 1u32..5, re in -1e3f64..1e3, im in -1e3f64..1e3) {
        let b = Arc::new(Basis::new(radius).unwrap());
        let u = random_real_field(b, a).scale(Complex64::new(re, im));
        let back = decode_state(&encode_state(&u), None).unwrap();
        prop_assert_eq!(back.amplitudes(), u.amplitudes());
    }

    #[test]
    fn config_round_trip(radius in 1u32..64, nu in 1e-6f64..10.0, dt in 1e-6f64..1.0, horizon in 1e-3f64..100.0, omega in 0.0f64..1e4, seed in any::<u64>(), every in 1usize..1000) {
        let text = format!("radius={radius} nu={nu} dt={dt} horizon={horizon} omega={omega} seed={seed} sample-every={every}");
        let c = parse_config(&text).unwrap();
        prop_assert_eq!(c.solver.nu, nu);
        prop_assert_eq!(c.solver.dt, dt);
        prop_assert_eq!(parse_config(&c.resolved_lines().join("\n")).unwrap(), c);
    }
}
