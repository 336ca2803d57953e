//! The resonant, oscillatory and full bilinear operators, and the Poincare
//! propagator.
//!
//! Every operator sums table entries per output slot. When both inputs are
//! real only output modes in the lexicographically positive half are
//! evaluated and the rest are filled by conjugation, so real inputs give
//! exactly real outputs.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{inner_product, SpectralField};
use crate::lattice::{slot, Helicity, ModeIndex};
use crate::resonance::table::{EntryBlock, TriadTable};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn check_fields(table: &TriadTable, fields: &[&SpectralField]) -> Result<()> {
    for f in fields {
        if f.radius() != table.radius() {
            return Err(Error::Dimension {
                expected: table.radius(),
                found: f.radius(),
            });
        }
    }
    Ok(())
}

/// Sum of one block's entries for an output slot, optionally with phases
/// `exp(i theta D)`.
#[inline]
fn slot_sum(block: &EntryBlock, out: usize, u: &[Complex64], v: &[Complex64], theta: Option<f64>) -> Complex64 {
    let mut acc = ZERO;
    match theta {
        None => {
            for e in block.slot_entries(out) {
                acc += e.coeff * u[e.u_slot as usize] * v[e.v_slot as usize];
            }
        }
        Some(th) => {
            for e in block.slot_entries(out) {
                let (s, c) = (th * e.rate).sin_cos();
                acc += e.coeff * Complex64::new(c, s) * u[e.u_slot as usize] * v[e.v_slot as usize];
            }
        }
    }
    acc
}

/// Evaluates `sum_b slot_sum(blocks[b])` for every output slot.
fn evaluate(
    table: &TriadTable,
    u: &SpectralField,
    v: &SpectralField,
    blocks: &[(&EntryBlock, Option<f64>)],
) -> Result<SpectralField> {
    check_fields(table, &[u, v])?;
    let basis = table.basis();
    let real = u.is_real() && v.is_real();
    let (ua, va) = (u.amplitudes(), v.amplitudes());
    let modes = basis.num_modes();
    let pairs: Vec<[Complex64; 2]> = (0..modes as ModeIndex)
        .into_par_iter()
        .map(|i| {
            if real && !basis.mode(i).is_lex_positive() {
                return [ZERO; 2];
            }
            Helicity::BOTH.map(|s| {
                let out = slot(i, s);
                let mut acc = ZERO;
                for (block, theta) in blocks {
                    acc += slot_sum(block, out, ua, va, *theta);
                }
                acc
            })
        })
        .collect();
    let mut amps: Vec<Complex64> = pairs.into_iter().flatten().collect();
    if real {
        for i in 0..modes as ModeIndex {
            if !basis.mode(i).is_lex_positive() {
                let j = basis.negated(i);
                for s in Helicity::BOTH {
                    amps[slot(i, s)] = amps[slot(j, s)].conj();
                }
            }
        }
    }
    Ok(SpectralField::from_parts(basis.clone(), amps, real))
}

fn oscillatory_block(table: &TriadTable) -> Result<&EntryBlock> {
    table.oscillatory().ok_or(Error::MissingOscillatory)
}

/// `B~(u, v)`: resonant interactions only.
pub fn apply_resonant(table: &TriadTable, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    evaluate(table, u, v, &[(table.resonant(), None)])
}

/// `B^osc(omega_t, u, v)`: non-resonant interactions with phases
/// `exp(i omega_t D)`.
pub fn apply_oscillatory(table: &TriadTable, u: &SpectralField, v: &SpectralField, omega_t: f64) -> Result<SpectralField> {
    let osc = oscillatory_block(table)?;
    evaluate(table, u, v, &[(osc, Some(omega_t))])
}

/// `B(omega_t, u, v) = B~(u, v) + B^osc(omega_t, u, v)`, one phase per entry.
pub fn apply_full(table: &TriadTable, u: &SpectralField, v: &SpectralField, omega_t: f64) -> Result<SpectralField> {
    let osc = oscillatory_block(table)?;
    evaluate(table, u, v, &[(table.resonant(), None), (osc, Some(omega_t))])
}

/// `E(omega_t) B(E(-omega_t) u, E(-omega_t) v)`, the same operator as
/// [`apply_full`] evaluated with propagators instead of per-entry phases.
pub fn apply_full_propagated(
    table: &TriadTable,
    u: &SpectralField,
    v: &SpectralField,
    omega_t: f64,
) -> Result<SpectralField> {
    let osc = oscillatory_block(table)?;
    if omega_t == 0.0 {
        return evaluate(table, u, v, &[(table.resonant(), None), (osc, None)]);
    }
    let up = poincare_propagate(u, -omega_t);
    let vp = poincare_propagate(v, -omega_t);
    let b = evaluate(table, &up, &vp, &[(table.resonant(), None), (osc, None)])?;
    Ok(poincare_propagate(&b, omega_t))
}

/// `E(theta)`: multiplies mode `(k, s)` by `exp(i s theta k3 / |k|)`.
pub fn poincare_propagate(u: &SpectralField, theta: f64) -> SpectralField {
    let basis = u.basis();
    let amps = u
        .amplitudes()
        .chunks_exact(2)
        .enumerate()
        .flat_map(|(i, pair)| {
            let i = i as ModeIndex;
            let a = basis.mode(i).third() as f64 / basis.norm(i);
            Helicity::BOTH.map(|s| {
                let (sn, cs) = (s.signf() * theta * a).sin_cos();
                pair[s.offset()] * Complex64::new(cs, sn)
            })
        })
        .collect();
    SpectralField::from_parts(basis.clone(), amps, u.is_real())
}

/// `<B~(u, v), w>`.
pub fn resonant_pairing(table: &TriadTable, u: &SpectralField, v: &SpectralField, w: &SpectralField) -> Result<Complex64> {
    inner_product(&apply_resonant(table, u, v)?, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{l2_norm, random_real_field, sobolev_norm};
    use crate::lattice::{Basis, LatticeVector};
    use crate::resonance::table::build_triad_table;
    use std::sync::{Arc, OnceLock};

    fn table(r: u32) -> &'static TriadTable {
        static T3: OnceLock<TriadTable> = OnceLock::new();
        static T4: OnceLock<TriadTable> = OnceLock::new();
        let cell = match r {
            3 => &T3,
            4 => &T4,
            _ => unreachable!(),
        };
        cell.get_or_init(|| build_triad_table(Arc::new(Basis::new(r).unwrap()), true).unwrap())
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bilinear_in_each_argument() {
        let t = table(3);
        let b = t.basis().clone();
        let (u1, u2, v) = (random_real_field(b.clone(), 1), random_real_field(b.clone(), 2), random_real_field(b, 3));
        let (a1, a2) = (0.7, -1.3);
        let u = u1.lin_comb(a1, &u2, a2).unwrap();
        type Op = Box<dyn Fn(&SpectralField, &SpectralField) -> SpectralField>;
        let ops: Vec<Op> = vec![
            Box::new(|x, y| apply_resonant(t, x, y).unwrap()),
            Box::new(|x, y| apply_oscillatory(t, x, y, 0.8).unwrap()),
            Box::new(|x, y| apply_full(t, x, y, 2.1).unwrap()),
        ];
        for op in &ops {
            let lhs = op(&u, &v);
            let rhs = op(&u1, &v).lin_comb(a1, &op(&u2, &v), a2).unwrap();
            assert!(max_diff(&lhs, &rhs) < 1e-12);
            let lhs = op(&v, &u);
            let rhs = op(&v, &u1).lin_comb(a1, &op(&v, &u2), a2).unwrap();
            assert!(max_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn cancellation_and_polarization() {
        let t = table(4);
        let b = t.basis().clone();
        for seed in 0..5 {
            let u = random_real_field(b.clone(), 10 * seed);
            let v = random_real_field(b.clone(), 10 * seed + 1);
            let w = random_real_field(b.clone(), 10 * seed + 2);
            let uvv = resonant_pairing(t, &u, &v, &v).unwrap();
            assert!(uvv.norm() < 1e-12, "{uvv}");
            let uvw = resonant_pairing(t, &u, &v, &w).unwrap();
            let uwv = resonant_pairing(t, &u, &w, &v).unwrap();
            assert!((uvw + uwv).norm() < 1e-12);
            for theta in [0.0, 0.3, 5.0] {
                let full = inner_product(&apply_full(t, &u, &v, theta).unwrap(), &v).unwrap();
                assert!(full.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn real_inputs_give_real_outputs() {
        let t = table(3);
        let b = t.basis().clone();
        let (u, v) = (random_real_field(b.clone(), 4), random_real_field(b, 5));
        for out in [
            apply_resonant(t, &u, &v).unwrap(),
            apply_oscillatory(t, &u, &v, 1.7).unwrap(),
            apply_full(t, &u, &v, 1.7).unwrap(),
            apply_full_propagated(t, &u, &v, 1.7).unwrap(),
        ] {
            assert!(out.is_real());
            assert_eq!(out.reality_defect(), 0.0);
        }
    }

    #[test]
    fn half_evaluation_matches_full_evaluation() {
        let t = table(3);
        let b = t.basis().clone();
        let (u, v) = (random_real_field(b.clone(), 6), random_real_field(b, 7));
        // a tiny imaginary perturbation that is then removed forces the
        // general path through both halves
        let eps = c(0.0, 1e-300);
        let un = u.scale(c(1.0, 0.0) + eps);
        assert!(!un.is_real());
        let a = apply_full(t, &u, &v, 0.4).unwrap();
        let g = apply_full(t, &un, &v, 0.4).unwrap();
        assert!(max_diff(&a, &g) < 1e-13);
    }

    #[test]
    fn partition_reproduces_full() {
        let t = table(4);
        let b = t.basis().clone();
        let (u, v) = (random_real_field(b.clone(), 8), random_real_field(b, 9));
        for theta in [0.0, 0.9, 31.0] {
            let full = apply_full(t, &u, &v, theta).unwrap();
            let sum = apply_resonant(t, &u, &v)
                .unwrap()
                .lin_comb(1.0, &apply_oscillatory(t, &u, &v, theta).unwrap(), 1.0)
                .unwrap();
            assert!(max_diff(&full, &sum) <= 1e-12 * l2_norm(&full));
        }
    }

    #[test]
    fn conjugation_identity() {
        let t = table(4);
        let b = t.basis().clone();
        let (u, v) = (random_real_field(b.clone(), 11), random_real_field(b, 12));
        for theta in [0.0, 0.25, 3.0, 170.0] {
            let up = poincare_propagate(&u, -theta);
            let vp = poincare_propagate(&v, -theta);
            let lhs = poincare_propagate(&apply_full(t, &up, &vp, 0.0).unwrap(), theta);
            let rhs = apply_full(t, &u, &v, theta).unwrap();
            assert!(max_diff(&lhs, &rhs) <= 1e-9 * l2_norm(&rhs).max(1e-300));
            let fact = apply_full_propagated(t, &u, &v, theta).unwrap();
            assert!(max_diff(&fact, &rhs) <= 1e-9 * l2_norm(&rhs));
        }
    }

    #[test]
    fn propagator_group_and_isometry() {
        let b = Arc::new(Basis::new(5).unwrap());
        let u = random_real_field(b, 3);
        assert_eq!(poincare_propagate(&u, 0.0).amplitudes(), u.amplitudes());
        let (t1, t2) = (0.37, -2.9);
        let two = poincare_propagate(&poincare_propagate(&u, t1), t2);
        let one = poincare_propagate(&u, t1 + t2);
        assert!(max_diff(&two, &one) < 1e-14);
        for s in [0.0, 1.0] {
            let p = poincare_propagate(&u, 12.5);
            assert!((sobolev_norm(&p, s) - sobolev_norm(&u, s)).abs() < 1e-12);
        }
        assert_eq!(poincare_propagate(&u, 1.1).reality_defect(), 0.0);
    }

    #[test]
    fn non_resonant_pair_gives_zero() {
        let t = table(3);
        let b = t.basis().clone();
        let u = SpectralField::single_mode(b.clone(), &LatticeVector::new(0, 0, 1), Helicity::Plus, c(1.0, 0.0)).unwrap();
        let v = SpectralField::single_mode(b, &LatticeVector::new(1, 0, 0), Helicity::Plus, c(1.0, 0.0)).unwrap();
        let out = apply_resonant(t, &u, &v).unwrap();
        assert!(out.amplitudes().iter().all(|z| *z == ZERO));
        assert!(l2_norm(&apply_full(t, &u, &v, 0.0).unwrap()) > 0.1);
    }

    #[test]
    fn horizontal_single_term() {
        // u = phi_{e1,+} e^{2 pi i x}, v = phi_{e2,+} e^{2 pi i y}:
        // phi_{e1,+} = (0,-1,-i)/sqrt2 and phi_{e2,+} = (1,0,-i)/sqrt2, so
        // u.grad v = 2 pi i (phi_{e1,+} . e2) phi_{e2,+} = (-pi i, 0, -pi),
        // whose projection off (1,1,0) is (-pi i/2, pi i/2, -pi).
        let t = table(3);
        let b = t.basis().clone();
        let k = LatticeVector::new(1, 0, 0);
        let m = LatticeVector::new(0, 1, 0);
        let u = SpectralField::single_mode(b.clone(), &k, Helicity::Plus, c(1.0, 0.0)).unwrap();
        let v = SpectralField::single_mode(b.clone(), &m, Helicity::Plus, c(1.0, 0.0)).unwrap();
        let out = apply_resonant(t, &u, &v).unwrap();
        let n = b.index_of(&LatticeVector::new(1, 1, 0)).unwrap();
        let pi = std::f64::consts::PI;
        let want = [c(0.0, -pi / 2.0), c(0.0, pi / 2.0), c(-pi, 0.0)];
        let got = out.cartesian(n);
        for j in 0..3 {
            assert!((got[j] - want[j]).norm() < 1e-13, "{j}: {} vs {}", got[j], want[j]);
        }
        let rest: f64 = (0..b.num_modes() as ModeIndex)
            .filter(|&i| i != n)
            .flat_map(|i| Helicity::BOTH.map(|s| out.get(i, s).norm()))
            .sum();
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn missing_oscillatory_block() {
        let b = Arc::new(Basis::new(2).unwrap());
        let t = build_triad_table(b.clone(), false).unwrap();
        let u = random_real_field(b, 1);
        assert!(matches!(apply_full(&t, &u, &u, 0.0), Err(Error::MissingOscillatory)));
        assert!(apply_resonant(&t, &u, &u).is_ok());
    }

    #[test]
    fn truncation_mismatch() {
        let t = table(3);
        let u = random_real_field(Arc::new(Basis::new(2).unwrap()), 1);
        assert!(matches!(apply_resonant(t, &u, &u), Err(Error::Dimension { .. })));
    }
}
