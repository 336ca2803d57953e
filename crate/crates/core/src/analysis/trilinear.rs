use rayon::prelude::*;

use super::{sample_seed, EstimateReport};
use crate::error::{Error, Result};
use crate::field::{inner_product, l2_norm, random_real_field, sobolev_norm, SpectralField};
use crate::operators::{apply_full_propagated, apply_resonant};
use crate::resonance::table::TriadTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrilinearOperator {
    Resonant,
    /// The full operator at phase zero.
    Full,
}

fn ratio_with(table: &TriadTable, u: &SpectralField, v: &SpectralField, op: TrilinearOperator) -> Result<f64> {
    let den = l2_norm(u) * sobolev_norm(u, 1.0) * sobolev_norm(v, 1.0);
    if den == 0.0 {
        return Err(Error::domain("trilinear_ratio", "u and v must be nonzero"));
    }
    let b = match op {
        TrilinearOperator::Resonant => apply_resonant(table, u, v)?,
        TrilinearOperator::Full => apply_full_propagated(table, u, v, 0.0)?,
    };
    Ok(inner_product(&b, u)?.norm() / den)
}

/// `|<B~(u,v), u>| / (||u||_{L^2} ||u||_{H^1} ||v||_{H^1})`.
pub fn trilinear_ratio(table: &TriadTable, u: &SpectralField, v: &SpectralField) -> Result<f64> {
    ratio_with(table, u, v, TrilinearOperator::Resonant)
}

/// The same ratio with the full operator in place of `B~`.
pub fn trilinear_ratio_full(table: &TriadTable, u: &SpectralField, v: &SpectralField) -> Result<f64> {
    ratio_with(table, u, v, TrilinearOperator::Full)
}

/// Trilinear ratio over `samples` independent random real pairs.
pub fn sample_trilinear(table: &TriadTable, samples: usize, seed: u64, op: TrilinearOperator) -> Result<EstimateReport> {
    let basis = table.basis();
    let ratios = (0..samples as u64)
        .into_par_iter()
        .map(|j| {
            let u = random_real_field(basis.clone(), sample_seed(seed, 2 * j));
            let v = random_real_field(basis.clone(), sample_seed(seed, 2 * j + 1));
            ratio_with(table, &u, &v, op)
        })
        .collect::<Result<Vec<f64>>>()?;
    let name = match op {
        TrilinearOperator::Resonant => "trilinear",
        TrilinearOperator::Full => "trilinear-full",
    };
    Ok(EstimateReport::new(name, table.radius(), seed, ratios))
}

/// `||B~(u,u)||_{H^-1} / (||u||_{L^2} ||u||_{H^1})`.
pub fn hminus1_bound(table: &TriadTable, u: &SpectralField) -> Result<f64> {
    let den = l2_norm(u) * sobolev_norm(u, 1.0);
    if den == 0.0 {
        return Err(Error::domain("hminus1_bound", "u must be nonzero"));
    }
    Ok(sobolev_norm(&apply_resonant(table, u, u)?, -1.0) / den)
}

pub fn sample_hminus1(table: &TriadTable, samples: usize, seed: u64) -> Result<EstimateReport> {
    let basis = table.basis();
    let ratios = (0..samples as u64)
        .into_par_iter()
        .map(|j| hminus1_bound(table, &random_real_field(basis.clone(), sample_seed(seed, j))))
        .collect::<Result<Vec<f64>>>()?;
    Ok(EstimateReport::new("hminus1", table.radius(), seed, ratios))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Basis, Helicity, LatticeVector};
    use crate::resonance::table::build_triad_table;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn table() -> TriadTable {
        build_triad_table(Arc::new(Basis::new(4).unwrap()), true).unwrap()
    }

    #[test]
    fn diagonal_ratio_vanishes() {
        let t = table();
        let u = random_real_field(t.basis().clone(), 1);
        assert!(trilinear_ratio(&t, &u, &u).unwrap() < 1e-13);
        let v = random_real_field(t.basis().clone(), 2);
        assert!(trilinear_ratio(&t, &u, &v).unwrap() > 1e-6);
    }

    #[test]
    fn zero_fields_are_rejected() {
        let t = table();
        let z = SpectralField::zeros(t.basis().clone());
        let u = random_real_field(t.basis().clone(), 1);
        assert!(trilinear_ratio(&t, &z, &u).is_err());
        assert!(hminus1_bound(&t, &z).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let t = table();
        let a = sample_trilinear(&t, 20, 5, TrilinearOperator::Resonant).unwrap();
        let b = sample_trilinear(&t, 20, 5, TrilinearOperator::Resonant).unwrap();
        assert_eq!(a, b);
        assert!(a.ratios.iter().all(|r| r.is_finite() && *r >= 0.0 && *r <= a.max_ratio));
        let f = sample_trilinear(&t, 20, 5, TrilinearOperator::Full).unwrap();
        assert_eq!(f.samples(), 20);
    }

    #[test]
    fn single_mode_has_zero_hminus1_ratio() {
        let t = table();
        let u = SpectralField::real_mode_pair(t.basis().clone(), &LatticeVector::new(1, 1, 2), Helicity::Plus, Complex64::new(0.5, 0.5))
            .unwrap();
        assert_eq!(hminus1_bound(&t, &u).unwrap(), 0.0);
    }

    #[test]
    fn hminus1_dominates_duality_pairings() {
        let t = table();
        for seed in 0..5 {
            let u = random_real_field(t.basis().clone(), seed);
            let h = hminus1_bound(&t, &u).unwrap();
            let b = apply_resonant(&t, &u, &u).unwrap();
            for j in 0..5 {
                let v = random_real_field(t.basis().clone(), 100 + 10 * seed + j);
                let lower = inner_product(&b, &v).unwrap().norm()
                    / (sobolev_norm(&v, 1.0) * l2_norm(&u) * sobolev_norm(&u, 1.0));
                assert!(lower <= h * (1.0 + 1e-12));
            }
        }
    }
}
