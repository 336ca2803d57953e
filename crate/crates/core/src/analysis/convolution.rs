use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::lattice::{Basis, DyadicShellIndex, Helicity, LatticeVector, ModeIndex};
use crate::resonance::counting::counting_lemma_sup;
use crate::resonance::exact::in_gamma;

/// Indicator of a set of triads `(k, m, n)`; only triads with
/// `k + m + n = 0` are ever queried.
pub trait TriadIndicator: Sync {
    fn contains(&self, k: &LatticeVector, m: &LatticeVector, n: &LatticeVector) -> bool;
}

impl<F> TriadIndicator for F
where
    F: Fn(&LatticeVector, &LatticeVector, &LatticeVector) -> bool + Sync,
{
    fn contains(&self, k: &LatticeVector, m: &LatticeVector, n: &LatticeVector) -> bool {
        self(k, m, n)
    }
}

/// `(k, m, n)` with `+-k3/|k| +- m3/|m| +- n3/|n| = 0` for some signs.
#[derive(Clone, Copy, Debug, Default)]
pub struct GammaIndicator;

impl TriadIndicator for GammaIndicator {
    fn contains(&self, k: &LatticeVector, m: &LatticeVector, n: &LatticeVector) -> bool {
        in_gamma(k, m, n)
    }
}

/// Every triad of a truncation selected by an indicator, as mode indices.
#[derive(Clone, Debug)]
pub struct TriadList {
    basis: Arc<Basis>,
    triads: Vec<[ModeIndex; 3]>,
}

impl TriadList {
    /// Collects the triads and checks that the indicator is invariant under
    /// swapping `k, m` and `m, n` on them.
    pub fn new(basis: Arc<Basis>, chi: &dyn TriadIndicator) -> Result<Self> {
        let modes = basis.num_modes() as ModeIndex;
        let per_k: Vec<Result<Vec<[ModeIndex; 3]>>> = (0..modes)
            .into_par_iter()
            .map(|k| {
                let kv = basis.mode(k);
                let mut out = Vec::new();
                for m in 0..modes {
                    let mv = basis.mode(m);
                    let nv = -(kv + mv);
                    let Some(n) = basis.index_of(&nv) else { continue };
                    if !chi.contains(&kv, &mv, &nv) {
                        continue;
                    }
                    if !chi.contains(&mv, &kv, &nv) || !chi.contains(&kv, &nv, &mv) {
                        return Err(Error::Hypothesis(format!(
                            "indicator is not symmetric at ({kv}, {mv}, {nv})"
                        )));
                    }
                    out.push([k, m, n]);
                }
                Ok(out)
            })
            .collect();
        let mut triads = Vec::new();
        for part in per_k {
            triads.extend(part?);
        }
        Ok(Self { basis, triads })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.triads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triads.is_empty()
    }

    pub fn triads(&self) -> &[[ModeIndex; 3]] {
        &self.triads
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionReport {
    /// `sum chi(k,m,n) |u_k| |m| |v_m| |u_n|`.
    pub left: f64,
    /// The six ordered partial sums.
    pub j: [f64; 6],
    /// `||u||_{H^{a/2}} ||u||_{H^{b/2}}`.
    pub first_norm_term: f64,
    /// `||u||_{L^2} ||u||_{H^{(a+b)/2}}`.
    pub second_norm_term: f64,
    pub v_h1: f64,
}

impl ConvolutionReport {
    pub fn j_total(&self) -> f64 {
        self.j.iter().sum()
    }

    /// `(first + second) ||v||_{H^1}`.
    pub fn right(&self) -> f64 {
        (self.first_norm_term + self.second_norm_term) * self.v_h1
    }

    pub fn ratio(&self) -> f64 {
        self.left / self.right()
    }

    /// The constant tracked through the ordered splitting:
    /// `2 sqrt(2 C0) (first + 2 second) ||v||_{H^1}`, where `C0` bounds the
    /// dyadic sums.
    pub fn proof_bound(&self, c0: f64) -> f64 {
        2.0 * (2.0 * c0).sqrt() * (self.first_norm_term + 2.0 * self.second_norm_term) * self.v_h1
    }

    pub fn pairs_match(&self) -> bool {
        self.j[0] == self.j[3] && self.j[1] == self.j[2] && self.j[4] == self.j[5]
    }
}

/// Sum in ascending order, so equal multisets give equal results.
fn sorted_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.iter().sum()
}

fn seq_norm(basis: &Basis, u: &[f64], s: f64) -> f64 {
    u.iter()
        .enumerate()
        .map(|(i, x)| basis.norm(i as ModeIndex).powf(2.0 * s) * x * x)
        .sum::<f64>()
        .sqrt()
}

/// Evaluates the restricted convolution sum and its six ordered pieces
/// for nonnegative mode-indexed sequences.
pub fn restricted_convolution_check(
    list: &TriadList,
    u_seq: &[f64],
    v_seq: &[f64],
    alpha: f64,
    beta: f64,
) -> Result<ConvolutionReport> {
    let basis = list.basis();
    let n_modes = basis.num_modes();
    if u_seq.len() != n_modes || v_seq.len() != n_modes {
        return Err(Error::domain(
            "restricted_convolution_check",
            format!("sequences must have {n_modes} entries"),
        ));
    }
    if u_seq.iter().chain(v_seq).any(|x| x.is_nan() || *x < 0.0) {
        return Err(Error::domain("restricted_convolution_check", "sequences must be nonnegative"));
    }
    let mut all = Vec::with_capacity(list.len());
    let mut parts: [Vec<f64>; 6] = Default::default();
    for &[k, m, n] in list.triads() {
        let (uk, un) = (u_seq[k as usize], u_seq[n as usize]);
        let term = uk.min(un) * uk.max(un) * (basis.norm(m) * v_seq[m as usize]);
        all.push(term);
        let qk = basis.mode(k).norm_sq();
        let qm = basis.mode(m).norm_sq();
        let qn = basis.mode(n).norm_sq();
        let orders = [
            qn >= qk && qk >= qm,
            qn >= qm && qm >= qk,
            qk >= qm && qm >= qn,
            qk >= qn && qn >= qm,
            qm >= qk && qk >= qn,
            qm >= qn && qn >= qk,
        ];
        for (part, hit) in parts.iter_mut().zip(orders) {
            if hit {
                part.push(term);
            }
        }
    }
    let j = parts.map(sorted_sum);
    Ok(ConvolutionReport {
        left: sorted_sum(all),
        j,
        first_norm_term: seq_norm(basis, u_seq, alpha / 2.0) * seq_norm(basis, u_seq, beta / 2.0),
        second_norm_term: seq_norm(basis, u_seq, 0.0) * seq_norm(basis, u_seq, (alpha + beta) / 2.0),
        v_h1: seq_norm(basis, v_seq, 1.0),
    })
}

/// `max_i sup_{|n| <= N} sum_{k in S_i} chi_Gamma |k|^{-1} / 2^i` over the
/// shells `2^i <= N`: the counting constant relevant to radius `N`.
pub fn counting_constant(radius: u32) -> Result<f64> {
    let mut c0 = 0.0f64;
    let mut i = 0;
    while (1u64 << i) <= radius as u64 {
        c0 = c0.max(counting_lemma_sup(DyadicShellIndex(i), radius)?.normalized());
        i += 1;
    }
    Ok(c0)
}

/// `max(|u_{k,+}|, |u_{k,-}|)` per mode.
pub fn helicity_max_sequence(u: &SpectralField) -> Vec<f64> {
    (0..u.basis().num_modes() as ModeIndex)
        .map(|i| Helicity::BOTH.map(|s| u.get(i, s).norm()).into_iter().fold(0.0, f64::max))
        .collect()
}
