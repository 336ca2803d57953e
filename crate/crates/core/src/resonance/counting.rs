//! Brute-force evaluation of the dyadic counting bound
//! `sup_n sum_{k in S_i} chi(k, -k-n, n) / |k| <= C0 2^i`.
//!
//! The sum is invariant under the 16 lattice symmetries that permute and
//! flip the horizontal axes and flip the vertical axis, so only `n` with
//! `n1 >= n2 >= 0` and `n3 >= 0` are visited. Candidates `k` are organised by
//! which third component vanishes; every candidate is then decided by the
//! exact surd test.

use std::collections::HashMap;

use rayon::prelude::*;

use super::exact::{classify, may_resonate, one_flat_certificate, squarefree_decompose, surds_sum_to_zero, Surd, TriadCase};
use crate::error::{Error, Result};
use crate::lattice::{DyadicShellIndex, LatticeVector};

/// Partial sum for one `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountingRow {
    pub n: LatticeVector,
    pub sum: f64,
    pub triads: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CaseTally {
    pub planar: u64,
    pub generic: u64,
    pub one_flat: u64,
    /// One-flat triads violating `|a|^2 = |b|^2` for the two non-flat vectors.
    pub certificate_failures: u64,
    /// Triads matching none of the three cases.
    pub unclassified: u64,
}

impl CaseTally {
    fn add(&mut self, o: &CaseTally) {
        self.planar += o.planar;
        self.generic += o.generic;
        self.one_flat += o.one_flat;
        self.certificate_failures += o.certificate_failures;
        self.unclassified += o.unclassified;
    }

    pub fn total(&self) -> u64 {
        self.planar + self.generic + self.one_flat + self.unclassified
    }
}

#[derive(Clone, Debug)]
pub struct CountingReport {
    pub shell: DyadicShellIndex,
    pub search_radius: u32,
    pub sup_value: f64,
    pub argmax_n: LatticeVector,
    /// Rows for the visited representatives `n1 >= n2 >= 0, n3 >= 0`.
    pub rows: Vec<CountingRow>,
    pub cases: CaseTally,
}

impl CountingReport {
    /// `sup / 2^i`.
    pub fn normalized(&self) -> f64 {
        self.sup_value / self.shell.lower()
    }
}

/// Exact direction cosines looked up by squared norm.
struct CosineTable {
    root_core: Vec<(i64, u64)>,
}

impl CosineTable {
    fn new(max_norm_sq: i64) -> Self {
        let mut root_core = vec![(0, 0); max_norm_sq as usize + 1];
        for (q, rc) in root_core.iter_mut().enumerate().skip(1) {
            let (r, c) = squarefree_decompose(q as u64).unwrap();
            *rc = (r as i64, c);
        }
        Self { root_core }
    }

    fn core(&self, v: &LatticeVector) -> u64 {
        self.root_core[v.norm_sq() as usize].1
    }

    fn cosine(&self, v: &LatticeVector) -> Surd {
        let (r, c) = self.root_core[v.norm_sq() as usize];
        Surd {
            num: v.third(),
            den: r * c as i64,
            radicand: c,
        }
    }

    fn in_gamma(&self, k: &LatticeVector, m: &LatticeVector, n: &LatticeVector) -> bool {
        let (a, b, c) = (self.cosine(k), self.cosine(m), self.cosine(n));
        if !may_resonate(&a, &b, &c) {
            return false;
        }
        [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            .into_iter()
            .any(|(sb, sc)| surds_sum_to_zero(&[a, b.scaled(sb), c.scaled(sc)]))
    }
}

fn shell_points(shell: DyadicShellIndex) -> Vec<LatticeVector> {
    let hi = 1i64 << (shell.0 + 1);
    let mut out = Vec::new();
    for a in -hi..=hi {
        for b in -hi..=hi {
            for c in -hi..=hi {
                let k = LatticeVector::new(a, b, c);
                if shell.contains(&k) {
                    out.push(k);
                }
            }
        }
    }
    out
}

fn representatives(radius: u32) -> Vec<LatticeVector> {
    let r = radius as i64;
    let mut out = Vec::new();
    for a in 0..=r {
        for b in 0..=a {
            for c in 0..=r {
                let n = LatticeVector::new(a, b, c);
                let q = n.norm_sq();
                if q > 0 && q <= r * r {
                    out.push(n);
                }
            }
        }
    }
    out
}

struct ShellIndex {
    flat: Vec<LatticeVector>,
    by_third: HashMap<i64, Vec<LatticeVector>>,
    /// Non-flat points grouped by the squarefree core of `|k|^2`.
    by_core: HashMap<u64, Vec<LatticeVector>>,
    nonflat: Vec<LatticeVector>,
}

impl ShellIndex {
    fn new(points: &[LatticeVector], cos: &CosineTable) -> Self {
        let mut flat = Vec::new();
        let mut by_third: HashMap<i64, Vec<LatticeVector>> = HashMap::new();
        let mut by_core: HashMap<u64, Vec<LatticeVector>> = HashMap::new();
        let mut nonflat = Vec::new();
        for k in points {
            if k.third() == 0 {
                flat.push(*k);
            } else {
                by_third.entry(k.third()).or_default().push(*k);
                by_core.entry(cos.core(k)).or_default().push(*k);
                nonflat.push(*k);
            }
        }
        Self {
            flat,
            by_third,
            by_core,
            nonflat,
        }
    }
}

/// `max_{0 < |n| <= search_radius} sum_{k in S_i} chi(k, -k-n, n) / |k|`.
pub fn counting_lemma_sup(shell: DyadicShellIndex, search_radius: u32) -> Result<CountingReport> {
    if search_radius < 1 {
        return Err(Error::domain("counting_lemma_sup", "search radius must be at least 1"));
    }
    let hi = 1i64 << (shell.0 + 1);
    let reach = hi + search_radius as i64;
    let cos = CosineTable::new(3 * reach * reach);
    let points = shell_points(shell);
    let index = ShellIndex::new(&points, &cos);

    let per_n: Vec<(CountingRow, CaseTally)> = representatives(search_radius)
        .par_iter()
        .map(|n| row_for(n, &index, &cos))
        .collect();
    let mut cases = CaseTally::default();
    let mut rows = Vec::with_capacity(per_n.len());
    for (row, tally) in per_n {
        cases.add(&tally);
        rows.push(row);
    }
    let best = rows
        .iter()
        .fold(None::<&CountingRow>, |acc, r| match acc {
            Some(a) if a.sum >= r.sum => Some(a),
            _ => Some(r),
        })
        .expect("at least one n");
    Ok(CountingReport {
        shell,
        search_radius,
        sup_value: best.sum,
        argmax_n: best.n,
        cases,
        rows,
    })
}

fn row_for(n: &LatticeVector, index: &ShellIndex, cos: &CosineTable) -> (CountingRow, CaseTally) {
    let mut tally = CaseTally::default();
    let mut sum = 0.0;
    let mut triads = 0u64;
    let mut visit = |k: &LatticeVector| {
        let m = -(*k + *n);
        if m.is_zero() || !cos.in_gamma(k, &m, n) {
            return;
        }
        triads += 1;
        sum += 1.0 / k.norm();
        match classify(k, &m, n) {
            Some(TriadCase::Planar) => tally.planar += 1,
            Some(TriadCase::Generic) => tally.generic += 1,
            Some(TriadCase::OneFlat) => {
                tally.one_flat += 1;
                if !one_flat_certificate(k, &m, n) {
                    tally.certificate_failures += 1;
                }
            }
            None => tally.unclassified += 1,
        }
    };
    if n.third() == 0 {
        // k3 = 0 forces m3 = 0; otherwise m3 = -k3 and only m, k are non-flat
        index.flat.iter().for_each(&mut visit);
        index.nonflat.iter().for_each(&mut visit);
    } else {
        index.flat.iter().for_each(&mut visit);
        if let Some(slice) = index.by_third.get(&-n.third()) {
            slice.iter().for_each(&mut visit);
        }
        // all three non-flat: the three cosines must share one radicand
        if let Some(group) = index.by_core.get(&cos.core(n)) {
            group
                .iter()
                .filter(|k| k.third() != -n.third())
                .for_each(&mut visit);
        }
    }
    (CountingRow { n: *n, sum, triads }, tally)
}

/// Same quantity restricted to the horizontal plane (all third components
/// zero), where every triad is resonant.
pub fn counting_lemma_planar(shell: DyadicShellIndex, search_radius: u32) -> Result<CountingReport> {
    if search_radius < 1 {
        return Err(Error::domain("counting_lemma_planar", "search radius must be at least 1"));
    }
    let flat: Vec<LatticeVector> = shell_points(shell).into_iter().filter(|k| k.third() == 0).collect();
    let r = search_radius as i64;
    let mut rows = Vec::new();
    for a in 0..=r {
        for b in 0..=a {
            let n = LatticeVector::new(a, b, 0);
            let q = n.norm_sq();
            if q == 0 || q > r * r {
                continue;
            }
            let mut sum = 0.0;
            let mut triads = 0;
            for k in &flat {
                if (*k + n).is_zero() {
                    continue;
                }
                sum += 1.0 / k.norm();
                triads += 1;
            }
            rows.push(CountingRow { n, sum, triads });
        }
    }
    let best = *rows
        .iter()
        .fold(None::<&CountingRow>, |acc, r| match acc {
            Some(a) if a.sum >= r.sum => Some(a),
            _ => Some(r),
        })
        .expect("at least one n");
    let total: u64 = rows.iter().map(|r| r.triads).sum();
    Ok(CountingReport {
        shell,
        search_radius,
        sup_value: best.sum,
        argmax_n: best.n,
        rows,
        cases: CaseTally {
            planar: total,
            ..Default::default()
        },
    })
}
