//! Precomputed interaction table for the bilinear operators.
//!
//! Entries are grouped by output slot `(n, s3)`, which is what operator
//! application iterates over. Inside a slot they are ordered by the mode
//! index of `k`, then `s1`, then `s2`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::exact::{direction_cosine, may_resonate, phase_terms, surds_sum_to_zero, PhaseRate, Surd};
use crate::error::{Error, Result};
use crate::field::leray_project;
use crate::lattice::{slot, unslot, Basis, CVec3, Helicity, LatticeVector, ModeIndex};

/// Default memory ceiling for a table build.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// One term `coeff * u[u_slot] * v[v_slot]` contributing to an output slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriadEntry {
    pub u_slot: u32,
    pub v_slot: u32,
    pub coeff: Complex64,
    /// Floating value of the phase rate `D`.
    pub rate: f64,
}

/// Entries of one kind, bucketed by output slot.
#[derive(Clone, Debug, Default)]
pub struct EntryBlock {
    entries: Vec<TriadEntry>,
    offsets: Vec<usize>,
}

impl EntryBlock {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn slot_entries(&self, out_slot: usize) -> &[TriadEntry] {
        &self.entries[self.offsets[out_slot]..self.offsets[out_slot + 1]]
    }

    pub fn entries(&self) -> &[TriadEntry] {
        &self.entries
    }

    fn from_buckets(buckets: Vec<Vec<TriadEntry>>) -> Self {
        let total = buckets.iter().map(Vec::len).sum();
        let mut entries = Vec::with_capacity(total);
        let mut offsets = Vec::with_capacity(buckets.len() + 1);
        offsets.push(0);
        for b in buckets {
            entries.extend_from_slice(&b);
            offsets.push(entries.len());
        }
        Self { entries, offsets }
    }
}

/// Fully described interaction, for reporting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonantTriad {
    pub k: LatticeVector,
    pub m: LatticeVector,
    pub n: LatticeVector,
    pub s1: Helicity,
    pub s2: Helicity,
    pub s3: Helicity,
    pub coeff: Complex64,
    pub phase_rate: PhaseRate,
}

/// Resonant entries, plus optionally every non-resonant one, for all
/// `(k, m, s1, s2, s3)` with `|k|, |m|, |k + m| <= N`.
#[derive(Clone, Debug)]
pub struct TriadTable {
    basis: Arc<Basis>,
    resonant: EntryBlock,
    oscillatory: Option<EntryBlock>,
}

impl TriadTable {
    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn radius(&self) -> u32 {
        self.basis.radius()
    }

    pub fn resonant(&self) -> &EntryBlock {
        &self.resonant
    }

    pub fn oscillatory(&self) -> Option<&EntryBlock> {
        self.oscillatory.as_ref()
    }

    pub fn has_oscillatory(&self) -> bool {
        self.oscillatory.is_some()
    }

    /// Largest `|D|` over all stored entries.
    pub fn max_rate(&self) -> f64 {
        let r = self.resonant.entries.iter().map(|e| e.rate.abs());
        match &self.oscillatory {
            Some(o) => r.chain(o.entries.iter().map(|e| e.rate.abs())).fold(0.0, f64::max),
            None => r.fold(0.0, f64::max),
        }
    }

    fn describe(&self, out_slot: usize, e: &TriadEntry, resonant: bool) -> ResonantTriad {
        let (ni, s3) = unslot(out_slot);
        let (ki, s1) = unslot(e.u_slot as usize);
        let (mi, s2) = unslot(e.v_slot as usize);
        ResonantTriad {
            k: self.basis.mode(ki),
            m: self.basis.mode(mi),
            n: self.basis.mode(ni),
            s1,
            s2,
            s3,
            coeff: e.coeff,
            phase_rate: PhaseRate {
                value: e.rate,
                exactly_zero: resonant,
            },
        }
    }

    /// Every stored interaction, resonant ones first, each in slot order.
    pub fn triads(&self) -> impl Iterator<Item = ResonantTriad> + '_ {
        let res = (0..self.basis.num_slots()).flat_map(move |s| {
            self.resonant
                .slot_entries(s)
                .iter()
                .map(move |e| self.describe(s, e, true))
        });
        let osc = self.oscillatory.iter().flat_map(move |block| {
            (0..self.basis.num_slots()).flat_map(move |s| {
                block.slot_entries(s).iter().map(move |e| self.describe(s, e, false))
            })
        });
        res.chain(osc)
    }
}

/// `2 pi i (phi_{k,s1} . m) (P_n phi_{m,s2} . conj phi_{n,s3})`: the
/// `(n, s3)` helical component of `P(u . grad v)` for unit amplitudes.
pub fn interaction_coefficient(
    phi_k: &CVec3,
    phi_m: &CVec3,
    phi_n: &CVec3,
    m: &LatticeVector,
    n: &LatticeVector,
) -> Complex64 {
    let mf = m.as_f64();
    let advect: Complex64 = (0..3).map(|j| phi_k[j] * mf[j]).sum();
    let projected = leray_project(n, phi_m).expect("output mode is nonzero");
    let overlap: Complex64 = (0..3).map(|j| projected[j] * phi_n[j].conj()).sum();
    Complex64::new(0.0, 2.0 * PI) * advect * overlap
}

/// `-2 pi s2 |m| P_n(phi_{k,s1} x phi_{m,s2}) . conj phi_{n,s3}`, the
/// curl-form coefficient of `P((curl v) x u)`. It agrees with
/// [`interaction_coefficient`] after symmetrising in `(k, s1) <-> (m, s2)`.
pub fn curl_form_coefficient(
    phi_k: &CVec3,
    phi_m: &CVec3,
    phi_n: &CVec3,
    m: &LatticeVector,
    n: &LatticeVector,
    s2: Helicity,
) -> Complex64 {
    let cross = [
        phi_k[1] * phi_m[2] - phi_k[2] * phi_m[1],
        phi_k[2] * phi_m[0] - phi_k[0] * phi_m[2],
        phi_k[0] * phi_m[1] - phi_k[1] * phi_m[0],
    ];
    let projected = leray_project(n, &cross).expect("output mode is nonzero");
    let overlap: Complex64 = (0..3).map(|j| projected[j] * phi_n[j].conj()).sum();
    overlap * (-2.0 * PI * s2.signf() * m.norm())
}

const SIGN_TRIPLES: [(Helicity, Helicity, Helicity); 8] = {
    use Helicity::{Minus, Plus};
    [
        (Plus, Plus, Plus),
        (Plus, Plus, Minus),
        (Plus, Minus, Plus),
        (Plus, Minus, Minus),
        (Minus, Plus, Plus),
        (Minus, Plus, Minus),
        (Minus, Minus, Plus),
        (Minus, Minus, Minus),
    ]
};

/// Resonance mask over [`SIGN_TRIPLES`] for one `(k, m, n)`.
fn resonance_mask(ak: Surd, am: Surd, an: Surd) -> u8 {
    if !may_resonate(&ak, &am, &an) {
        return 0;
    }
    let mut mask = 0u8;
    for (bit, (s1, s2, s3)) in SIGN_TRIPLES.iter().enumerate() {
        if surds_sum_to_zero(&phase_terms(ak, am, an, *s1, *s2, *s3)) {
            mask |= 1 << bit;
        }
    }
    mask
}

/// Partners `(k, m)` of output mode `n`, in `k` order.
fn partners(basis: &Basis, n: ModeIndex) -> impl Iterator<Item = (ModeIndex, ModeIndex)> + '_ {
    let nv = basis.mode(n);
    (0..basis.num_modes() as ModeIndex).filter_map(move |k| {
        let m = nv - basis.mode(k);
        basis.index_of(&m).map(|mi| (k, mi))
    })
}

pub fn build_triad_table(basis: Arc<Basis>, include_nonresonant: bool) -> Result<TriadTable> {
    build_triad_table_with_budget(basis, include_nonresonant, DEFAULT_MEMORY_BUDGET)
}

/// Builds the table, refusing when the entry count would exceed
/// `memory_budget` bytes.
pub fn build_triad_table_with_budget(
    basis: Arc<Basis>,
    include_nonresonant: bool,
    memory_budget: u64,
) -> Result<TriadTable> {
    let cosines: Vec<Surd> = basis.modes().iter().map(direction_cosine).collect();
    let modes: Vec<ModeIndex> = (0..basis.num_modes() as ModeIndex).collect();

    // counting pass
    let (pairs, resonant_count) = modes
        .par_iter()
        .map(|&n| {
            let mut pairs = 0u64;
            let mut res = 0u64;
            for (k, m) in partners(&basis, n) {
                pairs += 1;
                let mask = resonance_mask(cosines[k as usize], cosines[m as usize], cosines[n as usize]);
                res += mask.count_ones() as u64;
            }
            (pairs, res)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let entries = if include_nonresonant { 8 * pairs } else { resonant_count };
    let bytes = entries * std::mem::size_of::<TriadEntry>() as u64;
    if bytes > memory_budget {
        return Err(Error::ResourceExceeded {
            radius: basis.radius(),
            entries,
            bytes,
            budget: memory_budget,
        });
    }

    let per_mode: Vec<[Vec<TriadEntry>; 4]> = modes
        .par_iter()
        .map(|&n| mode_entries(&basis, &cosines, n, include_nonresonant))
        .collect();

    let mut res_buckets = Vec::with_capacity(basis.num_slots());
    let mut osc_buckets = Vec::with_capacity(basis.num_slots());
    for [r_plus, r_minus, o_plus, o_minus] in per_mode {
        res_buckets.push(r_plus);
        res_buckets.push(r_minus);
        osc_buckets.push(o_plus);
        osc_buckets.push(o_minus);
    }
    Ok(TriadTable {
        resonant: EntryBlock::from_buckets(res_buckets),
        oscillatory: include_nonresonant.then(|| EntryBlock::from_buckets(osc_buckets)),
        basis,
    })
}

/// Resonant and non-resonant entries for output mode `n`, as
/// `[res s3=+, res s3=-, osc s3=+, osc s3=-]`.
fn mode_entries(basis: &Basis, cosines: &[Surd], n: ModeIndex, include_nonresonant: bool) -> [Vec<TriadEntry>; 4] {
    let mut out: [Vec<TriadEntry>; 4] = Default::default();
    let nv = basis.mode(n);
    let a_n = nv.third() as f64 / basis.norm(n);
    for (k, m) in partners(basis, n) {
        let mask = resonance_mask(cosines[k as usize], cosines[m as usize], cosines[n as usize]);
        if mask == 0 && !include_nonresonant {
            continue;
        }
        let kv = basis.mode(k);
        let mv = basis.mode(m);
        let a_k = kv.third() as f64 / basis.norm(k);
        let a_m = mv.third() as f64 / basis.norm(m);
        for (bit, (s1, s2, s3)) in SIGN_TRIPLES.iter().enumerate() {
            let resonant = mask & (1 << bit) != 0;
            if !resonant && !include_nonresonant {
                continue;
            }
            let coeff = interaction_coefficient(basis.vector(k, *s1), basis.vector(m, *s2), basis.vector(n, *s3), &mv, &nv);
            let rate = -s1.signf() * a_k - s2.signf() * a_m + s3.signf() * a_n;
            let entry = TriadEntry {
                u_slot: slot(k, *s1) as u32,
                v_slot: slot(m, *s2) as u32,
                coeff,
                rate,
            };
            let bucket = s3.offset() + if resonant { 0 } else { 2 };
            out[bucket].push(entry);
        }
    }
    out
}
