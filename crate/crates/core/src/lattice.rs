//! Truncated integer lattice, dyadic shells and the helical curl-eigenvector
//! basis.
//!
//! Fields are expanded as `u(x) = sum_{k,s} u_{k,s} phi_{k,s} exp(2 pi i k.x)`
//! on the unit torus. With that exponential convention the basis vectors
//! satisfy `2 pi i k x phi_{k,s} = 2 pi s |k| phi_{k,s}`, i.e. the curl
//! eigenvalue carries an explicit factor `2 pi`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A nonzero point of the integer lattice `Z^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector(pub [i64; 3]);

impl LatticeVector {
    pub const fn new(k1: i64, k2: i64, k3: i64) -> Self {
        Self([k1, k2, k3])
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn third(&self) -> i64 {
        self.0[2]
    }

    /// First nonzero component is positive.
    pub fn is_lex_positive(&self) -> bool {
        match self.0.iter().find(|c| **c != 0) {
            Some(c) => *c > 0,
            None => false,
        }
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [self.0[0] as f64, self.0[1] as f64, self.0[2] as f64]
    }
}

impl Add for LatticeVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for LatticeVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for LatticeVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Helicity sign of a helical mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub const BOTH: [Helicity; 2] = [Helicity::Plus, Helicity::Minus];

    pub fn sign(self) -> i64 {
        match self {
            Helicity::Plus => 1,
            Helicity::Minus => -1,
        }
    }

    pub fn signf(self) -> f64 {
        self.sign() as f64
    }

    /// Position of this helicity inside a mode's slot pair.
    pub fn offset(self) -> usize {
        match self {
            Helicity::Plus => 0,
            Helicity::Minus => 1,
        }
    }

    pub fn from_offset(bit: usize) -> Self {
        if bit & 1 == 0 {
            Helicity::Plus
        } else {
            Helicity::Minus
        }
    }

    pub fn from_sign(s: i64) -> Option<Self> {
        match s {
            1 => Some(Helicity::Plus),
            -1 => Some(Helicity::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Helicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

/// Index `i` of the dyadic block `S_i = { k : 2^i <= |k| < 2^(i+1) }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicShellIndex(pub u32);

impl DyadicShellIndex {
    /// Membership test done on squared norms, so it is exact.
    pub fn contains(self, k: &LatticeVector) -> bool {
        let q = k.norm_sq();
        let lo = 1i64 << (2 * self.0);
        let hi = 1i64 << (2 * (self.0 + 1));
        lo <= q && q < hi
    }

    pub fn lower(self) -> f64 {
        (1u64 << self.0) as f64
    }
}

/// All `k` in `Z^3 \ {0}` with `|k| <= radius`, in lexicographic order.
pub fn enumerate_modes(radius: u32) -> Result<Vec<LatticeVector>> {
    if radius == 0 {
        return Err(Error::EmptyTruncation);
    }
    let r = radius as i64;
    let r2 = r * r;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let k = LatticeVector::new(a, b, c);
                let q = k.norm_sq();
                if q > 0 && q <= r2 {
                    out.push(k);
                }
            }
        }
    }
    Ok(out)
}

/// Unique `i` with `2^i <= |k| < 2^(i+1)`.
///
/// Panics on the zero vector.
pub fn shell_index(k: &LatticeVector) -> DyadicShellIndex {
    let q = k.norm_sq();
    assert!(q > 0, "shell_index of the zero vector");
    // floor(log2 |k|) = floor(log2(q) / 2)
    let bits = 63 - q.leading_zeros();
    DyadicShellIndex(bits / 2)
}

/// Complex 3-vector.
pub type CVec3 = [Complex64; 3];

/// Unit curl eigenvector `phi_{k,s}` with its mode data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelicalVector {
    pub k: LatticeVector,
    pub helicity: Helicity,
    pub components: CVec3,
}

fn cross_real(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn frame_vector(k: &LatticeVector, sigma: Helicity) -> CVec3 {
    let kf = k.as_f64();
    let nk = k.norm();
    let khat = [kf[0] / nk, kf[1] / nk, kf[2] / nk];
    let (a, b) = if k.0[0] == 0 && k.0[1] == 0 {
        let s = k.0[2].signum() as f64;
        ([1.0, 0.0, 0.0], [0.0, s, 0.0])
    } else {
        let c = cross_real(khat, [0.0, 0.0, 1.0]);
        let nc = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        let a = [c[0] / nc, c[1] / nc, c[2] / nc];
        (a, cross_real(khat, a))
    };
    let s = sigma.signf();
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    [
        Complex64::new(a[0] * inv, s * b[0] * inv),
        Complex64::new(a[1] * inv, s * b[1] * inv),
        Complex64::new(a[2] * inv, s * b[2] * inv),
    ]
}

/// `phi_{k,s}`: built from the orthonormal frame on the lexicographically
/// positive half-lattice and extended by `phi_{-k,s} = conj(phi_{k,s})`.
///
/// Panics on the zero vector.
pub fn helical_vector(k: LatticeVector, sigma: Helicity) -> HelicalVector {
    assert!(!k.is_zero(), "helical_vector of the zero vector");
    let components = if k.is_lex_positive() {
        frame_vector(&k, sigma)
    } else {
        frame_vector(&(-k), sigma).map(|z| z.conj())
    };
    HelicalVector {
        k,
        helicity: sigma,
        components,
    }
}

/// Position of a mode inside a [`Basis`].
pub type ModeIndex = u32;

/// Enumerated truncation together with the helical vectors of every slot.
///
/// Amplitude slots are laid out as `2 * mode + helicity.offset()`.
#[derive(Debug)]
pub struct Basis {
    radius: u32,
    modes: Vec<LatticeVector>,
    norms: Vec<f64>,
    vectors: Vec<CVec3>,
    negated: Vec<ModeIndex>,
    lookup: Vec<u32>,
}

const NO_MODE: u32 = u32::MAX;

impl Basis {
    pub fn new(radius: u32) -> Result<Self> {
        let modes = enumerate_modes(radius)?;
        let side = 2 * radius as usize + 1;
        let mut lookup = vec![NO_MODE; side * side * side];
        let r = radius as i64;
        for (i, k) in modes.iter().enumerate() {
            let idx = cube_index(r, side, k);
            lookup[idx] = i as u32;
        }
        let norms = modes.iter().map(|k| k.norm()).collect();
        let vectors = modes
            .iter()
            .flat_map(|k| Helicity::BOTH.map(|s| helical_vector(*k, s).components))
            .collect();
        let negated = modes
            .iter()
            .map(|k| lookup[cube_index(r, side, &(-*k))])
            .collect();
        Ok(Self {
            radius,
            modes,
            norms,
            vectors,
            negated,
            lookup,
        })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn modes(&self) -> &[LatticeVector] {
        &self.modes
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn num_slots(&self) -> usize {
        2 * self.modes.len()
    }

    pub fn mode(&self, i: ModeIndex) -> LatticeVector {
        self.modes[i as usize]
    }

    pub fn norm(&self, i: ModeIndex) -> f64 {
        self.norms[i as usize]
    }

    pub fn negated(&self, i: ModeIndex) -> ModeIndex {
        self.negated[i as usize]
    }

    pub fn vector(&self, i: ModeIndex, s: Helicity) -> &CVec3 {
        &self.vectors[slot(i, s)]
    }

    pub fn slot_vector(&self, slot: usize) -> &CVec3 {
        &self.vectors[slot]
    }

    /// Largest violation of each defining property over all slots.
    pub fn defects(&self) -> BasisDefects {
        let mut d = BasisDefects::default();
        for (i, k) in self.modes.iter().enumerate() {
            let kf = k.as_f64();
            let nk = self.norms[i];
            for s in Helicity::BOTH {
                let p = self.vector(i as ModeIndex, s);
                // i k x phi - s |k| phi, relative to |k|
                let ikx = [
                    p[2] * kf[1] - p[1] * kf[2],
                    p[0] * kf[2] - p[2] * kf[0],
                    p[1] * kf[0] - p[0] * kf[1],
                ]
                .map(|z| Complex64::new(0.0, 1.0) * z);
                let curl = (0..3).map(|j| (ikx[j] - p[j] * (s.signf() * nk)).norm_sqr()).sum::<f64>().sqrt() / nk;
                let unit = (p.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs();
                let div = (0..3).map(|j| p[j] * kf[j]).sum::<Complex64>().norm() / nk;
                let q = self.vector(self.negated[i], s);
                let pair = (0..3).map(|j| (q[j] - p[j].conj()).norm()).fold(0.0, f64::max);
                d.curl = d.curl.max(curl);
                d.unit_norm = d.unit_norm.max(unit);
                d.divergence = d.divergence.max(div);
                d.conjugate_pairing = d.conjugate_pairing.max(pair);
            }
        }
        d
    }

    /// Index of `k`, or `None` outside the truncation (or for `k = 0`).
    pub fn index_of(&self, k: &LatticeVector) -> Option<ModeIndex> {
        let r = self.radius as i64;
        if k.0.iter().any(|c| c.abs() > r) {
            return None;
        }
        let side = 2 * self.radius as usize + 1;
        match self.lookup[cube_index(r, side, k)] {
            NO_MODE => None,
            i => Some(i),
        }
    }
}

/// Worst-case residuals returned by [`Basis::defects`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BasisDefects {
    pub curl: f64,
    pub unit_norm: f64,
    pub divergence: f64,
    pub conjugate_pairing: f64,
}

impl BasisDefects {
    pub fn max(&self) -> f64 {
        self.curl.max(self.unit_norm).max(self.divergence).max(self.conjugate_pairing)
    }
}

/// Slot of `(mode, helicity)` in an amplitude vector.
pub fn slot(i: ModeIndex, s: Helicity) -> usize {
    2 * i as usize + s.offset()
}

/// Inverse of [`slot`].
pub fn unslot(slot: usize) -> (ModeIndex, Helicity) {
    ((slot / 2) as ModeIndex, Helicity::from_offset(slot))
}

fn cube_index(r: i64, side: usize, k: &LatticeVector) -> usize {
    let a = (k.0[0] + r) as usize;
    let b = (k.0[1] + r) as usize;
    let c = (k.0[2] + r) as usize;
    (a * side + b) * side + c
}
