//! Spectral velocity fields in the helical basis, inner products and
//! Sobolev norms.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{slot, Basis, CVec3, Helicity, LatticeVector, ModeIndex};

/// Amplitudes `u_{k,s}` for every mode of a truncation.
///
/// Divergence-free and mean-zero by construction. `real` records that the
/// amplitudes satisfy `u_{-k,s} = conj(u_{k,s})`, which operators use to
/// evaluate only half of the output modes.
#[derive(Clone, Debug)]
pub struct SpectralField {
    basis: Arc<Basis>,
    amps: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(basis: Arc<Basis>) -> Self {
        let n = basis.num_slots();
        Self {
            basis,
            amps: vec![Complex64::new(0.0, 0.0); n],
            real: true,
        }
    }

    /// Wraps raw amplitudes; the reality flag is derived from the data.
    pub fn from_amplitudes(basis: Arc<Basis>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.num_slots() {
            return Err(Error::domain(
                "SpectralField",
                format!("expected {} amplitudes, got {}", basis.num_slots(), amps.len()),
            ));
        }
        let mut f = Self {
            basis,
            amps,
            real: false,
        };
        f.real = f.reality_defect() == 0.0;
        Ok(f)
    }

    /// Sets one amplitude. If the field was real, the conjugate partner is
    /// set too so that it stays real.
    pub fn set(&mut self, k: &LatticeVector, s: Helicity, value: Complex64) -> Result<()> {
        let i = self.basis.index_of(k).ok_or_else(|| {
            Error::domain("SpectralField::set", format!("mode {k} outside the truncation"))
        })?;
        self.amps[slot(i, s)] = value;
        if self.real {
            let j = self.basis.negated(i);
            self.amps[slot(j, s)] = value.conj();
        }
        Ok(())
    }

    /// A field supported on a single `(k, s)` slot, without its conjugate
    /// partner. Not real unless the caller adds the partner.
    pub fn single_mode(basis: Arc<Basis>, k: &LatticeVector, s: Helicity, value: Complex64) -> Result<Self> {
        let mut f = Self::zeros(basis);
        f.real = false;
        f.set(k, s, value)?;
        Ok(f)
    }

    /// A real field supported on `(k, s)` and `(-k, s)`.
    pub fn real_mode_pair(basis: Arc<Basis>, k: &LatticeVector, s: Helicity, value: Complex64) -> Result<Self> {
        let mut f = Self::zeros(basis);
        f.set(k, s, value)?;
        Ok(f)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn radius(&self) -> u32 {
        self.basis.radius()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn get(&self, i: ModeIndex, s: Helicity) -> Complex64 {
        self.amps[slot(i, s)]
    }

    /// `max |u_{-k,s} - conj(u_{k,s})|`.
    pub fn reality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.basis.num_modes() as ModeIndex {
            let j = self.basis.negated(i);
            for s in Helicity::BOTH {
                let d = (self.amps[slot(j, s)] - self.amps[slot(i, s)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Builds a field whose reality flag is asserted by the caller.
    pub(crate) fn from_parts(basis: Arc<Basis>, amps: Vec<Complex64>, real: bool) -> Self {
        debug_assert_eq!(amps.len(), basis.num_slots());
        Self { basis, amps, real }
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.radius() != other.radius() {
            return Err(Error::Dimension {
                expected: self.radius(),
                found: other.radius(),
            });
        }
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same(other)?;
        let amps = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Ok(Self::from_parts(self.basis.clone(), amps, self.real && other.real))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let real = self.real && c.im == 0.0;
        Self::from_parts(self.basis.clone(), self.amps.iter().map(|x| x * c).collect(), real)
    }

    /// Cartesian Fourier coefficient `sum_s u_{k,s} phi_{k,s}` of mode `i`.
    pub fn cartesian(&self, i: ModeIndex) -> CVec3 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for s in Helicity::BOTH {
            let a = self.get(i, s);
            let phi = self.basis.vector(i, s);
            for j in 0..3 {
                out[j] += a * phi[j];
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.amps.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `<u, v> = sum u_{k,s} conj(v_{k,s})`.
pub fn inner_product(u: &SpectralField, v: &SpectralField) -> Result<Complex64> {
    u.check_same(v)?;
    Ok(u.amps.iter().zip(&v.amps).map(|(a, b)| a * b.conj()).sum())
}

/// `(sum |k|^{2s} |u_{k,s}|^2)^{1/2}`, no `2 pi` factors.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> f64 {
    let basis = u.basis();
    let mut acc = 0.0;
    for i in 0..basis.num_modes() as ModeIndex {
        let w = weight(basis.mode(i).norm_sq(), s);
        acc += w * (u.get(i, Helicity::Plus).norm_sqr() + u.get(i, Helicity::Minus).norm_sqr());
    }
    acc.sqrt()
}

fn weight(norm_sq: i64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if s == 1.0 {
        norm_sq as f64
    } else if s == -1.0 {
        1.0 / norm_sq as f64
    } else {
        (norm_sq as f64).powf(s)
    }
}

pub fn l2_norm(u: &SpectralField) -> f64 {
    sobolev_norm(u, 0.0)
}

/// `||grad u||_{L^2} = 2 pi ||u||_{H^1}` under the `exp(2 pi i k.x)` convention.
pub fn gradient_norm(u: &SpectralField) -> f64 {
    2.0 * std::f64::consts::PI * sobolev_norm(u, 1.0)
}

/// Seeded real field with `|u_{k,s}| ~ |k|^{-2}` times a uniform factor,
/// uniform phases, rescaled to unit `L^2` norm.
pub fn random_real_field(basis: Arc<Basis>, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.num_slots()];
    for i in 0..basis.num_modes() as ModeIndex {
        let k = basis.mode(i);
        if !k.is_lex_positive() {
            continue;
        }
        let j = basis.negated(i);
        let decay = 1.0 / k.norm_sq() as f64;
        for s in Helicity::BOTH {
            let mag = decay * rng.gen_range(0.0..1.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = Complex64::from_polar(mag, phase);
            amps[slot(i, s)] = z;
            amps[slot(j, s)] = z.conj();
        }
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in amps.iter_mut() {
        *z /= norm;
    }
    SpectralField::from_parts(basis, amps, true)
}

/// Projects `v` onto the plane orthogonal to `n`: `v - (v.n^) n^`.
pub fn leray_project(n: &LatticeVector, v: &CVec3) -> Result<CVec3> {
    if n.is_zero() {
        return Err(Error::domain("leray_project", "wavevector must be nonzero"));
    }
    let nf = n.as_f64();
    let q = n.norm_sq() as f64;
    let dot: Complex64 = (0..3).map(|j| v[j] * nf[j]).sum();
    let c = dot / q;
    Ok([v[0] - c * nf[0], v[1] - c * nf[1], v[2] - c * nf[2]])
}
