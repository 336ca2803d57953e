//! Exact evaluation of the phase rate
//! `D = -s1 k3/|k| - s2 m3/|m| + s3 n3/|n|` with `n = k + m`.
//!
//! Each term is a rational multiple of `sqrt(q)` for a squarefree `q`. Square
//! roots of distinct squarefree integers are linearly independent over the
//! rationals, so `D = 0` iff the rational coefficients of every distinct
//! radicand cancel. Everything below is integer arithmetic.

use crate::error::{Error, Result};
use crate::lattice::{Helicity, LatticeVector};

/// Writes `a = root^2 * core` with `core` squarefree.
pub fn squarefree_decompose(a: u64) -> Result<(u64, u64)> {
    if a == 0 {
        return Err(Error::domain("squarefree_decompose", "argument must be positive"));
    }
    let mut rest = a;
    let mut root = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0u32;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        root *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // what is left is 1 or a prime
    core *= rest;
    Ok((root, core))
}

/// `num / den * sqrt(radicand)` with `den > 0` and `radicand` squarefree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub num: i64,
    pub den: i64,
    pub radicand: u64,
}

impl Surd {
    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn negate(self) -> Self {
        Self {
            num: -self.num,
            ..self
        }
    }

    pub fn scaled(self, sign: i64) -> Self {
        Self {
            num: sign * self.num,
            ..self
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64 * (self.radicand as f64).sqrt()
    }
}

/// `k3 / |k|` as an exact surd: with `|k|^2 = r^2 q`,
/// `k3 / (r sqrt q) = (k3 / (r q)) sqrt q`.
pub fn direction_cosine(k: &LatticeVector) -> Surd {
    let (root, core) = squarefree_decompose(k.norm_sq() as u64)
        .expect("direction_cosine of the zero vector");
    Surd {
        num: k.third(),
        den: (root * core) as i64,
        radicand: core,
    }
}

/// True iff the sum of the given surds is exactly zero.
pub fn surds_sum_to_zero(terms: &[Surd]) -> bool {
    let mut done = [false; 8];
    assert!(terms.len() <= done.len());
    for i in 0..terms.len() {
        if done[i] || terms[i].is_zero() {
            continue;
        }
        // accumulate num/den over every term sharing this radicand
        let mut num: i128 = 0;
        let mut den: i128 = 1;
        for j in i..terms.len() {
            if terms[j].radicand == terms[i].radicand && !terms[j].is_zero() {
                done[j] = true;
                let (n2, d2) = (terms[j].num as i128, terms[j].den as i128);
                num = num * d2 + n2 * den;
                den *= d2;
                let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
                if g > 1 {
                    num /= g;
                    den /= g;
                }
            }
        }
        if num != 0 {
            return false;
        }
    }
    true
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Phase rate of an interaction: floating value plus the exact zero test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRate {
    pub value: f64,
    pub exactly_zero: bool,
}

/// Signed terms `(-s1 a_k, -s2 a_m, s3 a_n)` of the phase rate.
pub fn phase_terms(
    ak: Surd,
    am: Surd,
    an: Surd,
    s1: Helicity,
    s2: Helicity,
    s3: Helicity,
) -> [Surd; 3] {
    [
        ak.scaled(-s1.sign()),
        am.scaled(-s2.sign()),
        an.scaled(s3.sign()),
    ]
}

fn check_triad(k: &LatticeVector, m: &LatticeVector) -> Result<LatticeVector> {
    if k.is_zero() || m.is_zero() {
        return Err(Error::domain("resonance", "k and m must be nonzero"));
    }
    let n = *k + *m;
    if n.is_zero() {
        return Err(Error::ExcludedTriad { k: *k, m: *m });
    }
    Ok(n)
}

/// Floating-point `D(k, m, s1, s2, s3)`, independent of the exact machinery.
pub fn phase_rate_f64(k: &LatticeVector, m: &LatticeVector, s1: Helicity, s2: Helicity, s3: Helicity) -> f64 {
    let n = *k + *m;
    -s1.signf() * k.third() as f64 / k.norm() - s2.signf() * m.third() as f64 / m.norm()
        + s3.signf() * n.third() as f64 / n.norm()
}

/// Exact decision of `D(k, m, s1, s2, s3) = 0` for `n = k + m`.
pub fn resonance_holds(
    k: &LatticeVector,
    m: &LatticeVector,
    s1: Helicity,
    s2: Helicity,
    s3: Helicity,
) -> Result<bool> {
    let n = check_triad(k, m)?;
    let terms = phase_terms(
        direction_cosine(k),
        direction_cosine(m),
        direction_cosine(&n),
        s1,
        s2,
        s3,
    );
    Ok(surds_sum_to_zero(&terms))
}

pub fn phase_rate(
    k: &LatticeVector,
    m: &LatticeVector,
    s1: Helicity,
    s2: Helicity,
    s3: Helicity,
) -> Result<PhaseRate> {
    let exactly_zero = resonance_holds(k, m, s1, s2, s3)?;
    Ok(PhaseRate {
        value: phase_rate_f64(k, m, s1, s2, s3),
        exactly_zero,
    })
}

/// Cheap necessary condition for any sign choice to resonate: the nonzero
/// terms must pair up under a single radicand (one lone nonzero term or
/// three terms over two radicands can never cancel).
pub fn may_resonate(ak: &Surd, am: &Surd, an: &Surd) -> bool {
    let nz = [ak, am, an].into_iter().filter(|s| !s.is_zero());
    let mut first: Option<u64> = None;
    let mut count = 0;
    for s in nz {
        count += 1;
        match first {
            None => first = Some(s.radicand),
            Some(q) if q != s.radicand => return false,
            _ => {}
        }
    }
    count != 1
}

/// Membership of `(k, m, n)` with `k + m + n = 0` in the symmetric set where
/// `+-k3/|k| +- m3/|m| +- n3/|n| = 0` for some choice of signs.
pub fn in_gamma(k: &LatticeVector, m: &LatticeVector, n: &LatticeVector) -> bool {
    if k.is_zero() || m.is_zero() || n.is_zero() || !(*k + *m + *n).is_zero() {
        return false;
    }
    let (a, b, c) = (direction_cosine(k), direction_cosine(m), direction_cosine(n));
    if !may_resonate(&a, &b, &c) {
        return false;
    }
    // the overall sign is irrelevant, so fix the first one
    [(1, 1), (1, -1), (-1, 1), (-1, -1)]
        .into_iter()
        .any(|(sb, sc)| surds_sum_to_zero(&[a, b.scaled(sb), c.scaled(sc)]))
}

/// Which of the three structural cases a resonant triad falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriadCase {
    /// All three third components vanish.
    Planar,
    /// No third component vanishes.
    Generic,
    /// Exactly one third component vanishes.
    OneFlat,
}

/// Classifies a triad by its vanishing third components. `None` when exactly
/// two vanish, which `k + m + n = 0` rules out.
pub fn classify(k: &LatticeVector, m: &LatticeVector, n: &LatticeVector) -> Option<TriadCase> {
    let zeros = [k, m, n].iter().filter(|v| v.third() == 0).count();
    match zeros {
        3 => Some(TriadCase::Planar),
        0 => Some(TriadCase::Generic),
        1 => Some(TriadCase::OneFlat),
        _ => None,
    }
}

/// For a one-flat triad, the two vectors with nonzero third component have
/// equal squared norms.
pub fn one_flat_certificate(k: &LatticeVector, m: &LatticeVector, n: &LatticeVector) -> bool {
    let others: Vec<&LatticeVector> = [k, m, n].into_iter().filter(|v| v.third() != 0).collect();
    others.len() == 2 && others[0].norm_sq() == others[1].norm_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Helicity::{Minus, Plus};

    const SIGNS: [(Helicity, Helicity, Helicity); 8] = [
        (Plus, Plus, Plus),
        (Plus, Plus, Minus),
        (Plus, Minus, Plus),
        (Plus, Minus, Minus),
        (Minus, Plus, Plus),
        (Minus, Plus, Minus),
        (Minus, Minus, Plus),
        (Minus, Minus, Minus),
    ];

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_decompose(12).unwrap(), (2, 3));
        assert_eq!(squarefree_decompose(49).unwrap(), (7, 1));
        assert_eq!(squarefree_decompose(1).unwrap(), (1, 1));
        assert_eq!(squarefree_decompose(72).unwrap(), (6, 2));
        assert!(squarefree_decompose(0).is_err());
    }

    #[test]
    fn squarefree_reconstructs() {
        for a in 1..5000u64 {
            let (r, s) = squarefree_decompose(a).unwrap();
            assert_eq!(r * r * s, a);
            let mut p = 2;
            while p * p <= s {
                assert_ne!(s % (p * p), 0, "{a}: core {s} not squarefree");
                p += 1;
            }
        }
    }

    #[test]
    fn horizontal_triad_resonates_for_all_signs() {
        let k = LatticeVector::new(1, 2, 0);
        let m = LatticeVector::new(3, -1, 0);
        for (a, b, c) in SIGNS {
            assert!(resonance_holds(&k, &m, a, b, c).unwrap());
        }
    }

    #[test]
    fn unit_and_diagonal_never_resonate() {
        let k = LatticeVector::new(0, 0, 1);
        let m = LatticeVector::new(1, 0, 0);
        for (a, b, c) in SIGNS {
            assert!(!resonance_holds(&k, &m, a, b, c).unwrap());
        }
    }

    #[test]
    fn one_flat_triad_with_equal_norms() {
        let k = LatticeVector::new(2, 1, 1);
        let m = LatticeVector::new(-1, -3, 0);
        let n = k + m;
        assert_eq!(n, LatticeVector::new(1, -2, 1));
        // -s1/sqrt6 + s3/sqrt6 = 0 iff s1 = s3, for either s2
        for (a, b, c) in SIGNS {
            let exact = resonance_holds(&k, &m, a, b, c).unwrap();
            assert_eq!(exact, a == c);
            if exact {
                assert!(phase_rate_f64(&k, &m, a, b, c).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_output_is_excluded() {
        let k = LatticeVector::new(1, 2, 3);
        assert!(matches!(
            resonance_holds(&k, &(-k), Plus, Plus, Plus),
            Err(Error::ExcludedTriad { .. })
        ));
    }

    #[test]
    fn exact_agrees_with_float_on_small_box() {
        let m = LatticeVector::new(2, -1, 2);
        let mut found = 0;
        for a in -4..=4 {
            for b in -4..=4 {
                for c in -4..=4 {
                    let k = LatticeVector::new(a, b, c);
                    if k.is_zero() || (k + m).is_zero() {
                        continue;
                    }
                    for (x, y, z) in SIGNS {
                        let exact = resonance_holds(&k, &m, x, y, z).unwrap();
                        let d = phase_rate_f64(&k, &m, x, y, z);
                        if d.abs() > 1e-9 {
                            assert!(!exact);
                        } else {
                            assert!(exact, "{k} {m}: float {d} but exact nonzero");
                            found += 1;
                        }
                    }
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn gamma_matches_sign_search() {
        let k = LatticeVector::new(2, 1, 1);
        let m = LatticeVector::new(-1, -3, 0);
        let n = -(k + m);
        assert!(in_gamma(&k, &m, &n));
        assert!(in_gamma(&n, &k, &m));
        assert!(!in_gamma(
            &LatticeVector::new(0, 0, 1),
            &LatticeVector::new(1, 0, 0),
            &LatticeVector::new(-1, 0, -1)
        ));
        assert_eq!(classify(&k, &m, &n), Some(TriadCase::OneFlat));
        assert!(one_flat_certificate(&k, &m, &n));
    }
}
