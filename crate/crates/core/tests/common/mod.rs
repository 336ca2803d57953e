//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use num_complex::Complex64;
use resonant_core::field::SpectralField;
use resonant_core::lattice::{Helicity, ModeIndex};
use rustfft::FftPlanner;

/// Grid of side `m`, stored `x` fastest.
struct Grid {
    m: usize,
    data: Vec<Complex64>,
}

impl Grid {
    fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![Complex64::new(0.0, 0.0); m * m * m],
        }
    }

    fn index(&self, k: [i64; 3]) -> usize {
        let m = self.m as i64;
        let w = |c: i64| c.rem_euclid(m) as usize;
        w(k[0]) + self.m * (w(k[1]) + self.m * w(k[2]))
    }

    /// Unnormalized 3D transform along each axis in turn.
    fn transform(&mut self, planner: &mut FftPlanner<f64>, inverse: bool) {
        let m = self.m;
        let fft = if inverse {
            planner.plan_fft_inverse(m)
        } else {
            planner.plan_fft_forward(m)
        };
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for stride in [1, m, m * m] {
            for base in 0..m * m * m {
                if (base / stride) % m != 0 {
                    continue;
                }
                for (j, x) in line.iter_mut().enumerate() {
                    *x = self.data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, x) in line.iter().enumerate() {
                    self.data[base + j * stride] = *x;
                }
            }
        }
    }
}

/// Helical amplitudes of `P(u . grad u)`, truncated to the basis of `u`,
/// computed by pseudo-spectral products on a grid of side `m`.
/// `m >= 3N + 1` makes the truncated result alias-free.
pub fn pseudo_spectral_advection(u: &SpectralField, m: usize) -> Vec<Complex64> {
    let basis = u.basis();
    let tau = 2.0 * std::f64::consts::PI;
    let mut planner = FftPlanner::new();
    // velocity components, then d_j u_l at index 3 + 3 j + l
    let mut fields: Vec<Grid> = (0..12).map(|_| Grid::zeros(m)).collect();
    for i in 0..basis.num_modes() as ModeIndex {
        let k = basis.mode(i);
        let c = u.cartesian(i);
        for l in 0..3 {
            let at = fields[l].index(k.0);
            fields[l].data[at] = c[l];
            for j in 0..3 {
                fields[3 + 3 * j + l].data[at] = Complex64::new(0.0, tau * k.0[j] as f64) * c[l];
            }
        }
    }
    for f in fields.iter_mut() {
        f.transform(&mut planner, true);
    }
    let mut adv: Vec<Grid> = (0..3).map(|_| Grid::zeros(m)).collect();
    for p in 0..m * m * m {
        for l in 0..3 {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..3 {
                s += fields[j].data[p] * fields[3 + 3 * j + l].data[p];
            }
            adv[l].data[p] = s;
        }
    }
    let scale = 1.0 / (m * m * m) as f64;
    for a in adv.iter_mut() {
        a.transform(&mut planner, false);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); basis.num_slots()];
    for i in 0..basis.num_modes() as ModeIndex {
        let n = basis.mode(i);
        let nf = n.as_f64();
        let q = n.norm_sq() as f64;
        let mut v: [Complex64; 3] = std::array::from_fn(|l| adv[l].data[adv[l].index(n.0)] * scale);
        let dot = (0..3).map(|l| v[l] * nf[l]).sum::<Complex64>() / q;
        for l in 0..3 {
            v[l] -= dot * nf[l];
        }
        for s in Helicity::BOTH {
            let phi = basis.vector(i, s);
            out[2 * i as usize + s.offset()] = (0..3).map(|l| v[l] * phi[l].conj()).sum();
        }
    }
    out
}

/// `sqrt(sum |a - b|^2) / sqrt(sum |b|^2)`.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
