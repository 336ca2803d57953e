use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{inner_product, SpectralField};
use crate::lattice::{slot, Helicity, ModeIndex};
use crate::operators::{apply_full_propagated, resonant_pairing};
use crate::resonance::table::TriadTable;

/// Nodes per Gauss-Legendre panel.
const PANEL_NODES: usize = 8;

/// `(1/2pi) int_0^{2pi} exp(i x s) ds`.
fn mean_phase(x: f64) -> Complex64 {
    if x == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let z = Complex64::new(0.0, 2.0 * PI * x);
    (z.exp() - 1.0) / z
}

fn check_radius(table: &TriadTable, fields: &[&SpectralField]) -> Result<()> {
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

/// `|(1/2pi) int_0^{2pi} <B(Omega s, u, v), w> ds - <B~(u,v), w>|` from the
/// exact time average of every non-resonant entry.
pub fn averaging_gap_closed_form(
    table: &TriadTable,
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
    omega: f64,
) -> Result<f64> {
    check_radius(table, &[u, v, w])?;
    let osc = table.oscillatory().ok_or(Error::MissingOscillatory)?;
    let (ua, va) = (u.amplitudes(), v.amplitudes());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..table.basis().num_modes() as ModeIndex {
        for s in Helicity::BOTH {
            let out = slot(i, s);
            let wc = w.amplitudes()[out].conj();
            if wc == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut part = Complex64::new(0.0, 0.0);
            for e in osc.slot_entries(out) {
                part += e.coeff * ua[e.u_slot as usize] * va[e.v_slot as usize] * mean_phase(omega * e.rate);
            }
            acc += part * wc;
        }
    }
    Ok(acc.norm())
}

/// The same gap by composite Gauss-Legendre quadrature in `s` of
/// `<B(Omega s, u, v), w>`, each value obtained through the propagator.
/// `quad_points` is rounded up to a multiple of the panel size and must be
/// at least `20 Omega max|D|`.
pub fn averaging_gap(
    table: &TriadTable,
    u: &SpectralField,
    v: &SpectralField,
    w: &SpectralField,
    omega: f64,
    quad_points: usize,
) -> Result<f64> {
    check_radius(table, &[u, v, w])?;
    let need = 20.0 * omega.abs() * table.max_rate();
    if (quad_points as f64) < need || quad_points == 0 {
        return Err(Error::Resolution(format!(
            "{quad_points} quadrature points do not resolve omega = {omega}; need at least {}",
            need.ceil().max(1.0)
        )));
    }
    let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_NODES).unwrap());
    let panels = quad_points.div_ceil(PANEL_NODES);
    let h = 2.0 * PI / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let (a, b) = (p as f64 * h, (p + 1) as f64 * h);
        let mut panel = Complex64::new(0.0, 0.0);
        for (x, wt) in rule.as_node_weight_pairs() {
            let s = 0.5 * ((b - a) * x + (b + a));
            panel += inner_product(&apply_full_propagated(table, u, v, omega * s)?, w)? * *wt;
        }
        total += panel * (0.5 * (b - a));
    }
    let mean = total / (2.0 * PI);
    Ok((mean - resonant_pairing(table, u, v, w)?).norm())
}

/// Least common multiple of the integer norms `1..=radius`: for fields
/// supported on modes of integer norm every `Omega D` is then an integer.
pub fn integer_phase_omega(radius: u32) -> f64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=radius as u64).fold(1u64, |l, k| l / gcd(l, k) * k) as f64
}
