//! `verify` subcommands and `resonance counting`.

use std::sync::Arc;

use anyhow::Result;
use clap::{Args, Subcommand};
use resonant_core::analysis::{
    averaging_gap, averaging_gap_closed_form, counting_constant, helicity_max_sequence, restricted_convolution_check,
    sample_hminus1, sample_seed, sample_trilinear, spread, EstimateReport, GammaIndicator, TrilinearOperator,
    TriadList,
};
use resonant_core::field::random_real_field;
use resonant_core::io::{counting_report, estimate_report, Cell, Report};
use resonant_core::lattice::Basis;
use resonant_core::resonance::{build_triad_table, counting_lemma_sup};
use resonant_core::DyadicShellIndex;

use crate::{Session, Verdict};

#[derive(Subcommand, Debug)]
pub enum Estimate {
    /// |<B~(u,v),u>| / (|u| |u|_H1 |v|_H1) sampled across radii.
    Trilinear(SamplingArgs),
    /// |B~(u,u)|_H-1 / (|u| |u|_H1), the sup over v of the trilinear ratio.
    Hminus1(SamplingArgs),
    /// Time-averaged pairing gap across omega, closed form and quadrature.
    Averaging(AveragingArgs),
    /// Ordered splitting of the Gamma-restricted convolution sum.
    Convolution(ConvolutionArgs),
    /// Counting sums normalized by 2^i across shells.
    Counting(CountingArgs),
}

#[derive(Args, Debug)]
pub struct SamplingArgs {
    #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
    radii: Vec<u32>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Sample the full operator at omega t = 0 instead (trilinear only).
    #[arg(long)]
    full: bool,
    /// PASS when max/min of the per-radius maxima is below this.
    #[arg(long, default_value_t = 2.0)]
    max_spread: f64,
}

#[derive(Args, Debug)]
pub struct AveragingArgs {
    #[arg(long, default_value_t = 10)]
    triples: u64,
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
    omegas: Vec<f64>,
    /// Omegas at which quadrature is compared with the closed form.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    quadrature_omegas: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
}

#[derive(Args, Debug)]
pub struct ConvolutionArgs {
    #[arg(long, default_value_t = 100)]
    pairs: u64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
}

#[derive(Args, Debug)]
pub struct CountingArgs {
    /// Shells 0..=max-shell.
    #[arg(long, default_value_t = 5)]
    max_shell: u32,
    #[arg(long, default_value_t = 64)]
    search_radius: u32,
    #[arg(long, default_value_t = 10.0)]
    max_spread: f64,
}

fn verdict(pass: bool, line: String) -> Verdict {
    if pass {
        Verdict::Pass(line)
    } else {
        Verdict::Fail(line)
    }
}

pub fn run(s: &Session, estimate: &Estimate) -> Result<Verdict> {
    match estimate {
        Estimate::Trilinear(a) => sampling(s, a, if a.full { "trilinear-full" } else { "trilinear" }),
        Estimate::Hminus1(a) => sampling(s, a, "hminus1"),
        Estimate::Averaging(a) => averaging(s, a),
        Estimate::Convolution(a) => convolution(s, a),
        Estimate::Counting(a) => counting(s, a),
    }
}

fn sampling(s: &Session, a: &SamplingArgs, name: &str) -> Result<Verdict> {
    let seed = s.run.solver.seed;
    let mut reports: Vec<EstimateReport> = Vec::new();
    for &radius in &a.radii {
        let table = build_triad_table(Arc::new(Basis::new(radius)?), a.full)?;
        let rep = match name {
            "hminus1" => sample_hminus1(&table, a.samples, seed)?,
            "trilinear-full" => sample_trilinear(&table, a.samples, seed, TrilinearOperator::Full)?,
            _ => sample_trilinear(&table, a.samples, seed, TrilinearOperator::Resonant)?,
        };
        println!("{name}: radius {radius}, max ratio {:.6} over {} samples", rep.max_ratio, rep.samples());
        reports.push(rep);
    }
    let maxima: Vec<f64> = reports.iter().map(|r| r.max_ratio).collect();
    let path = s.write(
        &estimate_report(&reports),
        &format!("{name}.csv"),
        &[format!("samples={}", a.samples), format!("radii={:?}", a.radii)],
    )?;
    let sp = spread(&maxima);
    let line = format!("{name}: max/min of maxima {sp:.3} (limit {}) -> {}", a.max_spread, path.display());
    Ok(verdict(sp < a.max_spread, line))
}

fn averaging(s: &Session, a: &AveragingArgs) -> Result<Verdict> {
    let table = s.table(true)?;
    let b = table.basis().clone();
    let mut r = Report::new(&["triple", "omega", "closed_form", "quadrature"]);
    let (mut monotone, mut worst) = (0, 0.0f64);
    for j in 0..a.triples {
        let f = |i: u64| random_real_field(b.clone(), sample_seed(s.run.solver.seed, 3 * j + i));
        let (u, v, w) = (f(0), f(1), f(2));
        let mut gaps = Vec::new();
        for &o in &a.omegas {
            let g = averaging_gap_closed_form(&table, &u, &v, &w, o)?;
            let q = if a.quadrature_omegas.contains(&o) {
                let points = (20.0 * o * table.max_rate()).ceil().max(1.0) as usize;
                let q = averaging_gap(&table, &u, &v, &w, o, points)?;
                worst = worst.max((q - g).abs());
                Cell::F(q)
            } else {
                Cell::S(String::new())
            };
            r.push(vec![Cell::I(j as i64), o.into(), g.into(), q]);
            gaps.push(g);
        }
        monotone += gaps.windows(2).all(|p| p[1] < p[0]) as u64;
    }
    let path = s.write(&r, "averaging.csv", &[format!("triples={}", a.triples)])?;
    let line = format!(
        "averaging: gap decreasing for {monotone}/{} triples, quadrature vs closed form {worst:.2e} (tol {:e}) -> {}",
        a.triples,
        a.tolerance,
        path.display()
    );
    Ok(verdict(monotone == a.triples && worst <= a.tolerance, line))
}

fn convolution(s: &Session, a: &ConvolutionArgs) -> Result<Verdict> {
    let b = s.basis()?;
    let c0 = counting_constant(b.radius())?;
    let list = TriadList::new(b.clone(), &GammaIndicator)?;
    let mut r = Report::new(&["pair", "left", "j1", "j2", "j3", "j4", "j5", "j6", "right", "proof_bound"]);
    let mut ok = 0;
    for j in 0..a.pairs {
        let seed = s.run.solver.seed;
        let u = helicity_max_sequence(&random_real_field(b.clone(), sample_seed(seed, 2 * j)));
        let v = helicity_max_sequence(&random_real_field(b.clone(), sample_seed(seed, 2 * j + 1)));
        let c = restricted_convolution_check(&list, &u, &v, a.alpha, a.beta)?;
        ok += (c.pairs_match() && c.j_total() >= c.left && c.left <= c.proof_bound(c0)) as u64;
        let mut row = vec![Cell::I(j as i64), c.left.into()];
        row.extend(c.j.iter().map(|x| Cell::F(*x)));
        row.push(c.right().into());
        row.push(c.proof_bound(c0).into());
        r.push(row);
    }
    let path = s.write(&r, "convolution.csv", &[format!("c0={c0:?}"), format!("alpha={}", a.alpha), format!("beta={}", a.beta)])?;
    let line = format!("convolution: {ok}/{} pairs satisfy the pairing, domination and bound with C0 = {c0:.4} -> {}", a.pairs, path.display());
    Ok(verdict(ok == a.pairs, line))
}

pub fn counting(s: &Session, a: &CountingArgs) -> Result<Verdict> {
    let mut reports = Vec::new();
    for i in 0..=a.max_shell {
        let rep = counting_lemma_sup(DyadicShellIndex(i), a.search_radius)?;
        println!("shell {i}: sup {:.6}, sup/2^i {:.6} at n = {}", rep.sup_value, rep.normalized(), rep.argmax_n);
        reports.push(rep);
    }
    let ratios: Vec<f64> = reports.iter().map(|r| r.normalized()).collect();
    let failures: u64 = reports.iter().map(|r| r.cases.certificate_failures + r.cases.unclassified).sum();
    let path = s.write(&counting_report(&reports), "counting.csv", &[format!("search-radius={}", a.search_radius)])?;
    let sp = spread(&ratios);
    let line = format!(
        "counting: max/min of sup/2^i {sp:.3} (limit {}), {failures} certificate failures -> {}",
        a.max_spread,
        path.display()
    );
    Ok(verdict(sp < a.max_spread && failures == 0, line))
}
