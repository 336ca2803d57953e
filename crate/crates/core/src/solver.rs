//! Time integration of the resonant equation `u_t + B~(u,u) = nu Lap u` and
//! of the rotating system written in the oscillating variables,
//! `u_t + B(Omega t, u, u) = nu Lap u`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{gradient_norm, inner_product, l2_norm, random_real_field, sobolev_norm, SpectralField};
use crate::lattice::{unslot, Basis};
use crate::operators::{apply_full_propagated, apply_resonant};
use crate::resonance::table::{build_triad_table, TriadTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Lawson integrating-factor RK4: exact viscous factor, RK4 on the
    /// nonlinearity.
    IntegratingFactorRk4,
    ExplicitRk4,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::IntegratingFactorRk4 => "if-rk4",
            Scheme::ExplicitRk4 => "rk4",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "if-rk4" | "ifrk4" => Ok(Scheme::IntegratingFactorRk4),
            "rk4" => Ok(Scheme::ExplicitRk4),
            other => Err(format!("unknown scheme '{other}', expected if-rk4 or rk4")),
        }
    }
}

/// Which nonlinearity is integrated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Resonant,
    /// Full operator with phases `Omega t`; `omega = 0` is plain
    /// Navier-Stokes.
    Rotating { omega: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub radius: u32,
    pub nu: f64,
    pub dt: f64,
    pub horizon: f64,
    /// `0` selects the resonant equation.
    pub omega: f64,
    pub scheme: Scheme,
    pub sample_every: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            radius: 8,
            nu: 0.1,
            dt: 1e-3,
            horizon: 1.0,
            omega: 0.0,
            scheme: Scheme::IntegratingFactorRk4,
            sample_every: 10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    /// Every violated precondition, or `Ok`.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.radius < 1 {
            bad.push("radius: must be an integer >= 1".to_string());
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            bad.push(format!("nu: must be > 0 (got {})", self.nu));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            bad.push(format!("dt: must be > 0 (got {})", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            bad.push(format!("horizon: must be > 0 (got {})", self.horizon));
        } else if self.dt > self.horizon {
            bad.push(format!("dt: must not exceed horizon {} (got {})", self.horizon, self.dt));
        }
        if !(self.omega >= 0.0 && self.omega.is_finite()) {
            bad.push(format!("omega: must be >= 0 (got {})", self.omega));
        }
        if self.sample_every < 1 {
            bad.push("sample-every: must be an integer >= 1".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(bad))
        }
    }

    pub fn model(&self) -> Model {
        if self.omega == 0.0 {
            Model::Resonant
        } else {
            Model::Rotating { omega: self.omega }
        }
    }

    /// Number of steps, with `dt` shortened slightly if needed so that they
    /// land exactly on the horizon.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.horizon / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.horizon / n as f64)
    }
}

/// Diagnostics along a run.
#[derive(Clone, Debug, Default)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub l2: Vec<f64>,
    /// `||grad u||_{L^2}`.
    pub h1: Vec<f64>,
    /// `| ||u(t)||^2 + 2 nu int_0^t ||grad u||^2 - ||u0||^2 |`.
    pub residual: Vec<f64>,
    pub states: Option<Vec<SpectralField>>,
    pub final_state: Option<SpectralField>,
}

impl TrajectoryRecord {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().cloned().fold(0.0, f64::max)
    }

    fn push(&mut self, t: f64, u: &SpectralField, residual: f64, keep: bool) {
        self.times.push(t);
        self.l2.push(l2_norm(u));
        self.h1.push(gradient_norm(u));
        self.residual.push(residual);
        if keep {
            self.states.get_or_insert_with(Vec::new).push(u.clone());
        }
    }
}

/// Integrator bound to a table and a configuration.
pub struct Integrator {
    table: Arc<TriadTable>,
    cfg: SolverConfig,
    model: Model,
    /// `nu (2 pi |k|)^2` per slot.
    decay: Vec<f64>,
}

impl Integrator {
    pub fn new(table: Arc<TriadTable>, cfg: SolverConfig) -> Result<Self> {
        let model = cfg.model();
        Self::with_model(table, cfg, model)
    }

    pub fn with_model(table: Arc<TriadTable>, cfg: SolverConfig, model: Model) -> Result<Self> {
        cfg.validate()?;
        if table.radius() != cfg.radius {
            return Err(Error::Dimension {
                expected: cfg.radius,
                found: table.radius(),
            });
        }
        if matches!(model, Model::Rotating { .. }) && !table.has_oscillatory() {
            return Err(Error::MissingOscillatory);
        }
        let basis = table.basis();
        let decay = (0..basis.num_slots())
            .map(|s| {
                let (i, _) = unslot(s);
                let w = 2.0 * PI * basis.norm(i);
                cfg.nu * w * w
            })
            .collect();
        Ok(Self {
            table,
            cfg,
            model,
            decay,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn table(&self) -> &Arc<TriadTable> {
        &self.table
    }

    /// `-B(u, u)` at time `t` for the selected model.
    pub fn nonlinearity(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        let b = match self.model {
            Model::Resonant => apply_resonant(&self.table, u, u)?,
            Model::Rotating { omega } => apply_full_propagated(&self.table, u, u, omega * t)?,
        };
        Ok(b.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Time derivative `-nu (2 pi |k|)^2 u + N(u, t)` given `N(u, t)`.
    fn rhs(&self, u: &SpectralField, n: &SpectralField) -> SpectralField {
        let amps = u
            .amplitudes()
            .iter()
            .zip(n.amplitudes())
            .zip(&self.decay)
            .map(|((x, y), l)| y - x * *l)
            .collect();
        SpectralField::from_parts(u.basis().clone(), amps, u.is_real() && n.is_real())
    }

    /// One step of size `dt` from `(u, t)`.
    pub fn step(&self, u: &SpectralField, t: f64, dt: f64) -> Result<SpectralField> {
        let a = self.nonlinearity(u, t)?;
        self.step_with(u, t, dt, &a)
    }

    /// One step reusing `a = N(u, t)`.
    fn step_with(&self, u: &SpectralField, t: f64, dt: f64, a: &SpectralField) -> Result<SpectralField> {
        let out = match self.cfg.scheme {
            Scheme::IntegratingFactorRk4 => self.lawson_rk4(u, t, dt, a)?,
            Scheme::ExplicitRk4 => self.explicit_rk4(u, t, dt, a)?,
        };
        self.check_finite(&out, t + dt)?;
        Ok(out)
    }

    fn lawson_rk4(&self, u: &SpectralField, t: f64, dt: f64, a: &SpectralField) -> Result<SpectralField> {
        let half: Vec<f64> = self.decay.iter().map(|l| (-l * dt / 2.0).exp()).collect();
        let basis = u.basis().clone();
        let real = u.is_real();
        let ua = u.amplitudes();
        let build = |f: &dyn Fn(usize) -> Complex64| -> SpectralField {
            SpectralField::from_parts(basis.clone(), (0..ua.len()).map(f).collect(), real)
        };
        let aa = a.amplitudes();
        let u2 = build(&|j| half[j] * (ua[j] + aa[j] * (dt / 2.0)));
        let b = self.nonlinearity(&u2, t + dt / 2.0)?;
        let ba = b.amplitudes();
        let u3 = build(&|j| half[j] * ua[j] + ba[j] * (dt / 2.0));
        let c = self.nonlinearity(&u3, t + dt / 2.0)?;
        let ca = c.amplitudes();
        let u4 = build(&|j| half[j] * half[j] * ua[j] + half[j] * ca[j] * dt);
        let d = self.nonlinearity(&u4, t + dt)?;
        let da = d.amplitudes();
        Ok(build(&|j| {
            let e = half[j];
            let e2 = e * e;
            e2 * ua[j] + (e2 * aa[j] + (ba[j] + ca[j]) * (2.0 * e) + da[j]) * (dt / 6.0)
        }))
    }

    fn explicit_rk4(&self, u: &SpectralField, t: f64, dt: f64, a: &SpectralField) -> Result<SpectralField> {
        let k1 = self.rhs(u, a);
        let u2 = u.lin_comb(1.0, &k1, dt / 2.0)?;
        let k2 = self.rhs(&u2, &self.nonlinearity(&u2, t + dt / 2.0)?);
        let u3 = u.lin_comb(1.0, &k2, dt / 2.0)?;
        let k3 = self.rhs(&u3, &self.nonlinearity(&u3, t + dt / 2.0)?);
        let u4 = u.lin_comb(1.0, &k3, dt)?;
        let k4 = self.rhs(&u4, &self.nonlinearity(&u4, t + dt)?);
        let amps = (0..u.amplitudes().len())
            .map(|j| {
                u.amplitudes()[j]
                    + (k1.amplitudes()[j] + (k2.amplitudes()[j] + k3.amplitudes()[j]) * 2.0 + k4.amplitudes()[j])
                        * (dt / 6.0)
            })
            .collect();
        Ok(SpectralField::from_parts(u.basis().clone(), amps, u.is_real()))
    }

    fn check_finite(&self, u: &SpectralField, t: f64) -> Result<()> {
        if let Some(s) = u.amplitudes().iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            let (i, h) = unslot(s);
            return Err(Error::BlowUp {
                t,
                mode: u.basis().mode(i),
                helicity: h.sign(),
            });
        }
        Ok(())
    }

    /// `||grad u||^2` and its time derivative `2 Re <grad u, grad u_t>`.
    fn dissipation(&self, u: &SpectralField, n: &SpectralField) -> (f64, f64) {
        let ut = self.rhs(u, n);
        let mut f = 0.0;
        let mut df = 0.0;
        for (j, (x, y)) in u.amplitudes().iter().zip(ut.amplitudes()).enumerate() {
            let w = self.decay[j] / self.cfg.nu;
            f += w * x.norm_sqr();
            df += 2.0 * w * (x * y.conj()).re;
        }
        (f, df)
    }

    /// Integrates to the horizon. The dissipation integral is accumulated
    /// every step with the endpoint-corrected trapezoid rule
    /// `h/2 (f0 + f1) + h^2/12 (f0' - f1')`, which is fourth order like the
    /// time stepper.
    pub fn simulate(&self, u0: &SpectralField, keep_states: bool) -> Result<TrajectoryRecord> {
        if u0.radius() != self.cfg.radius {
            return Err(Error::Dimension {
                expected: self.cfg.radius,
                found: u0.radius(),
            });
        }
        let (steps, dt) = self.cfg.steps();
        let e0 = l2_norm(u0).powi(2);
        let mut rec = TrajectoryRecord::default();
        rec.push(0.0, u0, 0.0, keep_states);
        let mut u = u0.clone();
        let mut a = self.nonlinearity(&u, 0.0)?;
        let (mut f, mut df) = self.dissipation(&u, &a);
        let mut integral = 0.0;
        for n in 0..steps {
            let t = n as f64 * dt;
            let t1 = (n + 1) as f64 * dt;
            let next = self.step_with(&u, t, dt, &a)?;
            let a1 = self.nonlinearity(&next, t1)?;
            let (f1, df1) = self.dissipation(&next, &a1);
            integral += dt / 2.0 * (f + f1) + dt * dt / 12.0 * (df - df1);
            u = next;
            a = a1;
            f = f1;
            df = df1;
            if (n + 1) % self.cfg.sample_every == 0 || n + 1 == steps {
                let residual = (l2_norm(&u).powi(2) + 2.0 * self.cfg.nu * integral - e0).abs();
                rec.push(t1, &u, residual, keep_states);
            }
        }
        rec.final_state = Some(u);
        Ok(rec)
    }
}

/// Builds the table the configuration needs and integrates `u0`.
pub fn simulate(u0: &SpectralField, cfg: &SolverConfig) -> Result<TrajectoryRecord> {
    let table = build_triad_table(u0.basis().clone(), cfg.model() != Model::Resonant)?;
    Integrator::new(Arc::new(table), cfg.clone())?.simulate(u0, false)
}

/// The configured random initial field.
pub fn initial_field(cfg: &SolverConfig) -> Result<SpectralField> {
    Ok(random_real_field(Arc::new(Basis::new(cfg.radius)?), cfg.seed))
}

/// Per-sample row of [`UniquenessReport`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniquenessSample {
    pub t: f64,
    /// `||w||_{L^2}`, `w = u - v`.
    pub w_l2: f64,
    /// `(1/2) d/dt ||w||^2 + nu ||grad w||^2`, with the derivative taken
    /// from the equation: `-Re <B~(u,u) - B~(v,v), w>`.
    pub energy_rate: f64,
    /// Same quantity with a centred difference of the sampled `||w||^2`.
    pub energy_rate_fd: f64,
    /// `C ||w||_{L^2} ||w||_{H^1} ||u||_{H^1}`.
    pub bound: f64,
    /// `|<B~(u,u) - B~(v,v), w> - <B~(w,u), w>|` relative to
    /// `|<B~(u,u), w>| + |<B~(v,v), w>|`.
    pub identity_defect: f64,
}

#[derive(Clone, Debug)]
pub struct UniquenessReport {
    pub constant: f64,
    pub sup_w: f64,
    pub samples: Vec<UniquenessSample>,
}

impl UniquenessReport {
    /// `(1/2) D||w||^2 + nu ||grad w||^2 <= bound` at every sample, `D`
    /// being the difference quotient of the sampled `||w||^2`.
    ///
    /// Two numerical runs from the same data differ by accumulated
    /// truncation error, which enters the difference quotient but is not
    /// controlled by the bound; near `t = 0`, where `w` and the bound vanish,
    /// this form fails for any pair of distinct step sizes.
    pub fn certificate_holds(&self) -> bool {
        self.samples.iter().all(|s| s.energy_rate_fd <= s.bound * (1.0 + 1e-9) + 1e-300)
    }

    /// The same inequality with the rate taken from the equation, which
    /// isolates the trilinear mechanism from the time discretization.
    pub fn rate_certificate_holds(&self) -> bool {
        self.samples.iter().all(|s| s.energy_rate <= s.bound * (1.0 + 1e-9) + 1e-300)
    }

    pub fn max_identity_defect(&self) -> f64 {
        self.samples.iter().map(|s| s.identity_defect).fold(0.0, f64::max)
    }
}

/// Runs `u0` under two configurations that share radius, viscosity,
/// horizon and rotation, and compares them at the coarser run's sample
/// times. `constant` is the trilinear constant used in the bound
/// `|<B~(w,u),w>| <= C ||w|| ||w||_{H^1} ||u||_{H^1}`.
pub fn uniqueness_experiment(
    table: Arc<TriadTable>,
    u0: &SpectralField,
    cfg_a: &SolverConfig,
    cfg_b: &SolverConfig,
    constant: f64,
) -> Result<UniquenessReport> {
    let mut bad = Vec::new();
    if cfg_a.radius != cfg_b.radius {
        bad.push(format!("radius: runs differ ({} vs {})", cfg_a.radius, cfg_b.radius));
    }
    if cfg_a.nu != cfg_b.nu {
        bad.push(format!("nu: runs differ ({} vs {})", cfg_a.nu, cfg_b.nu));
    }
    if cfg_a.horizon != cfg_b.horizon {
        bad.push(format!("horizon: runs differ ({} vs {})", cfg_a.horizon, cfg_b.horizon));
    }
    if cfg_a.omega != 0.0 || cfg_b.omega != 0.0 {
        bad.push("omega: the experiment concerns the resonant equation, omega must be 0".to_string());
    }
    if !bad.is_empty() {
        return Err(Error::Config(bad.join("; ")));
    }
    let (coarse, fine) = if cfg_a.steps().1 >= cfg_b.steps().1 {
        (cfg_a, cfg_b)
    } else {
        (cfg_b, cfg_a)
    };
    let run = |cfg: &SolverConfig| -> Result<TrajectoryRecord> {
        let mut c = cfg.clone();
        c.sample_every = 1;
        Integrator::new(table.clone(), c)?.simulate(u0, true)
    };
    let ra = run(coarse)?;
    let rb = run(fine)?;
    let (sa, sb) = (ra.states.as_ref().unwrap(), rb.states.as_ref().unwrap());
    let horizon = coarse.horizon;

    let mut pairs = Vec::new();
    let mut j = 0;
    for (i, &t) in ra.times.iter().enumerate() {
        while j < rb.times.len() && rb.times[j] < t - 1e-9 * horizon {
            j += 1;
        }
        if j < rb.times.len() && (rb.times[j] - t).abs() <= 1e-9 * horizon {
            pairs.push((t, &sb[j], &sa[i]));
        }
    }
    if pairs.len() < 2 {
        return Err(Error::Config("the two runs share fewer than two sample times".into()));
    }
    let nu = coarse.nu;
    let w_sq: Vec<f64> = pairs.iter().map(|(_, u, v)| l2_norm(&u.sub(v).unwrap()).powi(2)).collect();
    let mut samples = Vec::with_capacity(pairs.len());
    for (idx, (t, u, v)) in pairs.iter().enumerate() {
        let w = u.sub(v)?;
        let buu = apply_resonant(&table, u, u)?;
        let bvv = apply_resonant(&table, v, v)?;
        let bwu = apply_resonant(&table, &w, u)?;
        let p_uu = inner_product(&buu, &w)?;
        let p_vv = inner_product(&bvv, &w)?;
        let lhs = p_uu - p_vv;
        let rhs = inner_product(&bwu, &w)?;
        let scale = p_uu.norm() + p_vv.norm();
        let identity_defect = if scale > 0.0 { (lhs - rhs).norm() / scale } else { (lhs - rhs).norm() };
        let grad_w = gradient_norm(&w);
        let energy_rate = -lhs.re;
        let fd = if idx == 0 || idx + 1 == pairs.len() {
            let (a, b) = if idx == 0 { (0, 1) } else { (idx - 1, idx) };
            (w_sq[b] - w_sq[a]) / (pairs[b].0 - pairs[a].0)
        } else {
            (w_sq[idx + 1] - w_sq[idx - 1]) / (pairs[idx + 1].0 - pairs[idx - 1].0)
        };
        samples.push(UniquenessSample {
            t: *t,
            w_l2: w_sq[idx].sqrt(),
            energy_rate,
            energy_rate_fd: 0.5 * fd + nu * grad_w * grad_w,
            bound: constant * w_sq[idx].sqrt() * sobolev_norm(&w, 1.0) * sobolev_norm(u, 1.0),
            identity_defect,
        });
    }
    let sup_w = samples.iter().map(|s| s.w_l2).fold(0.0, f64::max);
    Ok(UniquenessReport {
        constant,
        sup_w,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OmegaRow {
    pub omega: f64,
    /// Step used for this run.
    pub dt: f64,
    /// `||u_Omega(T) - u_res(T)||_{L^2}`.
    pub difference: f64,
}

/// Compares the rotating dynamics at each `Omega` with the resonant
/// dynamics from the same data. Requires `dt <= 0.1 / max Omega`.
pub fn omega_limit_study(
    table: Arc<TriadTable>,
    u0: &SpectralField,
    omegas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<OmegaRow>> {
    check_omegas(omegas)?;
    let max = omegas.last().copied().unwrap_or(0.0);
    if max > 0.0 && cfg.dt > 0.1 / max {
        return Err(Error::Resolution(format!(
            "dt = {} does not resolve omega = {max}; need dt <= {}",
            cfg.dt,
            0.1 / max
        )));
    }
    run_omega_study(table, u0, omegas, cfg, |_| cfg.dt)
}

/// As [`omega_limit_study`], but each rotating run takes its own step
/// `min(dt, 0.1 / Omega)`, so only the fastest run pays for the finest
/// resolution.
pub fn omega_limit_study_refined(
    table: Arc<TriadTable>,
    u0: &SpectralField,
    omegas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<OmegaRow>> {
    check_omegas(omegas)?;
    run_omega_study(table, u0, omegas, cfg, |omega| {
        if omega > 0.0 {
            cfg.dt.min(0.1 / omega)
        } else {
            cfg.dt
        }
    })
}

fn check_omegas(omegas: &[f64]) -> Result<()> {
    if omegas.windows(2).any(|w| w[1] <= w[0]) || omegas.iter().any(|o| o.is_nan() || *o < 0.0) {
        return Err(Error::Config("omega list must be nonnegative and strictly increasing".into()));
    }
    Ok(())
}

fn run_omega_study(
    table: Arc<TriadTable>,
    u0: &SpectralField,
    omegas: &[f64],
    cfg: &SolverConfig,
    step: impl Fn(f64) -> f64 + Sync,
) -> Result<Vec<OmegaRow>> {
    let mut base = cfg.clone();
    base.omega = 0.0;
    base.sample_every = usize::MAX;
    let final_state = |model: Model, dt: f64| -> Result<SpectralField> {
        let c = SolverConfig { dt, ..base.clone() };
        let rec = Integrator::with_model(table.clone(), c, model)?.simulate(u0, false)?;
        Ok(rec.final_state.unwrap())
    };
    let reference = final_state(Model::Resonant, cfg.dt)?;
    omegas
        .par_iter()
        .map(|&omega| {
            let dt = step(omega);
            let u = final_state(Model::Rotating { omega }, dt)?;
            Ok(OmegaRow {
                omega,
                dt,
                difference: l2_norm(&u.sub(&reference)?),
            })
        })
        .collect()
}
