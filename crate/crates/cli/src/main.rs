//! `resonant`: command-line front end.
//!
//! Configuration is resolved as defaults, then `--config FILE`, then each
//! `--set key=value` in order, then `--seed`. Reports go to the `output` key
//! if given, else to a per-command file name inside `--out-dir`
//! (`RESONANT_OUT_DIR`, default the working directory). Exit status is 0 on
//! PASS or success, 1 on FAIL and 2 on errors.

mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use resonant_core::analysis::sample_hminus1;
use resonant_core::field::random_real_field;
use resonant_core::io::{
    emit_report, load_state, omega_report, save_state, trajectory_report, triad_report, uniqueness_report,
    Report, RunConfig,
};
use resonant_core::lattice::Basis;
use resonant_core::resonance::{build_triad_table, TriadTable};
use resonant_core::solver::{omega_limit_study, omega_limit_study_refined, uniqueness_experiment, Integrator};
use resonant_core::SpectralField;

#[derive(Parser, Debug)]
#[command(name = "resonant", version, about = "Resonant rotating Navier-Stokes truncations and estimate checks")]
struct Cli {
    /// Configuration file of whitespace-separated key=value entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one configuration entry; repeatable, later wins.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory for reports when `output` is not configured.
    #[arg(long, env = "RESONANT_OUT_DIR", default_value = ".", global = true)]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Checks the helical basis at the configured radius.
    Basis {
        #[command(subcommand)]
        action: BasisAction,
    },
    /// Resonant triads and the dyadic counting sums.
    Resonance {
        #[command(subcommand)]
        action: ResonanceAction,
    },
    /// Integrates the resonant (omega = 0) or rotating equation.
    Simulate(SimulateArgs),
    /// Runs the same data at dt and dt/2 and checks the Gronwall certificate.
    Uniqueness(UniquenessArgs),
    /// Distance between rotating and resonant solutions across omega.
    OmegaSweep(OmegaArgs),
    /// Numerical checks of the estimates.
    Verify {
        #[command(subcommand)]
        estimate: verify::Estimate,
    },
}

#[derive(Subcommand, Debug)]
enum BasisAction {
    Check,
}

#[derive(Subcommand, Debug)]
enum ResonanceAction {
    /// Writes every stored interaction of the triad table.
    Enumerate {
        /// Include non-resonant interactions.
        #[arg(long)]
        nonresonant: bool,
    },
    /// Brute-force sup of the shell sums over |n| <= search radius.
    Counting(verify::CountingArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Start from a saved spectral state instead of the seeded random field.
    #[arg(long)]
    initial_state: Option<PathBuf>,
    /// Save the final state next to the report.
    #[arg(long)]
    save_state: bool,
}

#[derive(Args, Debug)]
struct UniquenessArgs {
    /// Trilinear constant; measured by H^-1 sampling when omitted.
    #[arg(long)]
    constant: Option<f64>,
    /// Samples used to measure the constant.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Args, Debug)]
struct OmegaArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
    omegas: Vec<f64>,
    /// Give each run its own step min(dt, 0.1/omega) instead of requiring
    /// dt <= 0.1/max omega.
    #[arg(long)]
    refine_steps: bool,
}

/// Resolved settings shared by every command.
pub struct Session {
    pub run: RunConfig,
    out_dir: PathBuf,
    command_line: String,
}

impl Session {
    /// Report path: the configured output, else `out_dir/default_name`.
    pub fn report_path(&self, default_name: &str) -> PathBuf {
        self.run.output.clone().unwrap_or_else(|| self.out_dir.join(default_name))
    }

    pub fn comments(&self, extra: &[String]) -> Vec<String> {
        let mut c = vec![format!("command={}", self.command_line)];
        c.extend(self.run.resolved_lines());
        c.extend(extra.iter().cloned());
        c
    }

    pub fn write(&self, report: &Report, default_name: &str, extra: &[String]) -> Result<PathBuf> {
        let path = self.report_path(default_name);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        emit_report(report, &self.comments(extra), &path).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn basis(&self) -> Result<Arc<Basis>> {
        Ok(Arc::new(Basis::new(self.run.solver.radius)?))
    }

    pub fn table(&self, nonresonant: bool) -> Result<Arc<TriadTable>> {
        Ok(Arc::new(build_triad_table(self.basis()?, nonresonant)?))
    }
}

/// Outcome of a command.
pub enum Verdict {
    Done,
    Pass(String),
    Fail(String),
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let text = match &cli.config {
        Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let mut overrides = Vec::new();
    for s in &cli.set {
        match s.split_once('=') {
            Some((k, v)) if !k.is_empty() => overrides.push((k.to_string(), v.to_string())),
            _ => bail!("--set expects KEY=VALUE, got '{s}'"),
        }
    }
    if let Some(seed) = cli.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    Ok(RunConfig::resolve(text.as_deref(), &overrides)?)
}

fn initial(ctx: &Session, basis: Arc<Basis>, path: Option<&Path>) -> Result<SpectralField> {
    match path {
        Some(p) => {
            let u = load_state(p).with_context(|| format!("loading {}", p.display()))?;
            if u.radius() != ctx.run.solver.radius {
                bail!("state radius {} does not match radius={}", u.radius(), ctx.run.solver.radius);
            }
            Ok(SpectralField::from_amplitudes(basis, u.into_amplitudes())?)
        }
        None => Ok(random_real_field(basis, ctx.run.solver.seed)),
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    let run = resolve(&cli)?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = Session {
        run,
        out_dir: cli.out_dir.clone(),
        command_line: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
    };
    let cfg = &ctx.run.solver;
    match &cli.command {
        Command::Basis { action: BasisAction::Check } => {
            let d = ctx.basis()?.defects();
            let line = format!(
                "radius {}: curl {:.1e}, unit norm {:.1e}, divergence {:.1e}, conjugate pairing {:.1e} (tol 1e-12)",
                cfg.radius, d.curl, d.unit_norm, d.divergence, d.conjugate_pairing
            );
            Ok(if d.max() <= 1e-12 { Verdict::Pass(line) } else { Verdict::Fail(line) })
        }
        Command::Resonance { action } => match action {
            ResonanceAction::Enumerate { nonresonant } => {
                let table = ctx.table(*nonresonant)?;
                let path = ctx.write(&triad_report(&table), "triads.csv", &[format!("nonresonant={nonresonant}")])?;
                println!("{} resonant and {} non-resonant interactions -> {}", table.resonant().len(), table.oscillatory().map_or(0, |b| b.len()), path.display());
                Ok(Verdict::Done)
            }
            ResonanceAction::Counting(args) => verify::counting(&ctx, args),
        },
        Command::Simulate(args) => {
            let table = ctx.table(cfg.omega > 0.0)?;
            let u0 = initial(&ctx, table.basis().clone(), args.initial_state.as_deref())?;
            let rec = Integrator::new(table, cfg.clone())?.simulate(&u0, false)?;
            let path = ctx.write(&trajectory_report(&rec), "trajectory.csv", &[])?;
            if args.save_state {
                let state = path.with_extension("rspf");
                save_state(rec.final_state.as_ref().unwrap(), &state)?;
                println!("final state -> {}", state.display());
            }
            println!("max energy residual {:.3e} -> {}", rec.max_residual(), path.display());
            Ok(Verdict::Done)
        }
        Command::Uniqueness(args) => {
            if cfg.omega != 0.0 {
                bail!("uniqueness concerns the resonant equation; set omega=0");
            }
            let table = ctx.table(false)?;
            let constant = match args.constant {
                Some(c) => c,
                None => sample_hminus1(&table, args.samples, cfg.seed)?.max_ratio,
            };
            let u0 = random_real_field(table.basis().clone(), cfg.seed);
            let mut half = cfg.clone();
            half.dt = cfg.dt / 2.0;
            let rep = uniqueness_experiment(table, &u0, cfg, &half, constant)?;
            let path = ctx.write(&uniqueness_report(&rep), "uniqueness.csv", &[format!("constant={constant:?}")])?;
            let line = format!(
                "sup|u-v| {:.3e}, identity defect {:.1e} (tol 1e-9), certificate with C = {constant:.4} {} (rate from the equation: {}) -> {}",
                rep.sup_w,
                rep.max_identity_defect(),
                if rep.certificate_holds() { "holds" } else { "fails" },
                if rep.rate_certificate_holds() { "holds" } else { "fails" },
                path.display()
            );
            Ok(if rep.certificate_holds() && rep.max_identity_defect() <= 1e-9 { Verdict::Pass(line) } else { Verdict::Fail(line) })
        }
        Command::OmegaSweep(args) => {
            let table = ctx.table(true)?;
            let u0 = random_real_field(table.basis().clone(), cfg.seed);
            let rows = if args.refine_steps {
                omega_limit_study_refined(table, &u0, &args.omegas, cfg)?
            } else {
                omega_limit_study(table, &u0, &args.omegas, cfg)?
            };
            let path = ctx.write(&omega_report(&rows), "omega.csv", &[format!("refine-steps={}", args.refine_steps)])?;
            let positive: Vec<f64> = rows.iter().filter(|r| r.omega > 0.0).map(|r| r.difference).collect();
            let line = format!(
                "differences {:?} -> {}",
                rows.iter().map(|r| (r.omega, r.difference)).collect::<Vec<_>>(),
                path.display()
            );
            Ok(if positive.windows(2).all(|p| p[1] <= p[0]) { Verdict::Pass(line) } else { Verdict::Fail(line) })
        }
        Command::Verify { estimate } => verify::run(&ctx, estimate),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Done) => ExitCode::SUCCESS,
        Ok(Verdict::Pass(line)) => {
            println!("PASS {line}");
            ExitCode::SUCCESS
        }
        Ok(Verdict::Fail(line)) => {
            println!("FAIL {line}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
