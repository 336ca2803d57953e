use std::path::Path;
use std::process::{Command, Output};

fn resonant(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonant"))
        .args(args)
        .env("RESONANT_OUT_DIR", dir)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn basis_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = resonant(dir.path(), &["--set", "radius=6", "basis", "check"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS"), "{}", stdout(&o));
}

#[test]
fn simulate_writes_trajectory_with_echoed_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# short run\nradius=3 nu=0.2\ndt=0.01 horizon=0.1 seed=4\n").unwrap();
    let o = resonant(dir.path(), &["--config", cfg.to_str().unwrap(), "--set", "nu=0.3", "simulate", "--save-state"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(text.contains("# radius=3\n"));
    assert!(text.contains("# nu=0.3\n"), "override should win: {text}");
    assert!(text.contains("# seed=4\n"));
    assert!(text.contains("t,l2,h1,residual\n"));
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("0.1"), "{last}");
    assert!(dir.path().join("trajectory.rspf").exists());

    // a saved state continues the run
    let state = dir.path().join("trajectory.rspf");
    let out = dir.path().join("again.csv");
    let o = resonant(
        dir.path(),
        &["--config", cfg.to_str().unwrap(), "--set", &format!("output={}", out.display()), "simulate", "--initial-state", state.to_str().unwrap()],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.exists());
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = resonant(dir.path(), &["--seed", "11", "--set", "radius=3", "--set", "horizon=0.05", "--set", "dt=0.005", "--set", &format!("output={}", out.display()), "simulate"]);
        assert!(o.status.success());
        std::fs::read_to_string(out).unwrap()
    };
    let strip = |s: String| s.lines().filter(|l| !l.starts_with("# command=") && !l.starts_with("# output=")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(run("a.csv")), strip(run("b.csv")));
}

#[test]
fn invalid_configuration_lists_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let o = resonant(dir.path(), &["--set", "nu=-1", "--set", "radius=zero", "--set", "colour=red", "simulate"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("nu: must be > 0"), "{err}");
    assert!(err.contains("radius: expected"), "{err}");
    assert!(err.contains("colour: unknown key"), "{err}");
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "nothing should be written");
}

#[test]
fn resonance_enumerate_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = resonant(dir.path(), &["--set", "radius=2", "resonance", "enumerate", "--nonresonant"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("triads.csv")).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "k1,k2,k3,m1,m2,m3,n1,n2,n3,s1,s2,s3,coeff_re,coeff_im,phase_rate,resonant");
    let flags: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert!(flags.contains(&"0") && flags.contains(&"1"));
}

#[test]
fn counting_and_convolution_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = resonant(dir.path(), &["verify", "counting", "--max-shell", "2", "--search-radius", "8"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS counting"));
    let o = resonant(dir.path(), &["--set", "radius=4", "verify", "convolution", "--pairs", "5"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(dir.path().join("convolution.csv").exists());
}

#[test]
fn failing_verification_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // a spread limit below 1 can never be met
    let o = resonant(dir.path(), &["verify", "trilinear", "--radii", "2,3", "--samples", "20", "--max-spread", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL trilinear"));
    let text = std::fs::read_to_string(dir.path().join("trilinear.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("trilinear,")).count(), 40);
}

#[test]
fn omega_sweep_checks_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["--set", "radius=2", "--set", "horizon=0.02", "--set", "dt=0.01"];
    let mut args = base.to_vec();
    args.extend(["omega-sweep", "--omegas", "1,10,100"]);
    let o = resonant(dir.path(), &args);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resolution"));
    let mut args = base.to_vec();
    args.extend(["omega-sweep", "--omegas", "0,1,10,100", "--refine-steps"]);
    let o = resonant(dir.path(), &args);
    assert!(o.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("omega.csv")).unwrap();
    assert!(text.contains("omega,dt,difference"));
}

#[test]
fn uniqueness_reports_both_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let o = resonant(dir.path(), &["--set", "radius=3", "--set", "horizon=0.05", "--set", "dt=0.005", "uniqueness", "--samples", "50"]);
    assert!(o.status.code().is_some_and(|c| c <= 1));
    let out = stdout(&o);
    assert!(out.contains("rate from the equation: holds"), "{out}");
    let text = std::fs::read_to_string(dir.path().join("uniqueness.csv")).unwrap();
    assert!(text.contains("# constant="));
}

#[test]
fn uniqueness_refuses_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let o = resonant(dir.path(), &["--set", "radius=2", "--set", "omega=5", "uniqueness"]);
    assert_eq!(o.status.code(), Some(2));
}
