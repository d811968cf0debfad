//! The `qnf` command line: one subcommand per scenario kind.
//!
//! Exit status is 0 on success, 1 when `selftest` has a failing criterion or
//! output cannot be written, 2 on a validation error and 3 when `--strict` is
//! given and a result is affected by Fock-space truncation. Errors and
//! warnings go to stderr as one-line JSON records.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Kind, Scenario, SolveMethod};
use crate::error::{Error, Result};
use crate::ion::{coherent_deviation, OracleDynamics, ReducedDynamics};
use crate::parallel::Execution;
use crate::selftest;
use crate::solver::{solve_kernel, solve_shifted, QnfSolution};
use crate::witness::{evaluate, observable_operator, CharacteristicFunction, WitnessReport};

#[derive(Debug, Parser)]
#[command(name = "qnf", version, about = "Operational nonclassicality and quantum-noise-free detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ⟨f†f⟩, ⟨:f†f:⟩, Δ and R for one state and observable (JSON).
    Witness(RunArgs),
    /// Characteristic functions and their witness over a k grid (CSV).
    CfScan(RunArgs),
    /// Quantum-noise-free state for an observable (JSON).
    Solve(RunArgs),
    /// Upper-level occupation under a sideband drive (CSV).
    Dynamics(RunArgs),
    /// One report row per parameter value (CSV).
    Sweep(RunArgs),
    /// Run the acceptance criteria.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (JSON).
    pub config: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// Override the Fock-space dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Override the tail-mass tolerance.
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Treat unreliable truncation as an error (exit status 3).
    #[arg(long)]
    pub strict: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Rendered output and whether every value in it is free of truncation effects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub body: String,
    pub reliable: bool,
}

/// 17 significant digits; `-0` is printed as `0`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x + 0.0)
    } else {
        format!("{x}")
    }
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        num(x)
    } else {
        "null".into()
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn json_object(fields: &[(&str, String)]) -> String {
    let mut s = String::from("{\n");
    for (i, (k, v)) in fields.iter().enumerate() {
        let sep = if i + 1 == fields.len() { "" } else { "," };
        let _ = writeln!(s, "  {}: {v}{sep}", json_str(k));
    }
    s.push_str("}\n");
    s
}

fn witness_fields(rep: &WitnessReport) -> Vec<(&'static str, String)> {
    vec![
        ("ff_mean", json_num(rep.ff_mean)),
        ("normal_mean", json_num(rep.normal_mean)),
        ("delta", json_num(rep.delta)),
        ("R", json_num(rep.r)),
        ("reliable", rep.reliable.to_string()),
        ("clamped", rep.clamped.to_string()),
    ]
}

fn witness_report(sc: &Scenario) -> Result<WitnessReport> {
    let state = sc.state_spec()?.build(sc.space()?)?;
    evaluate(&state, &sc.observable_spec()?)
}

fn render_witness(sc: &Scenario) -> Result<Rendered> {
    let rep = witness_report(sc)?;
    let mut fields = vec![
        ("state", json_str(sc.state.as_deref().unwrap_or_default().trim())),
        ("observable", json_str(sc.observable.as_deref().unwrap_or_default().trim())),
        ("dim", sc.dim.to_string()),
    ];
    fields.extend(witness_fields(&rep));
    Ok(Rendered { body: json_object(&fields), reliable: rep.reliable })
}

fn render_cf_scan(sc: &Scenario) -> Result<Rendered> {
    let state = sc.state_spec()?.build(sc.space()?)?;
    let cf = CharacteristicFunction::new(&state, sc.phi.unwrap_or(0.0))?;
    let phi_tilde = sc.phi_tilde.unwrap_or(0.0);
    let shift = sc.mean_shift.unwrap_or(false);
    let mut body = String::from("k,cf_wigner_re,cf_wigner_im,cf_p_re,cf_p_im,ff_mean,normal_mean,delta,R,reliable\n");
    let mut reliable = true;
    for k in sc.grid_or_default().points() {
        let (w, p) = (cf.wigner(k), cf.p(k));
        let rep = cf.witness(k, phi_tilde, shift);
        reliable &= rep.reliable;
        let cols = [k, w.re, w.im, p.re, p.im, rep.ff_mean, rep.normal_mean, rep.delta, rep.r].map(num);
        let _ = writeln!(body, "{},{}", cols.join(","), rep.reliable);
    }
    Ok(Rendered { body, reliable })
}

fn solve(sc: &Scenario) -> Result<(QnfSolution, SolveMethod)> {
    let spec = sc.observable_spec()?;
    let method = sc.method.unwrap_or(if spec.mean_shift { SolveMethod::Shifted } else { SolveMethod::Kernel });
    let f = observable_operator(&spec, sc.space()?)?;
    let sol = match method {
        SolveMethod::Kernel => solve_kernel(&f)?,
        SolveMethod::Shifted => solve_shifted(&f)?,
    };
    Ok((sol, method))
}

fn render_solve(sc: &Scenario) -> Result<Rendered> {
    let (sol, method) = solve(sc)?;
    let amps: Vec<String> = sol
        .state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-12)
        .map(|(n, z)| format!("[{n}, {}, {}]", num(z.re), num(z.im)))
        .collect();
    let fields = vec![
        ("observable", json_str(sc.observable.as_deref().unwrap_or_default().trim())),
        ("method", json_str(if method == SolveMethod::Kernel { "kernel" } else { "shifted" })),
        ("dim", sc.dim.to_string()),
        ("lambda_re", json_num(sol.lambda.re)),
        ("lambda_im", json_num(sol.lambda.im)),
        ("residual", json_num(sol.residual)),
        ("iterations", sol.iterations.to_string()),
        ("converged", sol.converged.to_string()),
        ("reliable", sol.reliable.to_string()),
        ("amplitudes", format!("[{}]", amps.join(", "))),
    ];
    Ok(Rendered { body: json_object(&fields), reliable: sol.reliable })
}

struct DynamicsRun {
    omega_t: Vec<f64>,
    p2: Vec<f64>,
    oracle: Vec<f64>,
    omega_abs: f64,
    times: Vec<f64>,
    reliable: bool,
}

fn dynamics(sc: &Scenario, exec: Execution) -> Result<DynamicsRun> {
    let spec = sc.state_spec()?;
    let state = spec.build(sc.space()?)?;
    let drive = sc.drive_spec()?.resolve(&spec)?;
    let reduced = ReducedDynamics::new(&state, &drive)?;
    let oracle = OracleDynamics::new(&state, &drive)?;
    let omega_abs = reduced.omega_abs();
    let omega_t = sc.grid_or_default().points();
    let times: Vec<f64> = omega_t.iter().map(|x| x / omega_abs).collect();
    let a = reduced.curve(&times, exec)?;
    let b = oracle.curve(&times, exec)?;
    Ok(DynamicsRun { omega_t, p2: a.values, oracle: b.values, omega_abs, times, reliable: a.reliable && b.reliable })
}

fn render_dynamics(sc: &Scenario, exec: Execution) -> Result<Rendered> {
    let run = dynamics(sc, exec)?;
    let mut body = String::from("omega_t,p2,p2_oracle,abs_diff\n");
    for i in 0..run.omega_t.len() {
        let cols = [run.omega_t[i], run.p2[i], run.oracle[i], (run.p2[i] - run.oracle[i]).abs()].map(num);
        let _ = writeln!(body, "{}", cols.join(","));
    }
    Ok(Rendered { body, reliable: run.reliable })
}

fn sweep_row(row: &Scenario, of: Kind, exec: Execution) -> Result<(String, bool)> {
    match of {
        Kind::Witness => {
            let rep = witness_report(row)?;
            let cols = [rep.ff_mean, rep.normal_mean, rep.delta, rep.r].map(num);
            Ok((format!("{},{},{}", cols.join(","), rep.reliable, rep.clamped), rep.reliable))
        }
        Kind::Solve => {
            let (sol, _) = solve(row)?;
            let cols = [sol.lambda.re, sol.lambda.im, sol.residual].map(num);
            Ok((format!("{},{},{},{}", cols.join(","), sol.iterations, sol.converged, sol.reliable), sol.reliable))
        }
        Kind::Dynamics => {
            let run = dynamics(row, exec)?;
            let diff = run.p2.iter().zip(&run.oracle).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let curve = crate::ion::Curve { times: run.times.clone(), values: run.p2.clone(), reliable: run.reliable };
            let dev = coherent_deviation(&curve, run.omega_abs);
            Ok((format!("{},{},{}", num(diff), num(dev), run.reliable), run.reliable))
        }
        other => Err(Error::Config(format!("cannot sweep `{}`", other.name()))),
    }
}

fn render_sweep(sc: &Scenario, exec: Execution) -> Result<Rendered> {
    let sw = sc.sweep.as_ref().ok_or_else(|| Error::Config("`sweep` scenario requires `sweep`".into()))?;
    let header = match sw.of {
        Kind::Witness => "ff_mean,normal_mean,delta,R,reliable,clamped",
        Kind::Solve => "lambda_re,lambda_im,residual,iterations,converged,reliable",
        Kind::Dynamics => "max_abs_diff,max_coherent_deviation,reliable",
        other => return Err(Error::Config(format!("cannot sweep `{}`", other.name()))),
    };
    let values = sw.values();
    // rows run concurrently; each row is evaluated sequentially inside
    let rows = exec.try_map(&values, |&v| sweep_row(&sc.at(&sw.param, v), sw.of, Execution::Sequential))?;
    let mut body = format!("{},{header}\n", sw.param);
    let mut reliable = true;
    for (v, (line, ok)) in values.iter().zip(rows) {
        reliable &= ok;
        let _ = writeln!(body, "{},{line}", num(*v));
    }
    Ok(Rendered { body, reliable })
}

/// Evaluate a validated scenario.
pub fn render(sc: &Scenario, exec: Execution) -> Result<Rendered> {
    match sc.kind {
        Kind::Witness => render_witness(sc),
        Kind::CfScan => render_cf_scan(sc),
        Kind::Solve => render_solve(sc),
        Kind::Dynamics => render_dynamics(sc, exec),
        Kind::Sweep => render_sweep(sc, exec),
        Kind::Selftest => {
            let outcomes = selftest::run_all(exec);
            let reliable = outcomes.iter().all(|o| o.passed);
            Ok(Rendered { body: selftest::report(&outcomes), reliable })
        }
    }
}

/// Read, override and validate a scenario file.
pub fn load(path: &std::path::Path, overrides: &Overrides) -> Result<Scenario> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut sc: Scenario = serde_json::from_str(&src).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if let Some(dim) = overrides.dim {
        sc.dim = dim;
    }
    if let Some(tol) = overrides.tail_tol {
        sc.tail_tol = tol;
    }
    sc.validate()?;
    Ok(sc)
}

fn record(stderr: &mut dyn Write, kind: &str, message: &str) {
    let _ = writeln!(stderr, "{{\"error\":{},\"message\":{}}}", json_str(kind), json_str(message));
}

fn emit(body: &str, out: Option<&std::path::Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let written = match out {
        Some(path) => std::fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(msg) => {
            record(stderr, "io", &msg);
            1
        }
    }
}

fn run_scenario(kind: Kind, args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let sc = match load(&args.config, &args.overrides) {
        Ok(sc) => sc,
        Err(e) => {
            record(stderr, "validation", &e.to_string());
            return 2;
        }
    };
    if sc.kind != kind {
        let msg = format!("scenario kind `{}` does not match subcommand `{}`", sc.kind.name(), kind.name());
        record(stderr, "validation", &msg);
        return 2;
    }
    let rendered = match render(&sc, Execution::default()) {
        Ok(r) => r,
        Err(e) => {
            record(stderr, "validation", &e.to_string());
            return 2;
        }
    };
    if !rendered.reliable {
        let msg = "state or result carries tail mass above tail_tol; increase dim";
        if args.overrides.strict {
            record(stderr, "unreliable-truncation", msg);
            return 3;
        }
        let _ = writeln!(stderr, "{{\"warning\":\"unreliable-truncation\",\"message\":{}}}", json_str(msg));
    }
    let out = args.overrides.out.clone().or_else(|| sc.out.as_ref().map(PathBuf::from));
    emit(&rendered.body, out.as_deref(), stdout, stderr)
}

/// Entry point shared by the binary and the integration tests.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                record(stderr, "usage", text.trim());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match &cli.command {
        Command::Witness(a) => run_scenario(Kind::Witness, a, stdout, stderr),
        Command::CfScan(a) => run_scenario(Kind::CfScan, a, stdout, stderr),
        Command::Solve(a) => run_scenario(Kind::Solve, a, stdout, stderr),
        Command::Dynamics(a) => run_scenario(Kind::Dynamics, a, stdout, stderr),
        Command::Sweep(a) => run_scenario(Kind::Sweep, a, stdout, stderr),
        Command::Selftest(a) => {
            let outcomes = selftest::run_all(Execution::default());
            let code = emit(&selftest::report(&outcomes), a.out.as_deref(), stdout, stderr);
            match (code, outcomes.iter().all(|o| o.passed)) {
                (0, true) => 0,
                (0, false) => 1,
                (c, _) => c,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::C64;

    #[test]
    fn number_format() {
        assert_eq!(num(1.0), "1.0000000000000000e0");
        assert_eq!(num(-0.0), "0.0000000000000000e0");
        assert_eq!(num(-0.25), "-2.5000000000000000e-1");
        assert_eq!(json_num(f64::NAN), "null");
    }

    #[test]
    fn witness_report_matches_perfect_quantumness() {
        let sc = Scenario::from_json(r#"{"kind":"witness","state":"squeezed:1.0,0","observable":"cosh(1)*a + sinh(1)*ad"}"#).unwrap();
        let rep = witness_report(&sc).unwrap();
        assert!((rep.r - 1.0).abs() <= 1e-6);
        let out = render(&sc, Execution::Sequential).unwrap();
        assert!(out.body.contains("\"R\": 1.0000000000000000e0"));
        assert!(out.reliable);
    }

    #[test]
    fn sweep_of_matched_r_is_one() {
        let sc = Scenario::from_json(
            r#"{"kind":"sweep","state":"squeezed:{r},0","observable":"cosh({r})*a + sinh({r})*ad",
                "sweep":{"param":"r","start":0.1,"stop":1.0,"steps":4}}"#,
        )
        .unwrap();
        let out = render(&sc, Execution::Parallel).unwrap();
        for line in out.body.lines().skip(1) {
            let r: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
            assert_eq!(r, 1.0);
        }
    }

    #[test]
    fn solve_returns_vacuum_for_annihilation() {
        let sc = Scenario::from_json(r#"{"kind":"solve","observable":"a","dim":16}"#).unwrap();
        let (sol, method) = solve(&sc).unwrap();
        assert_eq!(method, SolveMethod::Kernel);
        assert!((sol.state.amplitudes()[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
