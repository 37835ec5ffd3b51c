//! `plaplace` command line: solve, identity, certify, and trace pipelines
//! over the radial p-Laplace laboratory, with CSV/JSON file outputs.
//!
//! Exit codes: 0 success, 1 invalid parameters (nothing written),
//! 2 numerical failure (no bracket, no zero, step failure).

// `!(x > 0.0)` is the NaN-rejecting form wanted in parameter checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use plaplace::certificate::logspace;
use plaplace::io;
use plaplace::{
    certify_nonexistence, empirical_shooting_sweep, find_turning_points,
    identity_residual_classical, identity_residual_general, identity_residual_n3,
    identity_residual_peletier_serrin, shoot_bvp, trace_curve, CertificateReport, CurvePoint,
    Error, IdentityReport, PowerSumNonlinearity, RadialProblem, RadialSolution, SolverControls,
    SweepReport, TestFunction,
};

#[derive(Parser)]
#[command(
    name = "plaplace",
    about = "Radial p-Laplace laboratory: shooting solver, Pohozhaev-identity residuals, \
             non-existence certificates, solution curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the two-point problem u'(0) = u(radius) = 0 by shooting.
    Solve(SolveArgs),
    /// Evaluate Pohozhaev-identity residuals on a solution.
    Identity(IdentityArgs),
    /// Check the sine-weight non-existence certificate over (lambda, p).
    Certify(CertifyArgs),
    /// Trace the solution curve in the (lambda, u(0)) plane.
    Trace(TraceArgs),
}

#[derive(Args, Serialize, Clone)]
struct ProblemArgs {
    /// Space dimension n >= 2.
    #[arg(long, default_value_t = 3.0)]
    n: f64,
    /// Operator exponent p > 1 (p = 2 is the Laplacian).
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Coefficient of the linear term of f.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Power term "c,q" adding c*u|u|^{q-1} to f; repeatable.
    #[arg(long = "term", value_name = "C,Q")]
    terms: Vec<String>,
    /// Read the nonlinearity from a JSON file instead of --lambda/--term.
    #[arg(long, conflicts_with_all = ["lambda", "terms"])]
    nl_json: Option<PathBuf>,
    /// Ball radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

#[derive(Args, Serialize, Clone)]
struct ControlArgs {
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// Boundary tolerance |u(radius)| for shooting.
    #[arg(long, default_value_t = 1e-10)]
    bvp_tol: f64,
    /// Uniform sample grid size (odd) for solution output and quadrature.
    #[arg(long = "grid-points", default_value_t = 2049)]
    grid_points: usize,
    /// Search limit for first zeros.
    #[arg(long, default_value_t = 100.0)]
    r_max: f64,
    /// Bracket subdivisions when hunting a sign change.
    #[arg(long, default_value_t = 64)]
    scan: usize,
}

impl ControlArgs {
    fn controls(&self) -> SolverControls {
        SolverControls {
            rtol: self.rtol,
            atol: self.atol,
            bvp_tol: self.bvp_tol,
            sample_points: self.grid_points,
            r_max: self.r_max,
            scan_points: self.scan,
            ..SolverControls::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    controls: ControlArgs,
    /// Shooting bracket "lo,hi" for the amplitude u(0).
    #[arg(long, value_name = "LO,HI")]
    bracket: String,
    /// Output file for the solution samples.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON run report (config echo, alpha, boundary defect).
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct IdentityArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    controls: ControlArgs,
    /// Load the solution from a CSV (r,u,uprime) or JSON file.
    #[arg(long, conflicts_with = "bracket")]
    solution: Option<PathBuf>,
    /// Shoot for the solution first with this amplitude bracket.
    #[arg(long, value_name = "LO,HI")]
    bracket: Option<String>,
    /// Weight psi: r, r^K, sin:OMEGA, rlogr, poly:C0,C1,...; "sin" alone
    /// means sin(sqrt(4 lambda) r). Repeatable.
    #[arg(long = "psi", default_values_t = [String::from("r")])]
    psis: Vec<String>,
    /// Also evaluate the classical psi = r identity (p = 2).
    #[arg(long)]
    classical: bool,
    /// Also evaluate the psi = r^{n-1} energy identity (p = 2, n >= 3).
    #[arg(long)]
    peletier_serrin: bool,
    /// Evaluate the simplified n = 3 form instead of the general one.
    #[arg(long)]
    n3: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CertifyArgs {
    /// Lambda values, comma separated.
    #[arg(long, value_name = "L1,L2,...", default_value = "1.0")]
    lambda: String,
    /// Nonlinearity exponents p, comma separated.
    #[arg(long, value_name = "P1,P2,...", default_value = "5.0")]
    p: String,
    /// Grid points on (0, 1] for the condition checks.
    #[arg(long, default_value_t = 1000)]
    grid: usize,
    /// Cross-check each passing cell with a shooting sweep.
    #[arg(long)]
    sweep: bool,
    /// Sweep amplitudes "lo,hi,count" (log spaced).
    #[arg(long, value_name = "LO,HI,COUNT", default_value = "0.1,1000,17")]
    alphas: String,
    #[command(flatten)]
    controls: ControlArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    /// Power q of the nonlinearity u|u|^{q-1}.
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1e-3)]
    a_min: f64,
    #[arg(long, default_value_t = 1e3)]
    a_max: f64,
    /// Number of log-spaced amplitudes.
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[command(flatten)]
    controls: ControlArgs,
    /// Curve table (a, rho0, lambda, u0).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Two-column (lambda, u0) file for plotting.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum AppError {
    Validation(String),
    Numerical(String),
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            AppError::Numerical(e.to_string())
        } else {
            AppError::Validation(e.to_string())
        }
    }
}

type AppResult<T> = Result<T, AppError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Identity(args) => run_identity(args),
        Command::Certify(args) => run_certify(args),
        Command::Trace(args) => run_trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn validation(msg: impl Into<String>) -> AppError {
    AppError::Validation(msg.into())
}

fn parse_pair(s: &str, what: &str) -> AppResult<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(validation(format!("{what} must be \"a,b\", got {s:?}")));
    }
    let a = parts[0].trim().parse::<f64>().map_err(|_| validation(format!("bad {what}: {s:?}")))?;
    let b = parts[1].trim().parse::<f64>().map_err(|_| validation(format!("bad {what}: {s:?}")))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(validation(format!("{what} must be finite: {s:?}")));
    }
    Ok((a, b))
}

fn parse_list(s: &str, what: &str) -> AppResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| validation(format!("bad {what} entry {t:?}")))
        })
        .collect()
}

fn build_problem(args: &ProblemArgs) -> AppResult<RadialProblem> {
    let nl = if let Some(path) = &args.nl_json {
        let bytes = std::fs::read(path)
            .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
        io::parse_nonlinearity_json(&bytes)?
    } else {
        let mut terms = Vec::new();
        for t in &args.terms {
            terms.push(parse_pair(t, "--term")?);
        }
        PowerSumNonlinearity::new(args.lambda, terms)?
    };
    Ok(RadialProblem::with_radius(args.n, args.p, nl, args.radius)?)
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn write_file(path: &Path, contents: &str) -> AppResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| validation(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct SolveReport<'a> {
    config: &'a ProblemArgs,
    bracket: (f64, f64),
    controls: SolverControls,
    alpha: f64,
    boundary_defect: f64,
    unix_time: u64,
}

fn run_solve(args: SolveArgs) -> AppResult<()> {
    let prob = build_problem(&args.problem)?;
    let ctl = args.controls.controls();
    let (lo, hi) = parse_pair(&args.bracket, "--bracket")?;
    let sol = shoot_bvp(&prob, lo, hi, &ctl)?;
    println!(
        "solved: alpha = {:.12e}, boundary defect = {:.3e}, {} samples",
        sol.alpha,
        sol.boundary_defect,
        sol.grid.len()
    );
    if let Some(out) = &args.out {
        let contents = match args.format {
            Format::Csv => io::write_solution_csv(&sol),
            Format::Json => io::write_solution_json(&sol, Some(&ctl)),
        };
        write_file(out, &contents)?;
    }
    if let Some(report) = &args.report {
        let rep = SolveReport {
            config: &args.problem,
            bracket: (lo, hi),
            controls: ctl.clone(),
            alpha: sol.alpha,
            boundary_defect: sol.boundary_defect,
            unix_time: unix_time(),
        };
        write_file(report, &serde_json::to_string_pretty(&rep).expect("report serializes"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct IdentityRow {
    psi: String,
    form: String,
    #[serde(flatten)]
    report: IdentityReport,
}

#[derive(Serialize)]
struct IdentityOutput<'a> {
    config: &'a ProblemArgs,
    controls: SolverControls,
    alpha: f64,
    rows: Vec<IdentityRow>,
    unix_time: u64,
}

fn load_solution(path: &Path) -> AppResult<RadialSolution> {
    let bytes = std::fs::read(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        Ok(io::parse_solution_json(&bytes)?.0)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| validation("solution CSV is not valid UTF-8"))?;
        Ok(io::parse_solution_csv(&text)?)
    }
}

fn run_identity(args: IdentityArgs) -> AppResult<()> {
    let prob = build_problem(&args.problem)?;
    let ctl = args.controls.controls();
    let sol = match (&args.solution, &args.bracket) {
        (Some(path), None) => load_solution(path)?,
        (None, Some(bracket)) => {
            let (lo, hi) = parse_pair(bracket, "--bracket")?;
            shoot_bvp(&prob, lo, hi, &ctl)?
        }
        _ => return Err(validation("identity needs exactly one of --solution or --bracket")),
    };

    let mut rows = Vec::new();
    for spec in &args.psis {
        let psi = if spec == "sin" {
            if !(args.problem.lambda > 0.0) {
                return Err(validation("--psi sin needs --lambda > 0 to set the frequency"));
            }
            TestFunction::sine_scaled((4.0 * args.problem.lambda).sqrt())
        } else {
            TestFunction::parse(spec)?
        };
        let report = if args.n3 {
            identity_residual_n3(&sol, &prob, &psi)?
        } else {
            identity_residual_general(&sol, &prob, &psi)?
        };
        rows.push(IdentityRow {
            psi: psi.label(),
            form: if args.n3 { "n3".into() } else { "general".into() },
            report,
        });
    }
    if args.classical {
        rows.push(IdentityRow {
            psi: "r".into(),
            form: "classical".into(),
            report: identity_residual_classical(&sol, &prob)?,
        });
    }
    if args.peletier_serrin {
        rows.push(IdentityRow {
            psi: format!("r^{}", prob.n - 1.0),
            form: "peletier-serrin".into(),
            report: identity_residual_peletier_serrin(&sol, &prob)?,
        });
    }

    println!("{:<18} {:<16} {:>24} {:>24} {:>14}", "psi", "form", "lhs", "rhs", "rel residual");
    for row in &rows {
        println!(
            "{:<18} {:<16} {:>24.16e} {:>24.16e} {:>14.3e}",
            row.psi, row.form, row.report.lhs, row.report.rhs, row.report.relative_residual
        );
    }

    if let Some(out) = &args.out {
        let contents = match args.format {
            Format::Json => {
                let output = IdentityOutput {
                    config: &args.problem,
                    controls: ctl,
                    alpha: sol.alpha,
                    rows,
                    unix_time: unix_time(),
                };
                serde_json::to_string_pretty(&output).expect("identity output serializes")
            }
            Format::Csv => {
                let mut text =
                    String::from("psi,form,lhs,rhs,residual,relative_residual,quadrature_points\n");
                for row in &rows {
                    text.push_str(&format!(
                        "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
                        row.psi,
                        row.form,
                        row.report.lhs,
                        row.report.rhs,
                        row.report.residual,
                        row.report.relative_residual,
                        row.report.quadrature_points
                    ));
                }
                text
            }
        };
        write_file(out, &contents)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CertifyCell {
    certificate: CertificateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepReport>,
}

#[derive(Serialize)]
struct CertifyOutput {
    grid_points: usize,
    cells: Vec<CertifyCell>,
    unix_time: u64,
}

fn run_certify(args: CertifyArgs) -> AppResult<()> {
    let lambdas = parse_list(&args.lambda, "--lambda")?;
    let ps = parse_list(&args.p, "--p")?;
    let ctl = args.controls.controls();
    ctl.validate()?;
    let sweep_spec = {
        let parts = parse_list(&args.alphas, "--alphas")?;
        if parts.len() != 3 || !(parts[0] > 0.0) || !(parts[1] > parts[0]) || parts[2] < 2.0 {
            return Err(validation("--alphas must be \"lo,hi,count\" with 0 < lo < hi, count >= 2"));
        }
        (parts[0], parts[1], parts[2] as usize)
    };

    let mut cells = Vec::new();
    println!(
        "{:>12} {:>8} {:>14} {:>14} {:>8} sweep",
        "lambda", "p", "positivity", "theta margin", "verdict"
    );
    for &lambda in &lambdas {
        for &p in &ps {
            let certificate = certify_nonexistence(lambda, p, args.grid)?;
            let sweep = if args.sweep && certificate.pass {
                Some(empirical_shooting_sweep(
                    lambda,
                    p,
                    &logspace(sweep_spec.0, sweep_spec.1, sweep_spec.2),
                    &ctl,
                )?)
            } else {
                None
            };
            let sweep_note = match &sweep {
                None => "-".to_string(),
                Some(s) if s.candidate_found => "CANDIDATE FOUND".to_string(),
                Some(_) => "no solution".to_string(),
            };
            println!(
                "{:>12.6} {:>8.3} {:>14.3e} {:>14.3e} {:>8} {}",
                lambda,
                p,
                certificate.positivity_min,
                certificate.theta_margin_min,
                if certificate.pass { "pass" } else { "FAIL" },
                sweep_note
            );
            cells.push(CertifyCell { certificate, sweep });
        }
    }
    if let Some(out) = &args.out {
        let output = CertifyOutput { grid_points: args.grid, cells, unix_time: unix_time() };
        write_file(out, &serde_json::to_string_pretty(&output).expect("certify serializes"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceOutput {
    q: f64,
    a_min: f64,
    a_max: f64,
    points: Vec<CurvePoint>,
    turning_points: Vec<(f64, f64)>,
    unix_time: u64,
}

fn run_trace(args: TraceArgs) -> AppResult<()> {
    if !(args.q > 1.0) {
        return Err(validation(format!("--q must exceed 1, got {}", args.q)));
    }
    if !(args.a_min > 0.0) || !(args.a_max > args.a_min) || args.points < 2 {
        return Err(validation("trace needs 0 < a-min < a-max and at least 2 points"));
    }
    let ctl = args.controls.controls();
    let amplitudes = logspace(args.a_min, args.a_max, args.points);
    let curve = trace_curve(args.q, &amplitudes, &ctl)?;
    let turning = find_turning_points(&curve);
    let min_lambda = curve.iter().map(|p| p.lambda).fold(f64::INFINITY, f64::min);
    println!("traced {} points; min lambda = {min_lambda:.6}", curve.len());
    for (a, lambda) in &turning {
        println!("turning point near a = {a:.6e}: lambda = {lambda:.6}");
    }
    if let Some(out) = &args.out {
        let contents = match args.format {
            Format::Csv => io::write_curve_csv(&curve),
            Format::Json => {
                let output = TraceOutput {
                    q: args.q,
                    a_min: args.a_min,
                    a_max: args.a_max,
                    points: curve.clone(),
                    turning_points: turning.clone(),
                    unix_time: unix_time(),
                };
                serde_json::to_string_pretty(&output).expect("trace serializes")
            }
        };
        write_file(out, &contents)?;
    }
    if let Some(path) = &args.gnuplot {
        write_file(path, &io::write_curve_gnuplot(&curve))?;
    }
    Ok(())
}
