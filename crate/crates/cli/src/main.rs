//! Command-line front end for the robinlab eigenvalue library.
//!
//! Subcommands: `spectrum`, `sweep`, `wentzell`, `wentzell-check`,
//! `check-faber-krahn`, `check-two-balls`, `crossover`. Results print as
//! CSV (default) or JSON, to stdout or `--out <path>`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numeric failure, 4 a check
//! command returned the verdict "violated". Output for identical inputs is
//! byte-identical across runs so downstream plots and CI diffs are stable.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robinlab_core::{
    check_faber_krahn, check_two_balls, crossover, parse_domain, spectrum_of, sweep_alpha,
    sweep_volume, wentzell_eigs, wentzell_transfer_report, BoundaryParams, CaseOutcome,
    DomainCurves, Error, ExperimentReport, Result, SolveOptions, Spectrum, SweepTable, Verdict,
    WentzellParams,
};

#[derive(Parser)]
#[command(name = "robinlab", version, about = "Robin and Wentzell eigenvalue laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First k eigenvalues of one domain.
    Spectrum(SpectrumArgs),
    /// Eigenvalue curves lambda_1..lambda_k over an alpha or volume grid.
    Sweep(SweepArgs),
    /// Generalized Wentzell eigenvalues via the Robin fixed-point map.
    Wentzell(WentzellArgs),
    /// Wentzell comparison of two domains through their Robin curves.
    WentzellCheck(WentzellCheckArgs),
    /// Compare lambda_1 with the equal-volume ball.
    CheckFaberKrahn(CheckArgs),
    /// Compare lambda_2 with two disjoint half-volume balls.
    CheckTwoBalls(CheckArgs),
    /// Locate the alpha where lambda_k(domain) crosses lambda_k(D_k).
    Crossover(CrossoverArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct SolverArgs {
    /// Solver backend: auto, analytic, fem, shooting.
    #[arg(long, default_value = "auto")]
    solver: String,
    /// Extra FEM refinement levels on top of the base mesh.
    #[arg(long, default_value_t = 0)]
    refine: usize,
    /// Root-finding and eigensolver tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

impl SolverArgs {
    fn options(&self) -> Result<SolveOptions> {
        Ok(SolveOptions { solver: self.solver.parse()?, refine: self.refine, tol: self.tol })
    }
}

#[derive(Args)]
struct SpectrumArgs {
    /// Domain DSL: interval:L=.., rect:a=..,b=.., disk:R=.., ball:N=..,R=..,
    /// dk:M=..,k=..,N=.., mesh:<path>, union:[<spec>;<spec>;...].
    #[arg(long)]
    domain: String,
    /// Robin boundary parameter (used with --bc robin).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Exponent of the p-Laplacian.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// How many eigenvalues, counted with multiplicity.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Boundary condition: robin, neumann, or dirichlet.
    #[arg(long, default_value = "robin")]
    bc: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Grid {
    Alpha,
    Volume,
}

#[derive(Args)]
struct SweepArgs {
    /// Domain DSL; a volume sweep keeps only its dimension and sweeps balls.
    #[arg(long)]
    domain: String,
    /// Swept parameter.
    #[arg(long, value_enum, default_value_t = Grid::Alpha)]
    grid: Grid,
    /// First grid point.
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    /// Last grid point.
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Fixed Robin parameter for volume sweeps.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WentzellArgs {
    #[arg(long)]
    domain: String,
    /// Boundary mass coefficient (must be > 0).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Boundary stiffness coefficient (must be > 0).
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WentzellCheckArgs {
    /// Domain U (the competitor).
    #[arg(long)]
    domain: String,
    /// Domain V (the reference, typically dk:M=..,k=..,N=..).
    #[arg(long)]
    versus: String,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CrossoverArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Lower end of the logarithmic alpha grid.
    #[arg(long, default_value_t = 0.01)]
    alpha_min: f64,
    /// Upper end of the logarithmic alpha grid.
    #[arg(long, default_value_t = 1000.0)]
    alpha_max: f64,
    /// Number of grid points scanned before bisection.
    #[arg(long, default_value_t = 25)]
    steps: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Spectrum(a) => {
            let d = parse_domain(&a.domain)?;
            let bc = boundary(&a.bc, a.p, a.alpha)?;
            let s = spectrum_of(&d, &bc, a.k, &a.solver.options()?)?;
            emit(&render_spectrum(&s, a.output.format), &a.output.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep(a) => {
            let d = parse_domain(&a.domain)?;
            let opts = a.solver.options()?;
            let grid = linspace(a.from, a.to, a.steps)?;
            let table = match a.grid {
                Grid::Alpha => sweep_alpha(&d, a.p, a.k, &grid, &opts)?,
                Grid::Volume => {
                    let bc = BoundaryParams::robin(a.p, a.alpha);
                    sweep_volume(d.dim(), &bc, a.k, &grid, &opts)?
                }
            };
            emit(&render_sweep(&table, a.output.format), &a.output.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Wentzell(a) => {
            let d = parse_domain(&a.domain)?;
            let params = WentzellParams::new(a.beta, a.gamma)?;
            let curves = DomainCurves::with_options(d, a.solver.options()?)?;
            let s = wentzell_eigs(&params, a.k, &curves)?;
            emit(&render_spectrum(&s, a.output.format), &a.output.out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::WentzellCheck(a) => {
            let u = parse_domain(&a.domain)?;
            let v = parse_domain(&a.versus)?;
            let params = WentzellParams::new(a.beta, a.gamma)?;
            let report = wentzell_transfer_report(&u, &v, &params, a.k, &a.solver.options()?)?;
            finish_report(report, &a.output)
        }
        Command::CheckFaberKrahn(a) => {
            let d = parse_domain(&a.domain)?;
            let bc = BoundaryParams::robin(a.p, a.alpha);
            let report = check_faber_krahn(&d, &bc, &a.solver.options()?)?;
            finish_report(report, &a.output)
        }
        Command::CheckTwoBalls(a) => {
            let d = parse_domain(&a.domain)?;
            let bc = BoundaryParams::robin(a.p, a.alpha);
            let report = check_two_balls(&d, &bc, &a.solver.options()?)?;
            finish_report(report, &a.output)
        }
        Command::Crossover(a) => {
            let d = parse_domain(&a.domain)?;
            let report =
                crossover(&d, a.k, a.alpha_min, a.alpha_max, a.steps, &a.solver.options()?)?;
            finish_report(report, &a.output)
        }
    }
}

fn boundary(bc: &str, p: f64, alpha: f64) -> Result<BoundaryParams> {
    match bc {
        "robin" => Ok(BoundaryParams::robin(p, alpha)),
        "neumann" => Ok(BoundaryParams::neumann(p)),
        "dirichlet" => Ok(BoundaryParams::dirichlet(p)),
        other => Err(Error::Unsupported(format!(
            "unknown boundary condition '{other}' (expected robin|neumann|dirichlet)"
        ))),
    }
}

fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidDomain(format!(
            "grid needs at least one finite point, got from={from} to={to} steps={steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|i| from + h * i as f64).collect())
}

fn finish_report(report: ExperimentReport, output: &OutputArgs) -> Result<ExitCode> {
    emit(&render_report(&report, output.format), &output.out)?;
    Ok(if report.verdict == Verdict::Violated {
        ExitCode::from(4)
    } else {
        ExitCode::SUCCESS
    })
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json_pretty<T: serde::Serialize>(v: &T) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("report types serialize");
    text.push('\n');
    text
}

/// Quote a CSV field if it contains a delimiter, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_spectrum(s: &Spectrum, format: Format) -> String {
    match format {
        Format::Json => json_pretty(s),
        Format::Csv => {
            let mut out = String::from("index,value,multiplicity,component,mode,solver,err\n");
            let mut index = 1usize;
            for e in s.entries() {
                let p = &e.provenance;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    index,
                    e.value,
                    e.multiplicity,
                    p.component,
                    csv_field(&p.mode),
                    csv_field(&p.solver),
                    p.abs_error
                );
                index += e.multiplicity;
            }
            out
        }
    }
}

fn render_sweep(t: &SweepTable, format: Format) -> String {
    match format {
        Format::Json => json_pretty(t),
        Format::Csv => {
            let mut out = String::from("param");
            for i in 1..=t.k {
                let _ = write!(out, ",lambda_{i}");
            }
            out.push('\n');
            for (x, values) in &t.rows {
                let _ = write!(out, "{x}");
                for v in values {
                    let _ = write!(out, ",{v}");
                }
                out.push('\n');
            }
            let verdicts: Vec<String> = t
                .monotone_ok
                .iter()
                .enumerate()
                .map(|(i, ok)| {
                    format!("lambda_{}={}", i + 1, if *ok { "ok" } else { "violated" })
                })
                .collect();
            let _ = writeln!(out, "# monotone ({}): {}", t.monotone_law, verdicts.join(" "));
            out
        }
    }
}

fn outcome_name(o: CaseOutcome) -> &'static str {
    match o {
        CaseOutcome::Holds => "holds",
        CaseOutcome::Violated => "violated",
        CaseOutcome::Inconclusive => "inconclusive",
        CaseOutcome::Extremal => "extremal",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Violated => "violated",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn render_report(r: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Json => json_pretty(r),
        Format::Csv => {
            let mut out = String::from("label,lhs,rhs,margin,tolerance,outcome\n");
            for c in &r.cases {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    csv_field(&c.label),
                    c.lhs,
                    c.rhs,
                    c.margin,
                    c.tolerance,
                    outcome_name(c.outcome)
                );
            }
            let _ = writeln!(out, "# experiment: {}", r.experiment);
            let _ = writeln!(out, "# inputs: {}", r.inputs);
            if let Some(a) = r.alpha_star {
                let _ = writeln!(out, "# alpha_star: {a}");
            }
            for n in &r.notes {
                let _ = writeln!(out, "# note: {n}");
            }
            let _ = writeln!(out, "# verdict: {}", verdict_name(r.verdict));
            out
        }
    }
}
