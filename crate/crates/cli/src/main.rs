//! `lcsurf`: check charts, dump invariants, verify the structure equations
//! and classify surfaces from the command line.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lcsurf_core::analysis::{analyze_points, analyze_point, ChartAnalysis, RunConfig, Tolerances};
use lcsurf_core::classifier::{Branch, ClassifierTolerances};
use lcsurf_core::dsl::{parse_chart, ChartSpec};
use lcsurf_core::pipeline::DEFAULT_ORDER;

use report::{ConfigEcho, Report};

const EXIT_USAGE: u8 = 2;
const EXIT_GEOMETRY: u8 = 3;
const EXIT_TOLERANCE: u8 = 4;

/// Largest structure or fundamental residual `verify` accepts.
pub const RESIDUAL_BOUND: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "lcsurf", version, about = "Conformal invariants of space-like surfaces in Lorentzian space forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the chart is space-like, isothermal and regular on its grid.
    Check(Common),
    /// Print the invariants at one point.
    Invariants(Common),
    /// Maximum residual of every equation over the grid.
    Verify(Common),
    /// Decide the branch of the classification.
    Classify(Common),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Common {
    /// Chart file.
    #[arg(long)]
    chart: PathBuf,
    /// Evaluate at U,V instead of the grid (for invariants: instead of the domain center).
    #[arg(long, value_name = "U,V", allow_hyphen_values = true, value_parser = parse_point)]
    at: Option<(f64, f64)>,
    /// Jet order.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    #[arg(long, default_value_t = ClassifierTolerances::default().phi)]
    tol_phi: f64,
    #[arg(long, default_value_t = ClassifierTolerances::default().psi)]
    tol_psi: f64,
    #[arg(long, default_value_t = ClassifierTolerances::default().isotropy)]
    tol_isotropy: f64,
    #[arg(long, default_value_t = ClassifierTolerances::default().rank)]
    tol_rank: f64,
    #[arg(long, default_value_t = Tolerances::default().isothermal)]
    tol_isothermal: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (u, v) = s.split_once(',').ok_or("expected U,V")?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad coordinate {x:?}: {e}"));
    let p = (num(u)?, num(v)?);
    if !(p.0.is_finite() && p.1.is_finite()) {
        return Err("coordinates must be finite".into());
    }
    Ok(p)
}

impl Common {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            order: self.order,
            tolerances: Tolerances {
                isothermal: self.tol_isothermal,
                classifier: ClassifierTolerances {
                    phi: self.tol_phi,
                    psi: self.tol_psi,
                    isotropy: self.tol_isotropy,
                    rank: self.tol_rank,
                },
                ..Tolerances::default()
            },
            workers: self.workers,
        }
    }
}

/// A failure that ends the run with a message and an exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn load(path: &PathBuf) -> Result<ChartSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_chart(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn points(chart: &ChartSpec, at: Option<(f64, f64)>) -> Result<Vec<(f64, f64)>, Failure> {
    match at {
        None => Ok(chart.grid_points()),
        Some((u, v)) if chart.domain.contains(u, v) => Ok(vec![(u, v)]),
        Some((u, v)) => Err(usage(format!("point ({u}, {v}) lies outside the chart domain"))),
    }
}

fn sweep(chart: &ChartSpec, pts: &[(f64, f64)], cfg: &RunConfig) -> Result<ChartAnalysis, Failure> {
    analyze_points(chart, pts, cfg, None).map_err(|e| usage(e.to_string()))
}

fn geometry_message(a: &ChartAnalysis) -> Option<String> {
    a.first_error()
        .map(|(at, e)| format!("at ({}, {}): {e}", at.0, at.1))
}

/// Emits the report, then the outcome.
fn finish(report: &Report, format: Format, outcome: Result<(), Failure>) -> Result<(), Failure> {
    print!("{}", report.render(format));
    outcome
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (command, args) = match &cli.command {
        Command::Check(a) => ("check", a),
        Command::Invariants(a) => ("invariants", a),
        Command::Verify(a) => ("verify", a),
        Command::Classify(a) => ("classify", a),
    };
    let cfg = args.run_config();
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let chart = load(&args.chart)?;
    let echo = ConfigEcho::new(command, &args.chart, &cfg, args.at);
    let mut report = Report::new(&chart, echo);

    match &cli.command {
        Command::Check(_) => {
            let pts = points(&chart, args.at)?;
            let a = sweep(&chart, &pts, &cfg)?;
            report.set_check(&a);
            let outcome = match geometry_message(&a) {
                Some(m) => Err(Failure {
                    code: EXIT_GEOMETRY,
                    message: m,
                }),
                None => Ok(()),
            };
            finish(&report, args.format, outcome)
        }
        Command::Invariants(_) => {
            let at = match args.at {
                Some(p) => points(&chart, Some(p))?[0],
                None => chart.domain.center(),
            };
            match analyze_point::<f64>(&chart, at, &cfg, None) {
                Ok(data) => {
                    report.set_point(at, &data);
                    finish(&report, args.format, Ok(()))
                }
                Err(e) => Err(Failure {
                    code: EXIT_GEOMETRY,
                    message: format!("at ({}, {}): {e}", at.0, at.1),
                }),
            }
        }
        Command::Verify(_) => {
            let pts = points(&chart, args.at)?;
            let a = sweep(&chart, &pts, &cfg)?;
            report.set_check(&a);
            if let Some(m) = geometry_message(&a) {
                return finish(
                    &report,
                    args.format,
                    Err(Failure {
                        code: EXIT_GEOMETRY,
                        message: m,
                    }),
                );
            }
            let res = a.residual_report();
            let worst = res.worst_identity();
            report.set_residuals(&res, RESIDUAL_BOUND);
            let outcome = if worst <= RESIDUAL_BOUND {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_TOLERANCE,
                    message: format!("largest structure or fundamental residual {worst:e} exceeds {RESIDUAL_BOUND:e}"),
                })
            };
            finish(&report, args.format, outcome)
        }
        Command::Classify(_) => {
            if args.at.is_some() {
                return Err(usage("classify samples the whole grid; --at is not accepted"));
            }
            let a = sweep(&chart, &chart.grid_points(), &cfg)?;
            report.set_check(&a);
            let class = a
                .classify(&cfg.tolerances.classifier)
                .map_err(|e| usage(e.to_string()))?;
            let outcome = if class.branch == Branch::Degenerate {
                Err(Failure {
                    code: EXIT_GEOMETRY,
                    message: geometry_message(&a).unwrap_or_else(|| "degenerate surface".into()),
                })
            } else {
                Ok(())
            };
            report.set_residuals(&a.residual_report(), RESIDUAL_BOUND);
            report.set_classification(class);
            finish(&report, args.format, outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lcsurf: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
