use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qmetro::analysis::{
    fim_rank_experiment, metrics_report, scaling_table, scan_t, ProbeChoice, RankExperimentConfig,
    ScanConfig,
};
use qmetro::encoding::{ModelKind, ModelPoint};
use qmetro::linalg::SINGULAR_REL_TOL;
use qmetro::models::{BlochVec, ProbeSpec};
use qmetro::Error;

const BOUND_TOL: f64 = 1e-9;
const ROUTE_TOL: f64 = 1e-5;
const DECOMPOSITION_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "qmetro",
    version,
    about = "Incompatibility diagnostics for su(2) metrology models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grid of T = R - Delta over (theta, B), written as CSV.
    Scan(ScanArgs),
    /// QFIM, Uhlmann matrix and bounds at one point, written as JSON.
    Metrics(MetricsArgs),
    /// Gamma against probe dimension with log-log slopes, written as CSV.
    Scaling(ScalingArgs),
    /// Monte Carlo rank test of the classical Fisher information, written as JSON.
    FimRank(RankArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Two,
    Three,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::Two => ModelKind::TwoParam,
            Model::Three => ModelKind::ThreeParam,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "two")]
    model: Model,
    /// Probe dimension N.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Superposition angle of cos(a)|J> + e^{i phi} sin(a)|-J>.
    #[arg(long, default_value_t = FRAC_PI_4, allow_negative_numbers = true)]
    alpha: f64,
    /// Relative phase of the probe.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    /// Evolution time t.
    #[arg(long = "time", default_value_t = 5.0)]
    time: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative eigenvalue threshold for a singular QFIM.
    #[arg(long, default_value_t = SINGULAR_REL_TOL)]
    tol: f64,
}

#[derive(Args)]
struct PointArgs {
    /// Field strength B.
    #[arg(long = "field", default_value_t = 1.0, allow_negative_numbers = true)]
    field: f64,
    /// Polar field angle theta.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    theta: f64,
    /// Azimuthal field angle for the three-parameter model.
    #[arg(long = "azimuth", default_value_t = 0.0, allow_negative_numbers = true)]
    azimuth: f64,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: Common,
    /// Grid size as THETAxB.
    #[arg(long, default_value = "101x101")]
    grid: String,
    #[arg(long = "theta-range", value_parser = parse_range, allow_hyphen_values = true)]
    theta_range: Option<(f64, f64)>,
    /// B range; one period [0, 2pi/t] by default.
    #[arg(long = "field-range", value_parser = parse_range, allow_hyphen_values = true)]
    field_range: Option<(f64, f64)>,
    #[arg(long = "azimuth", default_value_t = 0.0, allow_negative_numbers = true)]
    azimuth: f64,
    /// Pure qubit Bloch vector x,y,z instead of the superposition probe.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    bloch: Option<[f64; 3]>,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    bloch: Option<[f64; 3]>,
}

#[derive(Args)]
struct ScalingArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    point: PointArgs,
    /// Comma-separated alphas; defaults to --alpha.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', default_value = "4,5,6,7,8,9,10,11,12")]
    dims: Vec<usize>,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated parameter counts d.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    params: Vec<usize>,
    /// Comma-separated outcome counts n.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    outcomes: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let v = parse_floats(s)?;
    match v[..] {
        [a, b] => Ok((a, b)),
        _ => Err(format!("expected LO,HI, got {s:?}")),
    }
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v = parse_floats(s)?;
    v.try_into()
        .map_err(|_| format!("expected X,Y,Z, got {s:?}"))
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_grid(s: &str) -> anyhow::Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(['x', 'X', '×']).collect();
    match parts[..] {
        [a, b] => Ok((a.trim().parse()?, b.trim().parse()?)),
        _ => Err(Error::InvalidConfig(format!("grid must look like 101x101, got {s:?}")).into()),
    }
}

fn probe_choice(common: &Common, bloch: Option<[f64; 3]>) -> anyhow::Result<ProbeChoice> {
    match bloch {
        Some(r) => {
            if common.dim != 2 {
                bail!(Error::InvalidConfig("--bloch requires --dim 2".into()));
            }
            Ok(ProbeChoice::Bloch(BlochVec::new(r)?))
        }
        None => Ok(ProbeChoice::Family(ProbeSpec::new(
            common.dim,
            common.alpha,
            common.phi,
        ))),
    }
}

fn model_point(common: &Common, point: &PointArgs) -> qmetro::Result<ModelPoint> {
    ModelPoint::new(
        common.model.into(),
        point.field,
        point.theta,
        point.azimuth,
        common.time,
    )
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

/// Runs a command; `Ok(false)` means output was written but a consistency check failed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Scan(a) => {
            let c = &a.common;
            let mut cfg = ScanConfig::new(c.model.into(), probe_choice(c, a.bloch)?, c.time);
            (cfg.theta_count, cfg.b_count) = parse_grid(&a.grid)?;
            if let Some(r) = a.theta_range {
                cfg.theta_range = r;
            }
            if let Some(r) = a.field_range {
                cfg.b_range = r;
            }
            cfg.phi_param = a.azimuth;
            cfg.rel_tol = c.tol;
            let grid = scan_t(&cfg)?;
            let mut buf = Vec::new();
            grid.write_csv(&mut buf)?;
            emit(&c.out, &buf)?;
            report_check(grid.check_bounds(BOUND_TOL))
        }
        Command::Metrics(a) => {
            let c = &a.common;
            let point = model_point(c, &a.point)?;
            let report = metrics_report(&probe_choice(c, a.bloch)?, &point, None, c.tol)?;
            let mut json = report.to_json()?;
            json.push('\n');
            emit(&c.out, json.as_bytes())?;
            let residual = report.generator_route_residuals.max();
            if residual > ROUTE_TOL {
                eprintln!("generator routes disagree: residual {residual:e}");
                return Ok(false);
            }
            let bounds = match (report.r_ai, report.delta, report.c_sld, report.c_h) {
                (Some(r), Some(d), Some(cs), Some(ch)) => {
                    d >= -BOUND_TOL
                        && d <= r + BOUND_TOL
                        && r <= 1.0 + BOUND_TOL
                        && ch >= cs - BOUND_TOL
                }
                _ => true,
            };
            if !bounds {
                eprintln!("bound ordering violated");
            }
            Ok(bounds)
        }
        Command::Scaling(a) => {
            let c = &a.common;
            let point = model_point(c, &a.point)?;
            let alphas = if a.alphas.is_empty() {
                vec![c.alpha]
            } else {
                a.alphas.clone()
            };
            let table = scaling_table(&alphas, &a.dims, &point, c.phi, c.tol)?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            emit(&c.out, &buf)?;
            Ok(true)
        }
        Command::FimRank(a) => {
            let c = &a.common;
            let mut reports = Vec::new();
            for &d in &a.params {
                for &n in &a.outcomes {
                    reports.push(fim_rank_experiment(&RankExperimentConfig::new(
                        d, n, a.trials, c.seed,
                    ))?);
                }
            }
            let mut json =
                serde_json::to_string_pretty(&serde_json::json!({ "reports": reports }))?;
            json.push('\n');
            emit(&c.out, json.as_bytes())?;
            let ok = reports.iter().all(|r| {
                r.violations == 0
                    && r.max_decomposition_residual <= DECOMPOSITION_TOL
                    && r.max_cauchy_binet_residual <= DECOMPOSITION_TOL
                    && (r.n > r.d || r.singular_fraction == 1.0)
            });
            if !ok {
                eprintln!("rank bound or decomposition check failed");
            }
            Ok(ok)
        }
    }
}

fn report_check(check: qmetro::Result<()>) -> anyhow::Result<bool> {
    match check {
        Ok(()) => Ok(true),
        Err(e) => {
            eprintln!("{e}");
            Ok(false)
        }
    }
}

fn is_usage_error(e: &anyhow::Error) -> bool {
    if e.downcast_ref::<std::num::ParseIntError>().is_some() {
        return true;
    }
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::InvalidConfig(_)
                | Error::InvalidPoint(_)
                | Error::InvalidDimension(_)
                | Error::UnsupportedClosedForm(_)
                | Error::DimensionMismatch { .. }
        )
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}
