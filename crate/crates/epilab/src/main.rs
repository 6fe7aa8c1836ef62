//! Command-line driver: run inequality experiment configs, evaluate
//! functionals, generate path/figure data files.
//!
//! Exit codes: 0 all checks pass, 1 at least one violation, 2 numerical
//! failures without violations, 3 configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use epilab::config::{
    self, ExperimentConfig, OutputFormat, OutputSpec, RunOutcome, DEFAULT_SEED,
};
use epilab::dist::Dist;
use epilab::error::Error;
use epilab::ext::{self, LVProblemSpec};
use epilab::functionals;
use epilab::paths::{self, PathKind};

#[derive(Parser)]
#[command(name = "epilab", version, about = "Numerical laboratory for entropy-power, Fisher-information and MMSE inequalities")]
struct Cli {
    /// Input JSON document (experiment config or subcommand-specific spec).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output artifact path (format inferred from the subcommand/config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed recorded in reports when the experiment does not set one.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Multiplies all verdict tolerances (same effect as EPILAB_TOL_SCALE).
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Emit extra diagnostics (per-report lines, solver traces).
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate entropy, entropy power and Fisher information of one
    /// distribution (config: a distribution spec).
    Eval,
    /// Run the experiments of a config file and report verdicts.
    Verify,
    /// Recover entropy through the integral representations
    /// (config: {"dist": ..., "paths": [...]?}).
    Path,
    /// Scan concavity of the entropy power in the noise level
    /// (config: {"dist": ..., "var_z": ..., "t_grid": [...]?}).
    Costa,
    /// Solve the covariance-capped entropy maximization problem
    /// (config: {"cap": ..., "cov_z": ..., "mu": ...}).
    Lv,
    /// Write small-SNR mutual-information curves for the Gaussian and
    /// Laplacian noise channels (CSV to --out).
    Fig3,
    /// Run the bundled core suite (or --config when given).
    Suite,
}

fn read_config_text(path: &Option<PathBuf>) -> Result<String, Error> {
    let path = path
        .as_ref()
        .ok_or_else(|| Error::ConfigError("this subcommand needs --config <file>".into()))?;
    std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigError(format!("cannot read {}: {e}", path.display())))
}

fn parse_spec<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| {
        Error::ConfigError(format!(
            "spec parse error at line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::ConfigError(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_experiments(cli: &Cli, cfg: &ExperimentConfig) -> Result<RunOutcome, Error> {
    let outcome = config::run(cfg, cli.seed);
    if cli.verbose {
        for r in &outcome.reports {
            eprintln!(
                "{:<24} {:>9?}  lhs={:+.6e} rhs={:+.6e} slack={:+.3e} tol={:.1e}",
                r.name, r.verdict, r.lhs, r.rhs, r.slack, r.tolerance
            );
        }
        for f in &outcome.failures {
            eprintln!("experiment {} ({}): FAILED: {}", f.index, f.kind, f.message);
        }
    }
    let output = match (&cfg.output, &cli.out) {
        (_, Some(path)) => Some(OutputSpec {
            format: if path.extension().is_some_and(|e| e == "csv") {
                OutputFormat::Csv
            } else {
                OutputFormat::Json
            },
            path: path.display().to_string(),
        }),
        (Some(spec), None) => Some(spec.clone()),
        (None, None) => None,
    };
    match output {
        Some(spec) => config::write_artifacts(&outcome, &spec)?,
        None => println!("{}", config::to_json(&outcome)),
    }
    let s = &outcome.summary;
    eprintln!(
        "total {} | holds {} | equalities {} | violations {} | numerical failures {} | {:.2}s",
        s.total, s.holds, s.equalities, s.violations, s.numerical_failures, s.wall_time_s
    );
    Ok(outcome)
}

#[derive(Deserialize)]
struct PathSpec {
    dist: Dist,
    #[serde(default)]
    paths: Option<Vec<PathKind>>,
}

#[derive(Deserialize)]
struct CostaSpec {
    dist: Dist,
    var_z: f64,
    #[serde(default)]
    t_grid: Option<Vec<f64>>,
}

fn dispatch(cli: &Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Eval => {
            let dist: Dist = parse_spec(&read_config_text(&cli.config)?)?;
            dist.validate()?;
            let h = functionals::entropy(&dist)?;
            let n = functionals::entropy_power(&dist)?;
            let j = functionals::fisher_info(&dist)
                .map(|v| serde_json::json!({"trace": v.scalar, "matrix": v.matrix, "error_estimate": v.error_estimate}))
                .unwrap_or(serde_json::Value::Null);
            let (mean, cov) = dist.moments()?;
            let doc = serde_json::json!({
                "entropy_nats": h.nats,
                "entropy_error_estimate": h.error_estimate,
                "entropy_power": n.value,
                "fisher_information": j,
                "mean": mean,
                "cov": cov,
            });
            emit(cli, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(0)
        }
        Command::Verify => {
            let cfg = ExperimentConfig::from_json(&read_config_text(&cli.config)?)?;
            Ok(run_experiments(cli, &cfg)?.exit_code())
        }
        Command::Suite => {
            let cfg = match &cli.config {
                Some(_) => ExperimentConfig::from_json(&read_config_text(&cli.config)?)?,
                None => config::suite_core_config(),
            };
            Ok(run_experiments(cli, &cfg)?.exit_code())
        }
        Command::Path => {
            let spec: PathSpec = parse_spec(&read_config_text(&cli.config)?)?;
            spec.dist.validate()?;
            let kinds = spec.paths.unwrap_or_else(|| {
                vec![
                    PathKind::FisherNoise,
                    PathKind::FisherInterp,
                    PathKind::MmseSignal,
                    PathKind::MmseInterp,
                ]
            });
            let direct = functionals::entropy(&spec.dist)?;
            let mut entries = Vec::new();
            for kind in kinds {
                let est = paths::entropy_via_path(&spec.dist, kind)?;
                entries.push(serde_json::json!({
                    "representation": kind,
                    "entropy_nats": est.entropy_nats,
                    "error_estimate": est.error_estimate,
                    "deviation_from_direct": est.entropy_nats - direct.nats,
                }));
            }
            let doc = serde_json::json!({
                "direct_entropy_nats": direct.nats,
                "paths": entries,
            });
            emit(cli, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(0)
        }
        Command::Costa => {
            let spec: CostaSpec = parse_spec(&read_config_text(&cli.config)?)?;
            let scan = ext::costa_concavity(&spec.dist, spec.var_z, spec.t_grid.as_deref())?;
            let doc = serde_json::json!({
                "t_grid": scan.t_grid,
                "entropy_powers": scan.n_values,
                "second_differences": scan.second_differences,
                "chord_slopes": scan.slopes,
                "reports": [scan.report.clone(), scan.slope_report.clone()],
            });
            emit(cli, &serde_json::to_string_pretty(&doc).unwrap())?;
            let violated = [&scan.report, &scan.slope_report]
                .iter()
                .any(|r| r.verdict == epilab::report::Verdict::Violated);
            Ok(if violated { 1 } else { 0 })
        }
        Command::Lv => {
            let spec: LVProblemSpec = parse_spec(&read_config_text(&cli.config)?)?;
            let mut sol = ext::lv_solve(&spec)?;
            if !cli.verbose {
                sol.trace.clear();
            }
            emit(cli, &serde_json::to_string_pretty(&sol).unwrap())?;
            Ok(0)
        }
        Command::Fig3 => {
            let path = cli
                .out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "fig3.csv".to_string());
            config::fig3_data(&path)?;
            eprintln!("wrote {path}");
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(scale) = cli.tol_scale {
        std::env::set_var("EPILAB_TOL_SCALE", scale.to_string());
    }
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = if matches!(e, Error::ConfigError(_)) { 3 } else { 2 };
            ExitCode::from(code)
        }
    }
}
