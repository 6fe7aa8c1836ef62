//! Config-driven experiment runner: a JSON document describes a list of
//! inequality experiments; the runner executes them in parallel, stamps each
//! resulting report with seed and wall time, aggregates a summary and writes
//! JSON or CSV artifacts with a CI-friendly exit contract.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::ext::{
    self, DependentPairSpec, LVProblemSpec, LinearMixSpec, SubsetForm, ZfForm,
};
use crate::functionals::entropy_tol;
use crate::ineq::{self, DpiChain, EpiForm, FiiForm, WeightedFamily};
use crate::paths::{self, PathKind};
use crate::report::{classify, InequalityReport, Verdict};
use crate::sumdist::SumDensity;

/// Fixed default seed so unkeyed configs stay reproducible run to run.
pub const DEFAULT_SEED: u64 = 1729;

/// Schema version accepted by this build.
pub const SCHEMA_VERSION: u32 = 1;

// ======================================================================
// Config schema
// ======================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputSpec {
    pub format: OutputFormat,
    pub path: String,
}

/// Which side of an inequality the experiment claims is larger. The
/// reversed orientation asserts the opposite of the library check and is
/// intended as a negative control: it must produce violations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimOrientation {
    #[default]
    Forward,
    Reversed,
}

/// One experiment: the check to run plus its serialized inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    Epi {
        dists: Vec<Dist>,
        coeffs: Vec<f64>,
        form: EpiForm,
        #[serde(default)]
        orientation: ClaimOrientation,
    },
    Fii {
        dists: Vec<Dist>,
        coeffs: Vec<f64>,
        form: FiiForm,
    },
    Mii {
        dists: Vec<Dist>,
        coeffs: Vec<f64>,
        var_z: f64,
    },
    Sato {
        dists: Vec<Dist>,
        noise: Dist,
    },
    Dpi {
        prior: Dist,
        noise1_var: f64,
        a: f64,
        noise2_var: f64,
    },
    Saddlepoint {
        dist: Dist,
        var_z: f64,
    },
    Contrast {
        dists: Vec<Dist>,
        coeffs: Vec<f64>,
    },
    CramerRao {
        dist: Dist,
    },
    ZfEpi {
        matrix: Vec<Vec<f64>>,
        marginals: Vec<Dist>,
        form: ZfForm,
    },
    ZfFii {
        matrix: Vec<Vec<f64>>,
        marginals: Vec<Dist>,
    },
    ZfMii {
        matrix: Vec<Vec<f64>>,
        marginals: Vec<Dist>,
        var_z: f64,
    },
    DependentEpi {
        joint: Dist,
        t: f64,
        coeffs: [f64; 2],
    },
    Lv {
        cap: Vec<Vec<f64>>,
        cov_z: Vec<Vec<f64>>,
        mu: f64,
        /// Certificate bound on KKT residual + complementary slackness.
        #[serde(default = "default_lv_bound")]
        bound: f64,
    },
    LvEpi {
        x1: Dist,
        x2: Dist,
        a: [f64; 2],
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    Costa {
        dist: Dist,
        var_z: f64,
        #[serde(default)]
        t_grid: Option<Vec<f64>>,
    },
    SubsetEpi {
        dists: Vec<Dist>,
        coeffs: Vec<f64>,
        subsets: Vec<Vec<usize>>,
        form: SubsetForm,
    },
    Gas {
        weights: Vec<f64>,
        dists: Vec<Dist>,
        var_z: f64,
    },
    /// |var_z J(X+Z) + Var(X|X+Z)/var_z - 1| <= bound.
    Complementary {
        dist: Dist,
        noise_var: f64,
        #[serde(default = "default_residual_bound")]
        bound: f64,
    },
    /// |d/dt h(X+sqrt(t)Z) - (1/2) tr(J Cov(Z))| <= bound at t0.
    Debruijn {
        x: Dist,
        z: Dist,
        t0: f64,
        #[serde(default = "default_residual_bound")]
        bound: f64,
    },
    /// |entropy via the path representation - direct entropy| <= bound.
    PathEntropy {
        dist: Dist,
        path: PathKind,
        #[serde(default = "default_path_bound")]
        bound: f64,
    },
}

fn default_lv_bound() -> f64 {
    1e-8
}

fn default_alpha() -> f64 {
    1.0
}

fn default_residual_bound() -> f64 {
    1e-3
}

fn default_path_bound() -> f64 {
    1e-2
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Experiment {
    #[serde(flatten)]
    pub kind: ExperimentKind,
    /// Recorded in the reports; defaults to the runner seed.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Absolute tolerance overrides keyed by report name; verdicts are
    /// re-derived under the overridden tolerance.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub experiments: Vec<Experiment>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            Error::ConfigError(format!(
                "config parse error at line {}, column {}: {}",
                e.line(),
                e.column(),
                e
            ))
        })?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::ConfigError(format!(
                "unsupported schema_version {}, this build reads {}",
                cfg.schema_version, SCHEMA_VERSION
            )));
        }
        for (i, ex) in cfg.experiments.iter().enumerate() {
            ex.validate()
                .map_err(|e| Error::ConfigError(format!("experiment {i}: {e}")))?;
        }
        Ok(cfg)
    }
}

impl Experiment {
    /// Structural validation beyond what serde enforces: every referenced
    /// distribution must itself be a valid specification.
    pub fn validate(&self) -> Result<()> {
        for d in self.dists() {
            d.validate()?;
        }
        Ok(())
    }

    fn dists(&self) -> Vec<&Dist> {
        match &self.kind {
            ExperimentKind::Epi { dists, .. }
            | ExperimentKind::Fii { dists, .. }
            | ExperimentKind::Mii { dists, .. }
            | ExperimentKind::Contrast { dists, .. }
            | ExperimentKind::SubsetEpi { dists, .. }
            | ExperimentKind::Gas { dists, .. } => dists.iter().collect(),
            ExperimentKind::Sato { dists, noise } => {
                dists.iter().chain(std::iter::once(noise)).collect()
            }
            ExperimentKind::Dpi { prior, .. } => vec![prior],
            ExperimentKind::Saddlepoint { dist, .. }
            | ExperimentKind::CramerRao { dist }
            | ExperimentKind::Costa { dist, .. }
            | ExperimentKind::Complementary { dist, .. }
            | ExperimentKind::PathEntropy { dist, .. } => vec![dist],
            ExperimentKind::ZfEpi { marginals, .. }
            | ExperimentKind::ZfFii { marginals, .. }
            | ExperimentKind::ZfMii { marginals, .. } => marginals.iter().collect(),
            ExperimentKind::DependentEpi { joint, .. } => vec![joint],
            ExperimentKind::Lv { .. } => vec![],
            ExperimentKind::LvEpi { x1, x2, .. } => vec![x1, x2],
            ExperimentKind::Debruijn { x, z, .. } => vec![x, z],
        }
    }

    fn kind_name(&self) -> &'static str {
        match &self.kind {
            ExperimentKind::Epi { .. } => "epi",
            ExperimentKind::Fii { .. } => "fii",
            ExperimentKind::Mii { .. } => "mii",
            ExperimentKind::Sato { .. } => "sato",
            ExperimentKind::Dpi { .. } => "dpi",
            ExperimentKind::Saddlepoint { .. } => "saddlepoint",
            ExperimentKind::Contrast { .. } => "contrast",
            ExperimentKind::CramerRao { .. } => "cramer_rao",
            ExperimentKind::ZfEpi { .. } => "zf_epi",
            ExperimentKind::ZfFii { .. } => "zf_fii",
            ExperimentKind::ZfMii { .. } => "zf_mii",
            ExperimentKind::DependentEpi { .. } => "dependent_epi",
            ExperimentKind::Lv { .. } => "lv",
            ExperimentKind::LvEpi { .. } => "lv_epi",
            ExperimentKind::Costa { .. } => "costa",
            ExperimentKind::SubsetEpi { .. } => "subset_epi",
            ExperimentKind::Gas { .. } => "gas",
            ExperimentKind::Complementary { .. } => "complementary",
            ExperimentKind::Debruijn { .. } => "debruijn",
            ExperimentKind::PathEntropy { .. } => "path_entropy",
        }
    }
}

// ======================================================================
// Execution
// ======================================================================

/// A report whose slack/verdict is flipped to assert the opposite claim.
fn reversed(r: InequalityReport) -> InequalityReport {
    let slack = -r.slack;
    InequalityReport {
        name: format!("{}-reversed", r.name),
        reference: format!("reversed orientation of: {}", r.reference),
        lhs: r.rhs,
        rhs: r.lhs,
        slack,
        verdict: classify(slack, r.tolerance),
        ..r
    }
}

/// A report for a residual-style check: holds when |residual| <= bound.
fn residual_report<T: Serialize>(
    name: &str,
    reference: &str,
    residual: f64,
    bound: f64,
    error_estimate: f64,
    inputs: &T,
) -> InequalityReport {
    let lhs = residual.abs();
    let slack = bound - lhs;
    InequalityReport {
        name: name.to_string(),
        reference: reference.to_string(),
        lhs,
        rhs: bound,
        slack,
        tolerance: 0.0,
        verdict: if slack >= 0.0 {
            Verdict::Holds
        } else {
            Verdict::Violated
        },
        inputs_digest: crate::report::digest_of(inputs),
        error_estimate,
        seed: 0,
        wall_time_ms: 0,
    }
}

fn execute_kind(kind: &ExperimentKind) -> Result<Vec<InequalityReport>> {
    match kind {
        ExperimentKind::Epi {
            dists,
            coeffs,
            form,
            orientation,
        } => {
            let fam = WeightedFamily::new(dists.clone(), coeffs.clone())?;
            let r = ineq::check_epi(&fam, *form)?;
            Ok(vec![match orientation {
                ClaimOrientation::Forward => r,
                ClaimOrientation::Reversed => reversed(r),
            }])
        }
        ExperimentKind::Fii { dists, coeffs, form } => {
            let fam = WeightedFamily::new(dists.clone(), coeffs.clone())?;
            Ok(vec![ineq::check_fii(&fam, *form)?])
        }
        ExperimentKind::Mii { dists, coeffs, var_z } => {
            let fam = WeightedFamily::new(dists.clone(), coeffs.clone())?;
            Ok(vec![ineq::check_mii(&fam, *var_z)?])
        }
        ExperimentKind::Sato { dists, noise } => Ok(vec![ineq::check_sato(dists, noise)?]),
        ExperimentKind::Dpi {
            prior,
            noise1_var,
            a,
            noise2_var,
        } => {
            let chain = DpiChain {
                prior: prior.clone(),
                noise1_var: *noise1_var,
                a: *a,
                noise2_var: *noise2_var,
            };
            let (r1, r2) = ineq::check_dpi(&chain)?;
            Ok(vec![r1, r2])
        }
        ExperimentKind::Saddlepoint { dist, var_z } => {
            Ok(vec![ineq::check_saddlepoint(dist, *var_z)?])
        }
        ExperimentKind::Contrast { dists, coeffs } => {
            let fam = WeightedFamily::new(dists.clone(), coeffs.clone())?;
            Ok(vec![ineq::check_contrast(&fam)?])
        }
        ExperimentKind::CramerRao { dist } => Ok(vec![ineq::check_cramer_rao(dist)?]),
        ExperimentKind::ZfEpi {
            matrix,
            marginals,
            form,
        } => {
            let spec = LinearMixSpec::new(matrix.clone(), marginals.clone())?;
            Ok(vec![ext::check_zf_epi(&spec, *form)?])
        }
        ExperimentKind::ZfFii { matrix, marginals } => {
            let spec = LinearMixSpec::new(matrix.clone(), marginals.clone())?;
            Ok(vec![ext::check_zf_fii(&spec)?])
        }
        ExperimentKind::ZfMii {
            matrix,
            marginals,
            var_z,
        } => {
            let spec = LinearMixSpec::new(matrix.clone(), marginals.clone())?;
            Ok(vec![ext::check_zf_mii(&spec, *var_z)?])
        }
        ExperimentKind::DependentEpi { joint, t, coeffs } => {
            let spec = DependentPairSpec::new(joint.clone(), *t, *coeffs)?;
            Ok(vec![ext::check_dependent_epi(&spec)?])
        }
        ExperimentKind::Lv {
            cap,
            cov_z,
            mu,
            bound,
        } => {
            let spec = LVProblemSpec {
                cap: cap.clone(),
                cov_z: cov_z.clone(),
                mu: *mu,
            };
            let sol = ext::lv_solve(&spec)?;
            Ok(vec![residual_report(
                "lv-kkt",
                "KKT residual + complementary slackness of the capped covariance maximizer within bound",
                sol.kkt_residual + sol.comp_slackness,
                *bound,
                0.0,
                &spec,
            )])
        }
        ExperimentKind::LvEpi { x1, x2, a, alpha } => {
            Ok(vec![ext::check_lv_epi(x1, x2, (a[0], a[1]), *alpha)?])
        }
        ExperimentKind::Costa { dist, var_z, t_grid } => {
            let scan = ext::costa_concavity(dist, *var_z, t_grid.as_deref())?;
            Ok(vec![scan.report, scan.slope_report])
        }
        ExperimentKind::SubsetEpi {
            dists,
            coeffs,
            subsets,
            form,
        } => Ok(vec![ext::check_subset_epi(dists, coeffs, subsets, *form)?]),
        ExperimentKind::Gas {
            weights,
            dists,
            var_z,
        } => ext::check_gas_mixture(weights, dists, *var_z),
        ExperimentKind::Complementary {
            dist,
            noise_var,
            bound,
        } => {
            let res = channel::complementary_residual(dist, *noise_var)?;
            Ok(vec![residual_report(
                "complementary",
                "|var_Z J(X+Z) + Var(X|X+Z)/var_Z - n| within bound",
                res.value,
                *bound,
                res.error_estimate,
                &(dist, noise_var, bound),
            )])
        }
        ExperimentKind::Debruijn { x, z, t0, bound } => {
            let res = paths::debruijn_residual(x, z, *t0)?;
            Ok(vec![residual_report(
                "debruijn",
                "|d/dt h(X + sqrt(t) Z) - (1/2) tr(J(X + sqrt(t) Z) Cov(Z))| within bound",
                res.value,
                *bound,
                res.error_estimate,
                &(x, z, t0, bound),
            )])
        }
        ExperimentKind::PathEntropy { dist, path, bound } => {
            let est = paths::entropy_via_path(dist, *path)?;
            let direct = entropy_tol(dist, 1e-8)?;
            Ok(vec![residual_report(
                "path-entropy",
                "|entropy from the path representation - direct quadrature entropy| within bound",
                est.entropy_nats - direct.nats,
                *bound,
                est.error_estimate + direct.error_estimate,
                &(dist, path, bound),
            )])
        }
    }
}

// ======================================================================
// Runner
// ======================================================================

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub total: usize,
    pub holds: usize,
    pub equalities: usize,
    pub violations: usize,
    pub numerical_failures: usize,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentFailure {
    /// Index into the config's experiment list.
    pub index: usize,
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub reports: Vec<InequalityReport>,
    pub failures: Vec<ExperimentFailure>,
}

impl RunOutcome {
    /// 0 all pass, 1 any violation, 2 numerical failures without violation.
    pub fn exit_code(&self) -> i32 {
        if self.summary.violations > 0 {
            1
        } else if self.summary.numerical_failures > 0 {
            2
        } else {
            0
        }
    }
}

/// Execute every experiment (in parallel), stamp reports, aggregate counts.
/// A failed experiment contributes one numerical-failure record; the
/// remaining results are still produced.
pub fn run(config: &ExperimentConfig, default_seed: u64) -> RunOutcome {
    let t_run = Instant::now();
    let results: Vec<(usize, std::result::Result<Vec<InequalityReport>, String>)> = config
        .experiments
        .par_iter()
        .enumerate()
        .map(|(i, ex)| {
            let t = Instant::now();
            let out = execute_kind(&ex.kind).map(|mut reports| {
                let ms = t.elapsed().as_millis() as u64;
                let seed = ex.seed.unwrap_or(default_seed);
                for r in &mut reports {
                    r.seed = seed;
                    r.wall_time_ms = ms;
                    if let Some(tol) = ex.tolerances.get(&r.name) {
                        r.tolerance = *tol;
                        r.verdict = classify(r.slack, r.tolerance);
                    }
                }
                reports
            });
            (i, out.map_err(|e| e.to_string()))
        })
        .collect();

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (i, res) in results {
        match res {
            Ok(rs) => reports.extend(rs),
            Err(message) => failures.push(ExperimentFailure {
                index: i,
                kind: config.experiments[i].kind_name().to_string(),
                message,
            }),
        }
    }
    let holds = reports.iter().filter(|r| r.verdict == Verdict::Holds).count();
    let equalities = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Equality)
        .count();
    let violations = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Violated)
        .count();
    let summary = RunSummary {
        total: reports.len() + failures.len(),
        holds,
        equalities,
        violations,
        numerical_failures: failures.len(),
        wall_time_s: t_run.elapsed().as_secs_f64(),
    };
    RunOutcome {
        summary,
        reports,
        failures,
    }
}

// ======================================================================
// Artifact writers
// ======================================================================

/// 17 significant digits: lossless round-trip for f64.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// RFC-4180: quote a field when it contains a comma, quote or newline;
/// embedded quotes are doubled.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str =
    "name,reference,lhs,rhs,slack,tolerance,verdict,error_estimate,inputs_digest,seed,wall_time_ms";

pub fn to_csv(reports: &[InequalityReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let verdict = match r.verdict {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Equality => "equality",
        };
        let row = [
            csv_field(&r.name),
            csv_field(&r.reference),
            fmt17(r.lhs),
            fmt17(r.rhs),
            fmt17(r.slack),
            fmt17(r.tolerance),
            verdict.to_string(),
            fmt17(r.error_estimate),
            csv_field(&r.inputs_digest),
            r.seed.to_string(),
            r.wall_time_ms.to_string(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// The JSON artifact: summary, reports and failures, plus a timestamp field
/// that comparisons are expected to exclude.
pub fn to_json(outcome: &RunOutcome) -> String {
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "timestamp_unix_ms": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0),
        "summary": outcome.summary,
        "reports": outcome.reports,
        "failures": outcome.failures,
    });
    serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
}

/// Write the outcome per the output spec (or JSON to the fallback path).
pub fn write_artifacts(outcome: &RunOutcome, output: &OutputSpec) -> Result<()> {
    let text = match output.format {
        OutputFormat::Json => to_json(outcome),
        OutputFormat::Csv => to_csv(&outcome.reports),
    };
    let mut f = std::fs::File::create(&output.path)
        .map_err(|e| Error::ConfigError(format!("cannot create {}: {e}", output.path)))?;
    f.write_all(text.as_bytes())
        .map_err(|e| Error::ConfigError(format!("cannot write {}: {e}", output.path)))?;
    Ok(())
}

// ======================================================================
// Figure data: small-SNR mutual information of two noise channels
// ======================================================================

/// I(X; sqrt(t) X + Z) for unit-variance Gaussian X over 26 noise levels in
/// [0, 0.5], against Gaussian and unit-variance Laplacian noise, with the
/// fitted small-SNR slope (= J(Z)/2) repeated per row.
pub fn fig3_rows() -> Result<Vec<(String, f64, f64, f64)>> {
    let x = Dist::gaussian1(0.0, 1.0);
    let channels = [
        ("gaussian".to_string(), Dist::gaussian1(0.0, 1.0)),
        (
            "laplacian".to_string(),
            Dist::laplace(0.0, std::f64::consts::FRAC_1_SQRT_2),
        ),
    ];
    let mut rows = Vec::with_capacity(52);
    for (label, z) in channels {
        let slope = paths::small_snr_slope(&z, &x, None)?.value;
        let h_z = entropy_tol(&z, 1e-9)?.nats;
        for k in 0..26 {
            let t = 0.5 * k as f64 / 25.0;
            let info = if t == 0.0 {
                0.0
            } else {
                let y = SumDensity::of_family(&[z.clone(), x.clone()], &[1.0, t.sqrt()])?;
                y.entropy(1e-9)?.nats - h_z
            };
            rows.push((label.clone(), t, info, slope));
        }
    }
    Ok(rows)
}

/// Write the figure data as CSV: channel,t,mutual_info_nats,fitted_slope.
pub fn fig3_data(path: &str) -> Result<()> {
    let rows = fig3_rows()?;
    let mut out = String::from("channel,t,mutual_info_nats,fitted_slope\n");
    for (channel, t, info, slope) in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_field(&channel),
            fmt17(t),
            fmt17(info),
            fmt17(slope)
        ));
    }
    std::fs::write(path, out)
        .map_err(|e| Error::ConfigError(format!("cannot write {path}: {e}")))?;
    Ok(())
}

// ======================================================================
// Bundled core suite
// ======================================================================

/// The standard test set exercised by the bundled suite: a Gaussian, a
/// variance-one Laplacian and a bimodal two-Gaussian mixture.
pub fn standard_test_set() -> Vec<Dist> {
    vec![
        Dist::gaussian1(0.0, 1.0),
        Dist::laplace(0.0, std::f64::consts::FRAC_1_SQRT_2),
        Dist::Mixture {
            weights: vec![0.5, 0.5],
            components: vec![Dist::gaussian1(-2.0, 1.0), Dist::gaussian1(2.0, 1.0)],
        },
    ]
}

fn bare(kind: ExperimentKind) -> Experiment {
    Experiment {
        kind,
        seed: None,
        tolerances: BTreeMap::new(),
    }
}

/// The bundled core suite: every inequality family on the standard test set.
pub fn suite_core_config() -> ExperimentConfig {
    let set = standard_test_set();
    let coeffs = vec![1.0, 1.0, 1.0];
    let mut experiments = Vec::new();
    for form in [EpiForm::Power, EpiForm::GaussianComparison, EpiForm::Concavity] {
        experiments.push(bare(ExperimentKind::Epi {
            dists: set.clone(),
            coeffs: coeffs.clone(),
            form,
            orientation: ClaimOrientation::Forward,
        }));
    }
    for form in [FiiForm::Reciprocal, FiiForm::GaussianComparison, FiiForm::Convexity] {
        experiments.push(bare(ExperimentKind::Fii {
            dists: set.clone(),
            coeffs: coeffs.clone(),
            form,
        }));
    }
    experiments.push(bare(ExperimentKind::Mii {
        dists: set.clone(),
        coeffs: coeffs.clone(),
        var_z: 1.0,
    }));
    experiments.push(bare(ExperimentKind::Sato {
        dists: vec![set[0].clone(), set[1].clone()],
        noise: Dist::gaussian1(0.0, 1.0),
    }));
    experiments.push(bare(ExperimentKind::Dpi {
        prior: set[2].clone(),
        noise1_var: 0.5,
        a: 1.0,
        noise2_var: 1.0,
    }));
    for d in &set {
        experiments.push(bare(ExperimentKind::Saddlepoint {
            dist: d.clone(),
            var_z: 1.0,
        }));
        experiments.push(bare(ExperimentKind::CramerRao { dist: d.clone() }));
        experiments.push(bare(ExperimentKind::Complementary {
            dist: d.clone(),
            noise_var: 1.0,
            bound: 1e-3,
        }));
    }
    experiments.push(bare(ExperimentKind::Contrast {
        dists: set.clone(),
        coeffs,
    }));
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        experiments,
        output: None,
    }
}

/// A negative control: the bundled suite's EPI claims with the orientation
/// reversed, which a sound checker must report as violated.
pub fn negative_control_config() -> ExperimentConfig {
    let set = standard_test_set();
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        experiments: vec![bare(ExperimentKind::Epi {
            dists: vec![set[1].clone(), set[2].clone()],
            coeffs: vec![1.0, 1.0],
            form: EpiForm::Power,
            orientation: ClaimOrientation::Reversed,
        })],
        output: None,
    }
}
