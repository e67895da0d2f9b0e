//! Statistical verification harness.
//!
//! Each suite returns a list of [`VerifyReport`]s. A report compares an
//! estimate with a target under a [`Rule`]; negative controls are checks
//! that are expected to fail.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::error::{DgcError, Result};
use crate::model::ModelConfig;
use crate::simulate::SeedSpec;
use crate::stats;

pub mod appendix;
pub mod compensator;
pub mod density;
pub mod gaussian;
pub mod measure;
pub mod projection;
pub mod spike;

pub const Z_LIMIT: f64 = 3.0;

/// Default sample sizes per suite.
pub const DENSITY_PATHS: u64 = 1_000_000;
pub const COMPENSATOR_PATHS: u64 = 100_000;
pub const PROJECTION_PATHS: u64 = 100_000;
pub const MEASURE_PATHS: u64 = 50_000;
pub const JEULIN_YOR_PATHS: u64 = 100_000;
pub const SPIKE_PATHS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// |z| ≤ limit
    ZWithin { limit: f64 },
    /// |estimate − target| ≤ tol
    Tolerance { tol: f64 },
    /// estimate ≤ target
    AtMost,
    /// estimate > target
    Above,
    /// Recorded measurement without a pass/fail criterion.
    Record,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub target: f64,
    pub z: f64,
    #[serde(flatten)]
    pub rule: Rule,
    pub verdict: Verdict,
    /// Negative controls are expected to come out `Fail`.
    pub negative_control: bool,
    #[serde(skip)]
    pub runtime: Duration,
}

impl VerifyReport {
    pub fn new(name: impl Into<String>, estimate: f64, se: f64, target: f64, rule: Rule) -> Self {
        let z = stats::z_score(estimate, target, se);
        let pass = match rule {
            Rule::ZWithin { limit } => z.abs() <= limit,
            Rule::Tolerance { tol } => (estimate - target).abs() <= tol,
            Rule::AtMost => estimate <= target,
            Rule::Above => estimate > target,
            Rule::Record => true,
        };
        Self {
            name: name.into(),
            estimate,
            se,
            target,
            z,
            rule,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            negative_control: false,
            runtime: Duration::ZERO,
        }
    }

    /// Mean of paired samples against a target with the 3-SE rule.
    pub fn from_samples(name: impl Into<String>, samples: &[f64], target: f64) -> Self {
        let (m, se) = stats::mean_and_se(samples);
        Self::new(name, m, se, target, Rule::ZWithin { limit: Z_LIMIT })
    }

    pub fn negative(mut self) -> Self {
        self.negative_control = true;
        self
    }

    pub fn timed(mut self, runtime: Duration) -> Self {
        self.runtime = runtime;
        self
    }

    /// True when the report came out as expected.
    pub fn ok(&self) -> bool {
        (self.verdict == Verdict::Pass) != self.negative_control
    }
}

/// Shared run parameters for the Monte Carlo suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: SeedSpec,
    pub paths: u64,
    pub parallelism: usize,
}

impl RunOptions {
    pub fn new(seed: u64, paths: u64) -> Self {
        Self {
            seed: SeedSpec::new(seed),
            paths,
            parallelism: 0,
        }
    }
}

pub const SUITES: [&str; 8] = [
    "gaussian",
    "density",
    "compensator",
    "projection",
    "measure",
    "jeulin-yor",
    "spike",
    "appendix",
];

/// Seed, sample size override and thread count for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteRun {
    pub seed: u64,
    /// `None` uses each suite's own sample size.
    pub paths: Option<u64>,
    pub parallelism: usize,
}

impl SuiteRun {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            paths: None,
            parallelism: 0,
        }
    }
}

/// Runs one named suite.
pub fn run_suite(name: &str, config: &ModelConfig, run: SuiteRun) -> Result<Vec<VerifyReport>> {
    let seed = run.seed;
    let opts = |default: u64| RunOptions {
        seed: SeedSpec::new(seed),
        paths: run.paths.unwrap_or(default),
        parallelism: run.parallelism,
    };
    let started = std::time::Instant::now();
    let mut reports = match name {
        "gaussian" => gaussian::gaussian_suite(seed)?,
        "density" => density::density_suite(config, opts(DENSITY_PATHS))?,
        "compensator" => {
            let mut out = Vec::new();
            for rho in [0.0, 0.3, 0.6] {
                out.extend(compensator::compensator_suite(&config.with_rho(rho)?, opts(COMPENSATOR_PATHS))?);
            }
            out
        }
        "projection" => projection::projection_suite(config, opts(PROJECTION_PATHS), 5.0)?,
        "measure" => {
            let mut out = Vec::new();
            for rho in [0.0, 0.3, 0.6] {
                out.extend(measure::measure_change_suite(&config.with_rho(rho)?, opts(MEASURE_PATHS))?);
            }
            out
        }
        "jeulin-yor" => measure::jeulin_yor_suite(config, opts(JEULIN_YOR_PATHS))?,
        "spike" => spike::spike_statistics(config, opts(SPIKE_PATHS))?,
        "appendix" => appendix::appendix_suite(seed)?,
        other => {
            return Err(DgcError::Config(format!(
                "unknown suite `{other}`; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    let runtime = started.elapsed();
    for r in &mut reports {
        if r.runtime.is_zero() {
            r.runtime = runtime;
        }
    }
    Ok(reports)
}

fn fmt_num(x: f64) -> String {
    format!("{x:.9e}")
}

/// Machine-readable report: one CSV row per test. Runtimes are left out so
/// reruns produce identical files.
pub fn reports_csv(reports: &[VerifyReport]) -> String {
    let mut out = String::from("name,estimate,se,target,z,verdict,negative_control,ok\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.name,
            fmt_num(r.estimate),
            fmt_num(r.se),
            fmt_num(r.target),
            fmt_num(r.z),
            match r.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            },
            r.negative_control,
            r.ok()
        );
    }
    out
}

pub fn reports_json(reports: &[VerifyReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Human-readable summary table.
pub fn summary_table(reports: &[VerifyReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!(
        "{:<width$}  {:>13}  {:>11}  {:>13}  {:>8}  {:>8}  result\n",
        "test", "estimate", "se", "target", "z", "time"
    );
    for r in reports {
        let tag = match (r.ok(), r.negative_control) {
            (true, false) => "ok",
            (true, true) => "ok (control failed as expected)",
            (false, false) => "FAILED",
            (false, true) => "FAILED (control passed)",
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>13.6e}  {:>11.3e}  {:>13.6e}  {:>8}  {:>7.1}s  {}",
            r.name,
            r.estimate,
            r.se,
            r.target,
            if r.se > 0.0 { format!("{:.2}", r.z) } else { "-".into() },
            r.runtime.as_secs_f64(),
            tag
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_controls_invert_the_verdict() {
        let r = VerifyReport::new("x", 1.0, 0.1, 0.0, Rule::ZWithin { limit: 3.0 });
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.ok());
        assert!(r.clone().negative().ok());
    }

    #[test]
    fn csv_is_stable() {
        let r = vec![
            VerifyReport::new("a", 0.5, 0.01, 0.5, Rule::Tolerance { tol: 1e-6 }).timed(Duration::from_secs(3)),
            VerifyReport::new("b", 2.0, 0.0, 1.0, Rule::Above),
        ];
        let mut r2 = r.clone();
        r2[0].runtime = Duration::from_secs(9);
        assert_eq!(reports_csv(&r), reports_csv(&r2));
        assert!(reports_csv(&r).lines().nth(2).unwrap().ends_with("pass,false,true"));
    }

    #[test]
    fn unknown_suite_is_a_config_error() {
        let c = ModelConfig::three_name(0.3, 0.01);
        assert!(matches!(run_suite("nope", &c, SuiteRun::new(1)), Err(DgcError::Config(_))));
    }
}
