//! Wrong-way-risk TVA on one CDS bought by the bank from its counterparty.
//!
//! Only the counterparty-default leg is priced (CVA): on {τ_0 < τ_{−1},
//! τ_0 ≤ T} the bank loses (1 − R_c) of the positive part of the CDS value at
//! τ_0. The true exposure values the CDS with the counterparty default known;
//! the fake exposure uses the value just before it.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{DgcError, Result};
use crate::intensity::{cds_clean_value, par_spread, CdsContract, Scope};
use crate::model::{index_of, ModelConfig, PortfolioState, BANK, COUNTERPARTY};
use crate::simulate::{bridge_state, run_indexed, sample_terminal, SeedSpec};
use crate::stats;
use crate::verify::{Rule, VerifyReport, Z_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TvaMode {
    True,
    Fake,
}

impl TvaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TvaMode::True => "true",
            TvaMode::Fake => "fake",
        }
    }
}

/// Parses `true`, `fake` or `both`.
pub fn parse_modes(s: &str) -> Result<Vec<TvaMode>> {
    match s {
        "true" => Ok(vec![TvaMode::True]),
        "fake" => Ok(vec![TvaMode::Fake]),
        "both" => Ok(vec![TvaMode::True, TvaMode::Fake]),
        _ => Err(DgcError::Config(format!("mode `{s}`: expected true, fake or both"))),
    }
}

impl FromStr for TvaMode {
    type Err = DgcError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "true" => Ok(TvaMode::True),
            "fake" => Ok(TvaMode::Fake),
            _ => Err(DgcError::Config(format!("mode `{s}`: expected true or fake"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TvaRunSpec {
    pub rho_grid: Vec<f64>,
    pub bank_hazards: Vec<f64>,
    /// `spread = None` uses the par spread at time 0.
    pub contract: CdsContract,
    pub spread: Option<f64>,
    pub counterparty_recovery: f64,
    pub modes: Vec<TvaMode>,
    pub paths: u64,
    pub seed: u64,
    pub parallelism: usize,
}

impl Default for TvaRunSpec {
    fn default() -> Self {
        Self {
            rho_grid: vec![0.0, 0.2, 0.4, 0.6, 0.8],
            bank_hazards: vec![0.005, 0.01, 0.02],
            contract: CdsContract::default(),
            spread: None,
            counterparty_recovery: 0.4,
            modes: vec![TvaMode::True, TvaMode::Fake],
            paths: 50_000,
            seed: 20_240_601,
            parallelism: 0,
        }
    }
}

impl TvaRunSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rho_grid.is_empty() || self.rho_grid.iter().any(|r| !(0.0..1.0).contains(r)) {
            return Err(DgcError::invalid("rho_grid", "values must lie in [0, 1)"));
        }
        if self.bank_hazards.is_empty() || self.bank_hazards.iter().any(|l| !(*l > 0.0)) {
            return Err(DgcError::invalid("bank_hazards", "values must be positive"));
        }
        if self.modes.is_empty() {
            return Err(DgcError::invalid("modes", "need at least one mode"));
        }
        if self.paths < 2 {
            return Err(DgcError::invalid("paths", "need at least two paths"));
        }
        if !(0.0..=1.0).contains(&self.counterparty_recovery) {
            return Err(DgcError::invalid("counterparty_recovery", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvaRow {
    pub rho: f64,
    pub lambda_bank: f64,
    pub mode: TvaMode,
    pub tva: f64,
    pub se: f64,
}

/// Discounted loss on one draw, per mode, given the state at τ_0.
fn losses(
    config: &ModelConfig,
    at_default: &PortfolioState,
    contract: &CdsContract,
    spec: &TvaRunSpec,
) -> Result<Vec<f64>> {
    let tau = at_default.t;
    let scale = (-contract.rate * tau).exp() * (1.0 - spec.counterparty_recovery);
    spec.modes
        .iter()
        .map(|mode| {
            let value = match mode {
                TvaMode::True => cds_clean_value(config, at_default, contract, Scope::G)?,
                TvaMode::Fake => {
                    let mut before = at_default.clone();
                    before.defaults[index_of(COUNTERPARTY)] = None;
                    cds_clean_value(config, &before, contract, Scope::G)?
                }
            };
            Ok(scale * value.max(0.0))
        })
        .collect()
}

/// TVA per (ϱ, λ_{−1}, mode). Rows follow the order of the grids.
pub fn run_tva(spec: &TvaRunSpec, config: &ModelConfig) -> Result<Vec<TvaRow>> {
    spec.validate()?;
    let seed = SeedSpec::new(spec.seed);
    let mut rows = Vec::new();
    for &lambda_bank in &spec.bank_hazards {
        for &rho in &spec.rho_grid {
            let mut c = config.with_rho(rho)?;
            c.hazards[index_of(BANK)] = lambda_bank;
            c.validate()?;
            let mut contract = spec.contract;
            contract.spread = match spec.spread {
                Some(s) => s,
                None => par_spread(&c, &PortfolioState::initial(&c), &contract, Scope::G)?,
            };
            let per_path: Result<Vec<Vec<f64>>> = run_indexed(spec.paths, spec.parallelism, |i| {
                let mut rng = seed.rng(i);
                let draw = sample_terminal(&c, &mut rng);
                let tau = draw.tau[index_of(COUNTERPARTY)];
                if !(tau < draw.tau[index_of(BANK)] && tau <= contract.maturity) {
                    return Ok(vec![0.0; spec.modes.len()]);
                }
                let state = bridge_state(&c, &draw, tau, &mut rng);
                losses(&c, &state, &contract, spec)
            })
            .into_iter()
            .collect();
            let per_path = per_path?;
            for (m, mode) in spec.modes.iter().enumerate() {
                let col: Vec<f64> = per_path.iter().map(|r| r[m]).collect();
                let (tva, se) = stats::mean_and_se(&col);
                if !(tva.is_finite() && se.is_finite()) {
                    return Err(DgcError::Numerical(format!("TVA not finite at rho = {rho}")));
                }
                rows.push(TvaRow {
                    rho,
                    lambda_bank,
                    mode: *mode,
                    tva,
                    se,
                });
            }
        }
    }
    Ok(rows)
}

fn find(rows: &[TvaRow], lambda: f64, rho: f64, mode: TvaMode) -> Option<&TvaRow> {
    rows.iter()
        .find(|r| r.lambda_bank == lambda && r.rho == rho && r.mode == mode)
}

/// Qualitative pattern per bank hazard: true = fake at ϱ = 0, true TVA
/// nondecreasing in ϱ (at most one inversion, within 3 SE), and fake/true at
/// the largest ϱ at most 0.5. Needs both modes in `rows`.
pub fn pattern_reports(rows: &[TvaRow]) -> Vec<VerifyReport> {
    let mut lambdas: Vec<f64> = Vec::new();
    let mut rhos: Vec<f64> = Vec::new();
    for r in rows {
        if !lambdas.contains(&r.lambda_bank) {
            lambdas.push(r.lambda_bank);
        }
        if !rhos.contains(&r.rho) {
            rhos.push(r.rho);
        }
    }
    rhos.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for &l in &lambdas {
        let label = format!("tva/lambda_bank={l}");
        if let (Some(t), Some(f)) = (find(rows, l, 0.0, TvaMode::True), find(rows, l, 0.0, TvaMode::Fake)) {
            out.push(VerifyReport::new(
                format!("{label}/true_vs_fake_rho=0"),
                t.tva - f.tva,
                t.se.hypot(f.se),
                0.0,
                Rule::ZWithin { limit: Z_LIMIT },
            ));
        }
        let curve: Vec<&TvaRow> = rhos.iter().filter_map(|&r| find(rows, l, r, TvaMode::True)).collect();
        let mut inversions = 0.0;
        let mut worst: f64 = 0.0;
        for w in curve.windows(2) {
            if w[1].tva < w[0].tva {
                inversions += 1.0;
                worst = worst.max((w[0].tva - w[1].tva) / w[0].se.hypot(w[1].se));
            }
        }
        out.push(VerifyReport::new(format!("{label}/true_inversions_over_rho"), inversions, 0.0, 1.0, Rule::AtMost));
        out.push(VerifyReport::new(format!("{label}/largest_inversion_in_se"), worst, 0.0, Z_LIMIT, Rule::AtMost));
        if let Some(&top) = rhos.last() {
            if let (Some(t), Some(f)) = (find(rows, l, top, TvaMode::True), find(rows, l, top, TvaMode::Fake)) {
                out.push(VerifyReport::new(
                    format!("{label}/fake_over_true_rho={top}"),
                    f.tva / t.tva,
                    0.0,
                    0.5,
                    Rule::AtMost,
                ));
            }
        }
    }
    out
}

pub const TVA_HEADER: &str = "rho,lambda_bank,mode,tva,se";

pub fn tva_csv(rows: &[TvaRow]) -> String {
    let mut out = format!("{TVA_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{:.4},{:.6},{},{:.10e},{:.10e}",
            r.rho,
            r.lambda_bank,
            r.mode.as_str(),
            r.tva,
            r.se
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(rhos: Vec<f64>) -> TvaRunSpec {
        TvaRunSpec {
            rho_grid: rhos,
            bank_hazards: vec![0.01],
            paths: 2_000,
            ..TvaRunSpec::default()
        }
    }

    #[test]
    fn independent_true_equals_fake() {
        let rows = run_tva(&small(vec![0.0]), &ModelConfig::three_name(0.0, 0.01)).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].tva - rows[1].tva).abs() <= 1e-12 * rows[0].tva);
        assert!(rows[0].tva > 0.0);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![TvaRow {
            rho: 0.2,
            lambda_bank: 0.01,
            mode: TvaMode::Fake,
            tva: 1.5e-4,
            se: 2e-6,
        }];
        assert_eq!(tva_csv(&rows), "rho,lambda_bank,mode,tva,se\n0.2000,0.010000,fake,1.5000000000e-4,2.0000000000e-6\n");
    }

    #[test]
    fn pattern_flags_a_large_inversion() {
        let row = |rho: f64, mode, tva: f64| TvaRow {
            rho,
            lambda_bank: 0.01,
            mode,
            tva,
            se: 1e-5,
        };
        let rows = vec![
            row(0.0, TvaMode::True, 1e-3),
            row(0.0, TvaMode::Fake, 1e-3),
            row(0.4, TvaMode::True, 2e-3),
            row(0.4, TvaMode::Fake, 1e-3),
            row(0.8, TvaMode::True, 1.5e-3),
            row(0.8, TvaMode::Fake, 1e-3),
        ];
        let reports = pattern_reports(&rows);
        let by = |suffix: &str| reports.iter().find(|r| r.name.ends_with(suffix)).unwrap();
        assert!(by("true_vs_fake_rho=0").ok());
        assert!(by("true_inversions_over_rho").ok());
        assert!(!by("largest_inversion_in_se").ok());
        assert!(!by("fake_over_true_rho=0.8").ok());
    }

    #[test]
    fn modes_parse() {
        assert_eq!(parse_modes("both").unwrap().len(), 2);
        assert!(parse_modes("maybe").is_err());
    }
}
