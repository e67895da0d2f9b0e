//! Model parameters, names, calibration functions and the portfolio state.
//!
//! Names run over N = {−1, 0, 1, …, n}: −1 is the bank, 0 its counterparty
//! and 1..n the reference names. Per-name vectors are indexed by `name + 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{DgcError, Result};
use crate::gaussian::normal::{inverse_log_survival, log_survival, mills_hazard};
use crate::gaussian::{ExtReal, QuadratureConfig};

pub type Name = i32;

pub const BANK: Name = -1;
pub const COUNTERPARTY: Name = 0;

#[inline]
pub fn index_of(name: Name) -> usize {
    (name + 1) as usize
}

#[inline]
pub fn name_at(index: usize) -> Name {
    index as Name - 1
}

pub const DEFAULT_KAPPA: f64 = 0.25;
pub const DEFAULT_HORIZON: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub n: usize,
    pub rho_copula: f64,
    pub kappa: f64,
    /// λ_i indexed by `name + 1`.
    pub hazards: Vec<f64>,
    pub horizon: f64,
    pub seeds: BTreeMap<String, u64>,
    pub quadrature: QuadratureConfig,
}

impl ModelConfig {
    pub fn new(rho_copula: f64, kappa: f64, hazards: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            n: hazards.len().saturating_sub(2),
            rho_copula,
            kappa,
            hazards,
            horizon: DEFAULT_HORIZON,
            seeds: BTreeMap::new(),
            quadrature: QuadratureConfig::simulation(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Bank, counterparty and one reference name with the demo hazards.
    pub fn three_name(rho_copula: f64, lambda_bank: f64) -> Self {
        Self::new(rho_copula, DEFAULT_KAPPA, vec![lambda_bank, 0.01, 0.01]).expect("valid demo config")
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rho_copula) {
            return Err(DgcError::invalid("rho_copula", format!("{} not in [0, 1)", self.rho_copula)));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(DgcError::invalid("kappa", format!("{} must be positive", self.kappa)));
        }
        if self.hazards.len() < 3 || self.hazards.len() != self.n + 2 {
            return Err(DgcError::invalid("hazards", "need names -1, 0 and 1..n"));
        }
        for (i, &l) in self.hazards.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(DgcError::invalid(format!("hazards.{}", name_at(i)), format!("{l} must be positive")));
            }
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(DgcError::invalid("horizon", "must be positive"));
        }
        self.quadrature.validate()
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        let mut c = self.clone();
        c.rho_copula = rho;
        c.validate()?;
        Ok(c)
    }

    pub fn name_count(&self) -> usize {
        self.n + 2
    }

    pub fn names(&self) -> impl Iterator<Item = Name> {
        -1..=(self.n as Name)
    }

    pub fn reference_names(&self) -> impl Iterator<Item = Name> {
        1..=(self.n as Name)
    }

    pub fn hazard(&self, name: Name) -> f64 {
        self.hazards[index_of(name)]
    }

    pub fn is_name(&self, name: Name) -> bool {
        name >= -1 && name <= self.n as Name
    }

    /// α(t) = e^{−κt/2}, the L² tail of ς beyond t.
    pub fn alpha(&self, t: f64) -> f64 {
        (-0.5 * self.kappa * t).exp()
    }

    /// ς(t) = √κ e^{−κt/2}.
    pub fn varsigma(&self, t: f64) -> f64 {
        self.kappa.sqrt() * (-0.5 * self.kappa * t).exp()
    }

    /// ∫_s^{s'} ς².
    pub fn int_varsigma_sq(&self, s: f64, s2: f64) -> f64 {
        (-self.kappa * s).exp() - (-self.kappa * s2).exp()
    }

    /// ∫_s^{s'} ς.
    pub fn int_varsigma(&self, s: f64, s2: f64) -> f64 {
        2.0 / self.kappa.sqrt() * ((-0.5 * self.kappa * s).exp() - (-0.5 * self.kappa * s2).exp())
    }

    /// h_i with Φ(h_i(t)) = e^{−λ_i t}; h_i(0) = −∞.
    pub fn h(&self, name: Name, t: f64) -> ExtReal {
        if t <= 0.0 {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(inverse_log_survival(-self.hazard(name) * t))
        }
    }

    /// Finite h for t > 0.
    pub fn h_finite(&self, name: Name, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        inverse_log_survival(-self.hazard(name) * t)
    }

    /// h_i⁻¹(x) = −ln Φ(x)/λ_i.
    pub fn h_inverse(&self, name: Name, x: f64) -> f64 {
        -log_survival(x) / self.hazard(name)
    }

    /// ḣ_i(t) = λ_i e^{−λ_i t}/φ(h_i(t)) = λ_i/ψ(h_i(t)); infinite at t = 0.
    pub fn h_dot(&self, name: Name, t: f64) -> f64 {
        match self.h(name, t) {
            ExtReal::NegInf => f64::INFINITY,
            ExtReal::Finite(h) => self.hazard(name) / mills_hazard(h),
        }
    }

    pub fn seed(&self, key: &str) -> Option<u64> {
        self.seeds.get(key).copied()
    }
}

/// Coefficients of the conditional family given |I| defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefSet {
    pub rho_i: f64,
    pub sigma_i: f64,
    pub lambda_i: f64,
}

pub fn coefs(i_size: usize, rho_copula: f64) -> CoefSet {
    let k = i_size as f64;
    let r = rho_copula;
    let rho_i = r / (k * r + 1.0);
    let sigma_sq = (1.0 - r) * (k * r + 1.0) / (k * r + 1.0 - r);
    let lambda_i = r / ((k - 1.0) * r + 1.0);
    CoefSet {
        rho_i,
        sigma_i: sigma_sq.sqrt(),
        lambda_i,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefaultRecord {
    pub tau: f64,
    /// m̄^i_t = h_i(τ_i) − m^i_t
    pub residual: Option<f64>,
}

/// Information at time t: the running integrals m^i_t of every name and
/// the defaults that occurred by t.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioState {
    pub t: f64,
    /// m^i_t indexed by `name + 1`.
    pub m: Vec<f64>,
    /// Default record per name, indexed by `name + 1`.
    pub defaults: Vec<Option<DefaultRecord>>,
}

impl PortfolioState {
    pub fn initial(config: &ModelConfig) -> Self {
        Self {
            t: 0.0,
            m: vec![0.0; config.name_count()],
            defaults: vec![None; config.name_count()],
        }
    }

    pub fn at(t: f64, m: Vec<f64>) -> Self {
        let len = m.len();
        Self {
            t,
            m,
            defaults: vec![None; len],
        }
    }

    pub fn m_of(&self, name: Name) -> f64 {
        self.m[index_of(name)]
    }

    pub fn is_defaulted(&self, name: Name) -> bool {
        self.defaults[index_of(name)].is_some()
    }

    pub fn default_of(&self, name: Name) -> Option<DefaultRecord> {
        self.defaults[index_of(name)]
    }

    pub fn residual(&self, name: Name) -> Result<f64> {
        match self.defaults[index_of(name)] {
            Some(DefaultRecord {
                residual: Some(r), ..
            }) => Ok(r),
            _ => Err(DgcError::MissingResidual { name }),
        }
    }

    /// Records a default with the residual derived from h_i(τ_i) − m^i_t.
    pub fn record_default(&mut self, config: &ModelConfig, name: Name, tau: f64) {
        let residual = config.h_finite(name, tau) - self.m_of(name);
        self.defaults[index_of(name)] = Some(DefaultRecord {
            tau,
            residual: Some(residual),
        });
    }

    pub fn defaulted_names(&self) -> Vec<Name> {
        (0..self.defaults.len())
            .filter(|&i| self.defaults[i].is_some())
            .map(name_at)
            .collect()
    }

    /// The same information without the defaults of the bank and counterparty.
    pub fn reduced(&self) -> Self {
        let mut s = self.clone();
        s.defaults[index_of(BANK)] = None;
        s.defaults[index_of(COUNTERPARTY)] = None;
        s
    }

    pub fn validate(&self, config: &ModelConfig) -> Result<()> {
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(DgcError::invalid("t", "must be finite and nonnegative"));
        }
        if self.m.len() != config.name_count() || self.defaults.len() != config.name_count() {
            return Err(DgcError::invalid("m", format!("need one entry per name -1..={}", config.n)));
        }
        if let Some(i) = self.m.iter().position(|v| !v.is_finite()) {
            return Err(DgcError::invalid(format!("m.{}", name_at(i)), "must be finite"));
        }
        if self.t == 0.0 && self.m.iter().any(|&v| v != 0.0) {
            return Err(DgcError::invalid("m", "running integrals vanish at t = 0"));
        }
        let mut taus = Vec::new();
        for (i, d) in self.defaults.iter().enumerate() {
            if let Some(d) = d {
                let name = name_at(i);
                if !(d.tau > 0.0 && d.tau <= self.t) {
                    return Err(DgcError::invalid(
                        format!("defaults.{name}.tau"),
                        format!("{} not in (0, t = {}]", d.tau, self.t),
                    ));
                }
                if d.residual.is_none() {
                    return Err(DgcError::MissingResidual { name });
                }
                taus.push(d.tau);
            }
        }
        taus.sort_by(|a, b| a.total_cmp(b));
        if taus.windows(2).any(|w| w[0] == w[1]) {
            return Err(DgcError::invalid("defaults", "default times must be distinct"));
        }
        Ok(())
    }
}

/// Z^{j,I}_t(u) = (h_j(u) − m^j_t)/α(t) − λ^I Σ_{i∈I} m̄^i_t/α(t).
pub fn z_argument(config: &ModelConfig, state: &PortfolioState, j: Name, u: f64, set_i: &[Name]) -> Result<ExtReal> {
    if set_i.contains(&j) {
        return Err(DgcError::invalid("j", format!("name {j} belongs to I")));
    }
    let a = config.alpha(state.t);
    let lam = coefs(set_i.len(), config.rho_copula).lambda_i;
    let mut shift = 0.0;
    for &i in set_i {
        shift += state.residual(i)?;
    }
    Ok(config
        .h(j, u)
        .affine(1.0 / a, -(state.m_of(j) + lam * shift) / a))
}

// Config file schema.

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    rho_copula: toml::Spanned<f64>,
    #[serde(default)]
    kappa: Option<toml::Spanned<f64>>,
    hazards: toml::Spanned<BTreeMap<String, toml::Spanned<f64>>>,
    #[serde(default)]
    horizon: Option<toml::Spanned<f64>>,
    #[serde(default)]
    seeds: BTreeMap<String, u64>,
    #[serde(default)]
    quadrature: Option<QuadratureFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadratureFile {
    node_count: Option<usize>,
    domain_halfwidth: Option<f64>,
    refinement_tolerance: Option<f64>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn config_error(text: &str, span: std::ops::Range<usize>, field: &str, reason: impl std::fmt::Display) -> DgcError {
    DgcError::Config(format!("line {}: field `{field}`: {reason}", line_of(text, span.start)))
}

impl ModelConfig {
    /// Parses the TOML config. Hazard keys are `bank`/`-1`, `counterparty`/`0`
    /// and `1`..`n`; n is the number of reference names given.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| match e.span() {
            Some(span) => DgcError::Config(format!("line {}: {}", line_of(text, span.start), e.message())),
            None => DgcError::Config(e.message().to_string()),
        })?;
        let rho = *file.rho_copula.get_ref();
        if !(0.0..1.0).contains(&rho) {
            return Err(config_error(text, file.rho_copula.span(), "rho_copula", format!("{rho} not in [0, 1)")));
        }
        let kappa = match &file.kappa {
            Some(k) if !(*k.get_ref() > 0.0 && k.get_ref().is_finite()) => {
                return Err(config_error(text, k.span(), "kappa", "must be positive"));
            }
            Some(k) => *k.get_ref(),
            None => DEFAULT_KAPPA,
        };
        let horizon = match &file.horizon {
            Some(h) if !(*h.get_ref() > 0.0 && h.get_ref().is_finite()) => {
                return Err(config_error(text, h.span(), "horizon", "must be positive"));
            }
            Some(h) => *h.get_ref(),
            None => DEFAULT_HORIZON,
        };
        let table_span = file.hazards.span();
        let entries = file.hazards.into_inner();
        let mut by_name = BTreeMap::new();
        for (key, rate) in &entries {
            let field = format!("hazards.{key}");
            let name = parse_name(key).ok_or_else(|| config_error(text, rate.span(), &field, "unknown name"))?;
            let v = *rate.get_ref();
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_error(text, rate.span(), &field, format!("{v} must be positive")));
            }
            if by_name.insert(name, v).is_some() {
                return Err(config_error(text, rate.span(), &field, "name given twice"));
            }
        }
        let n = by_name.keys().filter(|&&k| k >= 1).count();
        for name in -1..=(n as Name) {
            if !by_name.contains_key(&name) {
                return Err(config_error(
                    text,
                    table_span.clone(),
                    &format!("hazards.{name}"),
                    "missing; names must be -1, 0 and 1..n",
                ));
            }
        }
        if n == 0 || by_name.len() != n + 2 {
            return Err(config_error(text, table_span, "hazards", "need -1, 0 and at least one reference name 1..n"));
        }
        let mut quadrature = QuadratureConfig::simulation();
        if let Some(q) = file.quadrature {
            if let Some(v) = q.node_count {
                quadrature.node_count = v;
            }
            if let Some(v) = q.domain_halfwidth {
                quadrature.domain_halfwidth = v;
            }
            if let Some(v) = q.refinement_tolerance {
                quadrature.refinement_tolerance = v;
            }
        }
        let cfg = Self {
            n,
            rho_copula: rho,
            kappa,
            hazards: by_name.into_values().collect(),
            horizon,
            seeds: file.seeds,
            quadrature,
        };
        cfg.validate().map_err(|e| DgcError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

// Serialized form: names as string keys.

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DefaultFile {
    tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    t: f64,
    m: BTreeMap<String, f64>,
    #[serde(default)]
    defaults: BTreeMap<String, DefaultFile>,
}

pub fn parse_name(key: &str) -> Option<Name> {
    match key {
        "bank" => Some(BANK),
        "counterparty" => Some(COUNTERPARTY),
        _ => key.parse().ok(),
    }
}

impl PortfolioState {
    pub fn to_json(&self) -> String {
        let file = StateFile {
            t: self.t,
            m: self
                .m
                .iter()
                .enumerate()
                .map(|(i, v)| (name_at(i).to_string(), *v))
                .collect(),
            defaults: self
                .defaults
                .iter()
                .enumerate()
                .filter_map(|(i, d)| {
                    d.map(|d| {
                        (
                            name_at(i).to_string(),
                            DefaultFile {
                                tau: d.tau,
                                residual: d.residual,
                            },
                        )
                    })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("state serializes")
    }

    /// Parses a state for `config`; unknown names and missing entries are
    /// reported with the offending field.
    pub fn from_json(text: &str, config: &ModelConfig) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)
            .map_err(|e| DgcError::Config(format!("state line {}, column {}: {e}", e.line(), e.column())))?;
        let mut state = PortfolioState {
            t: file.t,
            m: vec![f64::NAN; config.name_count()],
            defaults: vec![None; config.name_count()],
        };
        for (key, v) in &file.m {
            let name = parse_name(key)
                .filter(|n| config.is_name(*n))
                .ok_or_else(|| DgcError::invalid(format!("m.{key}"), "unknown name"))?;
            state.m[index_of(name)] = *v;
        }
        if let Some(i) = state.m.iter().position(|v| v.is_nan()) {
            return Err(DgcError::invalid(format!("m.{}", name_at(i)), "missing"));
        }
        for (key, d) in &file.defaults {
            let name = parse_name(key)
                .filter(|n| config.is_name(*n))
                .ok_or_else(|| DgcError::invalid(format!("defaults.{key}"), "unknown name"))?;
            if d.residual.is_none() {
                return Err(DgcError::invalid(
                    format!("defaults.{key}.residual"),
                    "defaulted name needs its residual m_bar",
                ));
            }
            state.defaults[index_of(name)] = Some(DefaultRecord {
                tau: d.tau,
                residual: d.residual,
            });
        }
        state.validate(config)?;
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::normal::survival;

    fn cfg() -> ModelConfig {
        ModelConfig::three_name(0.3, 0.02)
    }

    #[test]
    fn alpha_values() {
        let c = ModelConfig::new(0.0, 0.5, vec![0.1; 3]).unwrap();
        assert_eq!(c.alpha(0.0), 1.0);
        assert!((c.alpha(2.0) - 0.606_530_659_712_633_4).abs() < 1e-9);
        let mut prev = 1.0;
        for k in 1..200 {
            let a = c.alpha(k as f64 * 0.5);
            assert!(a > 0.0 && a < prev);
            prev = a;
        }
        for t in [0.3, 1.0, 4.0, 12.0] {
            let s = c.alpha(t).powi(2) + c.int_varsigma_sq(0.0, t);
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn varsigma_integrals_match_quadrature() {
        let c = cfg();
        let gl = crate::quadrature::GaussLegendre::new(20);
        let a = gl.integrate(0.7, 2.9, |u| c.varsigma(u));
        let b = gl.integrate(0.7, 2.9, |u| c.varsigma(u).powi(2));
        assert!((a - c.int_varsigma(0.7, 2.9)).abs() < 1e-14);
        assert!((b - c.int_varsigma_sq(0.7, 2.9)).abs() < 1e-14);
    }

    #[test]
    fn calibration_reproduces_exponential_marginals() {
        let c = ModelConfig::new(0.0, 0.25, vec![0.1, 0.03, 0.007]).unwrap();
        for name in c.names() {
            for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
                let h = c.h(name, t).finite().unwrap();
                let want = (-c.hazard(name) * t).exp();
                assert!(((survival(h) - want) / want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn h_reference_value_and_inverse() {
        let c = ModelConfig::new(0.0, 0.25, vec![0.1; 3]).unwrap();
        assert_eq!(c.h(1, 0.0), ExtReal::NegInf);
        // mpmath root of Φ(h) = e^{-0.5}
        let h = c.h(1, 5.0).finite().unwrap();
        assert!((h + 0.270_288_020_738_735_85).abs() < 1e-6);
        for t in [0.1, 1.0, 7.0] {
            let back = c.h_inverse(1, c.h_finite(1, t));
            assert!(((back - t) / t).abs() < 1e-10);
        }
    }

    #[test]
    fn h_dot_matches_difference_quotient() {
        let c = cfg();
        for t in [0.2, 1.0, 6.0] {
            let e = 1e-5;
            let fd = (c.h_finite(1, t + e) - c.h_finite(1, t - e)) / (2.0 * e);
            assert!(((c.h_dot(1, t) - fd) / fd).abs() < 1e-7);
        }
        assert_eq!(c.h_dot(1, 0.0), f64::INFINITY);
    }

    #[test]
    fn coefficient_formulas() {
        for k in 0..5 {
            let cs = coefs(k, 0.0);
            assert_eq!((cs.rho_i, cs.sigma_i, cs.lambda_i), (0.0, 1.0, 0.0));
        }
        let cs = coefs(2, 0.3);
        assert!((cs.rho_i - 0.1875).abs() < 1e-9);
        assert!((cs.sigma_i.powi(2) - 0.7 * 1.6 / 1.3).abs() < 1e-9);
        assert!((cs.sigma_i.powi(2) - 0.861_538_461_5).abs() < 1e-9);
        assert!((cs.lambda_i - 0.230_769_230_8).abs() < 1e-9);
        for k in 1..6 {
            for r in [0.1, 0.5, 0.9] {
                let cs = coefs(k, r);
                assert!(cs.sigma_i < 1.0 && cs.rho_i < r);
            }
        }
    }

    #[test]
    fn z_argument_cases() {
        let c = cfg();
        let mut s = PortfolioState::initial(&c);
        s.t = 1.5;
        let z = z_argument(&c, &s, 1, 3.0, &[]).unwrap();
        assert_eq!(z.finite().unwrap(), c.h_finite(1, 3.0) / c.alpha(1.5));
        assert_eq!(z_argument(&c, &s, 1, 0.0, &[]).unwrap(), ExtReal::NegInf);
        s.defaults[index_of(0)] = Some(DefaultRecord {
            tau: 1.0,
            residual: None,
        });
        assert_eq!(
            z_argument(&c, &s, 1, 2.0, &[0]).unwrap_err(),
            DgcError::MissingResidual { name: 0 }
        );
    }

    #[test]
    fn state_round_trip_is_exact() {
        let c = cfg();
        let mut s = PortfolioState::at(2.25, vec![0.1 + 0.2, -1.0 / 3.0, 7e-17]);
        s.record_default(&c, 1, 1.234_567_890_123);
        let back = PortfolioState::from_json(&s.to_json(), &c).unwrap();
        assert_eq!(back, s);
        for (a, b) in back.m.iter().zip(&s.m) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn state_without_residual_names_the_field() {
        let c = cfg();
        let text = r#"{"t": 1.0, "m": {"-1": 0, "0": 0, "1": 0.2}, "defaults": {"1": {"tau": 0.5}}}"#;
        let e = PortfolioState::from_json(text, &c).unwrap_err();
        assert!(e.to_string().contains("defaults.1.residual"), "{e}");
    }

    #[test]
    fn config_file_parses() {
        let text = "rho_copula = 0.6\nkappa = 0.5\n\n[hazards]\nbank = 0.02\ncounterparty = 0.01\n\"1\" = 0.03\n\n[seeds]\nverify = 7\n";
        let c = ModelConfig::from_toml(text).unwrap();
        assert_eq!(c.n, 1);
        assert_eq!(c.hazards, vec![0.02, 0.01, 0.03]);
        assert_eq!(c.horizon, DEFAULT_HORIZON);
        assert_eq!(c.seed("verify"), Some(7));
    }

    #[test]
    fn config_errors_carry_line_and_field() {
        let bad_rho = "kappa = 0.25\nrho_copula = 1.5\n[hazards]\n-1 = 0.01\n0 = 0.01\n1 = 0.01\n";
        let e = ModelConfig::from_toml(bad_rho).unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("rho_copula"), "{e}");
        let bad_rate = "rho_copula = 0.1\n[hazards]\n-1 = 0.01\n0 = -0.01\n1 = 0.01\n";
        let e = ModelConfig::from_toml(bad_rate).unwrap_err().to_string();
        assert!(e.contains("line 4") && e.contains("hazards.0"), "{e}");
        let unknown = "rho_copula = 0.1\nsigma = 2\n[hazards]\n-1 = 0.01\n0 = 0.01\n1 = 0.01\n";
        let e = ModelConfig::from_toml(unknown).unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("sigma"), "{e}");
        let missing = "rho_copula = 0.1\n[hazards]\n-1 = 0.01\n1 = 0.01\n";
        let e = ModelConfig::from_toml(missing).unwrap_err().to_string();
        assert!(e.contains("hazards.0"), "{e}");
    }
}
