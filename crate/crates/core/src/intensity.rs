//! Closed-form intensities, drifts, the Azéma supermartingale, ν and CDS values.
//!
//! Every quantity is read off one factor integration over a family of names.
//! Three families are used:
//! - `Full`: the G family, I = all defaulted names, J = all alive names.
//! - `Reference`: the F̄ family over N*. The bank and counterparty stay in the
//!   family as unconstrained coordinates.
//! - `Reduced`: the F̃ family, J* ∪ {−1, 0} constrained, with I* coefficients.
//!
//! In both F families defaults of −1 and 0 are ignored.

use serde::Serialize;

use crate::error::{DgcError, Result};
use crate::gaussian::equicorr::orthant_unchecked;
use crate::gaussian::{ExtReal, OrthantIntegral};
use crate::model::{coefs, index_of, name_at, CoefSet, ModelConfig, Name, PortfolioState, BANK, COUNTERPARTY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scope {
    G,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Full,
    Reference,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Defaulted,
    Constrained,
    Free,
}

/// One evaluated family at time t.
#[derive(Debug, Clone)]
pub struct Family {
    pub kind: FamilyKind,
    pub t: f64,
    pub coef: CoefSet,
    /// λ^I Σ_{i∈I} m̄^i/α
    pub shift: f64,
    pub orthant: OrthantIntegral,
    roles: Vec<Role>,
    residuals: Vec<f64>,
    alpha: f64,
    varsigma: f64,
}

fn roles_for(config: &ModelConfig, state: &PortfolioState, kind: FamilyKind) -> Vec<Role> {
    (0..config.name_count())
        .map(|idx| {
            let name = name_at(idx);
            let core = name == BANK || name == COUNTERPARTY;
            match kind {
                FamilyKind::Full if state.defaults[idx].is_some() => Role::Defaulted,
                FamilyKind::Full => Role::Constrained,
                FamilyKind::Reference if core => Role::Free,
                FamilyKind::Reduced if core => Role::Constrained,
                _ if state.defaults[idx].is_some() => Role::Defaulted,
                _ => Role::Constrained,
            }
        })
        .collect()
}

/// Evaluates a family. `horizon` optionally replaces u = t by u = s for one
/// constrained name (numerators of conditional survival probabilities).
pub fn evaluate_family(
    config: &ModelConfig,
    state: &PortfolioState,
    kind: FamilyKind,
    horizon: Option<(Name, f64)>,
) -> Result<Family> {
    let roles = roles_for(config, state, kind);
    let t = state.t;
    let alpha = config.alpha(t);
    let defaulted = roles.iter().filter(|r| **r == Role::Defaulted).count();
    let coef = coefs(defaulted, config.rho_copula);
    let mut residuals = vec![0.0; roles.len()];
    let mut sum = 0.0;
    for (idx, role) in roles.iter().enumerate() {
        if *role == Role::Defaulted {
            let r = state.residual(name_at(idx))?;
            residuals[idx] = r;
            sum += r;
        }
    }
    let shift = coef.lambda_i * sum / alpha;
    let z: Vec<ExtReal> = roles
        .iter()
        .enumerate()
        .map(|(idx, role)| {
            if *role != Role::Constrained {
                return ExtReal::NegInf;
            }
            let name = name_at(idx);
            let u = match horizon {
                Some((j, s)) if j == name => s,
                _ => t,
            };
            config.h(name, u).affine(1.0 / alpha, -state.m[idx] / alpha - shift)
        })
        .collect();
    let orthant = orthant_unchecked(&z, coef.rho_i, coef.sigma_i, &config.quadrature)?;
    Ok(Family {
        kind,
        t,
        coef,
        shift,
        orthant,
        roles,
        residuals,
        alpha,
        varsigma: config.varsigma(t),
    })
}

impl Family {
    pub fn log_survival(&self) -> f64 {
        self.orthant.log_survival
    }

    pub fn is_constrained(&self, name: Name) -> bool {
        self.roles[index_of(name)] == Role::Constrained
    }

    pub fn is_defaulted(&self, name: Name) -> bool {
        self.roles[index_of(name)] == Role::Defaulted
    }

    /// ψ^j of the family; zero for names outside the constraint.
    pub fn psi(&self, name: Name) -> f64 {
        self.orthant.hazards[index_of(name)]
    }

    /// γ^j = 1{j alive} ḣ_j(t)/α(t) ψ^j. At t = 0 the product is replaced by
    /// its limit λ_j.
    pub fn gamma(&self, config: &ModelConfig, j: Name) -> f64 {
        if !self.is_constrained(j) {
            return 0.0;
        }
        if self.t == 0.0 {
            return config.hazard(j);
        }
        config.h_dot(j, self.t) / self.alpha * self.psi(j)
    }

    /// β^k: (ς/α)(m̄^k/α) for defaulted k, (ς/α)(shift + E[ξ_k | A]) otherwise.
    pub fn beta(&self, k: Name) -> f64 {
        let idx = index_of(k);
        let inner = match self.roles[idx] {
            Role::Defaulted => self.residuals[idx] / self.alpha,
            _ => self.shift + self.orthant.conditional_mean(idx),
        };
        self.varsigma / self.alpha * inner
    }
}

fn require_alive(state: &PortfolioState, j: Name, scope: Scope) -> Result<()> {
    let ignored = scope == Scope::F && (j == BANK || j == COUNTERPARTY);
    if state.is_defaulted(j) && !ignored {
        return Err(DgcError::invalid("j", format!("name {j} already defaulted")));
    }
    Ok(())
}

fn require_reference(j: Name) -> Result<()> {
    if j < 1 {
        return Err(DgcError::invalid("j", format!("name {j} is not a reference name")));
    }
    Ok(())
}

/// Q(τ_j > s | information at t) as a ratio of two orthant probabilities.
pub fn conditional_survival(
    config: &ModelConfig,
    state: &PortfolioState,
    j: Name,
    s: f64,
    scope: Scope,
) -> Result<f64> {
    let kind = match scope {
        Scope::G => FamilyKind::Full,
        Scope::F => {
            require_reference(j)?;
            FamilyKind::Reference
        }
    };
    require_alive(state, j, scope)?;
    if s < state.t {
        return Err(DgcError::invalid("s", format!("{s} precedes t = {}", state.t)));
    }
    if s == state.t {
        return Ok(1.0);
    }
    let den = evaluate_family(config, state, kind, None)?;
    survival_given(config, state, &den, j, s)
}

fn survival_given(config: &ModelConfig, state: &PortfolioState, den: &Family, j: Name, s: f64) -> Result<f64> {
    if s <= state.t {
        return Ok(1.0);
    }
    let num = evaluate_family(config, state, den.kind, Some((j, s)))?;
    Ok((num.log_survival() - den.log_survival()).exp().min(1.0))
}

pub fn gamma_g(config: &ModelConfig, state: &PortfolioState, j: Name) -> Result<f64> {
    Ok(evaluate_family(config, state, FamilyKind::Full, None)?.gamma(config, j))
}

pub fn gamma_f_bar(config: &ModelConfig, state: &PortfolioState, j: Name) -> Result<f64> {
    require_reference(j)?;
    Ok(evaluate_family(config, state, FamilyKind::Reference, None)?.gamma(config, j))
}

pub fn gamma_f_tilde(config: &ModelConfig, state: &PortfolioState, j: Name) -> Result<f64> {
    require_reference(j)?;
    Ok(evaluate_family(config, state, FamilyKind::Reduced, None)?.gamma(config, j))
}

pub fn beta_g(config: &ModelConfig, state: &PortfolioState, k: Name) -> Result<f64> {
    Ok(evaluate_family(config, state, FamilyKind::Full, None)?.beta(k))
}

pub fn beta_f_bar(config: &ModelConfig, state: &PortfolioState, k: Name) -> Result<f64> {
    Ok(evaluate_family(config, state, FamilyKind::Reference, None)?.beta(k))
}

pub fn beta_f_tilde(config: &ModelConfig, state: &PortfolioState, k: Name) -> Result<f64> {
    Ok(evaluate_family(config, state, FamilyKind::Reduced, None)?.beta(k))
}

/// S_t = Φ over J* ∪ {−1, 0} divided by Φ over J*.
pub fn azema_s(config: &ModelConfig, state: &PortfolioState) -> Result<f64> {
    let reduced = evaluate_family(config, state, FamilyKind::Reduced, None)?;
    let reference = evaluate_family(config, state, FamilyKind::Reference, None)?;
    Ok(azema_from(&reduced, &reference))
}

pub fn azema_from(reduced: &Family, reference: &Family) -> f64 {
    (reduced.log_survival() - reference.log_survival()).exp().min(1.0)
}

/// Coefficients of the continuous martingale part of ν = S^c/S:
/// dν^c = Σ_i v_i dm^i, with dm^i compensated by the F drift.
#[derive(Debug, Clone, PartialEq)]
pub struct NuCoefficients {
    /// v_i indexed by `name + 1`.
    pub v: Vec<f64>,
}

pub fn nu_coefficients(reduced: &Family, reference: &Family) -> NuCoefficients {
    let len = reduced.roles.len();
    let alpha = reduced.alpha;
    let mut v = vec![0.0; len];
    let mut total = 0.0;
    for idx in 0..len {
        if reduced.roles[idx] == Role::Constrained {
            let w = reduced.orthant.hazards[idx] - reference.orthant.hazards[idx];
            v[idx] = w / alpha;
            total += w;
        }
    }
    let lam = reduced.coef.lambda_i;
    for idx in 0..len {
        if reduced.roles[idx] == Role::Defaulted {
            v[idx] = -lam / alpha * total;
        }
    }
    NuCoefficients { v }
}

impl NuCoefficients {
    /// vᵀCv with C_il = ϱ + (1 − ϱ)δ_il; d⟨ν⟩ = ς² vᵀCv dt.
    pub fn quadratic_form(&self, rho: f64) -> f64 {
        let s: f64 = self.v.iter().sum();
        let sq: f64 = self.v.iter().map(|x| x * x).sum();
        rho * s * s + (1.0 - rho) * sq
    }

    /// Σ_i v_i C_ki; d⟨B^k, ν⟩ = ς Σ_i v_i C_ki dt.
    pub fn covariation_with(&self, k: Name, rho: f64) -> f64 {
        let s: f64 = self.v.iter().sum();
        rho * s + (1.0 - rho) * self.v[index_of(k)]
    }
}

/// Everything needed from the F families at one time point.
#[derive(Debug, Clone)]
pub struct ReducedSnapshot {
    pub reduced: Family,
    pub reference: Family,
    pub nu: NuCoefficients,
}

pub fn reduced_snapshot(config: &ModelConfig, state: &PortfolioState) -> Result<ReducedSnapshot> {
    let reduced = evaluate_family(config, state, FamilyKind::Reduced, None)?;
    let reference = evaluate_family(config, state, FamilyKind::Reference, None)?;
    let nu = nu_coefficients(&reduced, &reference);
    Ok(ReducedSnapshot { reduced, reference, nu })
}

impl ReducedSnapshot {
    pub fn azema(&self) -> f64 {
        azema_from(&self.reduced, &self.reference)
    }

    /// Increment of ν^c over [t, t + dt] for running-integral increments dm,
    /// each compensated by its F drift ∫ς β̄ ≈ (β̄/ς) ∫ς².
    pub fn nu_increment(&self, config: &ModelConfig, dt: f64, dm: &[f64]) -> f64 {
        let t = self.reduced.t;
        self.nu_increment_on(config, t, t + dt, dm)
    }

    /// As [`Self::nu_increment`] over [t0, t1] ⊂ [t, ∞), coefficients frozen at t.
    pub fn nu_increment_on(&self, config: &ModelConfig, t0: f64, t1: f64, dm: &[f64]) -> f64 {
        let s2 = config.int_varsigma_sq(t0, t1);
        let vs = self.reduced.varsigma;
        dm.iter()
            .enumerate()
            .map(|(idx, d)| self.nu.v[idx] * (d - self.reference.beta(name_at(idx)) / vs * s2))
            .sum()
    }
}

/// Discretised increment of the continuous part of ν over [t, t + dt].
pub fn nu_increment(config: &ModelConfig, state_f: &PortfolioState, dt: f64, dm: &[f64]) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(DgcError::invalid("dt", "must be positive"));
    }
    if dm.len() != config.name_count() {
        return Err(DgcError::invalid("dm", "need one increment per name"));
    }
    Ok(reduced_snapshot(config, state_f)?.nu_increment(config, dt, dm))
}

#[derive(Debug, Clone, Serialize)]
pub struct NameIntensity {
    pub name: Name,
    pub gamma_g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_f_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_f_tilde: Option<f64>,
    pub beta_g: f64,
    pub beta_f_bar: f64,
    pub beta_f_tilde: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntensityReport {
    pub t: f64,
    pub names: Vec<NameIntensity>,
    pub azema: f64,
}

pub fn intensity_report(config: &ModelConfig, state: &PortfolioState) -> Result<IntensityReport> {
    state.validate(config)?;
    let full = evaluate_family(config, state, FamilyKind::Full, None)?;
    let snap = reduced_snapshot(config, state)?;
    let names = config
        .names()
        .map(|k| {
            let reference = k >= 1;
            NameIntensity {
                name: k,
                gamma_g: full.gamma(config, k),
                gamma_f_bar: reference.then(|| snap.reference.gamma(config, k)),
                gamma_f_tilde: reference.then(|| snap.reduced.gamma(config, k)),
                beta_g: full.beta(k),
                beta_f_bar: snap.reference.beta(k),
                beta_f_tilde: snap.reduced.beta(k),
            }
        })
        .collect();
    Ok(IntensityReport {
        t: state.t,
        names,
        azema: snap.azema(),
    })
}

/// CDS on one reference name with quarterly premiums, flat discounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdsContract {
    pub reference: Name,
    pub spread: f64,
    pub recovery: f64,
    pub maturity: f64,
    pub rate: f64,
    pub payments_per_year: u32,
}

impl Default for CdsContract {
    fn default() -> Self {
        Self {
            reference: 1,
            spread: 0.006,
            recovery: 0.4,
            maturity: 10.0,
            rate: 0.02,
            payments_per_year: 4,
        }
    }
}

impl CdsContract {
    pub fn payment_dates(&self) -> Vec<f64> {
        let count = (self.maturity * self.payments_per_year as f64).round() as usize;
        (1..=count)
            .map(|k| k as f64 / self.payments_per_year as f64)
            .collect()
    }
}

/// Protection leg minus premium leg per unit notional, seen by the protection
/// buyer at the state's time. Zero once the reference name has defaulted.
pub fn cds_clean_value(
    config: &ModelConfig,
    state: &PortfolioState,
    contract: &CdsContract,
    scope: Scope,
) -> Result<f64> {
    Ok(cds_legs(config, state, contract, scope)?.value(contract.spread))
}

#[derive(Debug, Clone, Copy)]
struct Legs {
    protection: f64,
    annuity: f64,
}

impl Legs {
    fn value(&self, spread: f64) -> f64 {
        self.protection - spread * self.annuity
    }
}

fn cds_legs(config: &ModelConfig, state: &PortfolioState, contract: &CdsContract, scope: Scope) -> Result<Legs> {
    let j = contract.reference;
    if !config.is_name(j) {
        return Err(DgcError::invalid("reference", format!("unknown name {j}")));
    }
    let t = state.t;
    if state.is_defaulted(j) || t >= contract.maturity {
        return Ok(Legs {
            protection: 0.0,
            annuity: 0.0,
        });
    }
    let kind = match scope {
        Scope::G => FamilyKind::Full,
        Scope::F => {
            require_reference(j)?;
            FamilyKind::Reference
        }
    };
    let den = evaluate_family(config, state, kind, None)?;
    let mut prev_date = t;
    let mut prev_q = 1.0;
    let mut protection = 0.0;
    let mut annuity = 0.0;
    for date in contract.payment_dates().into_iter().filter(|&d| d > t) {
        let q = survival_given(config, state, &den, j, date)?;
        let mid = 0.5 * (prev_date + date);
        protection += (-contract.rate * (mid - t)).exp() * (prev_q - q);
        annuity += (date - prev_date) * (-contract.rate * (date - t)).exp() * q;
        prev_date = date;
        prev_q = q;
    }
    Ok(Legs {
        protection: (1.0 - contract.recovery) * protection,
        annuity,
    })
}

/// Spread that sets the clean value to zero, by bisection on the pricer.
pub fn par_spread(config: &ModelConfig, state: &PortfolioState, contract: &CdsContract, scope: Scope) -> Result<f64> {
    let legs = cds_legs(config, state, contract, scope)?;
    if legs.annuity <= 0.0 {
        return Err(DgcError::invalid("contract", "no remaining premium payments"));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if legs.value(hi) > 0.0 {
        return Err(DgcError::Numerical("par spread above 100%".into()));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if legs.value(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
