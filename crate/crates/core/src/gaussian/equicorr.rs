//! Orthant survival of an equicorrelated Gaussian family and its derivatives.
//!
//! With ξ_j = σ(√ρ Y + √(1−ρ) ε_j) the orthant event {ξ_j > z_j, j ∈ J}
//! factorises given the common factor Y = y, each coordinate contributing
//! Φ(a_j(y)) with a_j(y) = (z_j − σ√ρ y)/(σ√(1−ρ)). Everything here is an
//! integral of Γ(y) = φ(y)Π_j Φ(a_j(y)) against 1, y or ψ(a_j(y)).
//!
//! Γ is log-concave, so the integrals are taken by a trapezoid rule centred
//! on the mode of Γ and scaled by its curvature there, accumulated in log
//! space. Successive halvings of the step give the refinement check.

use serde::{Deserialize, Serialize};

use super::normal::{log_pdf, log_survival_and_hazard, mills_hazard_slope};
use super::{normal, ExtReal};
use crate::error::{DgcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquicorrSpec {
    pub size: usize,
    pub rho: f64,
    pub sigma: f64,
}

impl EquicorrSpec {
    pub fn new(size: usize, rho: f64, sigma: f64) -> Result<Self> {
        if size < 1 {
            return Err(DgcError::invalid("size", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(DgcError::invalid("rho", format!("{rho} not in [0, 1)")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(DgcError::invalid("sigma", format!("{sigma} not positive")));
        }
        Ok(Self { size, rho, sigma })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub node_count: usize,
    pub domain_halfwidth: f64,
    pub refinement_tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            node_count: 128,
            domain_halfwidth: 8.0,
            refinement_tolerance: 1e-9,
        }
    }
}

/// How many times the node count may double before giving up.
const MAX_DOUBLINGS: u32 = 4;

impl QuadratureConfig {
    /// Cheaper rule for Monte Carlo inner loops.
    pub fn simulation() -> Self {
        Self {
            node_count: 32,
            domain_halfwidth: 7.0,
            refinement_tolerance: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 16 {
            return Err(DgcError::invalid("node_count", "must be at least 16"));
        }
        if !(self.domain_halfwidth >= 6.0) {
            return Err(DgcError::invalid("domain_halfwidth", "must be at least 6"));
        }
        if !(self.refinement_tolerance > 0.0) {
            return Err(DgcError::invalid("refinement_tolerance", "must be positive"));
        }
        Ok(())
    }

    pub fn refined(&self) -> Self {
        Self {
            node_count: self.node_count * 2,
            ..*self
        }
    }
}

/// Result of one factor integration over an orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthantIntegral {
    pub log_survival: f64,
    /// ψ^j for every input coordinate; zero for −∞ entries.
    pub hazards: Vec<f64>,
    /// E[Y] under the tilted weight Γ(y)/Φ_J.
    pub factor_mean: f64,
    pub rho: f64,
    pub sigma: f64,
}

impl OrthantIntegral {
    pub fn survival(&self) -> f64 {
        self.log_survival.exp()
    }

    /// E[ξ_k | ξ_j > z_j, j ∈ J]. Coordinates outside the constraint (−∞)
    /// carry a zero hazard and reduce to the common-factor term.
    pub fn conditional_mean(&self, k: usize) -> f64 {
        let s = self.sigma;
        s * self.rho.sqrt() * self.factor_mean + s * s * (1.0 - self.rho) * self.hazards[k]
    }

    /// Same, for a coordinate of the family that does not enter the constraint.
    pub fn free_conditional_mean(&self) -> f64 {
        self.sigma * self.rho.sqrt() * self.factor_mean
    }

    /// 𝔟^k(z, x) = E[1{ξ_j > z_j, j ∈ J}(ξ_k + x)].
    pub fn truncated_first_moment(&self, k: usize, x: f64) -> f64 {
        self.survival() * (x + self.conditional_mean(k))
    }
}

/// Φ_J, ψ^j and the tilted factor mean for the given arguments.
pub fn orthant(z: &[ExtReal], spec: &EquicorrSpec, quad: &QuadratureConfig) -> Result<OrthantIntegral> {
    if z.len() != spec.size {
        return Err(DgcError::invalid(
            "z",
            format!("length {} differs from spec size {}", z.len(), spec.size),
        ));
    }
    orthant_unchecked(z, spec.rho, spec.sigma, quad)
}

/// As [`orthant`] but for any length (including zero) and without the size check.
pub fn orthant_unchecked(z: &[ExtReal], rho: f64, sigma: f64, quad: &QuadratureConfig) -> Result<OrthantIntegral> {
    let mut hazards = vec![0.0; z.len()];
    let active: Vec<(usize, f64)> = z
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.finite().map(|x| (i, x)))
        .collect();
    for (_, x) in &active {
        if x.is_nan() {
            return Err(DgcError::Numerical("NaN orthant argument".into()));
        }
    }
    let mut out = OrthantIntegral {
        log_survival: 0.0,
        hazards: Vec::new(),
        factor_mean: 0.0,
        rho,
        sigma,
    };
    match active.len() {
        0 => {}
        1 => {
            let (i, x) = active[0];
            let (ls, psi) = log_survival_and_hazard(x / sigma);
            out.log_survival = ls;
            hazards[i] = psi / sigma;
            out.factor_mean = rho.sqrt() * psi;
        }
        _ if rho == 0.0 => {
            for &(i, x) in &active {
                let (ls, psi) = log_survival_and_hazard(x / sigma);
                out.log_survival += ls;
                hazards[i] = psi / sigma;
            }
        }
        _ => {
            let scaled: Vec<f64> = active
                .iter()
                .map(|&(_, x)| x / (sigma * (1.0 - rho).sqrt()))
                .collect();
            let r = factor_integral(&scaled, (rho / (1.0 - rho)).sqrt(), quad)?;
            out.log_survival = r.log_mass;
            out.factor_mean = r.mean_y;
            let scale = 1.0 / (sigma * (1.0 - rho).sqrt());
            for (k, &(i, _)) in active.iter().enumerate() {
                hazards[i] = r.mean_psi[k] * scale;
            }
        }
    }
    out.hazards = hazards;
    Ok(out)
}

pub fn equicorr_survival(z: &[ExtReal], spec: &EquicorrSpec, quad: &QuadratureConfig) -> Result<f64> {
    quad.validate()?;
    Ok(orthant(z, spec, quad)?.survival())
}

pub fn equicorr_log_survival(z: &[ExtReal], spec: &EquicorrSpec, quad: &QuadratureConfig) -> Result<f64> {
    quad.validate()?;
    Ok(orthant(z, spec, quad)?.log_survival)
}

/// ψ^j = −∂_{z_j} ln Φ_J, from the factor-conditional integral.
pub fn equicorr_hazard_gradient(
    z: &[ExtReal],
    j: usize,
    spec: &EquicorrSpec,
    quad: &QuadratureConfig,
) -> Result<f64> {
    quad.validate()?;
    check_index(j, spec.size, "j")?;
    if z[j].is_neg_inf() {
        return Err(DgcError::invalid("z", format!("coordinate {j} must be finite")));
    }
    Ok(orthant(z, spec, quad)?.hazards[j])
}

/// 𝔟^k(z, x) = E[1{z_j < ξ_j, j ∈ J}(ξ_k + x)].
pub fn truncated_first_moment(
    z: &[ExtReal],
    k: usize,
    x: f64,
    spec: &EquicorrSpec,
    quad: &QuadratureConfig,
) -> Result<f64> {
    quad.validate()?;
    check_index(k, spec.size, "k")?;
    Ok(orthant(z, spec, quad)?.truncated_first_moment(k, x))
}

fn check_index(j: usize, size: usize, field: &str) -> Result<()> {
    if j >= size {
        return Err(DgcError::invalid(field, format!("index {j} out of range for size {size}")));
    }
    Ok(())
}

struct FactorIntegral {
    log_mass: f64,
    mean_y: f64,
    mean_psi: Vec<f64>,
}

/// Integrates Γ(y) = φ(y)Π Φ(b_l − c y) against 1, y and ψ(b_l − c y).
fn factor_integral(b: &[f64], c: f64, quad: &QuadratureConfig) -> Result<FactorIntegral> {
    let n = b.len();
    let half_width = quad.domain_halfwidth;

    // Mode of ln Γ: g(y) = −y + cΣψ(b_l − cy) is convex and decreasing with
    // g(0) > 0, so Newton from 0 climbs monotonically to the root.
    let mut y0 = 0.0;
    let mut curvature = 1.0;
    for _ in 0..100 {
        let mut g = -y0;
        let mut slope = 0.0;
        for &bl in b {
            let a = bl - c * y0;
            let psi = normal::mills_hazard(a);
            g += c * psi;
            slope += mills_hazard_slope(a, psi);
        }
        curvature = 1.0 + c * c * slope;
        let step = g / curvature;
        y0 += step;
        if step.abs() <= 1e-12 * (1.0 + y0.abs()) {
            break;
        }
    }
    let s0 = 1.0 / curvature.sqrt();
    let log_gamma = |y: f64| -> f64 {
        let mut acc = log_pdf(y);
        for &bl in b {
            acc += normal::log_survival(bl - c * y);
        }
        acc
    };
    let peak = log_gamma(y0);

    // Curvature only grows to the left, so L·s0 already drops ln Γ by L²/2
    // there. To the right it decays towards 1; widen until the drop is reached.
    // The ψ_l integrands peak near y = b_l c/(1 + c²), left of the mode of Γ
    // when b_l is very negative; the domain must cover those peaks too.
    let psi_scale = 1.0 / (1.0 + c * c).sqrt();
    let psi_peak = b.iter().fold(f64::INFINITY, |m, &bl| m.min(bl * c / (1.0 + c * c)));
    let lo = (y0 - half_width * s0).min(psi_peak - half_width * psi_scale);
    let target_drop = 0.5 * half_width * half_width;
    let mut reach = half_width * s0;
    while reach < half_width && peak - log_gamma(y0 + reach) < target_drop {
        reach = (reach * 1.5).min(half_width);
    }
    let hi = y0 + reach;

    // Running trapezoid sums of e^{lnΓ − peak}·{1, y, ψ_l}.
    let mut sums = vec![0.0; n + 2];
    let point = |y: f64, w: f64, sums: &mut [f64]| {
        let mut lg = log_pdf(y) - peak;
        let base = sums.len() - n;
        let mut psis = [0.0f64; 16];
        let mut heap = Vec::new();
        let psi_buf: &mut [f64] = if n <= 16 {
            &mut psis[..n]
        } else {
            heap.resize(n, 0.0);
            &mut heap
        };
        for (l, &bl) in b.iter().enumerate() {
            let (ls, psi) = log_survival_and_hazard(bl - c * y);
            lg += ls;
            psi_buf[l] = psi;
        }
        let e = w * lg.exp();
        sums[0] += e;
        sums[1] += e * y;
        for l in 0..n {
            sums[base + l] += e * psi_buf[l];
        }
    };

    let mut intervals = (quad.node_count / 2).max(8);
    let mut h = (hi - lo) / intervals as f64;
    point(lo, 0.5, &mut sums);
    point(hi, 0.5, &mut sums);
    for i in 1..intervals {
        point(lo + i as f64 * h, 1.0, &mut sums);
    }
    let mut prev = summarise(&sums, h, peak);
    let mut doublings = 0u32;
    loop {
        // add midpoints: the old sum counts with weight h, new points with h/2
        let mut fresh = vec![0.0; n + 2];
        for i in 0..intervals {
            point(lo + (i as f64 + 0.5) * h, 1.0, &mut fresh);
        }
        for (s, f) in sums.iter_mut().zip(&fresh) {
            *s += f;
        }
        intervals *= 2;
        h *= 0.5;
        let cur = summarise(&sums, h, peak);
        let tol = quad.refinement_tolerance;
        let agree = (cur.log_mass - prev.log_mass).abs() <= tol
            && (cur.mean_y - prev.mean_y).abs() <= tol * (1.0 + cur.mean_y.abs())
            && cur
                .mean_psi
                .iter()
                .zip(&prev.mean_psi)
                .all(|(a, p)| (a - p).abs() <= tol * a.abs() + f64::MIN_POSITIVE);
        if agree && intervals >= quad.node_count {
            return Ok(cur);
        }
        if intervals >= quad.node_count {
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Err(DgcError::NonConvergence(format!(
                    "factor integral with {} coordinates, c = {c}: successive estimates \
                     of ln Φ differ by {:e} at {} intervals",
                    n,
                    (cur.log_mass - prev.log_mass).abs(),
                    intervals
                )));
            }
        }
        prev = cur;
    }
}

fn summarise(sums: &[f64], h: f64, peak: f64) -> FactorIntegral {
    let mass = sums[0];
    FactorIntegral {
        log_mass: peak + (h * mass).ln(),
        mean_y: sums[1] / mass,
        mean_psi: sums[2..].iter().map(|s| s / mass).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::normal::{mills_hazard, survival};
    use std::f64::consts::PI;

    fn fin(v: &[f64]) -> Vec<ExtReal> {
        v.iter().map(|&x| ExtReal::Finite(x)).collect()
    }

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn one_dimension_is_scalar_survival() {
        let spec = EquicorrSpec::new(1, 0.5, 2.0).unwrap();
        let v = equicorr_survival(&fin(&[0.3]), &spec, &q()).unwrap();
        assert!((v - survival(0.15)).abs() < 1e-15);
    }

    #[test]
    fn independent_pair_factorises() {
        let spec = EquicorrSpec::new(2, 0.0, 1.0).unwrap();
        let v = equicorr_survival(&fin(&[-0.4, 1.3]), &spec, &q()).unwrap();
        let want = survival(-0.4) * survival(1.3);
        assert!(((v - want) / want).abs() < 1e-10);
    }

    #[test]
    fn bivariate_orthant_identity() {
        let spec = EquicorrSpec::new(2, 0.5, 1.0).unwrap();
        let v = equicorr_survival(&fin(&[0.0, 0.0]), &spec, &q()).unwrap();
        let want = 0.25 + (0.5f64).asin() / (2.0 * PI);
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
    }

    #[test]
    fn trivariate_orthant_identity() {
        // P(all three positive) = 1/8 + 3 asin(ρ)/(4π) for equicorrelated ρ
        let spec = EquicorrSpec::new(3, 0.3, 1.7).unwrap();
        let v = equicorr_survival(&fin(&[0.0, 0.0, 0.0]), &spec, &q()).unwrap();
        let want = 0.125 + 3.0 * (0.3f64).asin() / (4.0 * PI);
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn neg_infinity_drops_the_coordinate() {
        let spec3 = EquicorrSpec::new(3, 0.6, 0.8).unwrap();
        let spec2 = EquicorrSpec::new(2, 0.6, 0.8).unwrap();
        let z3 = vec![ExtReal::Finite(0.2), ExtReal::NegInf, ExtReal::Finite(-1.1)];
        let a = orthant(&z3, &spec3, &q()).unwrap();
        let b = orthant(&fin(&[0.2, -1.1]), &spec2, &q()).unwrap();
        assert!((a.log_survival - b.log_survival).abs() < 1e-13);
        assert_eq!(a.hazards[1], 0.0);
        assert!((a.hazards[2] - b.hazards[1]).abs() < 1e-13);
    }

    #[test]
    fn hazard_matches_scalar_when_independent() {
        let spec = EquicorrSpec::new(3, 0.0, 1.0).unwrap();
        let z = [0.3, -2.0, 4.0];
        for j in 0..3 {
            let v = equicorr_hazard_gradient(&fin(&z), j, &spec, &q()).unwrap();
            assert!(((v - mills_hazard(z[j])) / v).abs() < 1e-14);
        }
    }

    #[test]
    fn hazard_matches_central_difference() {
        let spec = EquicorrSpec::new(2, 0.5, 1.0).unwrap();
        let z = [0.0, 0.0];
        let h = 1e-5;
        let lp = |d: f64| equicorr_log_survival(&fin(&[z[0] + d, z[1]]), &spec, &q()).unwrap();
        let fd = -(lp(h) - lp(-h)) / (2.0 * h);
        let v = equicorr_hazard_gradient(&fin(&z), 0, &spec, &q()).unwrap();
        assert!(((v - fd) / fd).abs() < 1e-6, "{v} vs {fd}");
    }

    #[test]
    fn stein_identity_links_factor_mean_to_hazards() {
        // E[ξ_k 1_A]/Φ = σ²(ψ^k + ρΣ_{l≠k}ψ^l), an integration by parts.
        let spec = EquicorrSpec::new(4, 0.45, 1.3).unwrap();
        let z = fin(&[-0.7, 0.4, 1.9, -2.5]);
        let r = orthant(&z, &spec, &q()).unwrap();
        let total: f64 = r.hazards.iter().sum();
        let s2 = spec.sigma * spec.sigma;
        for k in 0..4 {
            let stein = s2 * ((1.0 - spec.rho) * r.hazards[k] + spec.rho * total);
            assert!((r.conditional_mean(k) - stein).abs() < 1e-10);
        }
    }

    #[test]
    fn univariate_first_moment_closed_form() {
        let spec = EquicorrSpec::new(1, 0.7, 1.4).unwrap();
        let z1 = 0.35;
        let x = -0.8;
        let v = truncated_first_moment(&fin(&[z1]), 0, x, &spec, &q()).unwrap();
        let s = spec.sigma;
        let want = s * normal::pdf(z1 / s) + x * survival(z1 / s);
        assert!((v - want).abs() < 1e-14);
        let free = truncated_first_moment(&[ExtReal::NegInf], 0, 0.0, &spec, &q()).unwrap();
        assert_eq!(free, 0.0);
    }

    #[test]
    fn extreme_arguments_stay_finite() {
        let spec = EquicorrSpec::new(3, 0.9, 0.6).unwrap();
        for z in [[20.0, 21.0, 19.5], [-30.0, -25.0, -40.0], [15.0, -15.0, 0.0]] {
            let r = orthant(&fin(&z), &spec, &q()).unwrap();
            assert!(r.log_survival.is_finite());
            assert!(r.hazards.iter().all(|h| h.is_finite() && *h >= 0.0));
        }
    }

    #[test]
    fn refinement_changes_less_than_tolerance() {
        let spec = EquicorrSpec::new(3, 0.8, 1.0).unwrap();
        let z = fin(&[1.5, 0.2, -0.9]);
        let a = orthant(&z, &spec, &q()).unwrap();
        let b = orthant(&z, &spec, &q().refined()).unwrap();
        assert!((a.log_survival - b.log_survival).abs() < 1e-9);
        for (x, y) in a.hazards.iter().zip(&b.hazards) {
            assert!(((x - y) / y).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(EquicorrSpec::new(0, 0.1, 1.0).is_err());
        assert!(EquicorrSpec::new(2, 1.0, 1.0).is_err());
        assert!(EquicorrSpec::new(2, 0.3, 0.0).is_err());
        let bad = QuadratureConfig {
            node_count: 8,
            ..q()
        };
        let spec = EquicorrSpec::new(1, 0.1, 1.0).unwrap();
        assert!(equicorr_survival(&fin(&[0.0]), &spec, &bad).is_err());
    }
}
