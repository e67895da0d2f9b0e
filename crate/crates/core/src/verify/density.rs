//! Conditional density checks by tensor quadrature.
//!
//! The density of (τ_i) given the state is integrated in x = h(τ)
//! coordinates, where it is the equicorrelated normal density of m̄/α. The
//! common factor y is integrated on an outer Gauss–Legendre rule, and every
//! coordinate's conditional normal density on an inner one.

use super::{RunOptions, Rule, VerifyReport};
use crate::error::{DgcError, Result};
use crate::gaussian::normal::pdf;
use crate::intensity::{evaluate_family, FamilyKind};
use crate::model::{name_at, ModelConfig, PortfolioState};
use crate::quadrature::GaussLegendre;
use crate::simulate::{run_indexed, sample_terminal};
use crate::stats;

const FACTOR_RANGE: f64 = 10.0;
const EPS_RANGE: f64 = 12.0;

fn interval_mass(gl: &GaussLegendre, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.max(-EPS_RANGE), hi.min(EPS_RANGE));
    if a >= b {
        return 0.0;
    }
    let panels = ((b - a) / 2.0).ceil().max(1.0) as usize;
    gl.integrate_panels(a, b, panels, pdf)
}

/// Integral of the (unnormalised) density of τ given `state` over the box
/// `[lo_i, hi_i]` per name. Names must all be alive in `state`.
pub fn box_mass(config: &ModelConfig, state: &PortfolioState, bounds: &[(f64, f64)]) -> Result<f64> {
    if bounds.len() != config.name_count() {
        return Err(DgcError::invalid("box", "need one interval per name"));
    }
    if !state.defaulted_names().is_empty() {
        return Err(DgcError::invalid("state", "tensor quadrature needs every name alive"));
    }
    if config.name_count() > 3 {
        return Err(DgcError::invalid("config", "tensor quadrature is limited to three names"));
    }
    let alpha = config.alpha(state.t);
    let (a, b) = (config.rho_copula.sqrt(), (1.0 - config.rho_copula).sqrt());
    let to_x = |i: usize, tau: f64| -> f64 {
        if tau <= 0.0 {
            f64::NEG_INFINITY
        } else if tau.is_infinite() {
            f64::INFINITY
        } else {
            (config.h_finite(name_at(i), tau) - state.m[i]) / alpha
        }
    };
    let xs: Vec<(f64, f64)> = bounds
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| (to_x(i, lo.max(state.t)), to_x(i, hi)))
        .collect();
    let gl = GaussLegendre::new(20);
    let outer = gl.integrate_panels(-FACTOR_RANGE, FACTOR_RANGE, 40, |y| {
        let mut prod = pdf(y);
        for &(lo, hi) in &xs {
            prod *= interval_mass(&gl, (lo - a * y) / b, (hi - a * y) / b);
        }
        prod
    });
    Ok(outer)
}

/// P(τ ∈ box | state): the box mass over the alive-region mass Φ_J.
pub fn box_probability(config: &ModelConfig, state: &PortfolioState, bounds: &[(f64, f64)]) -> Result<f64> {
    let den = evaluate_family(config, state, FamilyKind::Full, None)?.log_survival().exp();
    Ok(box_mass(config, state, bounds)? / den)
}

pub const MC_BOX: [(f64, f64); 3] = [(1.0, 3.0), (2.0, 6.0), (0.5, 9.0)];

pub fn density_suite(config: &ModelConfig, opts: RunOptions) -> Result<Vec<VerifyReport>> {
    let n = config.name_count();
    let full = vec![(0.0, f64::INFINITY); n];
    let start = PortfolioState::initial(config);
    let total = box_mass(config, &start, &full)?;
    let s = 5.0;
    let mut marginal = full.clone();
    marginal[2] = (s, f64::INFINITY);
    let tail = box_mass(config, &start, &marginal)?;
    let later = PortfolioState::at(2.0, [0.3, -0.2, 0.1].iter().copied().cycle().take(n).collect());
    let alive = vec![(2.0, f64::INFINITY); n];
    let conditional = box_probability(config, &later, &alive)?;
    let mut reports = vec![
        VerifyReport::new("density/normalization_t0", total, 0.0, 1.0, Rule::Tolerance { tol: 1e-6 }),
        VerifyReport::new(
            "density/marginal_survival_name1_s5",
            tail,
            0.0,
            (-config.hazard(1) * s).exp(),
            Rule::Tolerance { tol: 1e-6 },
        ),
        VerifyReport::new("density/normalization_t2_alive", conditional, 0.0, 1.0, Rule::Tolerance { tol: 1e-6 }),
    ];
    if n == 3 {
        let quad = box_mass(config, &start, &MC_BOX)?;
        let hits = run_indexed(opts.paths, opts.parallelism, |i| {
            let mut rng = opts.seed.rng(i);
            let d = sample_terminal(config, &mut rng);
            let inside = d.tau.iter().zip(&MC_BOX).all(|(t, (lo, hi))| lo <= t && t <= hi);
            if inside {
                1.0
            } else {
                0.0
            }
        });
        let (p, se) = stats::mean_and_se(&hits);
        reports.push(VerifyReport::new(
            "density/three_name_box_vs_mc",
            p,
            se,
            quad,
            Rule::ZWithin { limit: super::Z_LIMIT },
        ));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_box_factorises() {
        let c = ModelConfig::three_name(0.0, 0.02);
        let s = PortfolioState::initial(&c);
        let got = box_mass(&c, &s, &MC_BOX).unwrap();
        let want: f64 = MC_BOX
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                let l = c.hazard(name_at(i));
                (-l * lo).exp() - (-l * hi).exp()
            })
            .product();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn conditional_box_matches_survival_ratio() {
        let c = ModelConfig::three_name(0.5, 0.02);
        let s = PortfolioState::at(1.0, vec![0.2, -0.1, 0.3]);
        let mut b = vec![(1.0, f64::INFINITY); 3];
        b[2] = (4.0, f64::INFINITY);
        let got = box_probability(&c, &s, &b).unwrap();
        let want = crate::intensity::conditional_survival(&c, &s, 1, 4.0, crate::intensity::Scope::G).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}
