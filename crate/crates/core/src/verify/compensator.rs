//! Compensator checks: E[1{τ_j ≤ t}] = E[∫_0^{t∧τ_j} γ^j ds].
//!
//! The time integral uses the trapezoid rule on a coarse grid. Since
//! E[γ_s 1{s < τ_j}] is the smooth default density of τ_j, the rule only
//! adds a deterministic error far below the Monte Carlo noise.

use super::{RunOptions, VerifyReport};
use crate::error::Result;
use crate::intensity::{evaluate_family, FamilyKind};
use crate::model::{ModelConfig, Name};
use crate::simulate::{simulate_batch, GridSpec};

pub const CHECKPOINTS: [f64; 3] = [1.0, 2.0, 5.0];
pub const GRID_STEP: f64 = 0.5;

/// Trapezoid weights of the grid restricted to [0, t].
pub(crate) fn trapezoid_weight(grid: &GridSpec, k: usize, t: f64) -> f64 {
    let tk = grid.time(k);
    if tk > t + 1e-12 {
        return 0.0;
    }
    let dt = grid.dt();
    if k == 0 || (tk - t).abs() < 1e-12 {
        0.5 * dt
    } else {
        dt
    }
}

pub(crate) fn collect<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

/// Column means of row-major per-path samples.
pub(crate) fn columns(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let width = rows.first().map_or(0, |r| r.len());
    (0..width).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

/// G reports for every name, F reports with γ̄ for reference names, and for
/// ϱ ≥ 0.5 the γ̃ negative control on name 1 at the last checkpoint.
pub fn compensator_suite(config: &ModelConfig, opts: RunOptions) -> Result<Vec<VerifyReport>> {
    let horizon = CHECKPOINTS[CHECKPOINTS.len() - 1];
    let grid = GridSpec::new(horizon, (horizon / GRID_STEP).round() as usize)?;
    let all: Vec<Name> = config.names().collect();
    let refs: Vec<Name> = config.reference_names().collect();
    let control = config.rho_copula >= 0.5;
    let rows = collect(simulate_batch(config, &grid, &opts.seed, opts.paths, opts.parallelism, |path| {
        let mut g = vec![0.0; all.len() * CHECKPOINTS.len()];
        let mut bar = vec![0.0; refs.len() * CHECKPOINTS.len()];
        let mut tilde = vec![0.0; refs.len() * CHECKPOINTS.len()];
        for k in 0..=grid.steps {
            let state = path.state_at(&grid, k);
            let full = evaluate_family(config, &state, FamilyKind::Full, None)?;
            let reference = evaluate_family(config, &state, FamilyKind::Reference, None)?;
            let reduced = if control {
                Some(evaluate_family(config, &state, FamilyKind::Reduced, None)?)
            } else {
                None
            };
            for (c, &t) in CHECKPOINTS.iter().enumerate() {
                let w = trapezoid_weight(&grid, k, t);
                if w == 0.0 {
                    continue;
                }
                for (a, &j) in all.iter().enumerate() {
                    g[a * CHECKPOINTS.len() + c] += w * full.gamma(config, j);
                }
                for (a, &j) in refs.iter().enumerate() {
                    bar[a * CHECKPOINTS.len() + c] += w * reference.gamma(config, j);
                    if let Some(r) = &reduced {
                        tilde[a * CHECKPOINTS.len() + c] += w * r.gamma(config, j);
                    }
                }
            }
        }
        let mut row = Vec::with_capacity(g.len() + 2 * bar.len());
        for (a, &j) in all.iter().enumerate() {
            for (c, &t) in CHECKPOINTS.iter().enumerate() {
                let hit = if path.tau_of(j) <= t { 1.0 } else { 0.0 };
                row.push(hit - g[a * CHECKPOINTS.len() + c]);
            }
        }
        for (a, &j) in refs.iter().enumerate() {
            for (c, &t) in CHECKPOINTS.iter().enumerate() {
                let hit = if path.tau_of(j) <= t { 1.0 } else { 0.0 };
                row.push(hit - bar[a * CHECKPOINTS.len() + c]);
                row.push(hit - tilde[a * CHECKPOINTS.len() + c]);
            }
        }
        Ok(row)
    }))?;
    let cols = columns(&rows);
    let rho = config.rho_copula;
    let mut reports = Vec::new();
    let mut col = 0;
    for &j in &all {
        for &t in &CHECKPOINTS {
            reports.push(VerifyReport::from_samples(
                format!("compensator/rho={rho}/G/name={j}/t={t}"),
                &cols[col],
                0.0,
            ));
            col += 1;
        }
    }
    for &j in &refs {
        for &t in &CHECKPOINTS {
            reports.push(VerifyReport::from_samples(
                format!("compensator/rho={rho}/F/name={j}/t={t}"),
                &cols[col],
                0.0,
            ));
            if control && j == 1 && t == horizon {
                reports.push(
                    VerifyReport::from_samples(
                        format!("compensator/rho={rho}/F_tilde_unweighted/name={j}/t={t}"),
                        &cols[col + 1],
                        0.0,
                    )
                    .negative(),
                );
            }
            col += 2;
        }
    }
    Ok(reports)
}
