//! Jumps of the G intensities of surviving names at the first reference
//! default.

use super::compensator::collect;
use super::{RunOptions, Rule, VerifyReport};
use crate::error::Result;
use crate::intensity::{evaluate_family, FamilyKind};
use crate::model::{index_of, ModelConfig, Name, BANK, COUNTERPARTY};
use crate::simulate::{bridge_state, run_indexed, sample_terminal};
use crate::stats;

pub const SPIKE_RHOS: [f64; 5] = [0.0, 0.2, 0.4, 0.6, 0.8];

/// Ratios γ^j(τ+)/γ^j(τ−) of every surviving name at the first reference
/// default τ, over draws where it precedes τ_{−1} ∧ τ_0 and the horizon.
pub fn jump_ratios(config: &ModelConfig, opts: RunOptions) -> Result<Vec<f64>> {
    let refs: Vec<Name> = config.reference_names().collect();
    let per_draw = collect(run_indexed(opts.paths, opts.parallelism, |i| {
        let mut rng = opts.seed.rng(i);
        let draw = sample_terminal(config, &mut rng);
        let (first, tau) = refs
            .iter()
            .map(|&j| (j, draw.tau[index_of(j)]))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        let stop = draw.tau[index_of(BANK)].min(draw.tau[index_of(COUNTERPARTY)]);
        if !(tau < stop && tau <= config.horizon) {
            return Ok(Vec::new());
        }
        let after = bridge_state(config, &draw, tau, &mut rng);
        let mut before = after.clone();
        before.defaults[index_of(first)] = None;
        let g_after = evaluate_family(config, &after, FamilyKind::Full, None)?;
        let g_before = evaluate_family(config, &before, FamilyKind::Full, None)?;
        Ok(config
            .names()
            .filter(|&j| j != first && !after.is_defaulted(j))
            .map(|j| g_after.gamma(config, j) / g_before.gamma(config, j))
            .collect::<Vec<f64>>())
    }))?;
    Ok(per_draw.into_iter().flatten().collect())
}

pub fn spike_statistics(config: &ModelConfig, opts: RunOptions) -> Result<Vec<VerifyReport>> {
    let mut reports = Vec::new();
    let mut medians = Vec::new();
    for rho in SPIKE_RHOS {
        let c = config.with_rho(rho)?;
        let ratios = jump_ratios(&c, opts)?;
        let median = stats::median(&ratios);
        let above = ratios.iter().filter(|&&r| r > 1.0).count() as f64 / ratios.len().max(1) as f64;
        reports.push(VerifyReport::new(format!("spike/rho={rho}/events"), ratios.len() as f64, 0.0, 0.0, Rule::Record));
        if rho == 0.0 {
            let worst = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
            reports.push(VerifyReport::new(
                format!("spike/rho={rho}/max_abs_ratio_minus_one"),
                worst,
                0.0,
                0.0,
                Rule::Tolerance { tol: 1e-9 },
            ));
        } else {
            medians.push(median);
            let rule = if rho >= 0.4 { Rule::Above } else { Rule::Record };
            reports.push(VerifyReport::new(format!("spike/rho={rho}/median_ratio"), median, 0.0, 1.0, rule));
            reports.push(VerifyReport::new(format!("spike/rho={rho}/share_above_one"), above, 0.0, 0.99, Rule::Record));
        }
    }
    let inversions = medians.windows(2).filter(|w| w[1] <= w[0]).count();
    reports.push(VerifyReport::new(
        "spike/median_inversions_over_rho",
        inversions as f64,
        0.0,
        0.0,
        Rule::AtMost,
    ));
    Ok(reports)
}
