//! Optional projection of the survival indicator of τ = τ_{−1} ∧ τ_0:
//! E[1{t < τ} X] = E[S_t X] for F_t-measurable X.

use super::compensator::{collect, columns};
use super::{RunOptions, VerifyReport};
use crate::error::Result;
use crate::intensity::reduced_snapshot;
use crate::model::{index_of, ModelConfig, BANK, COUNTERPARTY};
use crate::simulate::{bridge_state, run_indexed, sample_terminal};

pub const TEST_FUNCTIONS: [&str; 3] = ["one", "name1_defaulted", "positive_part_m1"];

pub fn projection_suite(config: &ModelConfig, opts: RunOptions, t: f64) -> Result<Vec<VerifyReport>> {
    let rows = collect(run_indexed(opts.paths, opts.parallelism, |i| {
        let mut rng = opts.seed.rng(i);
        let draw = sample_terminal(config, &mut rng);
        let state = bridge_state(config, &draw, t, &mut rng);
        let s = reduced_snapshot(config, &state)?.azema();
        let alive = if draw.tau[index_of(BANK)] > t && draw.tau[index_of(COUNTERPARTY)] > t {
            1.0
        } else {
            0.0
        };
        let xs = [
            1.0,
            if draw.tau[index_of(1)] <= t { 1.0 } else { 0.0 },
            state.m_of(1).max(0.0),
        ];
        Ok(xs.iter().map(|x| (alive - s) * x).collect::<Vec<f64>>())
    }))?;
    let cols = columns(&rows);
    Ok(TEST_FUNCTIONS
        .iter()
        .zip(&cols)
        .map(|(name, c)| VerifyReport::from_samples(format!("projection/rho={}/t={t}/X={name}", config.rho_copula), c, 0.0))
        .collect())
}
