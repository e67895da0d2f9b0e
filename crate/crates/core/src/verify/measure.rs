//! Invariance measure checks under the Doléans-Dade weight, and the
//! Jeulin–Yor drift identity.

use super::compensator::{collect, columns, trapezoid_weight};
use super::{RunOptions, VerifyReport};
use crate::error::Result;
use crate::intensity::reduced_snapshot;
use crate::model::{index_of, ModelConfig, Name, BANK, COUNTERPARTY};
use crate::simulate::{doleans_step, simulate_batch, GridSpec};

pub const HORIZON: f64 = 5.0;
pub const STEPS: usize = 40;
pub const MIN_CELL_PATHS: usize = 30;

/// Drift cells for B^{−1}: sign of m^{−1}_t and whether a reference name has
/// defaulted.
const CELLS: [&str; 4] = ["m_neg/no_ref_default", "m_pos/no_ref_default", "m_neg/ref_default", "m_pos/ref_default"];

/// (a) E[W_T] = 1. (b) Under W, τ_j has compensator ∫γ̃ (γ̄ is the negative
/// control). (c) Under W, B^{−1} − ∫β̃^{−1} has zero mean increments per cell.
pub fn measure_change_suite(config: &ModelConfig, opts: RunOptions) -> Result<Vec<VerifyReport>> {
    measure_change_on_grid(config, opts, STEPS)
}

pub fn measure_change_on_grid(config: &ModelConfig, opts: RunOptions, steps: usize) -> Result<Vec<VerifyReport>> {
    let grid = GridSpec::new(HORIZON, steps)?;
    let refs: Vec<Name> = config.reference_names().collect();
    let dt = grid.dt();
    let bank = index_of(BANK);
    let rows = collect(simulate_batch(config, &grid, &opts.seed, opts.paths, opts.parallelism, |path| {
        let mut log_w = 0.0;
        let mut w = 1.0;
        let mut int_tilde = vec![0.0; refs.len()];
        let mut int_bar = vec![0.0; refs.len()];
        let mut drift = [0.0; CELLS.len()];
        let mut touched = [0.0; CELLS.len()];
        for k in 0..=grid.steps {
            let state = path.state_at(&grid, k);
            let snap = reduced_snapshot(config, &state)?;
            let tw = trapezoid_weight(&grid, k, HORIZON);
            for (a, &j) in refs.iter().enumerate() {
                int_tilde[a] += tw * snap.reduced.gamma(config, j);
                int_bar[a] += tw * snap.reference.gamma(config, j);
            }
            if k == grid.steps {
                break;
            }
            log_w += doleans_step(config, &grid, &path, k, &snap)?;
            let w_next = log_w.exp();
            let any_ref = refs.iter().any(|&j| state.is_defaulted(j));
            let cell = usize::from(state.m[bank] >= 0.0) + 2 * usize::from(any_ref);
            drift[cell] += w_next * (path.db[k][bank] - snap.reduced.beta(BANK) * dt);
            touched[cell] = 1.0;
            w = w_next;
        }
        let mut row = vec![w];
        for (a, &j) in refs.iter().enumerate() {
            let hit = if path.tau_of(j) <= HORIZON { 1.0 } else { 0.0 };
            row.push(w * (hit - int_tilde[a]));
            row.push(w * (hit - int_bar[a]));
        }
        row.extend_from_slice(&drift);
        row.extend_from_slice(&touched);
        Ok(row)
    }))?;
    let cols = columns(&rows);
    let rho = config.rho_copula;
    let mut reports = vec![VerifyReport::from_samples(
        format!("measure/rho={rho}/weight_mean_T={HORIZON}"),
        &cols[0],
        1.0,
    )];
    for (a, &j) in refs.iter().enumerate() {
        reports.push(VerifyReport::from_samples(
            format!("measure/rho={rho}/reweighted_compensator_tilde/name={j}"),
            &cols[1 + 2 * a],
            0.0,
        ));
        if rho >= 0.5 {
            reports.push(
                VerifyReport::from_samples(
                    format!("measure/rho={rho}/reweighted_compensator_bar/name={j}"),
                    &cols[2 + 2 * a],
                    0.0,
                )
                .negative(),
            );
        }
    }
    let base = 1 + 2 * refs.len();
    let mut merged: Vec<f64> = vec![0.0; rows.len()];
    let mut merged_count = 0;
    for (c, label) in CELLS.iter().enumerate() {
        let count = cols[base + CELLS.len() + c].iter().filter(|&&x| x > 0.0).count();
        if count >= MIN_CELL_PATHS {
            reports.push(VerifyReport::from_samples(
                format!("measure/rho={rho}/bank_drift_tilde/{label}"),
                &cols[base + c],
                0.0,
            ));
        } else {
            merged_count += count;
            for (m, x) in merged.iter_mut().zip(&cols[base + c]) {
                *m += x;
            }
        }
    }
    if merged_count >= MIN_CELL_PATHS {
        reports.push(VerifyReport::from_samples(
            format!("measure/rho={rho}/bank_drift_tilde/merged_small_cells"),
            &merged,
            0.0,
        ));
    }
    Ok(reports)
}

pub const JY_HORIZON: f64 = 2.0;
pub const JY_STEPS: usize = 20;
/// Realised covariation is summed on this many sub-steps per coefficient step.
pub const JY_SUBSTEPS: usize = 16;

/// Realised covariation Σ ΔB^k Δν^c against ∫(β̃^k − β̄^k) over
/// [0, τ ∧ 2], τ = τ_{−1} ∧ τ_0. The opposite sign of ν is the negative
/// control.
pub fn jeulin_yor_suite(config: &ModelConfig, opts: RunOptions) -> Result<Vec<VerifyReport>> {
    jeulin_yor_on_grid(config, opts, JY_STEPS, JY_SUBSTEPS)
}

/// Coefficients are frozen on `steps` intervals of [0, 2]; the products
/// ΔB Δν are taken on `substeps` finer intervals inside each one.
pub fn jeulin_yor_on_grid(config: &ModelConfig, opts: RunOptions, steps: usize, substeps: usize) -> Result<Vec<VerifyReport>> {
    if substeps == 0 {
        return Err(crate::error::DgcError::invalid("substeps", "must be positive"));
    }
    let coarse = GridSpec::new(JY_HORIZON, steps)?;
    let grid = GridSpec::new(JY_HORIZON, steps * substeps)?;
    let names: Vec<Name> = config.names().collect();
    let rows = collect(simulate_batch(config, &grid, &opts.seed, opts.paths, opts.parallelism, |path| {
        let tau = path.first_default(&[BANK, COUNTERPARTY]);
        let mut gap = vec![0.0; names.len()];
        let mut flipped = vec![0.0; names.len()];
        let mut dm = vec![0.0; names.len()];
        for k in 0..steps {
            let (t0, t1) = (coarse.time(k), coarse.time(k + 1));
            if t0 >= tau {
                break;
            }
            let snap = reduced_snapshot(config, &path.state_at(&grid, k * substeps))?;
            let weight = config.int_varsigma(t0, t1) / config.varsigma(t0);
            for (a, &n) in names.iter().enumerate() {
                gap[a] -= (snap.reduced.beta(n) - snap.reference.beta(n)) * weight;
                flipped[a] -= (snap.reduced.beta(n) - snap.reference.beta(n)) * weight;
            }
            for f in k * substeps..(k + 1) * substeps {
                for (d, (b, a)) in dm.iter_mut().zip(path.m[f + 1].iter().zip(&path.m[f])) {
                    *d = b - a;
                }
                let dnu = snap.nu_increment_on(config, grid.time(f), grid.time(f + 1), &dm);
                for (a, &n) in names.iter().enumerate() {
                    let db = path.db[f][index_of(n)];
                    gap[a] += db * dnu;
                    flipped[a] -= db * dnu;
                }
            }
        }
        Ok(gap.into_iter().chain(flipped).collect::<Vec<f64>>())
    }))?;
    let cols = columns(&rows);
    let rho = config.rho_copula;
    let mut reports: Vec<VerifyReport> = names
        .iter()
        .enumerate()
        .map(|(a, n)| VerifyReport::from_samples(format!("jeulin_yor/rho={rho}/name={n}"), &cols[a], 0.0))
        .collect();
    reports.push(
        VerifyReport::from_samples(format!("jeulin_yor/rho={rho}/opposite_nu_sign/name={BANK}"), &cols[names.len()], 0.0)
            .negative(),
    );
    Ok(reports)
}
