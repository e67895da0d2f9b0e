//! Scenario generation and the pathwise Doléans-Dade weight.
//!
//! Each name's running integral is m^i = √ϱ M^c + √(1−ϱ) M^i with M = ∫ς dX
//! for independent Brownian motions X. Default times come from the terminal
//! value m^i_∞ = m^i_T + m̄^i_T through τ_i = h_i⁻¹(m^i_∞).

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{DgcError, Result};
use crate::intensity::{reduced_snapshot, ReducedSnapshot};
use crate::model::{name_at, DefaultRecord, ModelConfig, Name, PortfolioState};
use rand::RngExt;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub horizon: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        let g = Self { horizon, steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(DgcError::invalid("steps", "need at least one step"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(DgcError::invalid("horizon", "must be positive"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }

    /// Grid index of t, which must be a grid time up to rounding.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = (t / self.dt()).round();
        (k >= 0.0 && k as usize <= self.steps && (k * self.dt() - t).abs() < 1e-9).then_some(k as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    /// Stream `path_index` of the master seed. Streams never overlap.
    pub fn rng(&self, path_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(path_index);
        rng
    }

    /// A derived seed for an independent experiment sharing the master seed.
    pub fn derive(&self, salt: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

#[inline]
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub path_index: u64,
    /// m^i at each grid time: `m[k][name + 1]`.
    pub m: Vec<Vec<f64>>,
    /// Brownian increments B^i over each step: `db[k][name + 1]`.
    pub db: Vec<Vec<f64>>,
    pub residual_terminal: Vec<f64>,
    /// m^i_∞ = m^i_T + m̄^i_T.
    pub m_infinity: Vec<f64>,
    pub tau: Vec<f64>,
}

impl PathRecord {
    pub fn m_terminal(&self) -> &[f64] {
        self.m.last().expect("grid has a terminal point")
    }

    pub fn tau_of(&self, name: Name) -> f64 {
        self.tau[(name + 1) as usize]
    }

    /// Full information at grid index k: running integrals and every default
    /// up to t_k with its residual m^i_∞ − m^i_{t_k}.
    pub fn state_at(&self, grid: &GridSpec, k: usize) -> PortfolioState {
        let t = grid.time(k);
        let m = self.m[k].clone();
        let defaults = (0..m.len())
            .map(|i| {
                (self.tau[i] <= t).then(|| DefaultRecord {
                    tau: self.tau[i],
                    residual: Some(self.m_infinity[i] - m[i]),
                })
            })
            .collect();
        PortfolioState { t, m, defaults }
    }

    /// First default time among `names`, or +∞.
    pub fn first_default(&self, names: &[Name]) -> f64 {
        names.iter().map(|&n| self.tau_of(n)).fold(f64::INFINITY, f64::min)
    }
}

/// Draws one path on the grid, exact in law at the grid times.
pub fn simulate_path(config: &ModelConfig, grid: &GridSpec, seed: &SeedSpec, path_index: u64) -> PathRecord {
    let mut rng = seed.rng(path_index);
    let names = config.name_count();
    let (a, b) = (config.rho_copula.sqrt(), (1.0 - config.rho_copula).sqrt());
    let mut m = Vec::with_capacity(grid.steps + 1);
    let mut db = Vec::with_capacity(grid.steps);
    let mut current = vec![0.0; names];
    m.push(current.clone());
    // (ΔX, ∫ς dX) per factor; index 0 is the common factor
    let mut dx = vec![0.0; names + 1];
    let mut di = vec![0.0; names + 1];
    for k in 0..grid.steps {
        let (t0, t1) = (grid.time(k), grid.time(k + 1));
        let dt = t1 - t0;
        let i1 = config.int_varsigma(t0, t1);
        let i2 = config.int_varsigma_sq(t0, t1);
        let resid = (i2 - i1 * i1 / dt).max(0.0).sqrt();
        for f in 0..=names {
            let e1 = normal(&mut rng);
            let e2 = normal(&mut rng);
            dx[f] = dt.sqrt() * e1;
            di[f] = i1 / dt.sqrt() * e1 + resid * e2;
        }
        let mut step_db = vec![0.0; names];
        for i in 0..names {
            step_db[i] = a * dx[0] + b * dx[i + 1];
            current[i] += a * di[0] + b * di[i + 1];
        }
        db.push(step_db);
        m.push(current.clone());
    }
    let tail = config.alpha(grid.horizon);
    let common = normal(&mut rng);
    let mut residual_terminal = vec![0.0; names];
    let mut m_infinity = vec![0.0; names];
    let mut tau = vec![0.0; names];
    for i in 0..names {
        residual_terminal[i] = tail * (a * common + b * normal(&mut rng));
        m_infinity[i] = current[i] + residual_terminal[i];
        tau[i] = config.h_inverse(name_at(i), m_infinity[i]);
    }
    PathRecord {
        path_index,
        m,
        db,
        residual_terminal,
        m_infinity,
        tau,
    }
}

/// Change of ln E(ν_total) over grid step k, given the F snapshot at t_k.
///
/// Continuous part: v·Δm_mart − ½Δ⟨ν⟩. Each reference name alive at t_k
/// contributes −(γ̃ − γ̄) over its alive part of the step and ln(γ̃/γ̄) if it
/// defaults inside the step, both evaluated at the left grid point.
pub fn doleans_step(
    config: &ModelConfig,
    grid: &GridSpec,
    path: &PathRecord,
    k: usize,
    snap: &ReducedSnapshot,
) -> Result<f64> {
    let (t0, t1) = (grid.time(k), grid.time(k + 1));
    let dm: Vec<f64> = path.m[k + 1].iter().zip(&path.m[k]).map(|(b, a)| b - a).collect();
    let dnu = snap.nu_increment(config, t1 - t0, &dm);
    let qv = snap.nu.quadratic_form(config.rho_copula) * config.int_varsigma_sq(t0, t1);
    let mut step = dnu - 0.5 * qv;
    for j in config.reference_names() {
        let tau = path.tau_of(j);
        if tau <= t0 {
            continue;
        }
        let tilde = snap.reduced.gamma(config, j);
        let bar = snap.reference.gamma(config, j);
        step -= (tilde - bar) * (tau.min(t1) - t0);
        if tau <= t1 {
            if !(bar > 0.0) {
                return Err(DgcError::DegenerateHazard { name: j, t: t0 });
            }
            step += (tilde / bar).ln();
        }
    }
    if !step.is_finite() {
        return Err(DgcError::Numerical(format!("weight increment not finite at t = {t0}")));
    }
    Ok(step)
}

/// The Doléans-Dade exponential of ν_total along the grid, from the F
/// information of the path. Starts at 1; strictly positive.
pub fn doleans_weight(path: &PathRecord, config: &ModelConfig, grid: &GridSpec) -> Result<Vec<f64>> {
    let mut weights = Vec::with_capacity(grid.steps + 1);
    weights.push(1.0);
    let mut log_w = 0.0;
    for k in 0..grid.steps {
        let snap = reduced_snapshot(config, &path.state_at(grid, k))?;
        log_w += doleans_step(config, grid, path, k, &snap)?;
        weights.push(log_w.exp());
    }
    Ok(weights)
}

/// Maps `f` over path indices 0..count, in index order. The result does not
/// depend on `parallelism` (0 means the rayon default).
pub fn run_indexed<T, F>(count: u64, parallelism: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if parallelism == 1 {
        return (0..count).map(f).collect();
    }
    let work = || (0..count).into_par_iter().map(&f).collect();
    if parallelism == 0 {
        work()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(parallelism).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        }
    }
}

/// Simulates `count` paths and maps each through `f`, in path order.
pub fn simulate_batch<T, F>(
    config: &ModelConfig,
    grid: &GridSpec,
    seed: &SeedSpec,
    count: u64,
    parallelism: usize,
    f: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(PathRecord) -> T + Sync + Send,
{
    run_indexed(count, parallelism, |i| f(simulate_path(config, grid, seed, i)))
}

/// Terminal factor draw without a path: M^c_∞, M^i_∞ and the default times.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalDraw {
    pub common: f64,
    pub idiosyncratic: Vec<f64>,
    pub m_infinity: Vec<f64>,
    pub tau: Vec<f64>,
}

pub fn sample_terminal(config: &ModelConfig, rng: &mut ChaCha8Rng) -> TerminalDraw {
    let (a, b) = (config.rho_copula.sqrt(), (1.0 - config.rho_copula).sqrt());
    let common = normal(rng);
    let idiosyncratic: Vec<f64> = (0..config.name_count()).map(|_| normal(rng)).collect();
    let m_infinity: Vec<f64> = idiosyncratic.iter().map(|e| a * common + b * e).collect();
    let tau = m_infinity
        .iter()
        .enumerate()
        .map(|(i, &x)| config.h_inverse(name_at(i), x))
        .collect();
    TerminalDraw {
        common,
        idiosyncratic,
        m_infinity,
        tau,
    }
}

/// Full information at time t given the terminal draw, bridging each factor:
/// M_t | M_∞ ~ N(u M_∞, u(1 − u)) with u = 1 − α(t)².
pub fn bridge_state(config: &ModelConfig, draw: &TerminalDraw, t: f64, rng: &mut ChaCha8Rng) -> PortfolioState {
    let (a, b) = (config.rho_copula.sqrt(), (1.0 - config.rho_copula).sqrt());
    let u = 1.0 - config.alpha(t).powi(2);
    let sd = (u * (1.0 - u)).max(0.0).sqrt();
    let mut bridge = |x: f64| u * x + sd * normal(rng);
    let common = bridge(draw.common);
    let m: Vec<f64> = draw
        .idiosyncratic
        .iter()
        .map(|&e| a * common + b * bridge(e))
        .collect();
    let defaults = (0..m.len())
        .map(|i| {
            (draw.tau[i] <= t).then(|| DefaultRecord {
                tau: draw.tau[i],
                residual: Some(draw.m_infinity[i] - m[i]),
            })
        })
        .collect();
    PortfolioState { t, m, defaults }
}

/// Writes the path dump: one row per path and name.
pub fn write_path_dump<W: Write>(
    out: &mut W,
    rows: &[(PathRecord, f64)],
) -> std::io::Result<()> {
    writeln!(out, "path_index,name,tau,m_T,weight_T")?;
    for (path, weight) in rows {
        for i in 0..path.tau.len() {
            writeln!(
                out,
                "{},{},{:.12e},{:.12e},{:.12e}",
                path.path_index,
                name_at(i),
                path.tau[i],
                path.m_terminal()[i],
                weight
            )?;
        }
    }
    Ok(())
}
