//! Orthant probability and hazard gradient checks.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Rule, VerifyReport};
use crate::error::Result;
use crate::gaussian::{equicorr_hazard_gradient, equicorr_log_survival, equicorr_survival, EquicorrSpec, ExtReal, QuadratureConfig};

pub const FD_STEP: f64 = 1e-5;

/// Largest relative gap between ψ^j and the central difference of −ln Φ_J
/// over `points` random interior arguments.
pub fn gradient_vs_finite_difference(points: usize, seed: u64, quad: &QuadratureConfig) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let size = 2 + (rng.random::<u32>() % 3) as usize;
        let rho = 0.1 + 0.7 * rng.random::<f64>();
        let sigma = 0.6 + 0.9 * rng.random::<f64>();
        let spec = EquicorrSpec::new(size, rho, sigma)?;
        let z: Vec<f64> = (0..size).map(|_| 3.0 * rng.random::<f64>() - 1.5).collect();
        let j = (rng.random::<u32>() as usize) % size;
        let at = |shift: f64| -> Vec<ExtReal> {
            z.iter()
                .enumerate()
                .map(|(i, &v)| ExtReal::Finite(if i == j { v + shift } else { v }))
                .collect()
        };
        let psi = equicorr_hazard_gradient(&at(0.0), j, &spec, quad)?;
        let up = equicorr_log_survival(&at(FD_STEP), &spec, quad)?;
        let down = equicorr_log_survival(&at(-FD_STEP), &spec, quad)?;
        let fd = -(up - down) / (2.0 * FD_STEP);
        worst = worst.max(((psi - fd) / fd).abs());
    }
    Ok(worst)
}

pub fn gaussian_suite(seed: u64) -> Result<Vec<VerifyReport>> {
    let quad = QuadratureConfig::default();
    let spec = EquicorrSpec::new(2, 0.5, 1.0)?;
    let p = equicorr_survival(&[ExtReal::Finite(0.0), ExtReal::Finite(0.0)], &spec, &quad)?;
    let orthant_target = 0.25 + 0.5f64.asin() / (2.0 * std::f64::consts::PI);
    let worst = gradient_vs_finite_difference(100, seed, &quad)?;
    Ok(vec![
        VerifyReport::new("gaussian/bivariate_orthant", p, 0.0, orthant_target, Rule::Tolerance { tol: 2e-4 }),
        VerifyReport::new("gaussian/hazard_gradient_fd_max_rel_err", worst, 0.0, 1e-4, Rule::AtMost),
    ])
}
