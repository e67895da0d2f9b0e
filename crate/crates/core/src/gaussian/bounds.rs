//! Numerical witnesses for the Gaussian tail estimates used in the
//! martingale proofs: tail integrals against y^{d−1}Γ(y), the affine
//! growth of ψ^j, and exponential moments of sup|W|.

use rand::SeedableRng;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::equicorr::{orthant, EquicorrSpec, QuadratureConfig};
use super::normal::{log_pdf, survival};
use super::ExtReal;
use crate::error::{DgcError, Result};
use crate::quadrature::GaussLegendre;

/// Test densities Γ on the half line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaFamily {
    /// Γ = φ
    StandardNormal,
    /// Γ = (1 + y²)φ
    NormalTimesQuadratic,
}

impl GammaFamily {
    fn log_gamma(self, y: f64) -> f64 {
        match self {
            GammaFamily::StandardNormal => log_pdf(y),
            GammaFamily::NormalTimesQuadratic => log_pdf(y) + (y * y).ln_1p(),
        }
    }

    /// g = −Γ'/Γ
    fn g(self, y: f64) -> f64 {
        match self {
            GammaFamily::StandardNormal => y,
            GammaFamily::NormalTimesQuadratic => y - 2.0 * y / (1.0 + y * y),
        }
    }
}

/// Which half of the tail lemma to check: the upper bound needs g ≥ αy,
/// the lower bound needs g ≤ αy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailSide {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailBoundReport {
    pub d: u32,
    pub alpha: f64,
    pub epsilon: f64,
    pub side: TailSide,
    /// Smallest grid point beyond which the hypothesis on g holds.
    pub y_bar: f64,
    /// Start of the region where the lemma applies.
    pub threshold: f64,
    pub bound: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// |ratio − 1/α| never grows along the grid (up to 1e−9).
    pub monotone_towards_limit: bool,
    pub holds: bool,
    pub points: Vec<(f64, f64)>,
}

const HYPOTHESIS_STEP: f64 = 0.01;

/// Checks G(y) = ∫_y^∞ t^d Γ(t)dt against (1/α ± ε) y^{d−1}Γ(y) on
/// `grid_points` points of `[range.0, range.1]` lying above the threshold.
pub fn tail_bound_check(
    d: u32,
    alpha: f64,
    epsilon: f64,
    family: GammaFamily,
    side: TailSide,
    range: (f64, f64),
    grid_points: usize,
) -> Result<TailBoundReport> {
    if d > 2 {
        return Err(DgcError::invalid("d", "must be 0, 1 or 2"));
    }
    if !(alpha > 0.0 && epsilon > 0.0) {
        return Err(DgcError::invalid("alpha/epsilon", "must be positive"));
    }
    let (lo, hi) = range;
    if !(0.0 < lo && lo < hi) || grid_points < 2 {
        return Err(DgcError::invalid("range", "need 0 < lo < hi and two points"));
    }
    let hypothesis = |y: f64| match side {
        TailSide::Upper => family.g(y) >= alpha * y,
        TailSide::Lower => family.g(y) <= alpha * y,
    };
    // scan down from the top of the range for the last violation
    let steps = (hi / HYPOTHESIS_STEP).ceil() as usize;
    if !hypothesis(hi) {
        return Err(DgcError::ThresholdUndefined(format!(
            "g(y) vs {alpha}·y fails at the top of the tested range y = {hi}"
        )));
    }
    let mut y_bar = 0.0;
    for k in (0..steps).rev() {
        let y = k as f64 * HYPOTHESIS_STEP;
        if !hypothesis(y) {
            y_bar = y + HYPOTHESIS_STEP;
            break;
        }
    }
    let dm1 = (d as f64 - 1.0).abs();
    let inner = match side {
        TailSide::Upper => dm1 * (1.0 / (epsilon * alpha * alpha) + 1.0 / alpha),
        TailSide::Lower => dm1 * (1.0 / (epsilon * alpha * alpha) - 1.0 / alpha),
    };
    let threshold = y_bar.max(inner.max(0.0).sqrt());
    let start = lo.max(threshold);
    if start >= hi {
        return Err(DgcError::ThresholdUndefined(format!(
            "lemma threshold {threshold} lies above the tested range"
        )));
    }
    let bound = match side {
        TailSide::Upper => 1.0 / alpha + epsilon,
        TailSide::Lower => 1.0 / alpha - epsilon,
    };
    let gl = GaussLegendre::new(20);
    let mut points = Vec::with_capacity(grid_points);
    for k in 0..grid_points {
        let y = start + (hi - start) * k as f64 / (grid_points - 1) as f64;
        // relative to Γ(y); the integrand falls below e^{-60} within 12 units
        let lg = family.log_gamma(y);
        let tail = gl.integrate_panels(y, y + 12.0, 24, |t| {
            t.powi(d as i32) * (family.log_gamma(t) - lg).exp()
        });
        points.push((y, tail / y.powi(d as i32 - 1)));
    }
    let ratio_min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let ratio_max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let holds = match side {
        TailSide::Upper => ratio_max <= bound,
        TailSide::Lower => ratio_min >= bound,
    };
    let limit = 1.0 / alpha;
    let monotone_towards_limit = points
        .windows(2)
        .all(|w| (w[1].1 - limit).abs() <= (w[0].1 - limit).abs() + 1e-9);
    Ok(TailBoundReport {
        d,
        alpha,
        epsilon,
        side,
        y_bar,
        threshold,
        bound,
        ratio_min,
        ratio_max,
        monotone_towards_limit,
        holds,
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AffineEnvelopeReport {
    pub size: usize,
    pub rho: f64,
    pub sigma: f64,
    /// sup ψ^j/(1 + ||z||∞) at the base rule and after doubling the nodes.
    pub sup_ratio: f64,
    pub sup_ratio_refined: f64,
    pub stability: f64,
    /// Fitted envelope ψ^j ≤ a + b||z||∞ on the reference box.
    pub a: f64,
    pub b: f64,
    /// The fitted envelope also holds on a box twice as wide.
    pub holds_on_wider_box: bool,
}

/// Fits ψ^j ≤ a + b||z||∞ on random points of [−box, box]^size and checks
/// the fit is stable under refinement and carries over to a wider box.
pub fn affine_envelope_check(
    spec: &EquicorrSpec,
    quad: &QuadratureConfig,
    half_box: f64,
    samples: usize,
    seed: u64,
) -> Result<AffineEnvelopeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng, width: f64| -> Vec<f64> {
        (0..spec.size)
            .map(|_| width * (2.0 * rng.random::<f64>() - 1.0))
            .collect()
    };
    let sup_ratio_with = |q: &QuadratureConfig, pts: &[Vec<f64>]| -> Result<(f64, f64, f64)> {
        let mut ratio: f64 = 0.0;
        let mut near: f64 = 0.0;
        let mut slope: f64 = 0.0;
        for z in pts {
            let zz: Vec<ExtReal> = z.iter().map(|&x| ExtReal::Finite(x)).collect();
            let r = orthant(&zz, spec, q)?;
            let norm = z.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for &psi in &r.hazards {
                ratio = ratio.max(psi / (1.0 + norm));
                if norm <= 1.0 {
                    near = near.max(psi);
                }
            }
            if norm > 1.0 {
                for &psi in &r.hazards {
                    slope = slope.max(psi / norm);
                }
            }
        }
        Ok((ratio, near, slope))
    };
    let mut pts: Vec<Vec<f64>> = (0..samples).map(|_| draw(&mut rng, half_box)).collect();
    // make sure the unit box is represented
    pts.extend((0..samples / 4).map(|_| draw(&mut rng, 1.0)));
    let (sup_ratio, near, slope) = sup_ratio_with(quad, &pts)?;
    let (sup_ratio_refined, _, _) = sup_ratio_with(&quad.refined(), &pts)?;
    let a = near.max(slope);
    let b = slope.max(sup_ratio);
    let wide: Vec<Vec<f64>> = (0..samples).map(|_| draw(&mut rng, 2.0 * half_box)).collect();
    let mut holds = true;
    for z in &wide {
        let zz: Vec<ExtReal> = z.iter().map(|&x| ExtReal::Finite(x)).collect();
        let r = orthant(&zz, spec, quad)?;
        let norm = z.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        holds &= r.hazards.iter().all(|&psi| psi <= a + b * norm);
    }
    Ok(AffineEnvelopeReport {
        size: spec.size,
        rho: spec.rho,
        sigma: spec.sigma,
        sup_ratio,
        sup_ratio_refined,
        stability: (sup_ratio_refined / sup_ratio).max(sup_ratio / sup_ratio_refined),
        a,
        b,
        holds_on_wider_box: holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SupBmReport {
    pub q: f64,
    pub t: f64,
    pub sample_count: usize,
    pub estimate: f64,
    pub standard_error: f64,
    /// ∫ e^{qy²} r_t(y) dy with the exact law of sup|W|.
    pub oracle: f64,
    /// The same integral with R_t(y) replaced by min(1, 4Φ(y/(2√t))).
    pub majorant: f64,
    pub z_score: f64,
    pub pass: bool,
}

/// P(sup_{s≤t}|W_s| > y) from the image series.
pub fn sup_abs_bm_tail(y: f64, t: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    let a = y / t.sqrt();
    let mut acc = 0.0;
    for k in 1..200 {
        let term = survival((2 * k - 1) as f64 * a);
        acc += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (4.0 * acc).min(1.0)
}

/// E[exp(q sup_{s≤t} W_s²)] by Monte Carlo, against its quadrature value.
pub fn sup_bm_exponential_check(q: f64, t: f64, sample_count: usize, seed: u64) -> Result<SupBmReport> {
    if !(q >= 0.0 && t > 0.0) || sample_count < 2 {
        return Err(DgcError::invalid("q/t/sample_count", "need q ≥ 0, t > 0, two samples"));
    }
    const STEPS: usize = 256;
    let dt = t / STEPS as f64;
    let sd = dt.sqrt();
    let mut values = Vec::with_capacity(sample_count);
    for path in 0..sample_count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path as u64);
        let mut w: f64 = 0.0;
        let mut sup: f64 = 0.0;
        for _ in 0..STEPS {
            let z: f64 = rng.sample(StandardNormal);
            let next = w + sd * z;
            // bridge extremes within the step
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = 1.0 - rng.random::<f64>();
            let d2 = (next - w) * (next - w);
            let hi = 0.5 * (w + next + (d2 - 2.0 * dt * u1.ln()).sqrt());
            let lo = 0.5 * (w + next - (d2 - 2.0 * dt * u2.ln()).sqrt());
            sup = sup.max(hi).max(-lo);
            w = next;
        }
        values.push((q * sup * sup).exp());
    }
    let (estimate, standard_error) = crate::stats::mean_and_se(&values);

    let gl = GaussLegendre::new(20);
    let exact_tail = |y: f64| sup_abs_bm_tail(y, t);
    let reflection = |y: f64| (4.0 * survival(y / (2.0 * t.sqrt()))).min(1.0);
    // 1 + 2q∫ y R(y) e^{qy²} dy; the integrand decays like exp(−y²(1/(2t) − q))
    let moment = |tail: &dyn Fn(f64) -> f64, decay: f64| -> f64 {
        if q == 0.0 {
            return 1.0;
        }
        if decay <= 0.0 {
            return f64::INFINITY;
        }
        let upper = (80.0 / decay).sqrt();
        1.0 + 2.0 * q * gl.integrate_panels(0.0, upper, 64, |y| y * tail(y) * (q * y * y).exp())
    };
    let oracle = moment(&exact_tail, 1.0 / (2.0 * t) - q);
    let majorant = moment(&reflection, 1.0 / (8.0 * t) - q);
    let z_score = if standard_error > 0.0 {
        (estimate - oracle) / standard_error
    } else if estimate == oracle {
        0.0
    } else {
        f64::INFINITY
    };
    let pass = estimate.is_finite() && majorant.is_finite() && estimate <= majorant && z_score.abs() <= 3.0;
    Ok(SupBmReport {
        q,
        t,
        sample_count,
        estimate,
        standard_error,
        oracle,
        majorant,
        z_score,
        pass,
    })
}
