//! Scalar standard normal functions.
//!
//! `survival` is the upper tail Φ(x) = P(N > x), matching the model's
//! convention of writing Φ for the survival function rather than the cdf.

use std::f64::consts::SQRT_2;

use super::ExtReal;

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this point the tail is evaluated from the Mills-ratio series.
const TAIL_CUTOFF: f64 = 30.0;

#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub fn log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Φ(x)/φ(x) for x ≥ 30 from the asymptotic series; the truncation error
/// is below 1e-17 relative there.
#[inline]
fn mills_ratio_tail(x: f64) -> f64 {
    let r = 1.0 / (x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=8 {
        term *= -((2 * k - 1) as f64) * r;
        sum += term;
    }
    sum / x
}

/// Upper tail probability ∫_x^∞ φ.
#[inline]
pub fn survival(x: f64) -> f64 {
    if x < TAIL_CUTOFF {
        0.5 * libm::erfc(x / SQRT_2)
    } else if x.is_finite() {
        pdf(x) * mills_ratio_tail(x)
    } else {
        0.0
    }
}

pub fn survival_ext(x: ExtReal) -> f64 {
    match x {
        ExtReal::NegInf => 1.0,
        ExtReal::Finite(v) => survival(v),
    }
}

/// Lower tail P(N ≤ x).
#[inline]
pub fn cdf(x: f64) -> f64 {
    survival(-x)
}

/// ln Φ(x), accurate in both tails (no cancellation near Φ = 1).
#[inline]
pub fn log_survival(x: f64) -> f64 {
    if x < 0.0 {
        (-0.5 * libm::erfc(-x / SQRT_2)).ln_1p()
    } else if x < TAIL_CUTOFF {
        (0.5 * libm::erfc(x / SQRT_2)).ln()
    } else if x.is_finite() {
        log_pdf(x) + mills_ratio_tail(x).ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// The Mills hazard ψ(y) = φ(y)/Φ(y).
#[inline]
pub fn mills_hazard(y: f64) -> f64 {
    if y < TAIL_CUTOFF {
        pdf(y) / survival(y)
    } else {
        1.0 / mills_ratio_tail(y)
    }
}

/// (ln Φ(x), ψ(x)) from one erfc evaluation.
#[inline]
pub fn log_survival_and_hazard(x: f64) -> (f64, f64) {
    if x < 0.0 {
        let q = 0.5 * libm::erfc(-x / SQRT_2);
        ((-q).ln_1p(), pdf(x) / (1.0 - q))
    } else if x < TAIL_CUTOFF {
        let s = 0.5 * libm::erfc(x / SQRT_2);
        (s.ln(), pdf(x) / s)
    } else {
        let r = mills_ratio_tail(x);
        (log_pdf(x) + r.ln(), 1.0 / r)
    }
}

/// ψ'(y) = ψ(y)(ψ(y) − y), given ψ(y).
#[inline]
pub fn mills_hazard_slope(y: f64, psi: f64) -> f64 {
    (psi * (psi - y)).max(0.0)
}

const P_LOW: f64 = 0.02425;

// Acklam's rational approximation, used only as a starting point.
fn acklam_lower_tail(q: f64) -> f64 {
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_671_010_243_764,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
        / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
}

fn acklam_central(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    let q = p - 0.5;
    let r = q * q;
    (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
        / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
}

/// Solves ln Φ(x) = log_p for x. `log_p` must be negative and finite.
pub fn inverse_log_survival(log_p: f64) -> f64 {
    debug_assert!(log_p < 0.0 && log_p.is_finite());
    // cdf value 1 - p, computed without cancellation
    let lower = -log_p.exp_m1();
    let mut x = if log_p < P_LOW.ln() {
        -acklam_lower_tail((-2.0 * log_p).sqrt())
    } else if lower < P_LOW {
        acklam_lower_tail((-2.0 * lower.ln()).sqrt())
    } else {
        -acklam_central(log_p.exp())
    };
    // Newton on the concave map x -> ln Φ(x)
    for _ in 0..12 {
        let (ls, psi) = log_survival_and_hazard(x);
        let step = (ls - log_p) / psi;
        x += step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    x
}
