//! Tail-integral bounds, the affine envelope of ψ^j and the exponential
//! moment of the Brownian supremum.

use super::{Rule, VerifyReport, Z_LIMIT};
use crate::error::Result;
use crate::gaussian::bounds::{affine_envelope_check, sup_bm_exponential_check, tail_bound_check, GammaFamily, TailSide};
use crate::gaussian::{EquicorrSpec, QuadratureConfig};

pub const SUP_BM_SAMPLES: usize = 100_000;

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn appendix_suite(seed: u64) -> Result<Vec<VerifyReport>> {
    let upper = tail_bound_check(1, 1.0, 1.0, GammaFamily::StandardNormal, TailSide::Upper, (2f64.sqrt(), 8.0), 61)?;
    let lower = tail_bound_check(0, 1.0, 0.5, GammaFamily::StandardNormal, TailSide::Lower, (2.0, 8.0), 61)?;
    let spec = EquicorrSpec::new(3, 0.4, 0.9)?;
    let envelope = affine_envelope_check(&spec, &QuadratureConfig::default(), 6.0, 150, seed)?;
    let sup = sup_bm_exponential_check(1.0, 0.05, SUP_BM_SAMPLES, seed)?;
    let sup_doubled = sup_bm_exponential_check(1.0, 0.05, 2 * SUP_BM_SAMPLES, seed ^ 0x5eed)?;
    let zero = sup_bm_exponential_check(0.0, 0.05, 1000, seed)?;
    Ok(vec![
        VerifyReport::new("appendix/tail_upper_d1_max_ratio", upper.ratio_max, 0.0, upper.bound, Rule::AtMost),
        VerifyReport::new("appendix/tail_lower_d0_min_ratio", lower.ratio_min, 0.0, lower.bound, Rule::Above),
        VerifyReport::new(
            "appendix/tail_ratio_monotone_to_limit",
            flag(lower.monotone_towards_limit),
            0.0,
            1.0,
            Rule::Tolerance { tol: 0.0 },
        ),
        VerifyReport::new("appendix/psi_envelope_refinement_ratio", envelope.stability, 0.0, 1.1, Rule::AtMost),
        VerifyReport::new(
            "appendix/psi_envelope_holds_on_wider_box",
            flag(envelope.holds_on_wider_box),
            0.0,
            1.0,
            Rule::Tolerance { tol: 0.0 },
        ),
        VerifyReport::new(
            "appendix/sup_bm_exp_moment_vs_quadrature",
            sup.estimate,
            sup.standard_error,
            sup.oracle,
            Rule::ZWithin { limit: Z_LIMIT },
        ),
        VerifyReport::new(
            "appendix/sup_bm_exp_moment_doubling_rel_change",
            (sup_doubled.estimate / sup.estimate - 1.0).abs(),
            0.0,
            0.05,
            Rule::AtMost,
        ),
        VerifyReport::new("appendix/sup_bm_below_majorant", sup.estimate, 0.0, sup.majorant, Rule::AtMost),
        VerifyReport::new("appendix/sup_bm_q0_is_one", zero.estimate, 0.0, 1.0, Rule::Tolerance { tol: 0.0 }),
    ])
}
