//! Order-fixed summaries of per-path samples.

/// Compensated (Neumaier) sum; the order is the slice order, so results do
/// not depend on how the samples were produced.
pub fn sum(values: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            c += (s - t) + v;
        } else {
            c += (v - t) + s;
        }
        s = t;
    }
    s + c
}

pub fn mean(values: &[f64]) -> f64 {
    sum(values) / values.len() as f64
}

/// Sample mean and its standard error.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = mean(values);
    let dev: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    let var = if values.len() > 1 { sum(&dev) / (n - 1.0) } else { 0.0 };
    (m, (var / n).sqrt())
}

/// z = (estimate − target)/se, with the degenerate se = 0 case mapped to 0
/// when the estimate hits the target exactly and to ±∞ otherwise.
pub fn z_score(estimate: f64, target: f64, se: f64) -> f64 {
    let d = estimate - target;
    if se > 0.0 {
        d / se
    } else if d == 0.0 {
        0.0
    } else {
        d.signum() * f64::INFINITY
    }
}

/// Ratio estimator Σx/Σw with its delta-method standard error.
pub fn ratio_and_se(x: &[f64], w: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx = sum(x);
    let sw = sum(w);
    let r = sx / sw;
    let resid: Vec<f64> = x.iter().zip(w).map(|(a, b)| (a - r * b) * (a - r * b)).collect();
    let var = sum(&resid) / (n - 1.0).max(1.0);
    let wbar = sw / n;
    (r, (var / n).sqrt() / wbar)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_keeps_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(&v), 2.0);
    }

    #[test]
    fn mean_and_se_of_known_sample() {
        let (m, se) = mean_and_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ratio_of_proportional_samples_has_no_error() {
        let w = [1.0, 2.0, 3.0];
        let x = [2.0, 4.0, 6.0];
        let (r, se) = ratio_and_se(&x, &w);
        assert_eq!(r, 2.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
