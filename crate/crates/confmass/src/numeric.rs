//! Small numeric helpers shared across the crate: reproducible summation,
//! unit sphere areas, and scaled residuals.

/// Pairwise tree reduction in index order. The split pattern depends only on
/// the slice length, so results are bit-identical run to run regardless of
/// how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Neumaier-compensated sum in index order. Used where cancellation between
/// large opposite-sign terms is the dominant error source.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Gamma function at integer or half-integer arguments, which is all the
/// sphere-area formula ever needs.
pub fn gamma_half_integer(twice: usize) -> f64 {
    // argument is twice/2
    match twice {
        0 => f64::INFINITY,
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (twice as f64 / 2.0 - 1.0) * gamma_half_integer(twice - 2),
    }
}

/// Area of the unit sphere S^{n-1} inside n-dimensional Euclidean space:
/// 2 pi^{n/2} / Gamma(n/2).
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Residual of a == b scaled by max(1, |a|, |b|). Behaves like a relative
/// error for large quantities and an absolute one near zero.
pub fn scaled_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs())
}

/// Same scaling applied to the max-norm of two component slices.
pub fn scaled_residual_slice(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (x, y) in a.iter().zip(b) {
        diff = diff.max((x - y).abs());
        scale = scale.max(x.abs()).max(y.abs());
    }
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas_match_closed_forms() {
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        let pi = std::f64::consts::PI;
        assert!((unit_sphere_area(4) - 2.0 * pi * pi).abs() < 1e-13);
        // n = 2: circle circumference
        assert!((unit_sphere_area(2) - 2.0 * pi).abs() < 1e-14);
    }

    #[test]
    fn pairwise_sum_matches_plain_sum_on_benign_data() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let plain: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - plain).abs() < 1e-10);
    }

    #[test]
    fn compensated_sum_handles_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(&xs), 2.0);
    }

    #[test]
    fn scaled_residual_is_absolute_near_zero_and_relative_when_large() {
        assert!((scaled_residual(1e-12, 0.0) - 1e-12).abs() < 1e-20);
        assert!((scaled_residual(2e6, 1e6) - 0.5).abs() < 1e-12);
    }
}
