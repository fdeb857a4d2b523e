//! Fourth-order centered finite differences, the fallback derivative oracle
//! and the cross-check applied to every analytic family.
//!
//! First derivatives use the five-point stencil (-1, 8, 0, -8, 1)/12h, pure
//! second derivatives (-1, 16, -30, 16, -1)/12h^2, and mixed ones the 4 x 4
//! cross built from the first-derivative stencil along each axis. Stencils
//! must stay inside the chart: points closer than 2h to the boundary are a
//! stencil error, not a silent extrapolation.

use nalgebra::{DMatrix, DVector};

use crate::chart::Chart;
use crate::error::{Error, Result};

const OFFSETS1: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
const WEIGHTS1: [f64; 4] = [1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];

fn check_stencil(chart: &Chart, x: &[f64], h: f64) -> Result<()> {
    chart.check_contains(x)?;
    if chart.boundary_distance(x) < 2.0 * h {
        return Err(Error::StencilOutOfDomain { point: x.to_vec(), step: h });
    }
    Ok(())
}

/// d_i f by the five-point stencil along axis i.
pub fn partial<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], i: usize, h: f64) -> f64 {
    let mut xp = x.to_vec();
    let mut acc = 0.0;
    for (o, w) in OFFSETS1.iter().zip(WEIGHTS1.iter()) {
        xp[i] = x[i] + o * h;
        acc += w * f(&xp);
    }
    acc / h
}

pub fn gradient<F: Fn(&[f64]) -> f64>(chart: &Chart, f: &F, x: &[f64], h: f64) -> Result<DVector<f64>> {
    check_stencil(chart, x, h)?;
    Ok(DVector::from_fn(x.len(), |i, _| partial(f, x, i, h)))
}

/// Symmetric matrix of second partials. Mixed entries come from the product
/// of first-derivative stencils (16 evaluations each), which is symmetric by
/// construction.
pub fn hessian<F: Fn(&[f64]) -> f64>(chart: &Chart, f: &F, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    check_stencil(chart, x, h)?;
    let n = x.len();
    let mut out = DMatrix::zeros(n, n);
    let f0 = f(x);
    let mut xp = x.to_vec();
    for i in 0..n {
        // pure second derivative
        let mut acc = -30.0 / 12.0 * f0;
        for (o, w) in [(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)] {
            xp[i] = x[i] + o * h;
            acc += w / 12.0 * f(&xp);
        }
        xp[i] = x[i];
        out[(i, i)] = acc / (h * h);
        for j in (i + 1)..n {
            let mut m = 0.0;
            for (oi, wi) in OFFSETS1.iter().zip(WEIGHTS1.iter()) {
                for (oj, wj) in OFFSETS1.iter().zip(WEIGHTS1.iter()) {
                    xp[i] = x[i] + oi * h;
                    xp[j] = x[j] + oj * h;
                    m += wi * wj * f(&xp);
                }
            }
            xp[i] = x[i];
            xp[j] = x[j];
            let v = m / (h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Stack of first partials of a matrix-valued function, (k, i, j) = d_k M_ij.
pub fn matrix_partials<F: Fn(&[f64]) -> DMatrix<f64>>(
    chart: &Chart,
    f: &F,
    x: &[f64],
    h: f64,
) -> Result<crate::tensor::Tensor3> {
    check_stencil(chart, x, h)?;
    let n = x.len();
    let probe = f(x);
    debug_assert_eq!(probe.nrows(), n);
    let mut out = crate::tensor::Tensor3::zeros(n);
    let mut xp = x.to_vec();
    for k in 0..n {
        let mut acc = DMatrix::zeros(n, n);
        for (o, w) in OFFSETS1.iter().zip(WEIGHTS1.iter()) {
            xp[k] = x[k] + o * h;
            acc += f(&xp) * *w;
        }
        xp[k] = x[k];
        for i in 0..n {
            for j in 0..n {
                out.set(k, i, j, acc[(i, j)] / h);
            }
        }
    }
    Ok(out)
}

/// Stack of second partials of a matrix-valued function, symmetrized in the
/// two derivative slots.
pub fn matrix_second_partials<F: Fn(&[f64]) -> DMatrix<f64>>(
    chart: &Chart,
    f: &F,
    x: &[f64],
    h: f64,
) -> Result<crate::tensor::Tensor4> {
    check_stencil(chart, x, h)?;
    let n = x.len();
    let mut out = crate::tensor::Tensor4::zeros(n);
    let f0 = f(x);
    let mut xp = x.to_vec();
    for l in 0..n {
        // pure
        let mut acc = f0.clone() * (-30.0 / 12.0);
        for (o, w) in [(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)] {
            xp[l] = x[l] + o * h;
            acc += f(&xp) * (w / 12.0);
        }
        xp[l] = x[l];
        for i in 0..n {
            for j in 0..n {
                out.set(l, l, i, j, acc[(i, j)] / (h * h));
            }
        }
        for k in (l + 1)..n {
            let mut acc = DMatrix::zeros(n, n);
            for (ol, wl) in OFFSETS1.iter().zip(WEIGHTS1.iter()) {
                for (ok, wk) in OFFSETS1.iter().zip(WEIGHTS1.iter()) {
                    xp[l] = x[l] + ol * h;
                    xp[k] = x[k] + ok * h;
                    acc += f(&xp) * (wl * wk);
                }
            }
            xp[l] = x[l];
            xp[k] = x[k];
            for i in 0..n {
                for j in 0..n {
                    let v = acc[(i, j)] / (h * h);
                    out.set(l, k, i, j, v);
                    out.set(k, l, i, j, v);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_derivative_at_small_step() {
        // exact value 1; fourth-order stencil at h = 1e-2 is good to ~1e-9
        let chart = Chart::cartesian_end(3, 0.1).unwrap();
        let f = |x: &[f64]| x[0].exp();
        let x = [1.0, 0.2, 0.2];
        let g = gradient(&chart, &f, &x, 1e-2).unwrap();
        assert!((g[0] - 1.0_f64.exp()).abs() / 1.0_f64.exp() < 1e-8);
        assert!(g[1].abs() < 1e-12);
    }

    #[test]
    fn hessian_of_quadratic_is_exact() {
        let chart = Chart::cartesian_end(3, 0.1).unwrap();
        let f = |x: &[f64]| x[0] * x[0] + 3.0 * x[0] * x[1] - x[2] * x[2];
        let h = hessian(&chart, &f, &[1.0, 1.0, 1.0], 1e-2).unwrap();
        assert!((h[(0, 0)] - 2.0).abs() < 1e-9);
        assert!((h[(0, 1)] - 3.0).abs() < 1e-9);
        assert!((h[(2, 2)] + 2.0).abs() < 1e-9);
        assert!((h[(1, 2)]).abs() < 1e-9);
    }

    #[test]
    fn stencil_too_close_to_boundary_errors() {
        let chart = Chart::cartesian_end(3, 1.0).unwrap();
        let f = |x: &[f64]| x[0];
        let x = [1.001, 0.0, 0.0];
        assert!(matches!(
            gradient(&chart, &f, &x, 1e-2),
            Err(Error::StencilOutOfDomain { .. })
        ));
    }

    #[test]
    fn polar_stencil_respects_angle_bounds() {
        let chart = Chart::polar_hyperbolic(3, 0.5).unwrap();
        let f = |x: &[f64]| x[1].sin();
        assert!(gradient(&chart, &f, &[2.0, 1e-3, 0.0], 1e-3).is_err());
        let g = gradient(&chart, &f, &[2.0, 1.0, 0.0], 1e-3).unwrap();
        assert!((g[1] - 1.0_f64.cos()).abs() < 1e-11);
    }
}
