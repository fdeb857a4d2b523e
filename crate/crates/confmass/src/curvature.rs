//! Pointwise curvature from metric components and their coordinate
//! derivatives: connection coefficients, Ricci, scalar curvature, covariant
//! Hessians, divergences, and mean curvature of radial level sets.

use nalgebra::{DMatrix, DVector};

use crate::chart::{Chart, ChartKind};
use crate::error::{Error, Result};
use crate::field::{MetricField, SymTensor2Field};
use crate::tensor::{MetricPoint, Tensor3, Tensor4, Variance};

/// Everything the rest of the crate needs about one metric at one point.
pub struct CurvatureData {
    pub point: MetricPoint,
    /// (k, i, j) = d_k g_ij.
    pub dg: Tensor3,
    /// (m, k, i, j) = d_m d_k g_ij.
    pub ddg: Tensor4,
    /// (k, i, j) = Gamma^k_ij.
    pub gamma: Tensor3,
    /// (m, k, i, j) = d_m Gamma^k_ij.
    pub dgamma: Tensor4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

/// Gamma^k_ij = g^kl (d_i g_lj + d_j g_il - d_l g_ij) / 2.
pub fn christoffel(mp: &MetricPoint, dg: &Tensor3) -> Tensor3 {
    let n = mp.dim();
    let mut gamma = Tensor3::zeros(n);
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += mp.inverse[(k, l)]
                        * (dg.get(i, l, j) + dg.get(j, i, l) - dg.get(l, i, j));
                }
                let v = 0.5 * acc;
                gamma.set(k, i, j, v);
                gamma.set(k, j, i, v);
            }
        }
    }
    gamma
}

/// d_m g^kl = -g^ka (d_m g_ab) g^bl.
pub fn inverse_metric_derivatives(mp: &MetricPoint, dg: &Tensor3) -> Tensor3 {
    let n = mp.dim();
    let ginv = &mp.inverse;
    let mut dginv = Tensor3::zeros(n);
    for m in 0..n {
        let dm = dg.slice(m);
        let block = -ginv * dm * ginv;
        for k in 0..n {
            for l in 0..n {
                dginv.set(m, k, l, block[(k, l)]);
            }
        }
    }
    dginv
}

/// d_m Gamma^k_ij.
pub fn christoffel_derivatives(mp: &MetricPoint, dg: &Tensor3, ddg: &Tensor4) -> Tensor4 {
    let n = mp.dim();
    let ginv = &mp.inverse;
    let dginv = inverse_metric_derivatives(mp, dg);
    let mut dgamma = Tensor4::zeros(n);
    for m in 0..n {
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        let sym = dg.get(i, l, j) + dg.get(j, i, l) - dg.get(l, i, j);
                        let dsym =
                            ddg.get(m, i, l, j) + ddg.get(m, j, i, l) - ddg.get(m, l, i, j);
                        acc += dginv.get(m, k, l) * sym + ginv[(k, l)] * dsym;
                    }
                    let v = 0.5 * acc;
                    dgamma.set(m, k, i, j, v);
                    dgamma.set(m, k, j, i, v);
                }
            }
        }
    }
    dgamma
}

/// Ric_ij = d_k Gamma^k_ij - d_i Gamma^k_kj + Gamma^k_kl Gamma^l_ij
///        - Gamma^k_il Gamma^l_kj, symmetrized against roundoff.
pub fn ricci_tensor(gamma: &Tensor3, dgamma: &Tensor4) -> DMatrix<f64> {
    let n = gamma.dim();
    let mut ric = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += dgamma.get(k, k, i, j) - dgamma.get(i, k, k, j);
                for l in 0..n {
                    acc += gamma.get(k, k, l) * gamma.get(l, i, j)
                        - gamma.get(k, i, l) * gamma.get(l, k, j);
                }
            }
            ric[(i, j)] = acc;
        }
    }
    let t = ric.transpose();
    (ric + t) * 0.5
}

pub fn scalar_curvature(mp: &MetricPoint, ricci: &DMatrix<f64>) -> f64 {
    let n = mp.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += mp.inverse[(i, j)] * ricci[(i, j)];
        }
    }
    s
}

/// Full curvature bundle for one metric field at one point.
pub fn curvature_at(metric: &dyn MetricField, x: &[f64]) -> Result<CurvatureData> {
    metric.chart().check_contains(x)?;
    let g = metric.components(x);
    let point = MetricPoint::new(g, x)?;
    let dg = metric.first_derivatives(x);
    let ddg = metric.second_derivatives(x);
    let gamma = christoffel(&point, &dg);
    let dgamma = christoffel_derivatives(&point, &dg, &ddg);
    let ricci = ricci_tensor(&gamma, &dgamma);
    let scalar = scalar_curvature(&point, &ricci);
    Ok(CurvatureData {
        point,
        dg,
        ddg,
        gamma,
        dgamma,
        ricci,
        scalar,
    })
}

/// Covariant Hessian f_;ij = d_i d_j f - Gamma^k_ij d_k f and its trace.
pub fn hessian_laplacian(
    mp: &MetricPoint,
    gamma: &Tensor3,
    grad: &DVector<f64>,
    hess: &DMatrix<f64>,
) -> (DMatrix<f64>, f64) {
    let n = mp.dim();
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = hess[(i, j)];
            for k in 0..n {
                acc -= gamma.get(k, i, j) * grad[k];
            }
            cov[(i, j)] = acc;
        }
    }
    let mut lap = 0.0;
    for i in 0..n {
        for j in 0..n {
            lap += mp.inverse[(i, j)] * cov[(i, j)];
        }
    }
    (cov, lap)
}

/// Divergence of a contravariant symmetric 2-tensor:
/// (div T)^i = d_j T^ij + Gamma^i_jk T^kj + Gamma^j_jk T^ik.
pub fn divergence_contravariant(
    gamma: &Tensor3,
    t: &DMatrix<f64>,
    dt: &Tensor3,
) -> DVector<f64> {
    let n = t.nrows();
    let mut div = DVector::zeros(n);
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += dt.get(j, i, j);
            for k in 0..n {
                acc += gamma.get(i, j, k) * t[(k, j)] + gamma.get(j, j, k) * t[(i, k)];
            }
        }
        div[i] = acc;
    }
    div
}

/// Energy and momentum constraint densities of an initial data set (g, K):
///
///   2 mu = S - |K|^2 + (tr K)^2
///   J^i  = div_j (K^ij - tr K g^ij)
///
/// K is consumed covariant; indices are raised here.
pub struct ConstraintDensities {
    pub mu: f64,
    /// Contravariant momentum density components.
    pub j: DVector<f64>,
    pub k_trace: f64,
    pub k_norm2: f64,
}

pub fn constraint_densities(
    data: &CurvatureData,
    k_field: &dyn SymTensor2Field,
    x: &[f64],
) -> Result<ConstraintDensities> {
    if k_field.variance() != Variance::Covariant {
        return Err(Error::IncompatibleIndex {
            action: "constraint densities",
            expected: Variance::Covariant.label(),
            found: k_field.variance().label(),
        });
    }
    let n = data.point.dim();
    let ginv = &data.point.inverse;
    let k = k_field.components(x);
    let dk = k_field.first_derivatives(x);
    let dginv = inverse_metric_derivatives(&data.point, &data.dg);

    let k_up = ginv * &k * ginv;
    let mut tr = 0.0;
    let mut norm2 = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += ginv[(i, j)] * k[(i, j)];
            norm2 += k_up[(i, j)] * k[(i, j)];
        }
    }

    // U^ij = K^ij - tr K g^ij and its coordinate derivatives
    let u = &k_up - ginv * tr;
    let mut du = Tensor3::zeros(n);
    for m in 0..n {
        let dginv_m = dginv.slice(m);
        let dk_m = dk.slice(m);
        let dk_up = &dginv_m * &k * ginv + ginv * &dk_m * ginv + ginv * &k * &dginv_m;
        let dtr = (&dginv_m * &k).trace() + (ginv * &dk_m).trace();
        let block = dk_up - ginv * dtr - &dginv_m * tr;
        for i in 0..n {
            for j in 0..n {
                du.set(m, i, j, block[(i, j)]);
            }
        }
    }
    let j = divergence_contravariant(&data.gamma, &u, &du);
    let mu = 0.5 * (data.scalar - norm2 + tr * tr);
    Ok(ConstraintDensities {
        mu,
        j,
        k_trace: tr,
        k_norm2: norm2,
    })
}

/// Coordinate gradient and second partials of the chart's radial function.
pub fn radial_gradient_hessian(chart: &Chart, x: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = chart.dim();
    match chart.kind() {
        ChartKind::CartesianEnd => {
            let r = chart.radial(x);
            let mut grad = DVector::zeros(n);
            let mut hess = DMatrix::zeros(n, n);
            for i in 0..n {
                grad[i] = x[i] / r;
                for j in 0..n {
                    let mut v = -x[i] * x[j] / (r * r * r);
                    if i == j {
                        v += 1.0 / r;
                    }
                    hess[(i, j)] = v;
                }
            }
            (grad, hess)
        }
        ChartKind::PolarHyperbolic => {
            let mut grad = DVector::zeros(n);
            grad[0] = 1.0;
            (grad, DMatrix::zeros(n, n))
        }
    }
}

/// Unit normal of the radial level set through x, pointing toward larger
/// radius. Returns contravariant components.
pub fn radial_unit_normal(chart: &Chart, mp: &MetricPoint, x: &[f64]) -> DVector<f64> {
    let (wg, _) = radial_gradient_hessian(chart, x);
    let up = &mp.inverse * &wg;
    let norm = wg.dot(&up).sqrt();
    up / norm
}

/// Mean curvature of the radial level set through x, with respect to the
/// unit normal pointing toward larger radius when `toward_infinity` is true
/// and toward smaller radius otherwise:
///
///   H = div_g(grad w / |grad w|)
///     = Lap_g w / |grad w| - Hess w(grad w, grad w) / |grad w|^3
///
/// for the level function w = radial coordinate.
pub fn mean_curvature(metric: &dyn MetricField, x: &[f64], toward_infinity: bool) -> Result<f64> {
    let data = curvature_at(metric, x)?;
    let (wg, wh) = radial_gradient_hessian(metric.chart(), x);
    let (cov, lap) = hessian_laplacian(&data.point, &data.gamma, &wg, &wh);
    let up = &data.point.inverse * &wg;
    let norm2: f64 = wg.dot(&up);
    let norm = norm2.sqrt();
    let hess_nn = (up.transpose() * &cov * &up)[(0, 0)];
    let h = lap / norm - hess_nn / (norm * norm * norm);
    Ok(if toward_infinity { h } else { -h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::field::{FdMetric, MetricField};
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};

    fn flat3() -> FdMetric<impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync> {
        FdMetric {
            chart: Chart::cartesian_end(3, 0.5).unwrap(),
            f: |_x: &[f64]| DMatrix::identity(3, 3),
        }
    }

    fn hyperbolic3() -> FdMetric<impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync> {
        FdMetric {
            chart: Chart::polar_hyperbolic(3, 0.2).unwrap(),
            f: |x: &[f64]| {
                let sh = x[0].sinh();
                let st = x[1].sin();
                DMatrix::from_diagonal(&DVector::from_vec(vec![
                    1.0,
                    sh * sh,
                    sh * sh * st * st,
                ]))
            },
        }
    }

    fn schwarzschild_isotropic3(m: f64) -> FdMetric<impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync> {
        FdMetric {
            chart: Chart::cartesian_end(3, 0.6 * m).unwrap(),
            f: move |x: &[f64]| {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let u = 1.0 + 0.5 * m / r;
                DMatrix::identity(3, 3) * u.powi(4)
            },
        }
    }

    #[test]
    fn flat_metric_is_flat() {
        let g = flat3();
        let x = [1.0, 2.0, -0.5];
        let d = curvature_at(&g, &x).unwrap();
        assert!(d.gamma.max_abs() < 1e-12);
        assert!(d.ricci.abs().max() < 1e-9);
        assert!(d.scalar.abs() < 1e-9);
    }

    #[test]
    fn hyperbolic_space_curvature() {
        let g = hyperbolic3();
        let x = [1.3, 1.1, 0.4];
        let d = curvature_at(&g, &x).unwrap();
        // Gamma^rho_theta,theta = -sinh rho cosh rho
        let expect = -x[0].sinh() * x[0].cosh();
        assert_abs_diff_eq!(d.gamma.get(0, 1, 1), expect, epsilon = 1e-7);
        // Ric = -(n-1) g with n = 3
        let gm = g.components(&x);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(d.ricci[(i, j)], -2.0 * gm[(i, j)], epsilon = 2e-6);
            }
        }
        assert_abs_diff_eq!(d.scalar, -6.0, epsilon = 2e-6);
    }

    #[test]
    fn hyperbolic_laplacian_of_cosh() {
        // Lap cosh(rho) = n cosh(rho) on n+... here n = 3 factor: 3 cosh(rho)
        let g = hyperbolic3();
        let x = [0.9, 1.3, 2.0];
        let d = curvature_at(&g, &x).unwrap();
        let grad = DVector::from_vec(vec![x[0].sinh(), 0.0, 0.0]);
        let mut hess = DMatrix::zeros(3, 3);
        hess[(0, 0)] = x[0].cosh();
        let (_, lap) = hessian_laplacian(&d.point, &d.gamma, &grad, &hess);
        assert_abs_diff_eq!(lap, 3.0 * x[0].cosh(), epsilon = 1e-7);
    }

    #[test]
    fn schwarzschild_isotropic_is_scalar_flat() {
        let g = schwarzschild_isotropic3(1.0);
        for x in [[2.0, 0.3, -1.0], [0.8, 0.2, 0.1], [5.0, -4.0, 3.0]] {
            let d = curvature_at(&g, &x).unwrap();
            assert!(d.scalar.abs() < 5e-7, "S = {} at {:?}", d.scalar, x);
        }
    }

    #[test]
    fn flat_sphere_mean_curvature() {
        let g = flat3();
        let x = [0.0, 3.0, 4.0]; // r = 5
        let h = mean_curvature(&g, &x, true).unwrap();
        assert_abs_diff_eq!(h, 2.0 / 5.0, epsilon = 1e-9);
        let h_in = mean_curvature(&g, &x, false).unwrap();
        assert_abs_diff_eq!(h_in, -2.0 / 5.0, epsilon = 1e-9);
    }

    #[test]
    fn hyperbolic_sphere_mean_curvature() {
        let g = hyperbolic3();
        let x = [1.0, 0.8, 0.3];
        let h = mean_curvature(&g, &x, true).unwrap();
        assert_abs_diff_eq!(h, 2.0 / 1.0_f64.tanh(), epsilon = 1e-7);
    }

    #[test]
    fn constant_extrinsic_constraints_on_flat_space() {
        // K = delta: tr K = 3, |K|^2 = 3, 2 mu = 0 - 3 + 9, J = 0
        let g = flat3();
        let k = crate::field::FdSymTensor2 {
            chart: Chart::cartesian_end(3, 0.5).unwrap(),
            f: |_x: &[f64]| DMatrix::identity(3, 3),
            variance: Variance::Covariant,
        };
        let x = [1.0, 0.5, -2.0];
        let d = curvature_at(&g, &x).unwrap();
        let c = constraint_densities(&d, &k, &x).unwrap();
        assert_abs_diff_eq!(c.k_trace, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.k_norm2, 3.0, epsilon = 1e-12);
        // mu carries S from the differenced metric: the stencil weights do
        // not sum to zero exactly in floating point, so a constant leaves
        // an O(eps)/h^2 residue in the second derivatives
        assert_abs_diff_eq!(c.mu, 3.0, epsilon = 1e-8);
        assert!(c.j.amax() < 1e-12);
    }

    #[test]
    fn flat_divergence_of_quadratic_tensor() {
        // T^ij = x^i x^j on flat space: (div T)^i = (n + 1) x^i.
        let g = flat3();
        let x = [1.0, -2.0, 0.5];
        let d = curvature_at(&g, &x).unwrap();
        let n = 3;
        let mut t = DMatrix::zeros(n, n);
        let mut dt = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t[(i, j)] = x[i] * x[j];
                for k in 0..n {
                    let mut v = 0.0;
                    if k == i {
                        v += x[j];
                    }
                    if k == j {
                        v += x[i];
                    }
                    dt.set(k, i, j, v);
                }
            }
        }
        let div = divergence_contravariant(&d.gamma, &t, &dt);
        for i in 0..n {
            assert_abs_diff_eq!(div[i], 4.0 * x[i], epsilon = 1e-10);
        }
    }
}
